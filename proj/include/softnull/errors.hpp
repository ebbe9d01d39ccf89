// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softnull {

/// Iterative numerical procedure failed (e.g. SVD did not converge).
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string &what) : std::runtime_error(what) {}
};

/// A matrix required to have full (row/column) rank is rank deficient.
class rank_error : public numerical_error {
  public:
    explicit rank_error(const std::string &what) : numerical_error(what) {}
};

/// Requested scenario is infeasible (e.g. more users than effective antennas).
class capability_error : public std::runtime_error {
  public:
    explicit capability_error(const std::string &what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent experiment configuration (bad key, bad value,
/// missing file, infeasible combination detectable before running).
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string &what) : std::runtime_error(what) {}
};

enum class trace_error_kind { bad_magic, bad_version, truncated, dimension_mismatch };

/// Malformed channel-trace file. Carries the byte offset of the defect.
class trace_parse_error : public std::runtime_error {
  public:
    trace_parse_error(trace_error_kind kind, std::size_t offset, const std::string &what)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
          kind_(kind), offset_(offset) {}

    trace_error_kind kind() const { return kind_; }
    std::size_t offset() const { return offset_; }

  private:
    trace_error_kind kind_;
    std::size_t offset_;
};

} // namespace softnull
