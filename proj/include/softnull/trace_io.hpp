// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "softnull/channels.hpp"
#include "softnull/errors.hpp"
#include "softnull/matrix.hpp"

// Channel trace file ("SNCT", version 1), little-endian throughout:
//
//   offset 0   magic "SNCT" (4 bytes)
//   offset 4   u32 version = 1
//   offset 8   u32 m_rx
//   offset 12  u32 m_tx
//   offset 16  u32 k_up
//   offset 20  u32 k_down
//   offset 24  u32 n_subcarriers
//   offset 28  per subcarrier, row-major, each entry two f64 (real, imag):
//              h_self (m_rx x m_tx), h_up (m_rx x k_up),
//              h_down (k_down x m_tx), h_usr (k_down x k_up)
//
// An optional sidecar "<stem>.meta" holds UTF-8 "key = value" metadata lines.

namespace softnull {

namespace detail {

inline void put_u32(std::string &buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string &buf, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class TraceReader {
  public:
    TraceReader(const std::string &bytes) : bytes_(bytes) {}

    std::size_t offset() const { return off_; }
    bool exhausted() const { return off_ >= bytes_.size(); }

    std::uint32_t u32(const char *what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[off_ + i]))
                 << (8 * i);
        off_ += 4;
        return v;
    }

    double f64(const char *what) {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[off_ + i]))
                 << (8 * i);
        off_ += 8;
        return std::bit_cast<double>(v);
    }

    void expect_magic(const char *magic) {
        need(4, "magic");
        if (std::memcmp(bytes_.data() + off_, magic, 4) != 0)
            throw trace_parse_error(trace_error_kind::bad_magic, off_,
                                    "trace: bad magic, expected \"SNCT\"");
        off_ += 4;
    }

  private:
    void need(std::size_t n, const char *what) {
        if (off_ + n > bytes_.size())
            throw trace_parse_error(trace_error_kind::truncated, off_,
                                    std::string("trace: truncated while reading ") + what);
    }

    const std::string &bytes_;
    std::size_t off_ = 0;
};

inline void append_matrix(std::string &buf, const ComplexMatrix &m) {
    for (const auto &x : m.data()) {
        put_f64(buf, x.real());
        put_f64(buf, x.imag());
    }
}

inline ComplexMatrix read_matrix(TraceReader &in, std::size_t rows, std::size_t cols,
                                 const char *what) {
    ComplexMatrix m(rows, cols);
    for (auto &x : m.data()) {
        const double re = in.f64(what);
        const double im = in.f64(what);
        x = cxd{re, im};
    }
    return m;
}

} // namespace detail

inline std::string sidecar_path(const std::string &path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of("/\\");
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? path.substr(0, dot) : path) + ".meta";
}

/// Writes a channel trace; every set in the list must share dimensions.
/// h_usr is stored as zeros when absent. Optional metadata goes to the
/// "<stem>.meta" sidecar.
inline void save_trace(const std::string &path, const std::vector<ChannelSet> &sets,
                       const std::map<std::string, std::string> &metadata = {}) {
    std::size_t m_rx = 0, m_tx = 0, k_up = 0, k_down = 0;
    if (!sets.empty()) {
        m_rx = sets.front().h_self.rows();
        m_tx = sets.front().h_self.cols();
        k_up = sets.front().h_up.cols();
        k_down = sets.front().h_down.rows();
    }
    for (const auto &s : sets) {
        const bool ok = s.h_self.rows() == m_rx && s.h_self.cols() == m_tx &&
                        s.h_up.rows() == m_rx && s.h_up.cols() == k_up &&
                        s.h_down.rows() == k_down && s.h_down.cols() == m_tx &&
                        (!s.h_usr || (s.h_usr->rows() == k_down && s.h_usr->cols() == k_up));
        if (!ok)
            throw std::invalid_argument("save_trace: inconsistent matrix dimensions across sets");
    }

    std::string buf;
    buf += "SNCT";
    detail::put_u32(buf, 1);
    detail::put_u32(buf, static_cast<std::uint32_t>(m_rx));
    detail::put_u32(buf, static_cast<std::uint32_t>(m_tx));
    detail::put_u32(buf, static_cast<std::uint32_t>(k_up));
    detail::put_u32(buf, static_cast<std::uint32_t>(k_down));
    detail::put_u32(buf, static_cast<std::uint32_t>(sets.size()));
    for (const auto &s : sets) {
        detail::append_matrix(buf, s.h_self);
        detail::append_matrix(buf, s.h_up);
        detail::append_matrix(buf, s.h_down);
        detail::append_matrix(buf, s.h_usr ? *s.h_usr : ComplexMatrix(k_down, k_up));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("save_trace: cannot open " + path + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out)
        throw std::runtime_error("save_trace: write failed for " + path);

    if (!metadata.empty()) {
        std::ofstream meta(sidecar_path(path), std::ios::trunc);
        if (!meta)
            throw std::runtime_error("save_trace: cannot write metadata sidecar");
        for (const auto &[k, v] : metadata)
            meta << k << " = " << v << "\n";
    }
}

/// Reads a channel trace back; inverse of save_trace (h_usr always present
/// after a round trip, as zeros when it was absent on write).
inline std::vector<ChannelSet> load_trace(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_trace: cannot open " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    detail::TraceReader r(bytes);
    r.expect_magic("SNCT");
    const std::size_t version_off = r.offset();
    const std::uint32_t version = r.u32("version");
    if (version != 1)
        throw trace_parse_error(trace_error_kind::bad_version, version_off,
                                "trace: unsupported version " + std::to_string(version));
    const std::uint32_t m_rx = r.u32("m_rx");
    const std::uint32_t m_tx = r.u32("m_tx");
    const std::uint32_t k_up = r.u32("k_up");
    const std::uint32_t k_down = r.u32("k_down");
    const std::uint32_t n_sub = r.u32("n_subcarriers");

    std::vector<ChannelSet> sets;
    sets.reserve(n_sub);
    for (std::uint32_t s = 0; s < n_sub; ++s) {
        ChannelSet cs;
        cs.subcarrier_index = s;
        cs.h_self = detail::read_matrix(r, m_rx, m_tx, "h_self");
        cs.h_up = detail::read_matrix(r, m_rx, k_up, "h_up");
        cs.h_down = detail::read_matrix(r, k_down, m_tx, "h_down");
        cs.h_usr = detail::read_matrix(r, k_down, k_up, "h_usr");
        sets.push_back(std::move(cs));
    }
    if (!r.exhausted())
        throw trace_parse_error(trace_error_kind::dimension_mismatch, r.offset(),
                                "trace: trailing bytes beyond declared payload");
    return sets;
}

/// Reads the metadata sidecar if present; empty map otherwise.
inline std::map<std::string, std::string> load_trace_metadata(const std::string &path) {
    std::map<std::string, std::string> out;
    std::ifstream in(sidecar_path(path));
    if (!in)
        return out;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

} // namespace softnull
