// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#include "softnull/cli.hpp"

int main(int argc, char **argv) { return softnull::cli_main(argc, argv); }
