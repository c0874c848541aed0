// Copyright 2026 The lmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace lmc::cli {

/// Entry point of the lmc tool. Exit codes: 0 success, 1 usage error,
/// 2 data/format error, 3 capability error (codec not in this build).
/// Human-readable summaries go to `err` (stderr in main); machine
/// reports go to the --report path.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lmc::cli
