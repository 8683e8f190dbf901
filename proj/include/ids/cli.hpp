// Copyright 2026 The IDS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace ids::cli {

// Exit codes: 0 success, 2 configuration validation failure, 3 provider
// failure (including partially aborted runs, which are resumable).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitProvider = 3;

int run_main(int argc, const char* const* argv);

}  // namespace ids::cli
