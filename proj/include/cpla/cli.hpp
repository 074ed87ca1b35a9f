// SPDX-License-Identifier: Apache-2.0
/**
 * @file   cli.hpp
 * @brief  Command-line front end. Subcommands: simulate, train-lan, link,
 *         trim, eval, study, fixture, recall.
 *
 * Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
 * Log verbosity is read from CPLA_LOG_LEVEL (quiet, error, warn, info,
 * debug); the default is warn.
 */
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cpla::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace cpla::cli
