#pragma once

/// @file cli_app.h
/// @brief Command-line entry point, callable in-process.
///
/// Commands: run, segment, analyze, script, story, render, assemble, resume,
/// serve-mock. Exit codes: 0 success, 1 pipeline or backend error, 2 usage or
/// configuration error. With --json, success summaries go to stdout and
/// errors to stderr as {"error": {"code", "message", "details"?}}.

#include <ostream>
#include <string>
#include <vector>

namespace mvgen {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvgen
