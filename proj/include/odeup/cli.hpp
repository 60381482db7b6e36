/**
 * @file cli.hpp
 * @brief Command-line front end: propagate, reference, sweep, demo-fig1,
 * list-problems.
 *
 * Exit codes: 0 success, 1 numerical/runtime failure, 2 usage error.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace odeup::cli {

/// Runs one command. `args` excludes the program name. Tabular output goes to
/// `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odeup::cli
