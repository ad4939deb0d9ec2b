// Copyright conewalk contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: subcommand parsing, experiment manifests, output
// and plot emission. Exit codes: 0 success, 2 validation/usage error, 3
// statistical-test failure (so CI can gate on the theorems).
#pragma once

#include <string>
#include <vector>

namespace conewalk::cli {

int run(int argc, char const* const* argv);
// Same, without the program name; convenient for in-process tests.
int run(std::vector<std::string> const& args);

}  // namespace conewalk::cli
