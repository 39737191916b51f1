// Copyright 2026 The fnvcg Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fnvcg::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFalsified = 1;  // counterexample, beneficial attack, or unverified
inline constexpr int kUsage = 2;

// Runs one command; argv excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1..5", "3,5,7" or "4".
std::vector<int> parse_int_list(const std::string& text);

}  // namespace fnvcg::cli
