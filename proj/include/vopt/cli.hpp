#pragma once

// Command-line surface: solve, moduli, certify, reproduce.
//
// Exit codes: 0 clean, 1 usage/config, 2 indeterminate verdicts,
// 3 internal numerical failure.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace vopt::cli {

enum ExitCode : int { Ok = 0, Usage = 1, Indeterminate = 2, Numerical = 3 };

/// Doubles as JSON numbers; +/-infinity and NaN as strings.
nlohmann::json number(double v);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Per-example reproduction bundle (the payload of `reproduce`).
nlohmann::json reproduce(const std::string& example, std::uint64_t seed);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace vopt::cli
