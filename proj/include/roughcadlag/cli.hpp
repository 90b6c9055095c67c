#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughcadlag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand (simulate, lift, pvar, rate, verify, reparam, report).
/// `args` excludes the program name. Outputs without an --out file go to
/// `out`; any failure writes one `error=<kind> ... reason="..."` line to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roughcadlag::cli
