#pragma once

#include "l1lab/scenario.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace l1lab::cli {

/// Exit-code contract:
///   0 = success / all verifications passed
///   1 = a verification or expected-block failure (the math disagrees)
///   2 = configuration, parse, usage or I/O error (the input is malformed)
constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitUsage = 2;

/// Parse and execute one command. `args` excludes the program name.
/// Never throws; never returns anything outside {0, 1, 2}.
int dispatch(const std::vector<std::string>& args);

/// Orbit trace as CSV: header `step,displacement,value_0,...,value_{n-1}`,
/// one row per recorded point, numbers exact (terminating decimal or p/q).
/// The displacement cell of row 0 is empty.
void write_trace_csv(const OrbitTrace& trace, const std::filesystem::path& path);

} // namespace l1lab::cli
