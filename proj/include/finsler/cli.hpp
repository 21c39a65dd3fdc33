#pragma once

#include "finsler/core.hpp"
#include "finsler/diffengine.hpp"
#include "finsler/report_io.hpp"

#include <memory>
#include <optional>
#include <ostream>
#include <string>

namespace finsler::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFlagged = 2;

/// A parsed run: metric spec, command name with its parameters, and the seed
/// that fixes every random sample.
struct RunConfig {
  Json metric = Json::object();
  std::string command;
  Json params = Json::object();
  unsigned long long seed = 1;
};

/// From {"metric": {...}, "command": {"name": ..., ...}, "seed": ...}.
/// UsageError naming the offending field.
RunConfig parse_config(const Json& document);
/// Reads and parses a JSON config file; syntax errors report line and column.
RunConfig load_config(const std::string& path);

/// Metric from its spec. Kinds: euclidean {n}, klein {n}, funk {alpha, beta,
/// gamma, k} or {n, k} for the unit ball, interval-funk {k}, randers {a, b0,
/// b_linear}, riemannian {g} (constant tensor).
std::shared_ptr<FinslerStructure> make_metric(const Json& spec);
/// Optional "diff": {"mode": "automatic" | "finite-difference", "base_step",
/// "richardson_levels", "target_accuracy"} of a metric spec.
EngineConfig engine_config(const Json& spec);

/// Executes one command. The primary artifact goes to params["output"] when
/// given, otherwise to `out`; errors are printed to `err` as single-line JSON.
/// Returns kExitOk, kExitFlagged (a report-only check flagged a violation) or
/// kExitError.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace finsler::cli
