#include "finsler/cli.hpp"
#include "finsler/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

using finsler::Json;
namespace cli = finsler::cli;

namespace {

struct Options {
  std::string config_path;
  std::string metric_kind;
  std::string metric_json;
  std::optional<int> metric_n;
  std::optional<double> metric_k;
  std::optional<unsigned long long> seed;
  Json params = Json::object();
};

void number(CLI::App* app, Options& o, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_option_function<double>(flag, [&o, key](double v) { o.params[key] = v; }, help);
}

void integer(CLI::App* app, Options& o, const std::string& flag, const std::string& key,
             const std::string& help) {
  app->add_option_function<int>(flag, [&o, key](int v) { o.params[key] = v; }, help);
}

void vector(CLI::App* app, Options& o, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_option_function<std::vector<double>>(
         flag, [&o, key](const std::vector<double>& v) { o.params[key] = v; }, help)
      ->delimiter(',')
      ->allow_extra_args(false);
}

void text(CLI::App* app, Options& o, const std::string& flag, const std::string& key,
          const std::string& help) {
  app->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.params[key] = v; },
                                        help);
}

void toggle(CLI::App* app, Options& o, const std::string& flag, const std::string& key,
            const std::string& help) {
  app->add_flag_function(flag, [&o, key](std::int64_t) { o.params[key] = true; }, help);
}

int fail(const std::string& kind, const std::string& message) {
  std::cerr << finsler::error_json(kind, message).dump() << '\n';
  return cli::kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler geometry: projective parameters, Funk distances and pseudo-distances"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "JSON config with \"metric\", \"command\" and \"seed\"");
  app.add_option("--metric", o.metric_kind,
                 "metric kind: euclidean, klein, funk, interval-funk, randers, riemannian");
  app.add_option("--metric-json", o.metric_json, "full metric spec as a JSON object");
  app.add_option_function<int>("--n", [&o](int v) { o.metric_n = v; }, "dimension of the metric");
  app.add_option_function<double>("--metric-k", [&o](double v) { o.metric_k = v; },
                                   "Funk constant of a funk or interval-funk metric");
  app.add_option_function<unsigned long long>("--seed", [&o](unsigned long long v) { o.seed = v; },
                                              "seed for every random sample");
  text(&app, o, "--output", "output", "write the primary artifact here instead of stdout");
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "homogeneity and strong convexity on random samples");
  integer(validate, o, "--samples", "samples", "number of line elements (100)");
  number(validate, o, "--radius", "radius", "sampling radius (0.5)");

  auto* geodesic = app.add_subcommand("geodesic", "geodesic trace as CSV (initial value or boundary value)");
  vector(geodesic, o, "--x", "x", "start point");
  vector(geodesic, o, "--y", "y", "initial direction");
  number(geodesic, o, "--length", "length", "arc length (negative runs backward)");
  vector(geodesic, o, "--to", "to", "end point: solve the boundary value problem instead");

  auto* curvature = app.add_subcommand("curvature", "Ricci scalar and tensor; optional Ricci bound check");
  vector(curvature, o, "--x", "x", "base point (default: random samples)");
  vector(curvature, o, "--y", "y", "direction");
  integer(curvature, o, "--samples", "samples", "number of random line elements (20)");
  number(curvature, o, "--radius", "radius", "sampling radius (0.5)");
  toggle(curvature, o, "--check-bound", "check_bound", "test Ric_ij <= -c^2 g_ij");
  number(curvature, o, "--c", "c", "constant of the Ricci bound");
  number(curvature, o, "--tolerance", "tolerance", "bound tolerance (1e-4)");
  toggle(curvature, o, "--riemann", "riemann", "include R^i_k");

  auto* projparam = app.add_subcommand("projparam", "projective parameter table (s, q, w1, w2, pi) as CSV");
  vector(projparam, o, "--x", "x", "point on the geodesic");
  vector(projparam, o, "--y", "y", "direction of the geodesic");
  number(projparam, o, "--s0", "s0", "normalization point (arc length)");
  number(projparam, o, "--spacing", "spacing", "table spacing (0.05)");
  number(projparam, o, "--cap", "cap", "extension cap in each direction (50)");

  auto* funk = app.add_subcommand("funk", "Funk metric evaluations and distances");
  toggle(funk, o, "--interval", "interval", "interval Funk metric on (-1, 1)");
  toggle(funk, o, "--ball", "ball", "Funk metric of the unit ball");
  number(funk, o, "--a", "a", "interval distance: start");
  number(funk, o, "--b", "b", "interval distance: end");
  number(funk, o, "--u", "u", "interval metric: point");
  number(funk, o, "--v", "v", "interval metric: velocity");
  number(funk, o, "--k", "k", "Funk constant (1)");
  vector(funk, o, "--x", "x", "ball or config metric: point");
  vector(funk, o, "--y", "y", "ball or config metric: direction (evaluates F)");
  vector(funk, o, "--to", "to", "ball or config metric: end point (evaluates d_F)");

  auto* pseudodist = app.add_subcommand("pseudodist", "upper estimate of the pseudo-distance");
  vector(pseudodist, o, "--x", "x", "start point");
  vector(pseudodist, o, "--to", "to", "end point");
  number(pseudodist, o, "--k", "k", "Funk constant of the interval (1)");
  integer(pseudodist, o, "--segments", "segments", "number of links, 1..4");
  integer(pseudodist, o, "--budget", "budget", "search rounds (8)");
  number(pseudodist, o, "--max-shift", "max_shift", "largest chart translation (15)");
  integer(pseudodist, o, "--multistart", "multistart", "starts per window (3)");
  number(pseudodist, o, "--c", "c", "Ricci bound constant: adds lower bounds and the Schwarz checkers");
  text(pseudodist, o, "--chart", "chart", "checker link chart: base, identity or optimized");
  vector(pseudodist, o, "--grid", "grid", "checker grid on (-1, 1)");
  text(pseudodist, o, "--h-csv", "h_csv", "write h(u) as CSV");

  app.add_subcommand("verify-all", "run the acceptance suite and print a JSON summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  cli::RunConfig config;
  try {
    if (!o.config_path.empty()) config = cli::load_config(o.config_path);
    const std::string command = app.get_subcommands().front()->get_name();
    if (!o.config_path.empty() && config.command != command)
      throw finsler::UsageError("config command '" + config.command + "' differs from '" + command + "'");
    config.command = command;
    for (auto& [key, value] : o.params.items()) config.params[key] = value;
    if (!o.metric_json.empty()) {
      try {
        config.metric = Json::parse(o.metric_json);
      } catch (const Json::parse_error& e) {
        throw finsler::UsageError(std::string("--metric-json: ") + e.what());
      }
    }
    if (!o.metric_kind.empty()) config.metric["kind"] = o.metric_kind;
    if (o.metric_n) config.metric["n"] = *o.metric_n;
    if (o.metric_k) config.metric["k"] = *o.metric_k;
    if (o.seed) config.seed = *o.seed;
  } catch (const finsler::Error& e) {
    return fail(e.kind(), e.what());
  }
  return cli::run(config, std::cout, std::cerr);
}
