#include <doctest.h>

#include "finsler/cli.hpp"
#include "finsler/errors.hpp"
#include "finsler/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace finsler;
using cli::RunConfig;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& command, Json params, Json metric = Json::object(),
            unsigned long long seed = 1) {
  RunConfig cfg;
  cfg.command = command;
  cfg.params = std::move(params);
  cfg.metric = std::move(metric);
  cfg.seed = seed;
  std::ostringstream out, err;
  const int code = cli::run(cfg, out, err);
  return {code, out.str(), err.str()};
}

const Json klein = {{"kind", "klein"}, {"n", 2}};

void check_single_line_error(const Outcome& o, const std::string& kind) {
  CHECK(o.code == cli::kExitError);
  CHECK(o.out.empty());
  REQUIRE(!o.err.empty());
  CHECK(o.err.find('\n') == o.err.size() - 1);
  const Json e = Json::parse(o.err);
  CHECK(e["error"] == kind);
  CHECK(!e["message"].get<std::string>().empty());
}

}  // namespace

TEST_CASE("funk command evaluates interval distances and metrics") {
  auto o = run("funk", {{"interval", true}, {"a", 0.0}, {"b", 0.5}, {"k", 1.0}});
  CHECK(o.code == 0);
  CHECK(std::abs(std::stod(o.out) - std::log(2.0)) <= 1e-15);
  CHECK(o.out.rfind("0.693147180559945", 0) == 0);
  o = run("funk", {{"interval", true}, {"u", 0.5}, {"v", -1.0}});
  CHECK(std::stod(o.out) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  o = run("funk", {{"ball", true}, {"x", {0.5, 0.0}}, {"y", {1.0, 0.0}}});
  CHECK(std::abs(std::stod(o.out) - 2.0) <= 1e-12);
  o = run("funk", {{"ball", true}, {"x", {0.5, 0.0}}, {"to", {0.0, 0.0}}});
  CHECK(std::abs(std::stod(o.out) - std::log(1.5)) <= 1e-6);
  o = run("funk", {{"x", {0.0, 0.0}}, {"to", {0.5, 0.0}}}, klein);
  CHECK(std::abs(std::stod(o.out) - std::atanh(0.5)) <= 1e-6);
  check_single_line_error(run("funk", {{"interval", true}, {"a", 1.0}, {"b", 0.0}}), "domain");
}

TEST_CASE("curvature command checks the Ricci bound") {
  const auto o = run("curvature", {{"check_bound", true}, {"c", 1.0}}, klein);
  CHECK(o.code == cli::kExitOk);
  const Json doc = Json::parse(o.out);
  CHECK(doc["pass"] == true);
  CHECK(std::abs(doc["max_eigenvalue"].get<double>()) <= 1e-8);
  CHECK(doc["samples"].size() == 20);
  const auto strict = run("curvature", {{"check_bound", true}, {"c", 1.1}}, klein);
  CHECK(strict.code == cli::kExitFlagged);
  CHECK(Json::parse(strict.out)["pass"] == false);
  const auto single = run("curvature", {{"x", {0.1, 0.2}}, {"y", {1.0, 0.0}}, {"riemann", true}}, klein);
  const Json s = Json::parse(single.out)["samples"][0]["curvature"];
  CHECK(s["ric"].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(s.contains("riemann"));
  check_single_line_error(run("curvature", {{"x", {0.1, 0.2}}}, klein), "usage");
}

TEST_CASE("validate command flags a non-convex Randers metric") {
  const auto ok = run("validate", {{"samples", 50}}, klein);
  CHECK(ok.code == cli::kExitOk);
  CHECK(Json::parse(ok.out)["pass"] == true);
  const Json randers = {{"kind", "randers"},
                        {"a", {{1.0, 0.0}, {0.0, 1.0}}},
                        {"b0", {1.5, 0.0}},
                        {"unchecked", true}};
  const auto bad = run("validate", {{"samples", 50}}, randers);
  CHECK(bad.code == cli::kExitFlagged);
  CHECK(Json::parse(bad.out)["strong_convexity"]["pass"] == false);
  Json checked = randers;
  checked.erase("unchecked");
  check_single_line_error(run("validate", Json::object(), checked), "construction");
}

TEST_CASE("geodesic and projparam commands write CSV") {
  auto o = run("geodesic", {{"x", {0.0, 0.0}}, {"y", {1.0, 0.0}}, {"length", 0.5}}, klein);
  CHECK(o.code == 0);
  CHECK(o.out.rfind("s,x0,x1,v0,v1\n", 0) == 0);
  const auto last = o.out.substr(o.out.rfind('\n', o.out.size() - 2) + 1);
  CHECK(std::stod(last.substr(last.find(',') + 1)) == doctest::Approx(std::tanh(0.5)).epsilon(1e-10));

  const auto path = (std::filesystem::temp_directory_path() / "finsler_trace.csv").string();
  o = run("geodesic", {{"x", {0.0, 0.0}}, {"to", {0.5, 0.0}}, {"output", path}}, klein);
  const Json summary = Json::parse(o.out);
  CHECK(summary["length"].get<double>() == doctest::Approx(std::atanh(0.5)).epsilon(1e-8));
  std::ifstream file(path);
  std::string header;
  std::getline(file, header);
  CHECK(header == "s,x0,x1,v0,v1");

  o = run("projparam", {{"x", {0.0, 0.0}}, {"y", {1.0, 0.0}}, {"spacing", 0.5}}, klein);
  CHECK(o.out.rfind("s,q,w1,w2,pi\n", 0) == 0);
  std::istringstream rows(o.out);
  std::string line;
  std::getline(rows, line);
  int checked = 0;
  while (std::getline(rows, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    if (std::abs(v[0]) < 6.0) {
      CHECK(v[1] == doctest::Approx(-2.0).epsilon(1e-8));
      CHECK(std::abs(v[4] - std::tanh(v[0])) <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("pseudodist command reports checkers with exit code 2") {
  const Json params = {{"x", {0.0, 0.0}}, {"to", {0.5, 0.0}}, {"c", 1.0}, {"chart", "identity"}};
  const auto o = run("pseudodist", params, klein);
  CHECK(o.code == cli::kExitFlagged);
  const Json doc = Json::parse(o.out);
  CHECK(doc["flagged"] == true);
  CHECK(doc["report"]["lower_bound"].get<double>() == doctest::Approx(2.0 * std::atanh(0.5)));
  const auto& c = doc["checkers"]["corollary"];
  CHECK(c["lhs"].get<double>() == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(c["pass"] == false);
  CHECK(c["alternate_pass"] == true);
  CHECK(doc["checkers"]["schwarz"]["diagnosis"] == "no interior maximum");

  const auto plain = run("pseudodist", {{"x", {0.0, 0.0}}, {"to", {0.5, 0.0}}}, klein);
  CHECK(plain.code == cli::kExitOk);
  CHECK(Json::parse(plain.out)["report"]["base_chart_value"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-5));
  check_single_line_error(run("pseudodist", params, {{"kind", "euclidean"}, {"n", 2}}),
                          "hypothesis-not-satisfied");
}

TEST_CASE("outputs are byte-identical for identical config and seed") {
  const Json params = {{"x", {0.1, -0.2}}, {"to", {-0.3, 0.4}}, {"c", 1.0}};
  const auto a = run("pseudodist", params, klein);
  const auto b = run("pseudodist", params, klein);
  CHECK(a.out == b.out);
  const auto c1 = run("curvature", {{"samples", 8}}, klein, 7);
  setenv("FINSLER_THREADS", "1", 1);
  const auto c2 = run("curvature", {{"samples", 8}}, klein, 7);
  unsetenv("FINSLER_THREADS");
  CHECK(c1.out == c2.out);
  CHECK(run("curvature", {{"samples", 8}}, klein, 8).out != c1.out);
}

TEST_CASE("every error path prints one line of JSON") {
  check_single_line_error(run("nonsense", Json::object(), klein), "usage");
  check_single_line_error(run("curvature", Json::object()), "usage");
  check_single_line_error(run("curvature", Json::object(), {{"kind", "hyperbolic"}}), "usage");
  check_single_line_error(run("funk", {{"ball", true}, {"x", {2.0, 0.0}}, {"y", {1.0, 0.0}}}), "domain");
  check_single_line_error(run("geodesic", {{"x", {0.0, 0.0, 0.0}}, {"y", {1.0, 0.0, 0.0}}}, klein),
                          "dimension");
  check_single_line_error(run("curvature", {{"samples", "many"}}, klein), "usage");
}

TEST_CASE("config parsing") {
  const Json doc = {{"metric", {{"kind", "funk"}, {"alpha", {{-1.0, 0.0}, {0.0, -2.0}}}, {"k", 2.0}}},
                    {"command", {{"name", "curvature"}, {"samples", 3}}},
                    {"seed", 42}};
  const auto cfg = cli::parse_config(doc);
  CHECK(cfg.command == "curvature");
  CHECK(cfg.seed == 42);
  CHECK(cfg.params["samples"] == 3);
  CHECK_FALSE(cfg.params.contains("name"));
  const auto metric = cli::make_metric(cfg.metric);
  CHECK(metric->name() == "funk");
  CHECK(metric->evaluate(Vector::Zero(2), Vector::Unit(2, 0)) == doctest::Approx(0.5));

  CHECK_THROWS_WITH_AS(cli::parse_config({{"metric", klein}}), doctest::Contains("command"), UsageError);
  CHECK_THROWS_WITH_AS(cli::parse_config({{"command", "funk"}, {"seed", -1}}), doctest::Contains("seed"),
                       UsageError);
  CHECK_THROWS_WITH_AS(cli::make_metric({{"kind", "randers"}, {"a", {{1.0, 0.0}, {0.0}}}}),
                       doctest::Contains("metric.a"), UsageError);

  const auto path = (std::filesystem::temp_directory_path() / "finsler_bad_config.json").string();
  std::ofstream(path) << "{\n  \"command\": \"funk\",\n  \"seed\": oops\n}\n";
  CHECK_THROWS_WITH_AS(cli::load_config(path), doctest::Contains("line 3"), UsageError);

  const auto riemannian = cli::make_metric({{"kind", "riemannian"}, {"g", {{4.0, 0.0}, {0.0, 1.0}}}});
  CHECK(riemannian->evaluate(Vector::Zero(2), Vector::Unit(2, 0)) == doctest::Approx(2.0));
  const auto fd = cli::engine_config({{"kind", "klein"}, {"diff", {{"mode", "finite-difference"}}}});
  CHECK(fd.mode == DiffMode::finite_difference);
}

TEST_CASE("parallel_map keeps index order and rethrows the lowest failure") {
  setenv("FINSLER_THREADS", "4", 1);
  CHECK(thread_count() == 4);
  const auto squares = parallel_map(1000, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < squares.size(); ++i) CHECK(squares[i] == i * i);
  CHECK_THROWS_WITH(parallel_map(100,
                                 [](std::size_t i) -> int {
                                   if (i % 10 == 7) throw std::runtime_error(std::to_string(i));
                                   return 0;
                                 }),
                    "7");
  setenv("FINSLER_THREADS", "zero", 1);
  CHECK(thread_count() >= 1);
  unsetenv("FINSLER_THREADS");
  CHECK(json_number(INFINITY) == "inf");
  CHECK(json_number(-INFINITY) == "-inf");
  CHECK(json_number(NAN) == "nan");
  CHECK(json_number(0.1).get<double>() == 0.1);
}
