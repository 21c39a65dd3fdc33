#include "finsler/cli.hpp"

#include "finsler/curvature.hpp"
#include "finsler/distance.hpp"
#include "finsler/errors.hpp"
#include "finsler/format.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/metrics.hpp"
#include "finsler/projective.hpp"
#include "finsler/verification.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace finsler::cli {

namespace {

std::string field_name(const std::string& context, const std::string& key) {
  return context.empty() ? key : context + "." + key;
}

const Json* find(const Json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

double as_number(const Json& v, const std::string& name) {
  if (!v.is_number()) throw UsageError("config field " + name + ": expected a number");
  return v.get<double>();
}

double number(const Json& obj, const std::string& context, const std::string& key) {
  const Json* v = find(obj, key);
  if (!v) throw UsageError("config field " + field_name(context, key) + ": missing");
  return as_number(*v, field_name(context, key));
}

double number(const Json& obj, const std::string& context, const std::string& key,
              double fallback) {
  const Json* v = find(obj, key);
  return v ? as_number(*v, field_name(context, key)) : fallback;
}

int integer(const Json& obj, const std::string& context, const std::string& key, int fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer())
    throw UsageError("config field " + field_name(context, key) + ": expected an integer");
  return v->get<int>();
}

bool flag(const Json& obj, const std::string& context, const std::string& key) {
  const Json* v = find(obj, key);
  if (!v) return false;
  if (!v->is_boolean())
    throw UsageError("config field " + field_name(context, key) + ": expected true or false");
  return v->get<bool>();
}

std::string text(const Json& obj, const std::string& context, const std::string& key,
                 const std::string& fallback) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string())
    throw UsageError("config field " + field_name(context, key) + ": expected a string");
  return v->get<std::string>();
}

Vector as_vector(const Json& v, const std::string& name) {
  if (!v.is_array() || v.empty())
    throw UsageError("config field " + name + ": expected a non-empty array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = as_number(v[i], name + "[" + std::to_string(i) + "]");
  return out;
}

std::optional<Vector> vector_field(const Json& obj, const std::string& context,
                                   const std::string& key) {
  const Json* v = find(obj, key);
  if (!v) return std::nullopt;
  return as_vector(*v, field_name(context, key));
}

Vector required_vector(const Json& obj, const std::string& context, const std::string& key) {
  auto v = vector_field(obj, context, key);
  if (!v) throw UsageError("config field " + field_name(context, key) + ": missing");
  return *v;
}

Matrix matrix_field(const Json& obj, const std::string& context, const std::string& key) {
  const std::string name = field_name(context, key);
  const Json* v = find(obj, key);
  if (!v) throw UsageError("config field " + name + ": missing");
  if (!v->is_array() || v->empty())
    throw UsageError("config field " + name + ": expected an array of rows");
  const auto rows = v->size();
  Matrix m;
  for (std::size_t i = 0; i < rows; ++i) {
    const Vector row = as_vector((*v)[i], name + "[" + std::to_string(i) + "]");
    if (i == 0) m.resize(static_cast<Eigen::Index>(rows), row.size());
    if (row.size() != m.cols()) throw UsageError("config field " + name + ": ragged rows");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

int dimension_field(const Json& obj, const std::string& context) {
  const int n = integer(obj, context, "n", 2);
  if (n < 1) throw UsageError("config field " + field_name(context, "n") + ": must be positive");
  return n;
}

void require_dimension(const FinslerStructure& metric, const Vector& v, const std::string& name) {
  if (v.size() != metric.dimension())
    throw DimensionError(name + " has " + std::to_string(v.size()) + " components, metric " +
                         metric.name() + " has dimension " + std::to_string(metric.dimension()));
}

/// Writes to params.output when given, otherwise to `out`.
template <class Writer>
void emit(const Json& params, std::ostream& out, Writer&& write) {
  const std::string path = text(params, "command", "output", "");
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot open output file " + path);
  write(file);
  if (!file) throw UsageError("failed writing output file " + path);
}

void emit_json(const Json& params, std::ostream& out, const Json& doc) {
  emit(params, out, [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
}

// -------------------------------------------------------------------------
// Commands

int cmd_validate(const RunConfig& cfg, const FinslerStructure& metric, std::ostream& out) {
  const auto& p = cfg.params;
  const int count = integer(p, "command", "samples", 100);
  const double radius = number(p, "command", "radius", 0.5);
  const auto elements = sample_line_elements(metric, static_cast<std::size_t>(count), radius, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> lambda(0.1, 10.0);
  std::vector<HomogeneitySample> homogeneity;
  for (const auto& e : elements) homogeneity.push_back({e.x, e.y, lambda(rng)});
  const auto h = validate_homogeneity(metric, homogeneity);
  const auto c = validate_strong_convexity(metric, elements);
  const bool pass = h.pass() && c.pass();
  emit_json(p, out,
            {{"metric", metric.name()},
             {"samples", elements.size()},
             {"pass", pass},
             {"homogeneity", to_json(h)},
             {"strong_convexity", to_json(c)}});
  return pass ? kExitOk : kExitFlagged;
}

GeodesicOptions geodesic_options(const RunConfig& cfg) {
  GeodesicOptions o;
  o.diff = engine_config(cfg.metric);
  o.boundary_margin = number(cfg.params, "command", "boundary_margin", o.boundary_margin);
  return o;
}

int cmd_geodesic(const RunConfig& cfg, const FinslerStructure& metric, std::ostream& out) {
  const auto& p = cfg.params;
  const Vector x = required_vector(p, "command", "x");
  require_dimension(metric, x, "x");
  Json summary = {{"metric", metric.name()}, {"x", to_json(x)}};
  GeodesicSegment segment;
  if (const auto to = vector_field(p, "command", "to")) {
    require_dimension(metric, *to, "to");
    ConnectOptions options;
    options.geodesic = geodesic_options(cfg);
    const auto bvp = connect(metric, x, *to, options);
    segment = bvp.segment;
    summary["to"] = to_json(*to);
    summary["length"] = json_number(segment.length());
    summary["miss"] = json_number(bvp.miss);
    summary["iterations"] = bvp.iterations;
    summary["initial_velocity"] = to_json(bvp.initial_velocity);
  } else {
    const Vector y = required_vector(p, "command", "y");
    require_dimension(metric, y, "y");
    const double length = number(p, "command", "length", 1.0);
    segment = integrate_geodesic(metric, x, y, length, geodesic_options(cfg));
    summary["y"] = to_json(y);
    summary["s_begin"] = json_number(segment.s_begin());
    summary["s_end"] = json_number(segment.s_end());
    summary["truncated"] = segment.truncated();
    summary["end"] = to_json(segment.position(length >= 0.0 ? segment.s_end() : segment.s_begin()));
  }
  summary["unit_speed_drift"] = json_number(unit_speed_drift(metric, segment));
  summary["steps"] = segment.samples().size();
  if (text(p, "command", "output", "").empty()) {
    write_geodesic_csv(out, segment);
  } else {
    emit(p, out, [&](std::ostream& o) { write_geodesic_csv(o, segment); });
    out << summary.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_curvature(const RunConfig& cfg, const FinslerStructure& metric, std::ostream& out) {
  const auto& p = cfg.params;
  const EngineConfig diff = engine_config(cfg.metric);
  std::vector<LineElement> elements;
  const auto x = vector_field(p, "command", "x");
  const auto y = vector_field(p, "command", "y");
  if (x || y) {
    if (!x || !y) throw UsageError("config field command.x and command.y must be given together");
    require_dimension(metric, *x, "x");
    require_dimension(metric, *y, "y");
    elements.push_back({*x, *y});
  } else {
    elements = sample_line_elements(metric, static_cast<std::size_t>(integer(p, "command", "samples", 20)),
                                    number(p, "command", "radius", 0.5), cfg.seed);
  }
  const bool riemann = flag(p, "command", "riemann");
  Json doc = {{"metric", metric.name()}};
  Json samples = Json::array();
  for (const auto& e : elements) {
    const auto data = ricci_tensor(metric, e.x, e.y, diff, riemann);
    samples.push_back({{"x", to_json(e.x)}, {"y", to_json(e.y)}, {"curvature", to_json(data)}});
  }
  doc["samples"] = std::move(samples);
  int code = kExitOk;
  if (flag(p, "command", "check_bound")) {
    const double c = number(p, "command", "c");
    const auto report =
        check_ricci_bound(metric, elements, c, number(p, "command", "tolerance", 1e-4), diff);
    doc["ricci_bound"] = to_json(report);
    doc["pass"] = report.pass;
    doc["max_eigenvalue"] = json_number(report.worst);
    if (!report.pass) code = kExitFlagged;
  }
  emit_json(p, out, doc);
  return code;
}

int cmd_projparam(const RunConfig& cfg, const FinslerStructure& metric, std::ostream& out) {
  const auto& p = cfg.params;
  const Vector x = required_vector(p, "command", "x");
  const Vector y = required_vector(p, "command", "y");
  require_dimension(metric, x, "x");
  require_dimension(metric, y, "y");
  const auto segment =
      extend_geodesic(metric, x, y, number(p, "command", "cap", 50.0), geodesic_options(cfg));
  ProjectiveOptions options;
  options.diff = engine_config(cfg.metric);
  const auto param = projective_parameter(metric, segment, number(p, "command", "s0", 0.0), options);
  const auto rows = param.table(number(p, "command", "spacing", 0.05));
  if (text(p, "command", "output", "").empty()) {
    write_projective_csv(out, rows);
    return kExitOk;
  }
  emit(p, out, [&](std::ostream& o) { write_projective_csv(o, rows); });
  Json poles = Json::array();
  for (double s : param.poles()) poles.push_back(json_number(s));
  const auto [lo, hi] = param.chart_range();
  out << Json{{"metric", metric.name()},
              {"s_begin", json_number(param.s_begin())},
              {"s_end", json_number(param.s_end())},
              {"poles", std::move(poles)},
              {"chart_range", {json_number(lo), json_number(hi)}},
              {"wronskian_drift", json_number(param.wronskian_drift())},
              {"rows", rows.size()}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int cmd_funk(const RunConfig& cfg, std::ostream& out) {
  const auto& p = cfg.params;
  const double k = number(p, "command", "k", 1.0);
  double value = 0.0;
  if (flag(p, "command", "interval")) {
    if (find(p, "a") || find(p, "b")) {
      value = funk_distance_interval(number(p, "command", "a"), number(p, "command", "b"), k);
    } else {
      value = interval_funk_eval(number(p, "command", "u"), number(p, "command", "v"), k);
    }
  } else {
    std::shared_ptr<FinslerStructure> metric;
    const Vector x = required_vector(p, "command", "x");
    if (flag(p, "command", "ball")) {
      metric = std::make_shared<QuadraticFunkMetric>(
          QuadraticDomainSpec::unit_ball(static_cast<int>(x.size()), k));
    } else {
      if (cfg.metric.empty()) throw UsageError("config field metric: missing (or pass --interval / --ball)");
      metric = make_metric(cfg.metric);
    }
    require_dimension(*metric, x, "x");
    if (const auto to = vector_field(p, "command", "to")) {
      require_dimension(*metric, *to, "to");
      value = finsler_distance(*metric, x, *to);
    } else {
      const Vector y = required_vector(p, "command", "y");
      require_dimension(*metric, y, "y");
      value = metric->evaluate(x, y);
    }
  }
  emit(p, out, [&](std::ostream& o) { o << format_number(value) << '\n'; });
  return kExitOk;
}

int cmd_pseudodist(const RunConfig& cfg, const FinslerStructure& metric, std::ostream& out) {
  const auto& p = cfg.params;
  const Vector x = required_vector(p, "command", "x");
  const Vector to = required_vector(p, "command", "to");
  require_dimension(metric, x, "x");
  require_dimension(metric, to, "to");
  PseudoDistanceOptions options;
  options.k = number(p, "command", "k", options.k);
  options.segments = integer(p, "command", "segments", options.segments);
  options.budget = integer(p, "command", "budget", options.budget);
  options.max_shift = number(p, "command", "max_shift", options.max_shift);
  options.multistart = integer(p, "command", "multistart", options.multistart);
  options.link.projective.diff = engine_config(cfg.metric);
  options.link.connect.geodesic = geodesic_options(cfg);
  if (find(p, "c")) options.c = number(p, "command", "c");
  const auto report = pseudo_distance_upper(metric, x, to, options);
  Json doc = {{"metric", metric.name()}, {"x", to_json(x)}, {"to", to_json(to)}};
  doc["report"] = to_json(report);
  int code = kExitOk;
  if (options.c && x != to) {
    const double c = *options.c;
    const std::string chart = text(p, "command", "chart", "base");
    ChainLink link;
    if (chart == "identity")
      link = make_link(metric, x, to, MobiusTransform::identity(), options.link);
    else if (chart == "base")
      link = make_link(metric, x, to, std::nullopt, options.link);
    else if (chart == "optimized")
      link = report.best.links.front();
    else
      throw UsageError("config field command.chart: expected base, identity or optimized");
    std::vector<double> grid;
    if (const auto g = vector_field(p, "command", "grid")) {
      grid.assign(g->data(), g->data() + g->size());
    } else {
      for (int i = 0; i <= 18; ++i) grid.push_back(-0.9 + 0.1 * i);
    }
    const auto schwarz = schwarz_ratio(metric, link, grid, c, options.k);
    const auto corollary = corollary_check(metric, link, c, options.k);
    const bool positive = report.estimate > 0.0;
    const bool consistent = report.estimate >= *report.lower_bound;
    doc["checkers"] = {{"chart", chart},
                       {"link", to_json(link)},
                       {"schwarz", to_json(schwarz)},
                       {"corollary", to_json(corollary)},
                       {"estimate_positive", positive},
                       {"lower_bound_consistent", consistent},
                       {"alternate_lower_bound_consistent",
                        report.estimate >= *report.alternate_lower_bound}};
    const std::string h_csv = text(p, "command", "h_csv", "");
    if (!h_csv.empty()) {
      std::ofstream file(h_csv);
      if (!file) throw UsageError("cannot open output file " + h_csv);
      write_schwarz_csv(file, schwarz);
    }
    if (!schwarz.pass || !corollary.pass || !positive || !consistent) code = kExitFlagged;
  }
  doc["flagged"] = code == kExitFlagged;
  emit_json(p, out, doc);
  return code;
}

int cmd_verify_all(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto results = verification::run_all(cfg.seed);
  const Json summary = verification::summary_json(results);
  emit_json(cfg.params, out, summary);
  if (summary["pass"].get<bool>()) return kExitOk;
  std::string failed;
  for (const auto& r : results)
    if (!r.pass) failed += (failed.empty() ? "" : ",") + std::to_string(r.id);
  err << error_json("verification", "acceptance criteria failed: " + failed).dump() << '\n';
  return kExitError;
}

}  // namespace

EngineConfig engine_config(const Json& spec) {
  EngineConfig c;
  const Json* d = spec.is_object() ? find(spec, "diff") : nullptr;
  if (!d) return c;
  if (!d->is_object()) throw UsageError("config field metric.diff: expected an object");
  const std::string mode = text(*d, "metric.diff", "mode", "automatic");
  if (mode == "automatic")
    c.mode = DiffMode::automatic;
  else if (mode == "finite-difference")
    c.mode = DiffMode::finite_difference;
  else
    throw UsageError("config field metric.diff.mode: expected automatic or finite-difference");
  c.base_step = number(*d, "metric.diff", "base_step", c.base_step);
  c.richardson_levels = integer(*d, "metric.diff", "richardson_levels", c.richardson_levels);
  c.target_accuracy = number(*d, "metric.diff", "target_accuracy", c.target_accuracy);
  return c;
}

std::shared_ptr<FinslerStructure> make_metric(const Json& spec) {
  const std::string ctx = "metric";
  if (!spec.is_object()) throw UsageError("config field metric: expected an object");
  const std::string kind = text(spec, ctx, "kind", "");
  if (kind.empty()) throw UsageError("config field metric.kind: missing");
  if (kind == "euclidean") return std::make_shared<EuclideanMetric>(dimension_field(spec, ctx));
  if (kind == "klein") return std::make_shared<KleinMetric>(dimension_field(spec, ctx));
  if (kind == "interval-funk")
    return std::make_shared<IntervalFunkMetric>(number(spec, ctx, "k", 1.0));
  if (kind == "funk") {
    const double k = number(spec, ctx, "k", 1.0);
    if (!find(spec, "alpha"))
      return std::make_shared<QuadraticFunkMetric>(
          QuadraticDomainSpec::unit_ball(dimension_field(spec, ctx), k));
    QuadraticDomainSpec q;
    q.alpha = matrix_field(spec, ctx, "alpha");
    q.beta = vector_field(spec, ctx, "beta").value_or(Vector::Zero(q.alpha.rows()));
    q.gamma = number(spec, ctx, "gamma", 1.0);
    q.k = k;
    return std::make_shared<QuadraticFunkMetric>(q);
  }
  if (kind == "randers") {
    RandersSpec r;
    r.a = matrix_field(spec, ctx, "a");
    r.b0 = vector_field(spec, ctx, "b0").value_or(Vector::Zero(r.a.rows()));
    if (find(spec, "b_linear")) r.b_linear = matrix_field(spec, ctx, "b_linear");
    if (flag(spec, ctx, "unchecked")) return RandersMetric::unchecked(r);
    return std::make_shared<RandersMetric>(r);
  }
  if (kind == "riemannian") {
    const Matrix g = matrix_field(spec, ctx, "g");
    if (g.rows() != g.cols()) throw UsageError("config field metric.g: expected a square matrix");
    const auto n = g.rows();
    RiemannianSpec r;
    r.dimension = static_cast<int>(n);
    r.tensor = [g](const Vector&) { return g; };
    r.christoffel = [n](const Vector&) { return std::vector<Matrix>(n, Matrix::Zero(n, n)); };
    return std::make_shared<RiemannianMetric>(r);
  }
  throw UsageError("config field metric.kind: unknown kind '" + kind + "'");
}

RunConfig parse_config(const Json& document) {
  if (!document.is_object()) throw UsageError("config: expected a JSON object at top level");
  RunConfig cfg;
  if (const Json* m = find(document, "metric")) {
    if (!m->is_object()) throw UsageError("config field metric: expected an object");
    cfg.metric = *m;
  }
  const Json* c = find(document, "command");
  if (!c) throw UsageError("config field command: missing");
  if (c->is_string()) {
    cfg.command = c->get<std::string>();
  } else if (c->is_object()) {
    cfg.command = text(*c, "command", "name", "");
    cfg.params = *c;
    cfg.params.erase("name");
  } else {
    throw UsageError("config field command: expected a name or an object");
  }
  if (cfg.command.empty()) throw UsageError("config field command.name: missing");
  if (const Json* s = find(document, "seed")) {
    if (!s->is_number_integer() || s->get<long long>() < 0) throw UsageError("config field seed: expected a non-negative integer");
    cfg.seed = s->get<unsigned long long>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open config file " + path);
  try {
    return parse_config(Json::parse(file));
  } catch (const Json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string& cmd = config.command;
    if (cmd == "funk") return cmd_funk(config, out);
    if (cmd == "verify-all") return cmd_verify_all(config, out, err);
    const bool known = cmd == "validate" || cmd == "geodesic" || cmd == "curvature" ||
                       cmd == "projparam" || cmd == "pseudodist";
    if (!known) throw UsageError("unknown command '" + cmd + "'");
    if (config.metric.empty()) throw UsageError("config field metric: missing");
    const auto metric = make_metric(config.metric);
    if (cmd == "validate") return cmd_validate(config, *metric, out);
    if (cmd == "geodesic") return cmd_geodesic(config, *metric, out);
    if (cmd == "curvature") return cmd_curvature(config, *metric, out);
    if (cmd == "projparam") return cmd_projparam(config, *metric, out);
    return cmd_pseudodist(config, *metric, out);
  } catch (const Error& e) {
    err << error_json(e.kind(), e.what()).dump() << '\n';
  } catch (const Json::exception& e) {
    err << error_json("usage", e.what()).dump() << '\n';
  } catch (const std::exception& e) {
    err << error_json("internal", e.what()).dump() << '\n';
  }
  return kExitError;
}

}  // namespace finsler::cli
