#include "finsler/report_io.hpp"

#include "finsler/format.hpp"

#include <cmath>

namespace finsler {

namespace {

void write_row(std::ostream& out, std::initializer_list<double> head, const Vector& a = {},
               const Vector& b = {}) {
  bool first = true;
  auto put = [&](double v) {
    if (!first) out << ',';
    first = false;
    out << format_number(v);
  };
  for (double v : head) put(v);
  for (Eigen::Index i = 0; i < a.size(); ++i) put(a[i]);
  for (Eigen::Index i = 0; i < b.size(); ++i) put(b[i]);
  out << '\n';
}

}  // namespace

Json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json_number(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"max_residual", json_number(c.max_residual)},
                      {"tolerance", json_number(c.tolerance)},
                      {"pass", c.pass}});
  return {{"pass", r.pass()}, {"checks", std::move(checks)}};
}

Json to_json(const CurvatureData& d) {
  Json out = {{"ric", json_number(d.ric)},
              {"ric_tensor", to_json(d.ric_tensor)},
              {"ell", to_json(d.ell)},
              {"contraction_residual", json_number(d.contraction_residual)}};
  if (d.riemann) out["riemann"] = to_json(*d.riemann);
  return out;
}

Json to_json(const RicciBoundReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"x", to_json(s.element.x)},
                       {"y", to_json(s.element.y)},
                       {"max_eigenvalue", json_number(s.max_eigenvalue)}});
  return {{"c", json_number(r.c)},
          {"tolerance", json_number(r.tolerance)},
          {"max_eigenvalue", json_number(r.worst)},
          {"pass", r.pass},
          {"samples", std::move(samples)}};
}

Json to_json(const RicTransformation& r) {
  return {{"P", json_number(r.P)},
          {"lhs", json_number(r.lhs)},
          {"consistent_rhs", json_number(r.consistent_rhs)},
          {"printed_rhs", json_number(r.printed_rhs)},
          {"residual_consistent", json_number(r.residual_consistent)},
          {"residual_printed", json_number(r.residual_printed)}};
}

Json to_json(const MobiusTransform& m) {
  return {json_number(m.a()), json_number(m.b()), json_number(m.c()), json_number(m.d())};
}

Json to_json(const ChainLink& link) {
  return {{"a", json_number(link.a)},
          {"b", json_number(link.b)},
          {"chart", to_json(link.chart)},
          {"s_start", json_number(link.s_start)},
          {"s_end", json_number(link.s_end)},
          {"start", to_json(link.geodesic.position(link.s_start))},
          {"end", to_json(link.geodesic.position(link.s_end))}};
}

Json to_json(const Chain& chain) {
  Json links = Json::array();
  for (const auto& l : chain.links) links.push_back(to_json(l));
  Json waypoints = Json::array();
  for (const auto& w : chain.waypoints) waypoints.push_back(to_json(w));
  return {{"k", json_number(chain.k)},
          {"length", json_number(chain_length(chain))},
          {"links", std::move(links)},
          {"waypoints", std::move(waypoints)}};
}

Json to_json(const PseudoDistanceReport& r) {
  Json out = {{"upper_estimate", json_number(r.estimate)},
              {"base_chart_value", json_number(r.base_chart_value)},
              {"finsler_distance", json_number(r.finsler_distance)},
              {"evaluations", r.evaluations},
              {"rounds", r.rounds}};
  if (r.lower_bound) out["lower_bound"] = json_number(*r.lower_bound);
  if (r.alternate_lower_bound) out["alternate_lower_bound"] = json_number(*r.alternate_lower_bound);
  out["chain"] = to_json(r.best);
  return out;
}

Json to_json(const SchwarzReport& r) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < r.u.size(); ++i)
    rows.push_back({json_number(r.u[i]), json_number(r.h[i])});
  return {{"sup", json_number(r.sup)},
          {"argsup", json_number(r.argsup)},
          {"bound", json_number(r.bound)},
          {"pass", r.pass},
          {"interior_maximum", r.interior_maximum},
          {"diagnosis", r.diagnosis},
          {"h", std::move(rows)}};
}

Json to_json(const CorollaryReport& r) {
  return {{"lhs", json_number(r.lhs)},
          {"finsler_distance", json_number(r.finsler_distance)},
          {"rhs", json_number(r.rhs)},
          {"pass", r.pass},
          {"alternate_rhs", json_number(r.alternate_rhs)},
          {"alternate_pass", r.alternate_pass},
          {"ratio", json_number(r.ratio)}};
}

Json to_json(const PositivityReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"x", to_json(e.x)},
                       {"y", to_json(e.y)},
                       {"upper_estimate", json_number(e.estimate)},
                       {"finsler_distance", json_number(e.finsler_distance)},
                       {"lower_bound", json_number(e.lower_bound)},
                       {"alternate_lower_bound", json_number(e.alternate_lower_bound)},
                       {"positive", e.positive},
                       {"consistent", e.consistent},
                       {"alternate_consistent", e.alternate_consistent}});
  return {{"c", json_number(r.c)},
          {"k", json_number(r.k)},
          {"all_positive", r.all_positive},
          {"all_consistent", r.all_consistent},
          {"all_alternate_consistent", r.all_alternate_consistent},
          {"entries", std::move(entries)}};
}

Json to_json(const InvarianceCheck& r) {
  Json a = Json::array(), b = Json::array();
  for (double v : r.pi_a) a.push_back(json_number(v));
  for (double v : r.pi_b) b.push_back(json_number(v));
  return {{"pi_a", std::move(a)},
          {"pi_b", std::move(b)},
          {"cross_ratio_a", json_number(r.cross_ratio_a)},
          {"cross_ratio_b", json_number(r.cross_ratio_b)},
          {"residual", json_number(r.residual)}};
}

Json error_json(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

void write_geodesic_csv(std::ostream& out, const GeodesicSegment& segment) {
  const int n = segment.dimension();
  out << 's';
  for (int i = 0; i < n; ++i) out << ",x" << i;
  for (int i = 0; i < n; ++i) out << ",v" << i;
  out << '\n';
  for (const auto& s : segment.samples()) write_row(out, {s.s}, s.x, s.velocity);
}

void write_projective_csv(std::ostream& out,
                          const std::vector<ProjectiveParameter::Sample>& rows) {
  out << "s,q,w1,w2,pi\n";
  for (const auto& r : rows) write_row(out, {r.s, r.q, r.w1, r.w2, r.pi});
}

void write_schwarz_csv(std::ostream& out, const SchwarzReport& r) {
  out << "u,h\n";
  for (std::size_t i = 0; i < r.u.size(); ++i) write_row(out, {r.u[i], r.h[i]});
}

}  // namespace finsler
