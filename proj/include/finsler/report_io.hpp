#pragma once

#include "finsler/core.hpp"
#include "finsler/curvature.hpp"
#include "finsler/distance.hpp"
#include "finsler/geodesics.hpp"
#include "finsler/projective.hpp"

#include <nlohmann/json.hpp>

#include <ostream>

namespace finsler {

using Json = nlohmann::ordered_json;

/// Finite values as numbers (shortest round-trip form); inf and nan as the
/// strings "inf", "-inf", "nan".
Json json_number(double v);
Json to_json(const Vector& v);
/// Row-major nested arrays.
Json to_json(const Matrix& m);

Json to_json(const ValidationReport& r);
Json to_json(const CurvatureData& d);
Json to_json(const RicciBoundReport& r);
Json to_json(const RicTransformation& r);
Json to_json(const MobiusTransform& m);
Json to_json(const ChainLink& link);
Json to_json(const Chain& chain);
Json to_json(const PseudoDistanceReport& r);
Json to_json(const SchwarzReport& r);
Json to_json(const CorollaryReport& r);
Json to_json(const PositivityReport& r);
Json to_json(const InvarianceCheck& r);

/// Single-line diagnostic {"error": kind, "message": what}.
Json error_json(const std::string& kind, const std::string& message);

/// Columns s, x0..x{n-1}, v0..v{n-1} at the integrator steps.
void write_geodesic_csv(std::ostream& out, const GeodesicSegment& segment);
/// Columns s, q, w1, w2, pi.
void write_projective_csv(std::ostream& out, const std::vector<ProjectiveParameter::Sample>& rows);
/// Columns u, h.
void write_schwarz_csv(std::ostream& out, const SchwarzReport& r);

}  // namespace finsler
