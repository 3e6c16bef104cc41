#pragma once

// JSON views of results. Keys are emitted in a fixed order so that equal
// results give byte-identical documents.

#include <cmath>
#include <string>

#include <json.hpp>

#include "dimest/boxcount.hpp"
#include "dimest/correlation.hpp"
#include "dimest/expfit.hpp"
#include "dimest/flatten.hpp"
#include "dimest/synth.hpp"

namespace dimest {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json fit_json(const SlopeFit& fit) {
  return Json{{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r2", fit.r_squared},
              {"window", Json::array({fit.first, fit.last})}};
}

template <class Flags>
Json flags_json(const Flags& flags) {
  Json out = Json::array();
  for (auto f : flags) out.push_back(std::string(to_string(f)));
  return out;
}

}  // namespace detail

inline Json to_json(const MinkowskiEstimate& est) {
  Json entries = Json::array();
  for (std::size_t k = 0; k < est.curve.entries.size(); ++k) {
    Json e{{"r", est.curve.entries[k].r}, {"n", est.curve.entries[k].occupied}};
    if (est.correction == CountCorrection::occupancy) {
      const double y = est.fitted_log_counts[k];
      e["n_est"] = std::isnan(y) ? Json(nullptr) : Json(std::exp(y));
    }
    entries.push_back(std::move(e));
  }
  Json out;
  out["method"] = "minkowski";
  out["entries"] = std::move(entries);
  out["fit"] = detail::fit_json(est.fit);
  out["flags"] = detail::flags_json(est.flags);
  out["dimension"] = est.dimension;
  out["correction"] = std::string(to_string(est.correction));
  out["n_points"] = est.curve.n_points;
  out["anchor"] = est.curve.anchor;
  out["r_saturation_hint"] = est.curve.r_saturation ? Json(*est.curve.r_saturation) : Json(nullptr);
  return out;
}

inline Json to_json(const CorrelationCurve& curve) {
  Json entries = Json::array();
  for (const auto& e : curve.entries) entries.push_back(Json{{"r", e.r}, {"rho", e.rho}, {"pairs", e.pairs}});
  Json out;
  out["method"] = "correlation";
  out["entries"] = std::move(entries);
  out["fit"] = detail::fit_json(curve.fit);
  out["flags"] = detail::flags_json(curve.flags);
  out["dimension"] = curve.dimension;
  out["points_used"] = curve.points_used;
  out["subsampled"] = curve.subsampled;
  return out;
}

inline Json to_json(const UniformityReport& report) {
  return Json{{"n_directions", report.n_directions},
              {"reference", kSymmetryReference},
              {"max_ks", report.max_ks},
              {"threshold", report.threshold},
              {"passed", report.passed},
              {"per_direction_ks", report.per_direction_ks},
              {"norm_mean", report.norm_mean},
              {"norm_std", report.norm_std}};
}

inline Json to_json(const DimensionScanResult& scan) {
  Json n = Json::array(), a1_sq = Json::array(), a2 = Json::array(), ks = Json::array(), ratio = Json::array(),
       lambda = Json::array();
  for (const auto& c : scan.candidates) {
    n.push_back(c.n);
    a1_sq.push_back(detail::number_or_null(c.a1_squared));
    a2.push_back(detail::number_or_null(c.a2));
    ks.push_back(c.ks);
    ratio.push_back(detail::number_or_null(c.moment_ratio));
    lambda.push_back(detail::number_or_null(c.lambda_hat));
  }
  Json out;
  out["n"] = std::move(n);
  out["a1_squared"] = std::move(a1_sq);
  out["a2"] = std::move(a2);
  out["ks"] = std::move(ks);
  out["moment_ratio"] = std::move(ratio);
  out["lambda_hat"] = std::move(lambda);
  out["selected_n"] = scan.selected_n ? Json(*scan.selected_n) : Json(nullptr);
  out["confidence"] = std::string(to_string(scan.confidence));
  out["moment_tolerance"] = scan.moment_tolerance;
  out["zero_fraction"] = scan.zero_fraction;
  out["warnings"] = detail::flags_json(scan.warnings);
  return out;
}

inline Json to_json(const ProbabilisticResult& result) {
  Json out;
  out["method"] = "probabilistic";
  out["scan"] = to_json(result.scan);
  out["distances_on"] = result.flattened ? "flattened" : "original";
  out["symmetry"] = result.symmetry ? to_json(*result.symmetry) : Json(nullptr);
  out["near_duplicate_count"] = result.near_duplicate_count;
  out["near_duplicate_fraction"] = result.near_duplicate_fraction;
  return out;
}

inline Json to_json(const GeneratorSpec& spec) {
  return Json{{"kind", std::string(to_string(spec.kind))},
              {"intrinsic_dim", spec.intrinsic_dim},
              {"ambient_dim", spec.ambient_dim},
              {"n_samples", spec.n_samples},
              {"seed", spec.seed},
              {"identity_embedding", spec.identity_embedding}};
}

/// Two-space indented document with a trailing newline.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dimest
