#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamspec/phase.hpp"
#include "streamspec/spectral_set.hpp"

namespace streamspec {

struct PeriodicPointData {
  Point x;
  double prime_period = 0.0;
  /// ϑ(x) = -(1/𝔭)∫₀^𝔭 ν(Φ(x,s))ds.
  double theta = 0.0;
};

/// Classify x, require a periodic orbit and integrate ν over one period.
/// Throws PreconditionError if x is not Omega3Periodic.
PeriodicPointData periodic_point_data(const ProblemSpec& prob, PointView x,
                                      const ClassificationConfig& cfg = {});
/// Same with a known prime period.
PeriodicPointData periodic_point_data(const ProblemSpec& prob, PointView x, double prime_period,
                                      const FlowOptions& opts);

/// M_λ(x) = exp(-𝔭(x)(λ - ϑ(x))).
Complex m_lambda(const PeriodicPointData& d, Complex lambda);
/// F_k(x) = ϑ(x) + 2πik/𝔭(x).
Complex f_k(const PeriodicPointData& d, long k);

struct EssentialRangeApprox {
  std::vector<Complex> values;
  /// Normalised to sum to 1.
  std::vector<double> weights;
  double bandwidth = 0.0;
  double threshold = 0.0;
  /// Representatives of the clusters whose total weight reaches the
  /// threshold, thinned to one per bandwidth and sorted.
  std::vector<Complex> retained;
};

/// Single-linkage clusters at `bandwidth`; clusters lighter than `threshold`
/// are dropped. Defaults: bandwidth 1e-4·(1 + max|v|), threshold
/// min(2/n, 1). Empty weights mean uniform. Throws PreconditionError on an
/// empty sample or mismatched weights.
EssentialRangeApprox essential_range(const std::vector<Complex>& values,
                                     std::vector<double> weights = {},
                                     std::optional<double> bandwidth = std::nullopt,
                                     std::optional<double> threshold = std::nullopt);

struct CandidateSpectrum {
  SpectralSet set;
  long k_max = 0;
  /// |Im λ| ≤ covered_band is fully represented: 2π(K+1)/max 𝔭.
  double covered_band = 0.0;
  double max_period = 0.0;
  std::size_t sample_size = 0;
  std::optional<double> period_filter;

  nlohmann::json to_json() const;
};

/// Union over |k| ≤ K of the essential range of F_k over the periodic
/// sample, optionally restricted to points with 𝔭 ≤ period_filter. An empty
/// sample gives an empty set with an explanatory note.
CandidateSpectrum candidate_spectrum_per(const std::vector<PeriodicPointData>& sample, long k_max,
                                         std::optional<double> period_filter = std::nullopt);

struct RestSpectrum {
  /// Essential range of -ν over the rest points.
  SpectralSet generator;
  /// exp(t·generator).
  SpectralSet semigroup;
  double t = 1.0;
};

RestSpectrum rest_spectrum(const ProblemSpec& prob, const std::vector<Point>& rest_points,
                           double t = 1.0);

/// Circles |z| = e^{at} for each real a; sorted reals closer than merge_gap
/// are joined into an interval and mapped to an annulus.
SpectralSet annular_hull(std::vector<double> reals, double t, double merge_gap = 0.0);
/// Annuli [e^{lo·t}, e^{hi·t}], overlapping intervals merged.
SpectralSet annular_hull(std::vector<Interval> reals, double t);

struct SmtReport {
  double t = 0.0;
  long k_max = 0;
  /// Distinct points of {e^{ikt} : |k| ≤ K}, ordered by angle in [0, 2π).
  std::vector<Complex> points;
  std::vector<double> angles;
  /// Largest circular gap between consecutive angles (2π for one point).
  double max_gap = 0.0;
  bool collapsed_to_one = false;
  /// The finite image misses part of the circle: exp(tσ) ⊊ 𝕋 = σ(U(t)).
  bool strict_inclusion = false;

  nlohmann::json to_json() const;
};

/// Throws PreconditionError unless t > 0 and K ≥ 0.
SmtReport smt_counterexample_report(double t, long k_max);

/// x1..xN,prime_period,theta
std::string periodic_csv(const std::vector<PeriodicPointData>& data);

}  // namespace streamspec
