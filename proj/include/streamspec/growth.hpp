#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamspec/flow.hpp"
#include "streamspec/parallel.hpp"
#include "streamspec/semigroup.hpp"
#include "streamspec/spectral_set.hpp"

namespace streamspec {

struct GrowthConfig {
  FlowOptions flow{};
  /// τ₋ is searched up to this time; beyond it a point counts as admissible
  /// for every t in the grid. Unset: the last grid time.
  std::optional<double> tau_horizon;
};

struct GrowthEstimate {
  std::vector<double> t_grid;
  /// inf over admissible x of t⁻¹∫₀ᵗ Σ_p; +∞ where nothing is admissible.
  std::vector<double> inf_avg;
  std::vector<long> admissible_counts;
  /// Mean of the finite inf_avg entries in the last quartile of the grid;
  /// +∞ when the admissible set is empty there.
  double gamma_hat = 0.0;
  /// The admissible set is empty over the whole last quartile.
  bool nilpotent = false;
  /// Some grid time in the last quartile had no admissible point.
  bool censored = false;
  /// -1 for γ₁ (backward averages), +1 for γ₂ (forward averages).
  int direction = 0;

  nlohmann::json to_json() const;
  /// t,inf_avg,count
  std::string to_csv() const;
};

/// γ₁: backward averages over Ω₁ sample points with t < τ₋(x).
/// Throws EmptyClassError on an empty sample and PreconditionError if the
/// grid is not positive and strictly increasing.
GrowthEstimate gamma1_estimate(const ProblemSpec& prob, const std::vector<Point>& sample,
                               const std::vector<double>& t_grid, const GrowthConfig& cfg = {},
                               Execution exec = Execution::parallel);

/// γ₂: forward averages over Ω₂ sample points with t < τ₋(x).
GrowthEstimate gamma2_estimate(const ProblemSpec& prob, const std::vector<Point>& sample,
                               const std::vector<double>& t_grid, const GrowthConfig& cfg = {},
                               Execution exec = Execution::parallel);

/// n evenly spaced times in (0, t_max].
std::vector<double> uniform_grid(double t_max, int n);

struct AssembledSpectrum {
  double gamma = 0.0;
  SpectralSet generator;
  SpectralSet semigroup;
  bool nilpotent = false;
};

/// γ = min of the finite inputs; generator {Re λ ≤ -γ}, semigroup
/// {|ξ| ≤ e^{-γt}}. All-infinite inputs give the empty generator spectrum and
/// semigroup spectrum {0}. Throws CompositionRequiredError if omega3_fraction > 0.
AssembledSpectrum assemble_spectrum(std::optional<double> gamma1, std::optional<double> gamma2,
                                    double omega3_fraction, double t);

/// Least-squares slope of log‖U(t)‖ against t over the last half of the
/// grid. Zero norms are skipped. Throws NumericalError with fewer than three
/// usable tail points.
double type_estimate(const std::vector<double>& t_grid, const std::vector<double>& norms);
double type_estimate(const std::vector<NormEstimate>& table);

/// Draw a pool of pool_factor·n points, then keep n of them with
/// probability proportional to min(τ₋, horizon): admissibility at large t
/// needs points far from the incoming boundary.
std::vector<Point> deep_sample(const ProblemSpec& prob, PointSampler& sampler, int n,
                               double horizon, int pool_factor = 4, std::uint64_t seed = 17,
                               const FlowOptions& opts = {});

}  // namespace streamspec
