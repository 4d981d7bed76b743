#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "streamspec/flow.hpp"
#include "streamspec/parallel.hpp"
#include "streamspec/phase.hpp"

namespace streamspec {

using Complex = std::complex<double>;
using PointFunction = std::function<Complex(PointView)>;

/// Discrete stand-in for f ∈ Lᵖ(Ω): values at points with quadrature weights.
struct GridFunction {
  std::vector<Point> points;
  std::vector<Complex> values;
  std::vector<double> weights;
  double p = 1.0;

  /// Throws PreconditionError on length mismatch, non-positive weights or p < 1.
  void validate() const;
  /// (Σ wᵢ|fᵢ|ᵖ)^{1/p}.
  double norm() const;
  /// Value at the grid point nearest to x (O(mesh) interpolation error).
  Complex nearest(PointView x) const;
  /// Callable view using nearest-neighbour lookup.
  PointFunction as_function() const;

  static GridFunction sample(std::vector<Point> points, std::vector<double> weights,
                             const PointFunction& f, double p);
};

/// Tensor grid of cell midpoints over a bounded box with equal cell-volume
/// weights, keeping only cells whose midpoint lies in Ω.
struct MidpointGrid {
  std::vector<Point> points;
  std::vector<double> weights;
};
MidpointGrid midpoint_grid(const ProblemSpec& prob, const Box& box, int cells_per_axis);

enum class ApplyStatus {
  ok,
  /// t ≥ τ₋(x): the indicator is zero.
  exited,
  /// t lies within 2·t_tol of τ₋(x); the value is computed but should not
  /// enter norm statistics.
  ambiguous,
  /// The integrator failed before reaching t.
  indeterminate
};

std::string to_string(ApplyStatus s);

struct ApplyResult {
  Complex value{};
  ApplyStatus status = ApplyStatus::ok;
  /// exp(-∫ν) for U, exp(-∫h) for U*; 0 when the indicator vanishes.
  double weight = 0.0;
};

/// (U(t)f)(x) = exp(-∫₀ᵗ ν(Φ(x,-s))ds)·f(Φ(x,-t)) if t < τ₋(x), else 0.
/// Throws PreconditionError if x ∉ Ω or t < 0.
ApplyResult apply_U(const ProblemSpec& prob, const PointFunction& f, double t, PointView x,
                    const FlowOptions& opts = {});
ApplyResult apply_U(const ProblemSpec& prob, const GridFunction& f, double t, PointView x,
                    const FlowOptions& opts = {});

/// (U*(t)g)(x) = exp(-∫₀ᵗ h(Φ(x,s))ds)·g(Φ(x,t)) if t < τ₊(x), else 0.
ApplyResult apply_U_dual(const ProblemSpec& prob, const PointFunction& g, double t, PointView x,
                         const FlowOptions& opts = {});

/// Pointwise application over many points; serial and parallel forms agree.
std::vector<ApplyResult> apply_U_points(const ProblemSpec& prob, const PointFunction& f, double t,
                                        const std::vector<Point>& points,
                                        const FlowOptions& opts = {},
                                        Execution exec = Execution::parallel);
std::vector<ApplyResult> apply_U_dual_points(const ProblemSpec& prob, const PointFunction& g,
                                             double t, const std::vector<Point>& points,
                                             const FlowOptions& opts = {},
                                             Execution exec = Execution::parallel);

struct NormEstimate {
  double t = 0.0;
  /// max exp(-∫₀ᵗ Σ_p(Φ(y,r))dr) over admissible y; 0 when none is admissible.
  double value = 0.0;
  long admissible = 0;
  long sample_size = 0;
  /// Points within 2·t_tol of their exit, left out of the maximum.
  long ambiguous = 0;
  bool empty() const { return admissible == 0; }
  std::string note() const;
};

/// Sampled lower bound of ‖U(t)‖ from the sup formula over y with t < τ₊(y).
NormEstimate operator_norm_estimate(const ProblemSpec& prob, double t,
                                    const std::vector<Point>& sample, const FlowOptions& opts = {},
                                    Execution exec = Execution::parallel);
/// Same, restricted to sample points carrying one of `restriction`.
NormEstimate operator_norm_estimate(const ProblemSpec& prob, double t,
                                    const SampleClassification& sample,
                                    const std::vector<PhaseTag>& restriction,
                                    const FlowOptions& opts = {},
                                    Execution exec = Execution::parallel);

std::vector<NormEstimate> norm_table(const ProblemSpec& prob, const std::vector<double>& t_grid,
                                     const std::vector<Point>& sample,
                                     const FlowOptions& opts = {},
                                     Execution exec = Execution::parallel);

/// α: Ω → ℝ, NaN where undefined.
using AlphaFn = std::function<double(PointView)>;

struct CocycleReport {
  double max_residual = 0.0;
  long checked = 0;
  /// Pairs dropped because t ≥ τ₋(x) or α was undefined.
  long skipped = 0;
};

/// max |α(Φ(x,-t)) - α(x) + t| over the sample and t_list, restricted to
/// t < τ₋(x). α increases by t along the forward flow.
CocycleReport verify_alpha_cocycle(const ProblemSpec& prob, const AlphaFn& alpha,
                                   const std::vector<Point>& sample,
                                   const std::vector<double>& t_list,
                                   const FlowOptions& opts = {});

/// Ready-made α functions: -τ₊ and τ₋ (NaN when censored at `horizon`).
AlphaFn alpha_minus_tau_plus(const ProblemSpec& prob, double horizon, const FlowOptions& opts = {});
AlphaFn alpha_tau_minus(const ProblemSpec& prob, double horizon, const FlowOptions& opts = {});

struct IntertwiningReport {
  double max_residual = 0.0;
  double max_relative = 0.0;
  long checked = 0;
};

/// max |M_η⁻¹U(t)M_η f - e^{iηt}U(t)f| with (M_η f)(x) = e^{-iηα(x)}f(x),
/// over points where both sides are unambiguous.
IntertwiningReport intertwining_residual(const ProblemSpec& prob, const AlphaFn& alpha,
                                         const PointFunction& f, double eta, double t,
                                         const std::vector<Point>& sample,
                                         const FlowOptions& opts = {});

/// x1..xN,re,im
std::string apply_csv(const std::vector<Point>& points, const std::vector<ApplyResult>& values);
/// t,norm,log_norm,admissible,ambiguous
std::string norm_table_csv(const std::vector<NormEstimate>& table);

}  // namespace streamspec
