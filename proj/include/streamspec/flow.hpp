#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "streamspec/field_model.hpp"

namespace streamspec {

struct FlowOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Exit crossings are bisected until the bracket is below this width.
  double t_tol = 1e-9;
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-14;
  long max_steps = 2'000'000;
  /// When false the membership predicate is ignored (pure flow Φ).
  bool respect_domain = true;
};

enum class FlowStatus { ok, left_domain, step_failure };

std::string to_string(FlowStatus s);

/// Flow endpoint together with path integrals ∫₀^|t| g(Φ(x, σs)) ds of
/// g ∈ {ν, div𝓕, Σ_p}, σ = sign(t). Integrals are accumulated in the same
/// Runge–Kutta pass as the trajectory.
struct FlowResult {
  Point endpoint;
  double int_nu = 0.0;
  double int_div = 0.0;
  double int_sigma_p = 0.0;
  long steps = 0;
  FlowStatus status = FlowStatus::ok;
  /// Elapsed |time| reached: |t| on success, the refined crossing time on
  /// left_domain, the failure time on step_failure.
  double time_reached = 0.0;
  std::string message;

  bool ok() const { return status == FlowStatus::ok; }
  /// ∫ h along the path.
  double int_h() const { return int_nu - int_div; }
};

/// Integrate dX/ds = 𝓕(X) from x over signed time t (Dormand–Prince 5(4)).
/// Throws PreconditionError if x ∉ Ω.
FlowResult advance_flow(const ProblemSpec& prob, PointView x, double t,
                        const FlowOptions& opts = {});

/// One time in (0, horizon) or a value censored at the horizon.
struct ExitTime {
  double value = 0.0;
  bool censored = false;

  bool finite() const { return !censored; }
  static ExitTime exact(double v) { return {v, false}; }
  static ExitTime censored_at(double horizon) { return {horizon, true}; }
};

struct ExitTimeResult {
  ExitTime tau_minus;
  ExitTime tau_plus;
  double horizon = 0.0;
  bool step_failure = false;
  std::string message;
};

/// τ±(x) = inf{s > 0 : Φ(x, ±s) ∉ Ω}, each integrated up to `horizon`.
ExitTimeResult exit_time(const ProblemSpec& prob, PointView x, double horizon,
                         const FlowOptions& opts = {});
/// One direction only (direction = +1 for τ₊, -1 for τ₋).
ExitTime exit_time_one(const ProblemSpec& prob, PointView x, int direction, double horizon,
                       const FlowOptions& opts = {});

/// exp ∫₀ᵗ div𝓕(Φ(x,s)) ds. Throws NumericalError if the path leaves Ω or
/// the integrator fails.
double radon_nikodym(const ProblemSpec& prob, PointView x, double t,
                     const FlowOptions& opts = {});

/// State on the flow at elapsed time s ≥ 0 in the direction of integration.
struct FlowSample {
  double s = 0.0;
  Point x;
  double int_nu = 0.0;
  double int_div = 0.0;
  double int_sigma_p = 0.0;
};

/// Integrate like advance_flow and report the state at every requested
/// elapsed time (ascending, in [0, |t|]). Samples past an exit are omitted.
/// Values come from re-integration to each sample time, not interpolation.
FlowResult sample_flow(const ProblemSpec& prob, PointView x, double t,
                       const std::vector<double>& sample_times, std::vector<FlowSample>& samples,
                       const FlowOptions& opts = {});

/// Evenly spaced trajectory dump with `n_intervals` intervals over [0, |t|].
std::vector<FlowSample> trace_flow(const ProblemSpec& prob, PointView x, double t,
                                   int n_intervals, const FlowOptions& opts = {});

/// CSV with header t,x1..xN,int_nu,int_div,int_sigma_p. The t column is
/// signed (negative for backward traces).
std::string trajectory_csv(const std::vector<FlowSample>& trace, int direction);

}  // namespace streamspec
