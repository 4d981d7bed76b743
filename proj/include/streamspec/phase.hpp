#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "streamspec/flow.hpp"
#include "streamspec/parallel.hpp"

namespace streamspec {

enum class PhaseTag { Omega1, Omega2, Omega3Rest, Omega3Periodic, Omega3Infinite, Censored };

inline constexpr std::array<PhaseTag, 6> all_phase_tags = {
    PhaseTag::Omega1,         PhaseTag::Omega2,         PhaseTag::Omega3Rest,
    PhaseTag::Omega3Periodic, PhaseTag::Omega3Infinite, PhaseTag::Censored};

std::string to_string(PhaseTag t);
bool in_omega3(PhaseTag t);

struct ClassificationConfig {
  /// Exit times and return searches are integrated up to this time.
  double horizon = 40.0;
  /// |𝓕(x)| at or below this is a rest point. Unset: 1e-10·(1 + field scale).
  std::optional<double> rest_tol;
  /// Relative return tolerance: a return is accepted when |Φ(x,s)-x| ≤
  /// return_tol·(1+|x|).
  double return_tol = 1e-6;
  /// Width to which the golden-section period refinement is carried.
  double period_refine_tol = 1e-9;
  /// Slack allowed below the 2π/κ lower bound.
  double period_tol = 1e-6;
  FlowOptions flow{};
  /// Integration tolerances for the return search, tighter than `flow` so
  /// that periods are stable under the flow to ~period_refine_tol.
  FlowOptions period_flow = [] {
    FlowOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-14;
    return o;
  }();

  /// Throws ConfigError unless every tolerance and the horizon are positive.
  void validate() const;
  double effective_rest_tol(const ProblemSpec& prob) const;
};

struct PhaseClass {
  PhaseTag tag = PhaseTag::Censored;
  /// Set only for Omega3Periodic.
  std::optional<double> prime_period;
  /// Why the point is Censored, or a short note otherwise.
  std::string reason;
  ExitTimeResult exits;
};

/// Ω₁ (τ₊ finite), Ω₂ (τ₊ = ∞, τ₋ finite) or one of the Ω₃ strata. "= ∞"
/// means censored at the horizon. Throws PreconditionError if x ∉ Ω.
PhaseClass classify_point(const ProblemSpec& prob, PointView x,
                          const ClassificationConfig& cfg = {});

struct PeriodEstimate {
  double period = 0.0;
  /// True when no return within tolerance was found before the horizon.
  bool censored = true;
  /// |Φ(x, period) - x| at the refined period.
  double return_distance = 0.0;
};

/// Prime period from the first local minimum of s ↦ |Φ(x,s)-x| below the
/// return tolerance, searched on s ≥ 2π/κ·(1-1e-3) and refined by
/// golden-section search.
PeriodEstimate estimate_prime_period(const ProblemSpec& prob, PointView x,
                                     const ClassificationConfig& cfg = {});

/// Same search started near s = 0 instead of at the 2π/κ bound. This does
/// not trust κ, so it can detect a violated lower bound.
PeriodEstimate first_return_time(const ProblemSpec& prob, PointView x,
                                 const ClassificationConfig& cfg = {});

struct SampleClassification {
  std::vector<Point> points;
  std::vector<PhaseClass> classes;
  std::array<long, 6> counts{};

  long count(PhaseTag t) const { return counts[static_cast<std::size_t>(t)]; }
  double fraction(PhaseTag t) const;
  /// Fraction of Omega3Rest + Omega3Periodic + Omega3Infinite.
  double omega3_fraction() const;
  std::vector<Point> points_with(PhaseTag t) const;
  /// Largest prime period seen, 0 when there are no periodic points.
  double max_period() const;
};

/// Classify `points` one by one. The parallel form distributes points over
/// threads and stores results by index.
SampleClassification classify_points(const ProblemSpec& prob, std::vector<Point> points,
                                     const ClassificationConfig& cfg = {},
                                     Execution exec = Execution::parallel);

/// Draw n points from `sampler` (serially, so the draw is reproducible) and
/// classify them. Throws PreconditionError if n < 1.
SampleClassification classify_sample(const ProblemSpec& prob, PointSampler& sampler, int n,
                                     const ClassificationConfig& cfg = {},
                                     Execution exec = Execution::parallel);

/// CSV columns x1..xN, tag, tau_minus, tau_plus, prime_period. Censored exit
/// times are written as "inf"; prime_period is empty when not periodic.
std::string classification_csv(const SampleClassification& s);

}  // namespace streamspec
