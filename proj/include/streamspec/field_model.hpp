#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamspec/common.hpp"

namespace streamspec {

using FieldFn = std::function<void(PointView x, std::span<double> out)>;
using ScalarFn = std::function<double(PointView x)>;

enum class DivergenceSource { analytic, symbolic, finite_difference };

/// Lipschitz vector field 𝓕 with its divergence and Lipschitz constant κ.
/// All closures must be pure: they are called concurrently.
struct VectorFieldSpec {
  int dimension = 0;
  FieldFn eval;
  ScalarFn divergence;
  double kappa = 1.0;
  DivergenceSource divergence_source = DivergenceSource::analytic;

  Point operator()(PointView x) const;
};

/// Membership predicate for Ω. The boundary is only located through sign
/// changes of `contains` along trajectories.
struct DomainSpec {
  std::function<bool(PointView)> contains;
  std::optional<Box> bounding_box;
  std::string description;

  static DomainSpec whole_space(int dimension);
  static DomainSpec box(Box b);
};

struct ProblemSpec {
  std::string name;
  VectorFieldSpec field;
  ScalarFn h;  // absorption
  double h_inf = 0.0;
  DomainSpec domain;
  double p = 1.0;
  /// Region in which random sample points are drawn (rejected if outside Ω).
  Box sample_region;

  int dimension() const { return field.dimension; }
  /// 1/p⋆ = 1 - 1/p, exactly 0 for p = 1.
  double inv_conjugate() const { return p == 1.0 ? 0.0 : 1.0 - 1.0 / p; }
};

/// Central-difference divergence with step 1e-5·(1+|x|).
double fd_divergence(const FieldFn& field, int dimension, PointView x);
double fd_step(PointView x);

/// Σ_p(x) = h(x) + (1/p⋆)·div𝓕(x). Throws PreconditionError if x ∉ Ω.
double sigma_p(const ProblemSpec& prob, PointView x);
/// ν(x) = h(x) + div𝓕(x). Throws PreconditionError if x ∉ Ω.
double nu(const ProblemSpec& prob, PointView x);

// Unchecked variants used on integration stages, which may sit marginally
// outside Ω.
double sigma_p_unchecked(const ProblemSpec& prob, PointView x);
double nu_unchecked(const ProblemSpec& prob, PointView x);

/// Largest sampled |𝓕(a)-𝓕(b)|/|a-b| over random pairs in `region`.
/// Throws PreconditionError on a zero-volume region or n_pairs < 1.
double estimate_lipschitz(const ProblemSpec& prob, const Box& region,
                          int n_pairs, std::uint64_t seed = 1);

/// Names accepted by builtin().
const std::vector<std::string>& builtin_names();

/// Construct one of the worked example problems. Unknown names and
/// malformed parameters raise ConfigError.
///
///   rotation        𝓕=(-ωy, ωx) on ℝ²                  params: omega, c
///   lorentz         𝓕=(v, q(E+v×B)) on slab × ℝ³        params: E, B, q, slab_width, c
///   vfp_fourier     𝓕=(η, η-ξ) on ℝ²ᴺ, h=|η|²-N          params: N
///   free_streaming  𝓕=(v, 0) on ℝᴺ×ℝᴺ                   params: N, c
///   nordstrom       relativistic field on (0,1)×ℝ        params: a, b, p_max, c
///   gradient        𝓕=-∇V, V=½Σaᵢxᵢ² on ℝᴺ               params: a, c
///   slab_constant   𝓕≡1 on (0,1)                         params: c
///   half_line       𝓕=v+d·x on (0,∞), h=c+β e^{-x}      params: velocity, d, c, transient, sample_max
///
/// Every builtin also accepts "p" and "kappa" overrides.
ProblemSpec builtin(const std::string& name, const nlohmann::json& params = {});

/// Load {"builtin": name, "params": {...}} or {"custom": {...}}.
ProblemSpec load_problem(const nlohmann::json& config);

/// Sampled h(x) < h_inf checks; returns human-readable warnings (never throws).
std::vector<std::string> check_integrity(const ProblemSpec& prob, int n_samples,
                                         std::uint64_t seed = 7);

/// Uniform points in prob.sample_region, rejecting points outside Ω.
/// Deterministic for a fixed seed.
class PointSampler {
 public:
  PointSampler(const ProblemSpec& prob, std::uint64_t seed);
  Point next();
  std::vector<Point> draw(int n);

 private:
  const ProblemSpec* prob_;
  std::mt19937_64 rng_;
};

}  // namespace streamspec
