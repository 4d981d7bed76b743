#include "streamspec/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace streamspec {

void GridFunction::validate() const {
  if (values.size() != points.size() || weights.size() != points.size())
    throw PreconditionError("grid function: points, values and weights differ in length");
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("grid function: p must be >= 1");
  for (double w : weights)
    if (!(w > 0.0)) throw PreconditionError("grid function: weights must be positive");
}

double GridFunction::norm() const {
  validate();
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * std::pow(std::abs(values[i]), p);
  return std::pow(acc, 1.0 / p);
}

Complex GridFunction::nearest(PointView x) const {
  if (points.empty()) throw PreconditionError("grid function is empty");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(points[i], x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return values[best];
}

PointFunction GridFunction::as_function() const {
  return [this](PointView x) { return nearest(x); };
}

GridFunction GridFunction::sample(std::vector<Point> points, std::vector<double> weights,
                                  const PointFunction& f, double p) {
  GridFunction g;
  g.values.reserve(points.size());
  for (const auto& x : points) g.values.push_back(f(x));
  g.points = std::move(points);
  g.weights = std::move(weights);
  g.p = p;
  g.validate();
  return g;
}

MidpointGrid midpoint_grid(const ProblemSpec& prob, const Box& box, int cells_per_axis) {
  if (cells_per_axis < 1) throw PreconditionError("midpoint_grid: need at least one cell per axis");
  if (static_cast<int>(box.size()) != prob.dimension())
    throw PreconditionError("midpoint_grid: box dimension does not match the problem");
  double volume = 1.0;
  for (const auto& iv : box) {
    if (!(iv.width() > 0.0) || !std::isfinite(iv.width()))
      throw PreconditionError("midpoint_grid: box must be bounded with positive widths");
    volume *= iv.width() / cells_per_axis;
  }
  MidpointGrid g;
  const std::size_t dim = box.size();
  std::vector<int> idx(dim, 0);
  Point x(dim);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k)
      x[k] = box[k].lo + (idx[k] + 0.5) * box[k].width() / cells_per_axis;
    if (prob.domain.contains(x)) {
      g.points.push_back(x);
      g.weights.push_back(volume);
    }
    std::size_t k = 0;
    while (k < dim && ++idx[k] == cells_per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
  return g;
}

std::string to_string(ApplyStatus s) {
  switch (s) {
    case ApplyStatus::ok: return "ok";
    case ApplyStatus::exited: return "exited";
    case ApplyStatus::ambiguous: return "ambiguous";
    case ApplyStatus::indeterminate: return "indeterminate";
  }
  return "?";
}

namespace {

// Shared body of U and U*: integrate in `direction` for t, weight by
// exp(-integral) and evaluate f at the endpoint.
ApplyResult transport(const ProblemSpec& prob, const PointFunction& f, double t, PointView x,
                      int direction, bool use_h, const FlowOptions& opts) {
  if (!(t >= 0.0)) throw PreconditionError("semigroup time must be non-negative");
  if (!prob.domain.contains(x)) throw PreconditionError("semigroup: x is outside the domain");
  ApplyResult out;
  if (t == 0.0) {
    out.value = f(x);
    out.weight = 1.0;
    return out;
  }
  FlowResult r = advance_flow(prob, x, direction * t, opts);
  const double margin = 2.0 * opts.t_tol;
  switch (r.status) {
    case FlowStatus::step_failure:
      out.status = ApplyStatus::indeterminate;
      return out;
    case FlowStatus::left_domain:
      out.status = t - r.time_reached <= margin ? ApplyStatus::ambiguous : ApplyStatus::exited;
      return out;
    case FlowStatus::ok: break;
  }
  out.weight = std::exp(-(use_h ? r.int_h() : r.int_nu));
  out.value = out.weight * f(r.endpoint);
  if (opts.respect_domain) {
    try {
      if (exit_time_one(prob, r.endpoint, direction, margin, opts).finite())
        out.status = ApplyStatus::ambiguous;
    } catch (const NumericalError&) {
      out.status = ApplyStatus::indeterminate;
    }
  }
  return out;
}

}  // namespace

ApplyResult apply_U(const ProblemSpec& prob, const PointFunction& f, double t, PointView x,
                    const FlowOptions& opts) {
  return transport(prob, f, t, x, -1, false, opts);
}

ApplyResult apply_U(const ProblemSpec& prob, const GridFunction& f, double t, PointView x,
                    const FlowOptions& opts) {
  return transport(prob, f.as_function(), t, x, -1, false, opts);
}

ApplyResult apply_U_dual(const ProblemSpec& prob, const PointFunction& g, double t, PointView x,
                         const FlowOptions& opts) {
  return transport(prob, g, t, x, +1, true, opts);
}

std::vector<ApplyResult> apply_U_points(const ProblemSpec& prob, const PointFunction& f, double t,
                                        const std::vector<Point>& points,
                                        const FlowOptions& opts, Execution exec) {
  std::vector<ApplyResult> out(points.size());
  for_each_index(points.size(), exec,
                 [&](std::size_t i) { out[i] = apply_U(prob, f, t, points[i], opts); });
  return out;
}

std::vector<ApplyResult> apply_U_dual_points(const ProblemSpec& prob, const PointFunction& g,
                                             double t, const std::vector<Point>& points,
                                             const FlowOptions& opts, Execution exec) {
  std::vector<ApplyResult> out(points.size());
  for_each_index(points.size(), exec,
                 [&](std::size_t i) { out[i] = apply_U_dual(prob, g, t, points[i], opts); });
  return out;
}

std::string NormEstimate::note() const {
  if (empty()) {
    std::ostringstream os;
    os << "empty admissible set at t=" << t;
    return os.str();
  }
  return {};
}

NormEstimate operator_norm_estimate(const ProblemSpec& prob, double t,
                                    const std::vector<Point>& sample, const FlowOptions& opts,
                                    Execution exec) {
  if (!(t >= 0.0)) throw PreconditionError("operator_norm_estimate: t must be non-negative");
  // Per point: weight, or -1 for inadmissible, -2 for ambiguous.
  std::vector<double> w(sample.size(), -1.0);
  const double margin = 2.0 * opts.t_tol;
  for_each_index(sample.size(), exec, [&](std::size_t i) {
    const Point& y = sample[i];
    if (!prob.domain.contains(y)) return;
    if (t == 0.0) {
      w[i] = 1.0;
      return;
    }
    FlowResult r = advance_flow(prob, y, t, opts);
    if (r.status == FlowStatus::left_domain) {
      if (t - r.time_reached <= margin) w[i] = -2.0;
      return;
    }
    if (!r.ok()) return;
    try {
      if (exit_time_one(prob, r.endpoint, +1, margin, opts).finite()) {
        w[i] = -2.0;
        return;
      }
    } catch (const NumericalError&) {
      return;
    }
    w[i] = std::exp(-r.int_sigma_p);
  });
  NormEstimate est;
  est.t = t;
  est.sample_size = static_cast<long>(sample.size());
  for (double v : w) {
    if (v == -2.0) {
      ++est.ambiguous;
    } else if (v >= 0.0) {
      ++est.admissible;
      est.value = std::max(est.value, v);
    }
  }
  return est;
}

NormEstimate operator_norm_estimate(const ProblemSpec& prob, double t,
                                    const SampleClassification& sample,
                                    const std::vector<PhaseTag>& restriction,
                                    const FlowOptions& opts, Execution exec) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < sample.points.size(); ++i)
    if (std::find(restriction.begin(), restriction.end(), sample.classes[i].tag) !=
        restriction.end())
      pts.push_back(sample.points[i]);
  return operator_norm_estimate(prob, t, pts, opts, exec);
}

std::vector<NormEstimate> norm_table(const ProblemSpec& prob, const std::vector<double>& t_grid,
                                     const std::vector<Point>& sample, const FlowOptions& opts,
                                     Execution exec) {
  std::vector<NormEstimate> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(operator_norm_estimate(prob, t, sample, opts, exec));
  return out;
}

CocycleReport verify_alpha_cocycle(const ProblemSpec& prob, const AlphaFn& alpha,
                                   const std::vector<Point>& sample,
                                   const std::vector<double>& t_list, const FlowOptions& opts) {
  CocycleReport rep;
  for (const auto& x : sample) {
    const double ax = alpha(x);
    for (double t : t_list) {
      if (!std::isfinite(ax)) {
        ++rep.skipped;
        continue;
      }
      FlowResult r = advance_flow(prob, x, -t, opts);
      if (!r.ok()) {
        ++rep.skipped;
        continue;
      }
      const double ay = alpha(r.endpoint);
      if (!std::isfinite(ay)) {
        ++rep.skipped;
        continue;
      }
      rep.max_residual = std::max(rep.max_residual, std::fabs(ay - ax + t));
      ++rep.checked;
    }
  }
  return rep;
}

AlphaFn alpha_minus_tau_plus(const ProblemSpec& prob, double horizon, const FlowOptions& opts) {
  return [&prob, horizon, opts](PointView x) {
    ExitTime e = exit_time_one(prob, x, +1, horizon, opts);
    return e.finite() ? -e.value : std::numeric_limits<double>::quiet_NaN();
  };
}

AlphaFn alpha_tau_minus(const ProblemSpec& prob, double horizon, const FlowOptions& opts) {
  return [&prob, horizon, opts](PointView x) {
    ExitTime e = exit_time_one(prob, x, -1, horizon, opts);
    return e.finite() ? e.value : std::numeric_limits<double>::quiet_NaN();
  };
}

IntertwiningReport intertwining_residual(const ProblemSpec& prob, const AlphaFn& alpha,
                                         const PointFunction& f, double eta, double t,
                                         const std::vector<Point>& sample,
                                         const FlowOptions& opts) {
  const Complex i(0.0, 1.0);
  PointFunction mf = [&](PointView y) { return std::exp(-i * eta * alpha(y)) * f(y); };
  IntertwiningReport rep;
  for (const auto& x : sample) {
    const double ax = alpha(x);
    if (!std::isfinite(ax)) continue;
    ApplyResult lhs = apply_U(prob, mf, t, x, opts);
    ApplyResult rhs = apply_U(prob, f, t, x, opts);
    if (lhs.status != ApplyStatus::ok || rhs.status != ApplyStatus::ok) continue;
    if (!std::isfinite(std::abs(lhs.value))) continue;  // α undefined at the pullback
    const Complex left = std::exp(i * eta * ax) * lhs.value;
    const Complex right = std::exp(i * eta * t) * rhs.value;
    const double res = std::abs(left - right);
    rep.max_residual = std::max(rep.max_residual, res);
    if (std::abs(rhs.value) > 0.0)
      rep.max_relative = std::max(rep.max_relative, res / std::abs(rhs.value));
    ++rep.checked;
  }
  return rep;
}

std::string apply_csv(const std::vector<Point>& points, const std::vector<ApplyResult>& values) {
  if (points.size() != values.size())
    throw PreconditionError("apply_csv: points and values differ in length");
  std::ostringstream os;
  os.precision(17);
  const std::size_t dim = points.empty() ? 0 : points.front().size();
  for (std::size_t k = 0; k < dim; ++k) os << 'x' << k + 1 << ',';
  os << "re,im\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (double v : points[i]) os << v << ',';
    os << values[i].value.real() << ',' << values[i].value.imag() << '\n';
  }
  return os.str();
}

std::string norm_table_csv(const std::vector<NormEstimate>& table) {
  std::ostringstream os;
  os.precision(17);
  os << "t,norm,log_norm,admissible,ambiguous\n";
  for (const auto& e : table) {
    os << e.t << ',' << e.value << ',';
    if (e.value > 0.0)
      os << std::log(e.value);
    else
      os << "-inf";
    os << ',' << e.admissible << ',' << e.ambiguous << '\n';
  }
  return os.str();
}

}  // namespace streamspec
