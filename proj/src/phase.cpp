#include "streamspec/phase.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace streamspec {

std::string to_string(Execution e) { return e == Execution::serial ? "serial" : "parallel"; }

int max_threads() { return omp_get_max_threads(); }

std::string to_string(PhaseTag t) {
  switch (t) {
    case PhaseTag::Omega1: return "Omega1";
    case PhaseTag::Omega2: return "Omega2";
    case PhaseTag::Omega3Rest: return "Omega3Rest";
    case PhaseTag::Omega3Periodic: return "Omega3Periodic";
    case PhaseTag::Omega3Infinite: return "Omega3Infinite";
    case PhaseTag::Censored: return "Censored";
  }
  return "?";
}

bool in_omega3(PhaseTag t) {
  return t == PhaseTag::Omega3Rest || t == PhaseTag::Omega3Periodic ||
         t == PhaseTag::Omega3Infinite;
}

void ClassificationConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(horizon, "horizon");
  if (rest_tol) positive(*rest_tol, "rest_tol");
  positive(return_tol, "return_tol");
  positive(period_refine_tol, "period_refine_tol");
  positive(period_tol, "period_tol");
}

double ClassificationConfig::effective_rest_tol(const ProblemSpec& prob) const {
  if (rest_tol) return *rest_tol;
  // Field scale: largest |𝓕| over a fixed deterministic sample.
  double scale = 0.0;
  if (!prob.sample_region.empty()) {
    PointSampler sampler(prob, 0x5eed);
    for (int i = 0; i < 64; ++i) scale = std::max(scale, norm2(prob.field(sampler.next())));
  }
  return 1e-10 * (1.0 + scale);
}

namespace {

// Golden-section minimisation of s ↦ |Φ(y_a, s-a) - x| on [a, b].
std::pair<double, double> refine_return(const ProblemSpec& prob, PointView x, const Point& ya,
                                        double a, double b, const ClassificationConfig& cfg) {
  auto dist = [&](double s) {
    if (s == a) return distance(ya, x);
    FlowResult r = advance_flow(prob, ya, s - a, cfg.period_flow);
    return r.ok() ? distance(r.endpoint, x) : std::numeric_limits<double>::infinity();
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = b;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = dist(c), fd = dist(d);
  while (hi - lo > cfg.period_refine_tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = dist(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = dist(d);
    }
  }
  const double s = 0.5 * (lo + hi);
  return {s, dist(s)};
}

PeriodEstimate search_return(const ProblemSpec& prob, PointView x,
                             const ClassificationConfig& cfg, double s_lo, double dt) {
  PeriodEstimate out;
  const double tol = cfg.return_tol * (1.0 + norm2(x));
  const double s0 = std::max(dt, s_lo - dt);
  if (s0 + 2 * dt > cfg.horizon) return out;

  FlowResult first = advance_flow(prob, x, s0, cfg.period_flow);
  if (!first.ok()) return out;

  // Sliding window of three consecutive samples s_{j-1}, s_j, s_{j+1}.
  Point y_prev = first.endpoint;
  double s_prev = s0, d_prev = distance(y_prev, x);
  FlowResult step = advance_flow(prob, y_prev, dt, cfg.period_flow);
  if (!step.ok()) return out;
  Point y_mid = step.endpoint;
  double s_mid = s0 + dt, d_mid = distance(y_mid, x);

  while (s_mid + dt <= cfg.horizon) {
    step = advance_flow(prob, y_mid, dt, cfg.period_flow);
    if (!step.ok()) return out;
    const double s_next = s_mid + dt, d_next = distance(step.endpoint, x);
    if (d_prev >= d_mid && d_mid <= d_next) {
      auto [s_star, d_star] = refine_return(prob, x, y_prev, s_prev, s_next, cfg);
      if (d_star <= tol && s_star >= s_lo) {
        out.period = s_star;
        out.return_distance = d_star;
        out.censored = false;
        return out;
      }
    }
    y_prev = std::move(y_mid);
    s_prev = s_mid;
    d_prev = d_mid;
    y_mid = std::move(step.endpoint);
    s_mid = s_next;
    d_mid = d_next;
  }
  return out;
}

}  // namespace

PeriodEstimate estimate_prime_period(const ProblemSpec& prob, PointView x,
                                     const ClassificationConfig& cfg) {
  const double s_lo = 2.0 * std::numbers::pi / prob.field.kappa * (1.0 - 1e-3);
  return search_return(prob, x, cfg, s_lo, std::numbers::pi / (4.0 * prob.field.kappa));
}

PeriodEstimate first_return_time(const ProblemSpec& prob, PointView x,
                                 const ClassificationConfig& cfg) {
  const double dt = std::min(std::numbers::pi / (4.0 * prob.field.kappa), cfg.horizon / 256.0);
  return search_return(prob, x, cfg, 0.0, dt);
}

PhaseClass classify_point(const ProblemSpec& prob, PointView x, const ClassificationConfig& cfg) {
  if (!prob.domain.contains(x)) throw PreconditionError("classify_point: x is outside the domain");
  PhaseClass out;
  out.exits = exit_time(prob, x, cfg.horizon, cfg.flow);
  if (out.exits.step_failure) {
    out.tag = PhaseTag::Censored;
    out.reason = "step_failure";
    return out;
  }
  if (out.exits.tau_plus.finite()) {
    out.tag = PhaseTag::Omega1;
    return out;
  }
  if (out.exits.tau_minus.finite()) {
    out.tag = PhaseTag::Omega2;
    return out;
  }
  if (norm2(prob.field(x)) <= cfg.effective_rest_tol(prob)) {
    out.tag = PhaseTag::Omega3Rest;
    return out;
  }
  PeriodEstimate pe = estimate_prime_period(prob, x, cfg);
  if (!pe.censored) {
    out.tag = PhaseTag::Omega3Periodic;
    out.prime_period = pe.period;
    return out;
  }
  if (cfg.horizon >= 4.0 * std::numbers::pi / prob.field.kappa) {
    out.tag = PhaseTag::Omega3Infinite;
    out.reason = "no return before horizon";
  } else {
    out.tag = PhaseTag::Censored;
    out.reason = "horizon shorter than 4*pi/kappa";
  }
  return out;
}

double SampleClassification::fraction(PhaseTag t) const {
  return classes.empty() ? 0.0 : static_cast<double>(count(t)) / classes.size();
}

double SampleClassification::omega3_fraction() const {
  return fraction(PhaseTag::Omega3Rest) + fraction(PhaseTag::Omega3Periodic) +
         fraction(PhaseTag::Omega3Infinite);
}

std::vector<Point> SampleClassification::points_with(PhaseTag t) const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].tag == t) out.push_back(points[i]);
  return out;
}

double SampleClassification::max_period() const {
  double m = 0.0;
  for (const auto& c : classes)
    if (c.prime_period) m = std::max(m, *c.prime_period);
  return m;
}

SampleClassification classify_points(const ProblemSpec& prob, std::vector<Point> points,
                                     const ClassificationConfig& cfg, Execution exec) {
  cfg.validate();
  ClassificationConfig fixed = cfg;
  fixed.rest_tol = cfg.effective_rest_tol(prob);
  SampleClassification out;
  out.points = std::move(points);
  out.classes.resize(out.points.size());
  for_each_index(out.points.size(), exec, [&](std::size_t i) {
    out.classes[i] = classify_point(prob, out.points[i], fixed);
  });
  for (const auto& c : out.classes) ++out.counts[static_cast<std::size_t>(c.tag)];
  return out;
}

SampleClassification classify_sample(const ProblemSpec& prob, PointSampler& sampler, int n,
                                     const ClassificationConfig& cfg, Execution exec) {
  if (n < 1) throw PreconditionError("classify_sample: n must be at least 1");
  return classify_points(prob, sampler.draw(n), cfg, exec);
}

std::string classification_csv(const SampleClassification& s) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t dim = s.points.empty() ? 0 : s.points.front().size();
  for (std::size_t k = 0; k < dim; ++k) os << 'x' << k + 1 << ',';
  os << "tag,tau_minus,tau_plus,prime_period\n";
  auto put_time = [&](const ExitTime& e) {
    if (e.censored)
      os << "inf";
    else
      os << e.value;
  };
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    for (double v : s.points[i]) os << v << ',';
    const PhaseClass& c = s.classes[i];
    os << to_string(c.tag) << ',';
    put_time(c.exits.tau_minus);
    os << ',';
    put_time(c.exits.tau_plus);
    os << ',';
    if (c.prime_period) os << *c.prime_period;
    os << '\n';
  }
  return os.str();
}

}  // namespace streamspec
