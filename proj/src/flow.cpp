#include "streamspec/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace streamspec {

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::ok: return "ok";
    case FlowStatus::left_domain: return "left_domain";
    case FlowStatus::step_failure: return "step_failure";
  }
  return "unknown";
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

/// Augmented state: N coordinates followed by ∫ν, ∫div, ∫Σ_p.
class Integrator {
 public:
  Integrator(const ProblemSpec& prob, int direction, const FlowOptions& opts)
      : prob_(prob),
        opts_(opts),
        n_(prob.dimension()),
        m_(n_ + 3),
        sign_(direction < 0 ? -1.0 : 1.0),
        w_(prob.inv_conjugate()) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_})
      v->assign(m_, 0.0);
    fx_.assign(n_, 0.0);
  }

  using StopFn = std::function<void(double s, const std::vector<double>& y)>;

  FlowResult run(PointView x, double T, const std::vector<double>& stops, const StopFn& on_stop) {
    FlowResult res;
    std::vector<double> y(m_, 0.0);
    std::copy(x.begin(), x.end(), y.begin());

    auto finish = [&](FlowStatus status, double s, const std::vector<double>& state) {
      res.status = status;
      res.time_reached = s;
      res.endpoint.assign(state.begin(), state.begin() + n_);
      res.int_nu = state[n_];
      res.int_div = state[n_ + 1];
      res.int_sigma_p = state[n_ + 2];
      return res;
    };

    std::size_t next_stop = 0;
    auto flush_stops = [&](double s) {
      while (next_stop < stops.size() && stops[next_stop] <= s) {
        if (on_stop) on_stop(stops[next_stop], y);
        ++next_stop;
      }
    };
    flush_stops(0.0);
    if (T <= 0.0) return finish(FlowStatus::ok, 0.0, y);

    try {
      rhs(y.data(), k1_.data());
    } catch (const Error& e) {
      res.message = e.what();
      return finish(FlowStatus::step_failure, 0.0, y);
    }

    double s = 0.0;
    double h = initial_step(y, T);
    while (s < T) {
      if (res.steps >= opts_.max_steps) {
        res.message = "maximum number of steps exceeded";
        return finish(FlowStatus::step_failure, s, y);
      }
      double target = T;
      if (next_stop < stops.size()) target = std::min(target, stops[next_stop]);
      bool clipped = false;
      double step = std::min({h, opts_.h_max, target - s});
      if (step >= target - s) {
        step = target - s;
        clipped = true;
      }
      if (!clipped && step < opts_.h_min * std::max(1.0, s)) {
        res.message = "step size underflow";
        return finish(FlowStatus::step_failure, s, y);
      }

      double err = 0.0;
      try {
        err = attempt(y, step);
      } catch (const Error& e) {
        // A stage left the field's region of definition; retry smaller.
        h = 0.25 * step;
        if (h < opts_.h_min * std::max(1.0, s)) {
          res.message = e.what();
          return finish(FlowStatus::step_failure, s, y);
        }
        continue;
      }
      if (!(err <= 1.0)) {
        const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h = step * fac;
        continue;
      }

      ++res.steps;
      const double s_new = clipped ? target : s + step;
      if (opts_.respect_domain && !prob_.domain.contains(std::span(ynew_.data(), n_))) {
        const double cross = bisect_exit(y, step);
        std::vector<double> at(m_);
        single_step(y, cross, at);
        res.message = "left domain";
        return finish(FlowStatus::left_domain, s + cross, at);
      }

      y.swap(ynew_);
      std::swap(k1_, k7_);  // FSAL
      s = s_new;
      flush_stops(s);
      const double fac = err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
      if (!clipped || fac < 1.0) h = step * fac;
      else h = std::max(h, step);
    }
    return finish(FlowStatus::ok, T, y);
  }

 private:
  void rhs(const double* y, double* dy) {
    std::span<const double> x(y, n_);
    prob_.field.eval(x, std::span<double>(fx_.data(), n_));
    for (int i = 0; i < n_; ++i) dy[i] = sign_ * fx_[i];
    const double hx = prob_.h(x);
    const double div = prob_.field.divergence(x);
    dy[n_] = hx + div;
    dy[n_ + 1] = div;
    dy[n_ + 2] = w_ == 0.0 ? hx : hx + w_ * div;
  }

  double initial_step(const std::vector<double>& y, double T) {
    double d0 = 0.0, d1 = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::fabs(y[i]);
      d0 = std::max(d0, std::fabs(y[i]) / sc);
      d1 = std::max(d1, std::fabs(k1_[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, T);
    // One explicit Euler probe to estimate the second derivative.
    for (int i = 0; i < m_; ++i) tmp_[i] = y[i] + h0 * k1_[i];
    try {
      rhs(tmp_.data(), k2_.data());
    } catch (const Error&) {
      return std::min(h0, opts_.h_max);
    }
    double d2 = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double sc = opts_.atol + opts_.rtol * std::fabs(y[i]);
      d2 = std::max(d2, std::fabs(k2_[i] - k1_[i]) / sc / h0);
    }
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, T, opts_.h_max});
  }

  // Stages 2..7 for a step of size h from y, given k1 = f(y).
  void stages(const std::vector<double>& y, double h, std::vector<double>& out) {
    for (int i = 0; i < m_; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
    rhs(tmp_.data(), k2_.data());
    for (int i = 0; i < m_; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    rhs(tmp_.data(), k3_.data());
    for (int i = 0; i < m_; ++i)
      tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    rhs(tmp_.data(), k4_.data());
    for (int i = 0; i < m_; ++i)
      tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    rhs(tmp_.data(), k5_.data());
    for (int i = 0; i < m_; ++i)
      tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                            a65 * k5_[i]);
    rhs(tmp_.data(), k6_.data());
    for (int i = 0; i < m_; ++i)
      out[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
  }

  // Returns the scaled error norm; leaves the candidate in ynew_ and f(ynew_) in k7_.
  double attempt(const std::vector<double>& y, double h) {
    stages(y, h, ynew_);
    rhs(ynew_.data(), k7_.data());
    double err = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                            e6 * k6_[i] + e7 * k7_[i]);
      const double sc = opts_.atol + opts_.rtol * std::max(std::fabs(y[i]), std::fabs(ynew_[i]));
      const double r = std::fabs(e) / sc;
      if (!std::isfinite(ynew_[i])) return std::numeric_limits<double>::infinity();
      err = std::max(err, r);
    }
    return err;
  }

  // A fresh 5th-order step of size h from y (k1 must hold f(y)).
  void single_step(const std::vector<double>& y, double h, std::vector<double>& out) {
    if (h <= 0.0) {
      out = y;
      return;
    }
    std::vector<double> save = k7_;
    stages(y, h, out);
    k7_ = std::move(save);
  }

  // Crossing time within (0, step], bracket narrowed below t_tol / 20.
  double bisect_exit(const std::vector<double>& y, double step) {
    std::vector<double> probe(m_);
    std::vector<double> keep_new = ynew_;
    double lo = 0.0, hi = step;
    const double tol = 0.05 * opts_.t_tol;
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      single_step(y, mid, probe);
      if (prob_.domain.contains(std::span(probe.data(), n_))) lo = mid;
      else hi = mid;
    }
    ynew_ = std::move(keep_new);
    return 0.5 * (lo + hi);
  }

  const ProblemSpec& prob_;
  FlowOptions opts_;
  int n_;
  int m_;
  double sign_;
  double w_;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, fx_;
};

void check_start(const ProblemSpec& prob, PointView x, const FlowOptions& opts) {
  if (static_cast<int>(x.size()) != prob.dimension())
    throw PreconditionError("point dimension does not match the problem");
  if (opts.respect_domain && !prob.domain.contains(x))
    throw PreconditionError("flow start point lies outside the domain");
}

}  // namespace

FlowResult advance_flow(const ProblemSpec& prob, PointView x, double t, const FlowOptions& opts) {
  check_start(prob, x, opts);
  Integrator integ(prob, t < 0.0 ? -1 : 1, opts);
  return integ.run(x, std::fabs(t), {}, {});
}

ExitTime exit_time_one(const ProblemSpec& prob, PointView x, int direction, double horizon,
                       const FlowOptions& opts) {
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  check_start(prob, x, opts);
  FlowOptions o = opts;
  o.respect_domain = true;
  Integrator integ(prob, direction, o);
  FlowResult r = integ.run(x, horizon, {}, {});
  if (r.status == FlowStatus::step_failure)
    throw NumericalError("exit time integration failed: " + r.message);
  if (r.status == FlowStatus::left_domain && r.time_reached < horizon)
    return ExitTime::exact(r.time_reached);
  return ExitTime::censored_at(horizon);
}

ExitTimeResult exit_time(const ProblemSpec& prob, PointView x, double horizon,
                         const FlowOptions& opts) {
  ExitTimeResult res;
  res.horizon = horizon;
  try {
    res.tau_plus = exit_time_one(prob, x, +1, horizon, opts);
    res.tau_minus = exit_time_one(prob, x, -1, horizon, opts);
  } catch (const NumericalError& e) {
    res.step_failure = true;
    res.message = e.what();
    res.tau_plus = ExitTime::censored_at(horizon);
    res.tau_minus = ExitTime::censored_at(horizon);
  }
  return res;
}

double radon_nikodym(const ProblemSpec& prob, PointView x, double t, const FlowOptions& opts) {
  FlowResult r = advance_flow(prob, x, t, opts);
  if (r.status == FlowStatus::left_domain) {
    std::ostringstream os;
    os << "trajectory left the domain at elapsed time " << r.time_reached;
    throw NumericalError(os.str());
  }
  if (r.status == FlowStatus::step_failure) throw NumericalError(r.message);
  // int_div is ∫₀^|t| div(Φ(x, σs)) ds; the signed integral flips with t.
  return std::exp(t >= 0.0 ? r.int_div : -r.int_div);
}

FlowResult sample_flow(const ProblemSpec& prob, PointView x, double t,
                       const std::vector<double>& sample_times, std::vector<FlowSample>& samples,
                       const FlowOptions& opts) {
  check_start(prob, x, opts);
  const double T = std::fabs(t);
  std::vector<double> stops;
  for (double s : sample_times)
    if (s >= 0.0 && s <= T) stops.push_back(s);
  if (!std::is_sorted(stops.begin(), stops.end()))
    throw PreconditionError("sample times must be ascending");
  samples.clear();
  const int n = prob.dimension();
  Integrator integ(prob, t < 0.0 ? -1 : 1, opts);
  return integ.run(x, T, stops, [&](double s, const std::vector<double>& y) {
    FlowSample fs;
    fs.s = s;
    fs.x.assign(y.begin(), y.begin() + n);
    fs.int_nu = y[n];
    fs.int_div = y[n + 1];
    fs.int_sigma_p = y[n + 2];
    samples.push_back(std::move(fs));
  });
}

std::vector<FlowSample> trace_flow(const ProblemSpec& prob, PointView x, double t,
                                   int n_intervals, const FlowOptions& opts) {
  if (n_intervals < 1) throw PreconditionError("n_intervals must be positive");
  std::vector<double> times;
  const double T = std::fabs(t);
  for (int k = 0; k <= n_intervals; ++k) times.push_back(T * k / n_intervals);
  std::vector<FlowSample> out;
  sample_flow(prob, x, t, times, out, opts);
  return out;
}

std::string trajectory_csv(const std::vector<FlowSample>& trace, int direction) {
  std::ostringstream os;
  os.precision(17);
  os << "t";
  const std::size_t n = trace.empty() ? 0 : trace.front().x.size();
  for (std::size_t i = 0; i < n; ++i) os << ",x" << (i + 1);
  os << ",int_nu,int_div,int_sigma_p\n";
  for (const auto& s : trace) {
    os << (direction < 0 ? -s.s : s.s);
    for (double v : s.x) os << ',' << v;
    os << ',' << s.int_nu << ',' << s.int_div << ',' << s.int_sigma_p << '\n';
  }
  return os.str();
}

}  // namespace streamspec
