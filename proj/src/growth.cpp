#include "streamspec/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace streamspec {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw PreconditionError("t_grid is empty");
  if (!(t_grid.front() > 0.0)) throw PreconditionError("t_grid must be positive");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw PreconditionError("t_grid must be strictly increasing");
}

// One row per sample point: t⁻¹∫₀ᵗ Σ_p at each grid time, NaN where the
// point is not admissible.
std::vector<std::vector<double>> average_rows(const ProblemSpec& prob,
                                              const std::vector<Point>& sample,
                                              const std::vector<double>& t_grid, int direction,
                                              const GrowthConfig& cfg, Execution exec) {
  const double t_max = t_grid.back();
  const double tau_h = cfg.tau_horizon.value_or(t_max);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> rows(sample.size(), std::vector<double>(t_grid.size(), nan));
  for_each_index(sample.size(), exec, [&](std::size_t i) {
    const Point& x = sample[i];
    // Admissibility t < τ₋(x). For γ₁ the backward path itself reaches the
    // boundary at τ₋, so sample_flow already drops the inadmissible times.
    double tau_minus = inf;
    if (direction > 0) {
      ExitTime e = exit_time_one(prob, x, -1, tau_h, cfg.flow);
      if (e.finite()) tau_minus = e.value;
    }
    std::vector<FlowSample> samples;
    sample_flow(prob, x, direction * t_max, t_grid, samples, cfg.flow);
    for (const auto& s : samples) {
      const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), s.s);
      if (it == t_grid.end() || *it != s.s) continue;
      if (!(s.s < tau_minus)) continue;
      rows[i][static_cast<std::size_t>(it - t_grid.begin())] = s.int_sigma_p / s.s;
    }
  });
  return rows;
}

GrowthEstimate estimate(const ProblemSpec& prob, const std::vector<Point>& sample,
                        const std::vector<double>& t_grid, int direction,
                        const GrowthConfig& cfg, Execution exec) {
  if (sample.empty())
    throw EmptyClassError(direction < 0 ? "gamma1_estimate: no Omega1 points supplied"
                                        : "gamma2_estimate: no Omega2 points supplied");
  check_grid(t_grid);
  auto rows = average_rows(prob, sample, t_grid, direction, cfg, exec);

  GrowthEstimate g;
  g.direction = direction;
  g.t_grid = t_grid;
  g.inf_avg.assign(t_grid.size(), inf);
  g.admissible_counts.assign(t_grid.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (std::isnan(row[k])) continue;
      g.inf_avg[k] = std::min(g.inf_avg[k], row[k]);
      ++g.admissible_counts[k];
    }
  }
  const std::size_t n = t_grid.size();
  const std::size_t q0 = std::min(n - 1, (3 * n) / 4);
  double acc = 0.0;
  long finite = 0;
  for (std::size_t k = q0; k < n; ++k) {
    if (g.admissible_counts[k] == 0) {
      g.censored = true;
    } else {
      acc += g.inf_avg[k];
      ++finite;
    }
  }
  g.nilpotent = finite == 0;
  g.gamma_hat = finite ? acc / finite : inf;
  return g;
}

}  // namespace

GrowthEstimate gamma1_estimate(const ProblemSpec& prob, const std::vector<Point>& sample,
                               const std::vector<double>& t_grid, const GrowthConfig& cfg,
                               Execution exec) {
  return estimate(prob, sample, t_grid, -1, cfg, exec);
}

GrowthEstimate gamma2_estimate(const ProblemSpec& prob, const std::vector<Point>& sample,
                               const std::vector<double>& t_grid, const GrowthConfig& cfg,
                               Execution exec) {
  return estimate(prob, sample, t_grid, +1, cfg, exec);
}

nlohmann::json GrowthEstimate::to_json() const {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    table.push_back({{"t", t_grid[k]}, {"inf_avg", num(inf_avg[k])},
                     {"count", admissible_counts[k]}});
  return {{"gamma_hat", num(gamma_hat)},
          {"nilpotent", nilpotent},
          {"censored", censored},
          {"direction", direction < 0 ? "backward" : "forward"},
          {"table", table}};
}

std::string GrowthEstimate::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,inf_avg,count\n";
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    os << t_grid[k] << ',';
    if (std::isfinite(inf_avg[k]))
      os << inf_avg[k];
    else
      os << "inf";
    os << ',' << admissible_counts[k] << '\n';
  }
  return os.str();
}

std::vector<double> uniform_grid(double t_max, int n) {
  if (!(t_max > 0.0) || n < 1) throw PreconditionError("uniform_grid: need t_max > 0 and n >= 1");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = t_max * (k + 1) / n;
  return g;
}

AssembledSpectrum assemble_spectrum(std::optional<double> gamma1, std::optional<double> gamma2,
                                    double omega3_fraction, double t) {
  if (omega3_fraction > 0.0)
    throw CompositionRequiredError(
        "Omega3 carries mass; compose the per-class spectra instead of the half-plane form");
  AssembledSpectrum out;
  out.gamma = inf;
  for (auto g : {gamma1, gamma2})
    if (g && std::isfinite(*g)) out.gamma = std::min(out.gamma, *g);
  if (!std::isfinite(out.gamma)) {
    out.nilpotent = true;
    out.generator = SpectralSet::empty_set("nilpotent: admissible sets empty for large t");
    out.semigroup = SpectralSet::discrete({Complex(0.0)}, "nilpotent: U(t) = 0 for large t");
    return out;
  }
  out.generator = SpectralSet::half_plane(-out.gamma, "half-plane Re <= -gamma, gamma = min(gamma1, gamma2)");
  out.semigroup = SpectralSet::disk(std::exp(-out.gamma * t), false,
                                    "disk |z| <= exp(-gamma t), spectral mapping holds");
  return out;
}

double type_estimate(const std::vector<double>& t_grid, const std::vector<double>& norms) {
  if (t_grid.size() != norms.size())
    throw PreconditionError("type_estimate: t_grid and norms differ in length");
  std::vector<double> ts, ls;
  for (std::size_t k = t_grid.size() / 2; k < t_grid.size(); ++k) {
    if (norms[k] > 0.0 && std::isfinite(norms[k])) {
      ts.push_back(t_grid[k]);
      ls.push_back(std::log(norms[k]));
    }
  }
  if (ts.size() < 3) throw NumericalError("type_estimate: fewer than 3 usable tail points");
  const double n = static_cast<double>(ts.size());
  const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
  const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sxy += (ts[k] - mt) * (ls[k] - ml);
    sxx += (ts[k] - mt) * (ts[k] - mt);
  }
  return sxy / sxx;
}

double type_estimate(const std::vector<NormEstimate>& table) {
  std::vector<double> ts, ns;
  for (const auto& e : table) {
    ts.push_back(e.t);
    ns.push_back(e.value);
  }
  return type_estimate(ts, ns);
}

std::vector<Point> deep_sample(const ProblemSpec& prob, PointSampler& sampler, int n,
                               double horizon, int pool_factor, std::uint64_t seed,
                               const FlowOptions& opts) {
  if (n < 1 || pool_factor < 1) throw PreconditionError("deep_sample: n and pool_factor must be >= 1");
  auto pool = sampler.draw(n * pool_factor);
  std::vector<double> w(pool.size());
  for_each_index(pool.size(), Execution::parallel, [&](std::size_t i) {
    w[i] = exit_time_one(prob, pool[i], -1, horizon, opts).value;
  });
  // Weighted sampling without replacement: keep the n largest u^(1/w).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keys;
  keys.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double r = u(rng);
    keys.emplace_back(w[i] > 0.0 ? std::log(r) / w[i] : -inf, i);
  }
  std::sort(keys.begin(), keys.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) out.push_back(pool[keys[static_cast<std::size_t>(k)].second]);
  return out;
}

}  // namespace streamspec
