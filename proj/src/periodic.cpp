#include "streamspec/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace streamspec {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

bool complex_less(Complex a, Complex b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}
}  // namespace

PeriodicPointData periodic_point_data(const ProblemSpec& prob, PointView x, double prime_period,
                                      const FlowOptions& opts) {
  if (!(prime_period > 0.0)) throw PreconditionError("prime period must be positive");
  FlowResult r = advance_flow(prob, x, prime_period, opts);
  if (!r.ok()) throw NumericalError("periodic orbit left the domain or failed: " + r.message);
  PeriodicPointData d;
  d.x.assign(x.begin(), x.end());
  d.prime_period = prime_period;
  d.theta = -r.int_nu / prime_period + 0.0;  // no -0 in reports
  return d;
}

PeriodicPointData periodic_point_data(const ProblemSpec& prob, PointView x,
                                      const ClassificationConfig& cfg) {
  PhaseClass c = classify_point(prob, x, cfg);
  if (c.tag != PhaseTag::Omega3Periodic)
    throw PreconditionError("periodic_point_data: point is " + to_string(c.tag) +
                            ", not on a periodic orbit");
  return periodic_point_data(prob, x, *c.prime_period, cfg.period_flow);
}

Complex m_lambda(const PeriodicPointData& d, Complex lambda) {
  return std::exp(-d.prime_period * (lambda - d.theta));
}

Complex f_k(const PeriodicPointData& d, long k) {
  return {d.theta, two_pi * static_cast<double>(k) / d.prime_period};
}

EssentialRangeApprox essential_range(const std::vector<Complex>& values,
                                     std::vector<double> weights,
                                     std::optional<double> bandwidth,
                                     std::optional<double> threshold) {
  const std::size_t n = values.size();
  if (n == 0) throw PreconditionError("essential_range: empty sample");
  if (weights.empty()) weights.assign(n, 1.0);
  if (weights.size() != n) throw PreconditionError("essential_range: weights do not match values");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw PreconditionError("essential_range: weights must have positive sum");
  for (double& w : weights) {
    if (w < 0.0) throw PreconditionError("essential_range: negative weight");
    w /= total;
  }
  EssentialRangeApprox out;
  out.values = values;
  out.weights = weights;
  double scale = 0.0;
  for (Complex v : values) scale = std::max(scale, std::abs(v));
  out.bandwidth = bandwidth.value_or(1e-4 * (1.0 + scale));
  out.threshold = threshold.value_or(std::min(2.0 / static_cast<double>(n), 1.0));

  // Single linkage through a union-find over pairs closer than the bandwidth,
  // scanning a window of the values sorted by real part.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return complex_less(values[a], values[b]); });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex va = values[order[a]], vb = values[order[b]];
      if (vb.real() - va.real() > out.bandwidth) break;
      if (std::abs(vb - va) <= out.bandwidth) parent[find(order[a])] = find(order[b]);
    }
  }
  std::vector<double> mass(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) mass[find(i)] += weights[i];

  // Walk in sorted order so thinning is deterministic.
  std::vector<std::vector<Complex>> kept(n);
  for (std::size_t idx : order) {
    const std::size_t root = find(idx);
    if (mass[root] + 1e-12 < out.threshold) continue;
    auto& reps = kept[root];
    const Complex v = values[idx];
    const bool near = std::any_of(reps.begin(), reps.end(),
                                  [&](Complex r) { return std::abs(r - v) <= out.bandwidth; });
    if (!near) reps.push_back(v);
  }
  for (const auto& reps : kept) out.retained.insert(out.retained.end(), reps.begin(), reps.end());
  std::sort(out.retained.begin(), out.retained.end(), complex_less);
  return out;
}

nlohmann::json CandidateSpectrum::to_json() const {
  nlohmann::json j = set.to_json();
  j["K"] = k_max;
  j["covered_band"] = covered_band;
  j["max_period"] = max_period;
  j["sample_size"] = sample_size;
  j["bounded_period_hypothesis"] = "unverified (empirical max period reported)";
  j["resolvent_uniformity"] = "not checked";
  if (period_filter) j["period_filter"] = *period_filter;
  return j;
}

CandidateSpectrum candidate_spectrum_per(const std::vector<PeriodicPointData>& sample, long k_max,
                                         std::optional<double> period_filter) {
  if (k_max < 0) throw PreconditionError("candidate_spectrum_per: K must be non-negative");
  CandidateSpectrum out;
  out.k_max = k_max;
  out.period_filter = period_filter;
  std::vector<const PeriodicPointData*> used;
  for (const auto& d : sample)
    if (!period_filter || d.prime_period <= *period_filter) used.push_back(&d);
  out.sample_size = used.size();
  const std::string prov = "candidate spectrum (inclusion-certified side only)";
  if (used.empty()) {
    out.set = SpectralSet::empty_set(prov);
    out.set.note = "no periodic sample points";
    return out;
  }
  for (const auto* d : used) out.max_period = std::max(out.max_period, d->prime_period);
  out.covered_band = two_pi * static_cast<double>(k_max + 1) / out.max_period;

  std::vector<Complex> pts;
  for (long k = -k_max; k <= k_max; ++k) {
    std::vector<Complex> fk;
    fk.reserve(used.size());
    for (const auto* d : used) fk.push_back(f_k(*d, k));
    auto er = essential_range(fk);
    pts.insert(pts.end(), er.retained.begin(), er.retained.end());
  }
  std::sort(pts.begin(), pts.end(), complex_less);
  out.set = SpectralSet::discrete(std::move(pts), prov);
  std::ostringstream note;
  note << "truncated at |k| <= " << k_max << "; resolvent uniformity not checked";
  out.set.note = note.str();
  return out;
}

RestSpectrum rest_spectrum(const ProblemSpec& prob, const std::vector<Point>& rest_points,
                           double t) {
  RestSpectrum out;
  out.t = t;
  const std::string prov = "essential range of -nu on rest points";
  if (rest_points.empty()) {
    out.generator = SpectralSet::empty_set(prov);
    out.generator.note = "no rest points in the sample";
    out.semigroup = SpectralSet::empty_set(prov);
    return out;
  }
  std::vector<Complex> vals;
  vals.reserve(rest_points.size());
  for (const auto& x : rest_points) vals.emplace_back(-nu(prob, x));
  auto er = essential_range(vals);
  out.generator = SpectralSet::discrete(er.retained, prov);
  out.semigroup = out.generator.exp_map(t);
  return out;
}

SpectralSet annular_hull(std::vector<double> reals, double t, double merge_gap) {
  std::sort(reals.begin(), reals.end());
  std::vector<Interval> ivs;
  for (double a : reals) {
    if (!ivs.empty() && a - ivs.back().hi <= merge_gap)
      ivs.back().hi = std::max(ivs.back().hi, a);
    else
      ivs.push_back({a, a});
  }
  return annular_hull(std::move(ivs), t);
}

SpectralSet annular_hull(std::vector<Interval> reals, double t) {
  std::sort(reals.begin(), reals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : reals) {
    if (iv.hi < iv.lo) throw PreconditionError("annular_hull: interval with hi < lo");
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  const std::string prov = "annular hull T*exp(t*(sigma cap R))";
  std::vector<SpectralSet> parts;
  for (const auto& iv : merged) {
    double r1 = std::exp(iv.lo * t), r2 = std::exp(iv.hi * t);
    if (r1 > r2) std::swap(r1, r2);
    parts.push_back(SpectralSet::annulus(r1, r2, prov));
  }
  if (parts.size() == 1) return parts.front();
  return SpectralSet::union_of(std::move(parts), prov);
}

nlohmann::json SmtReport::to_json() const {
  auto pts = nlohmann::json::array();
  for (Complex p : points) pts.push_back({p.real(), p.imag()});
  return {{"t", t},
          {"K", k_max},
          {"distinct_points", points.size()},
          {"image_points", pts},
          {"max_circular_gap", max_gap},
          {"collapsed_to_one", collapsed_to_one},
          {"semigroup_spectrum", "unit circle"},
          {"strict_inclusion", strict_inclusion},
          {"statement", strict_inclusion ? "exp(t*sigma(T)) is a proper subset of T = sigma(U(t))"
                                         : "finite image covers the circle"}};
}

SmtReport smt_counterexample_report(double t, long k_max) {
  if (!(t > 0.0)) throw PreconditionError("smt report: t must be positive");
  if (k_max < 0) throw PreconditionError("smt report: K must be non-negative");
  SmtReport rep;
  rep.t = t;
  rep.k_max = k_max;
  const double snap = 1e-9;
  std::vector<double> angles;
  for (long k = -k_max; k <= k_max; ++k) {
    double a = std::fmod(static_cast<double>(k) * t, two_pi);
    if (a < 0.0) a += two_pi;
    if (a < snap || two_pi - a < snap) a = 0.0;
    angles.push_back(a);
  }
  std::sort(angles.begin(), angles.end());
  for (double a : angles)
    if (rep.angles.empty() || a - rep.angles.back() > 1e-12) rep.angles.push_back(a);
  if (rep.angles.size() > 1 && two_pi - rep.angles.back() + rep.angles.front() <= 1e-12)
    rep.angles.pop_back();
  for (double a : rep.angles) rep.points.push_back(a == 0.0 ? Complex(1.0) : std::polar(1.0, a));
  rep.max_gap = two_pi - rep.angles.back() + rep.angles.front();
  for (std::size_t i = 1; i < rep.angles.size(); ++i)
    rep.max_gap = std::max(rep.max_gap, rep.angles[i] - rep.angles[i - 1]);
  rep.collapsed_to_one = rep.angles.size() == 1 && rep.angles.front() == 0.0;
  rep.strict_inclusion = rep.max_gap > 0.0;
  return rep;
}

std::string periodic_csv(const std::vector<PeriodicPointData>& data) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t dim = data.empty() ? 0 : data.front().x.size();
  for (std::size_t k = 0; k < dim; ++k) os << 'x' << k + 1 << ',';
  os << "prime_period,theta\n";
  for (const auto& d : data) {
    for (double v : d.x) os << v << ',';
    os << d.prime_period << ',' << d.theta << '\n';
  }
  return os.str();
}

}  // namespace streamspec
