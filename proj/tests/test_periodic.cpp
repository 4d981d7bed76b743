#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "streamspec/periodic.hpp"

using namespace streamspec;
using nlohmann::json;

namespace {

constexpr double two_pi = 2 * std::numbers::pi;
const Complex I(0.0, 1.0);

std::vector<PeriodicPointData> periodic_sample(const ProblemSpec& prob, int n, std::uint64_t seed) {
  PointSampler sampler(prob, seed);
  std::vector<PeriodicPointData> out;
  for (int k = 0; k < n; ++k) out.push_back(periodic_point_data(prob, sampler.next()));
  return out;
}

std::vector<Complex> lattice(double re, long k_max, double step = 1.0) {
  std::vector<Complex> v;
  for (long k = -k_max; k <= k_max; ++k) v.emplace_back(re, step * k);
  return v;
}

}  // namespace

TEST_CASE("periodic point data") {
  auto rot = builtin("rotation");
  auto d = periodic_point_data(rot, Point{1.0, 0.0});
  CHECK(std::fabs(d.prime_period - two_pi) < 1e-6);
  CHECK(std::fabs(d.theta) < 1e-12);

  auto absorbing = builtin("rotation", {{"c", 0.35}});
  CHECK(periodic_point_data(absorbing, Point{0.2, 0.9}).theta ==
        doctest::Approx(-0.35).epsilon(1e-10));

  auto cosine = load_problem(json::parse(R"({"custom": {"dimension": 2, "field": ["-x1", "x0"],
                              "h": "x0", "domain": {"all": true}, "kappa": 1, "h_inf": -3}})"));
  CHECK(std::fabs(periodic_point_data(cosine, Point{1.3, -0.4}).theta) < 1e-9);

  CHECK_THROWS_AS(periodic_point_data(rot, Point{0.0, 0.0}), PreconditionError);
  auto slab = builtin("slab_constant");
  CHECK_THROWS_AS(periodic_point_data(slab, Point{0.5}), PreconditionError);
}

TEST_CASE("M_lambda and F_k") {
  PeriodicPointData d{{1.0, 0.0}, two_pi, 0.0};
  CHECK(m_lambda(d, 0.0) == Complex(1.0));
  CHECK(std::abs(m_lambda(d, I) - Complex(1.0)) < 1e-14);
  CHECK(std::abs(m_lambda(d, 0.5) - std::exp(-std::numbers::pi)) < 1e-15);
  PeriodicPointData e{{1.0}, 2.0, -0.3};
  CHECK(std::abs(m_lambda(e, -0.3) - Complex(1.0)) < 1e-15);

  CHECK(f_k(d, 0) == Complex(0.0));
  CHECK(std::abs(f_k(d, 1) - I) < 1e-15);
  CHECK(f_k(e, 0) == Complex(-0.3));
  PeriodicPointData fast{{1.0, 0.0}, std::numbers::pi, 0.0};
  CHECK(std::abs(f_k(fast, 1) - 2.0 * I) < 1e-15);

  auto rot2 = builtin("rotation", {{"omega", 2.0}});
  CHECK(std::abs(f_k(periodic_point_data(rot2, Point{0.5, 0.5}), 1) - 2.0 * I) < 1e-6);
}

TEST_CASE("essential range") {
  std::vector<Complex> constant(50, Complex(0.7));
  auto c = essential_range(constant);
  REQUIRE(c.retained.size() == 1);
  CHECK(c.retained[0] == Complex(0.7));

  std::vector<Complex> two;
  for (int k = 0; k < 30; ++k) two.emplace_back(k % 2 ? 1.0 : 2.0);
  auto t = essential_range(two);
  REQUIRE(t.retained.size() == 2);
  CHECK(t.retained[0] == Complex(1.0));
  CHECK(t.retained[1] == Complex(2.0));

  std::vector<Complex> outlier(40, Complex(1.0));
  outlier.push_back(5.0);
  auto o = essential_range(outlier);
  REQUIRE(o.retained.size() == 1);
  CHECK(o.retained[0] == Complex(1.0));

  // An interval is kept as a bandwidth-spaced sampling of itself.
  std::vector<Complex> interval;
  for (int k = 0; k <= 1000; ++k) interval.emplace_back(-2.0 + k * 1e-3);
  auto iv = essential_range(interval, {}, 2e-3);
  CHECK(iv.retained.front() == Complex(-2.0));
  CHECK(iv.retained.back().real() > -1.003);
  for (std::size_t k = 1; k < iv.retained.size(); ++k)
    CHECK(iv.retained[k].real() - iv.retained[k - 1].real() <= 2.0 * 2e-3 + 1e-12);

  auto w = essential_range({1.0, 2.0}, {0.99, 0.01}, std::nullopt, 0.05);
  CHECK(w.retained == std::vector<Complex>{1.0});
  double sum = 0;
  for (double x : w.weights) sum += x;
  CHECK(sum == doctest::Approx(1.0));

  CHECK_THROWS_AS(essential_range({}), PreconditionError);
  CHECK_THROWS_AS(essential_range({1.0}, {1.0, 2.0}), PreconditionError);
}

TEST_CASE("candidate spectrum of the rotation group") {
  auto rot = builtin("rotation");
  auto sample = periodic_sample(rot, 40, 1);
  auto cand = candidate_spectrum_per(sample, 3);
  CHECK(hausdorff_distance(cand.set.discrete_points(), lattice(0.0, 3)) <= 1e-6);
  CHECK(cand.covered_band == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(cand.set.provenance.find("candidate") != std::string::npos);
  CHECK(cand.to_json()["resolvent_uniformity"] == "not checked");

  auto shifted = builtin("rotation", {{"c", 0.4}});
  auto cs = candidate_spectrum_per(periodic_sample(shifted, 40, 2), 3);
  CHECK(hausdorff_distance(cs.set.discrete_points(), lattice(-0.4, 3)) <= 1e-6);

  auto none = candidate_spectrum_per({}, 3);
  CHECK(none.set.is_empty());
  CHECK_FALSE(none.set.note.empty());

  auto filtered = candidate_spectrum_per(sample, 3, 1.0);  // every 𝔭 = 2π > 1
  CHECK(filtered.sample_size == 0);
  CHECK(filtered.set.is_empty());
}

TEST_CASE("M_lambda agrees with the candidate set in both directions") {
  auto rot = builtin("rotation", {{"c", 0.2}});
  auto sample = periodic_sample(rot, 30, 3);
  const long K = 4;
  auto cand = candidate_spectrum_per(sample, K);
  auto pts = cand.set.discrete_points();
  auto min_gap = [&](Complex lambda) {
    double best = 1e300;
    for (const auto& d : sample) best = std::min(best, std::abs(1.0 - m_lambda(d, lambda)));
    return best;
  };
  for (Complex lambda : pts) CHECK(min_gap(lambda) <= 1e-4);
  const double band = two_pi * K / cand.max_period;
  long tested = 0;
  for (double re = -1.5; re <= 1.5 + 1e-9; re += 0.1) {
    for (double im = -band; im <= band + 1e-9; im += 0.1) {
      Complex lambda(re, im);
      double dist = 1e300;
      for (Complex p : pts) dist = std::min(dist, std::abs(lambda - p));
      if (dist < 0.05) continue;
      CHECK(min_gap(lambda) >= 1e-3);
      ++tested;
    }
  }
  CHECK(tested > 500);
}

TEST_CASE("flow invariance of theta and the period") {
  auto cosine = load_problem(json::parse(R"({"custom": {"dimension": 2, "field": ["-x1", "x0"],
                              "h": "x0 + 0.5*x1^2", "domain": {"all": true}, "kappa": 1,
                              "h_inf": -3}})"));
  ClassificationConfig cfg;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 8; ++k) {
    Point x{u(rng), u(rng)};
    auto a = periodic_point_data(cosine, x, cfg);
    FlowResult moved = advance_flow(cosine, x, u(rng));
    auto b = periodic_point_data(cosine, moved.endpoint, cfg);
    CHECK(std::fabs(a.theta - b.theta) <= 1e-6);
    CHECK(std::fabs(a.prime_period - b.prime_period) <= 2 * cfg.period_refine_tol);
    // M_λ is constant along the orbit as well.
    CHECK(std::abs(m_lambda(a, Complex(0.3, 0.7)) - m_lambda(b, Complex(0.3, 0.7))) <= 1e-5);
  }
}

TEST_CASE("rest spectrum") {
  auto rot = builtin("rotation", {{"c", 2.0}});
  auto single = rest_spectrum(rot, {Point{0.0, 0.0}}, 1.0);
  CHECK(single.generator.discrete_points() == std::vector<Complex>{-2.0});
  REQUIRE(single.semigroup.discrete_points().size() == 1);
  CHECK(std::abs(single.semigroup.discrete_points()[0] - std::exp(-2.0)) < 1e-15);

  auto zero = builtin("rotation");
  auto z = rest_spectrum(zero, {Point{0.0, 0.0}, Point{0.0, 0.0}}, 3.0);
  CHECK(z.generator.discrete_points() == std::vector<Complex>{0.0});
  CHECK(z.semigroup.discrete_points() == std::vector<Complex>{1.0});

  // Two rest components with ν = 1 and ν = 3.
  auto still = load_problem(json::parse(R"j({"custom": {"dimension": 1, "field": ["0"],
                             "h": "2 + sign(x0)", "domain": {"box": [[-1, 1]]}, "kappa": 1}})j"));
  PointSampler sampler(still, 6);
  auto pts = sampler.draw(200);
  auto two = rest_spectrum(still, pts, 1.0);
  CHECK(two.generator.discrete_points() == std::vector<Complex>{-3.0, -1.0});

  // The set-level exp map agrees with the essential range of e^{-tν}.
  const double t = 0.8;
  std::vector<Complex> direct;
  for (const auto& x : pts) direct.emplace_back(std::exp(-t * nu(still, x)));
  auto er = essential_range(direct);
  CHECK(hausdorff_distance(rest_spectrum(still, pts, t).semigroup.discrete_points(),
                           er.retained) <= er.bandwidth);

  CHECK(rest_spectrum(zero, {}).generator.is_empty());
}

TEST_CASE("annular hull") {
  auto c = annular_hull(std::vector<double>{-1.0}, 1.0);
  REQUIRE(c.kind == SpectralSet::Kind::annulus);
  CHECK(c.r == doctest::Approx(std::exp(-1.0)));
  CHECK(c.r2 == c.r);

  auto a = annular_hull(std::vector<Interval>{{-2.0, -1.0}}, 1.0);
  REQUIRE(a.kind == SpectralSet::Kind::annulus);
  CHECK(a.r == doctest::Approx(std::exp(-2.0)));
  CHECK(a.r2 == doctest::Approx(std::exp(-1.0)));

  auto unit = annular_hull(std::vector<double>{0.0}, 2.7);
  CHECK(unit.contains(std::polar(1.0, 0.123)));
  CHECK_FALSE(unit.contains(0.9));

  auto merged = annular_hull(std::vector<double>{-1.0, -1.0005, -1.001, 0.5}, 1.0, 1e-3);
  REQUIRE(merged.kind == SpectralSet::Kind::union_of);
  CHECK(merged.members.size() == 2);

  // Rotating semigroup-side points by unit factors leaves the hull unchanged.
  std::vector<Complex> cand = {Complex(-0.5, 1.0), Complex(-0.5, -3.0), Complex(0.2, 2.0)};
  const double t = 1.3;
  std::vector<double> re, rotated;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phase(0, two_pi);
  for (Complex l : cand) {
    re.push_back(l.real());
    const Complex z = std::polar(1.0, phase(rng)) * std::exp(t * l);
    rotated.push_back(std::log(std::abs(z)) / t);
  }
  auto h1 = annular_hull(re, t, 1e-9), h2 = annular_hull(rotated, t, 1e-9);
  CHECK(h1.to_json() == h2.to_json());
}

TEST_CASE("spectral mapping failure for the rotation group") {
  auto full = smt_counterexample_report(two_pi, 5);
  CHECK(full.collapsed_to_one);
  REQUIRE(full.points.size() == 1);
  CHECK(full.points[0] == Complex(1.0));
  CHECK(full.max_gap == doctest::Approx(two_pi));

  auto half = smt_counterexample_report(std::numbers::pi, 5);
  CHECK(half.points.size() == 2);
  CHECK(half.max_gap == doctest::Approx(std::numbers::pi));

  auto one = smt_counterexample_report(1.0, 100);
  CHECK(one.points.size() == 201);
  CHECK(one.max_gap < 0.63);
  CHECK(one.strict_inclusion);
  // Oracle: sorted k mod 2π.
  std::vector<double> ang;
  for (long k = -100; k <= 100; ++k) ang.push_back(std::fmod(k + 1000 * two_pi, two_pi));
  std::sort(ang.begin(), ang.end());
  double gap = two_pi - ang.back() + ang.front();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  CHECK(one.max_gap == doctest::Approx(gap).epsilon(1e-9));
  CHECK(one.to_json()["strict_inclusion"] == true);

  CHECK_THROWS_AS(smt_counterexample_report(0.0, 3), PreconditionError);
}

TEST_CASE("periodic CSV") {
  std::vector<PeriodicPointData> d = {{{1.0, 0.0}, 6.5, -0.25}};
  CHECK(periodic_csv(d) == "x1,x2,prime_period,theta\n1,0,6.5,-0.25\n");
}
