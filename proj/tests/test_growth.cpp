#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "streamspec/growth.hpp"

using namespace streamspec;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("spectral set membership and the exponential map") {
  auto hp = SpectralSet::half_plane(-0.5);
  CHECK(hp.contains({-0.5, 100.0}));
  CHECK(hp.contains({-3.0, -2.0}));
  CHECK_FALSE(hp.contains({-0.49, 0.0}));

  // exp(t·{Re ≤ -γ}) is the disk of radius e^{-γt} without the origin.
  for (double t : {0.5, 1.0, 3.0}) {
    auto img = hp.exp_map(t);
    REQUIRE(img.kind == SpectralSet::Kind::disk);
    CHECK(img.punctured);
    const double rad = std::exp(-0.5 * t);
    CHECK(img.r == doctest::Approx(rad).epsilon(1e-15));
    CHECK(img.contains(std::polar(rad, 1.234)));
    CHECK(img.contains(std::polar(rad * 0.999, -2.0)));
    CHECK_FALSE(img.contains(std::polar(rad * 1.001, 0.3)));
    CHECK_FALSE(img.contains(0.0));
    // Every sampled boundary point has a preimage on the boundary line.
    for (double th = -3.0; th < 3.2; th += 0.5)
      CHECK(std::abs(std::exp(t * Complex(-0.5, th / t)) - std::polar(rad, th)) < 1e-14);
  }

  auto lines = SpectralSet::vertical_lines({0.0, -1.0}, 1.0);
  CHECK(lines.contains({0.0, 3.0}));
  CHECK(lines.contains({-1.0, -2.0}));
  CHECK_FALSE(lines.contains({0.0, 0.5}));
  auto circles = lines.exp_map(1.0);
  CHECK(circles.contains(std::polar(1.0, 0.7)));
  CHECK(circles.contains(std::polar(std::exp(-1.0), 2.0)));
  CHECK_FALSE(circles.contains(0.5));

  auto d = SpectralSet::discrete({Complex(0, 1), Complex(-1, 0)});
  auto de = d.exp_map(std::numbers::pi);
  CHECK(de.contains(-1.0, 1e-12));
  CHECK(de.contains(std::exp(-std::numbers::pi), 1e-12));

  CHECK_THROWS_AS(SpectralSet::disk(1.0).exp_map(1.0), PreconditionError);
  CHECK(SpectralSet::empty_set().exp_map(2.0).is_empty());
}

TEST_CASE("unions, annuli and JSON") {
  auto u = SpectralSet::union_of(
      {SpectralSet::empty_set(), SpectralSet::annulus(0.5, 1.0),
       SpectralSet::union_of({SpectralSet::discrete({2.0}), SpectralSet::circle(3.0)})});
  REQUIRE(u.kind == SpectralSet::Kind::union_of);
  CHECK(u.members.size() == 3);
  CHECK(u.contains(std::polar(0.75, 1.0)));
  CHECK(u.contains(2.0));
  CHECK(u.contains(std::polar(3.0, -1.0)));
  CHECK_FALSE(u.contains(2.5));
  CHECK_FALSE(u.contains(0.2));
  auto j = u.to_json();
  CHECK(j["kind"] == "union");
  CHECK(j["members"][0]["kind"] == "annulus");
  CHECK(SpectralSet::half_plane(-inf).to_json()["re_max"] == "-inf");
  CHECK(SpectralSet::union_of({}).is_empty());
  CHECK_THROWS_AS(SpectralSet::annulus(2.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(u.discrete_points(), PreconditionError);
  CHECK(SpectralSet::discrete({1.0}).to_gnuplot() == "1 0\n\n");
}

TEST_CASE("Hausdorff distance") {
  std::vector<Complex> a = {0.0, Complex(0, 1)}, b = {0.0, Complex(0, 1.5)};
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.5));
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance({}, {}) == 0.0);
  CHECK(hausdorff_distance(a, {}) == inf);
}

TEST_CASE("gamma1 on the slab is nilpotent") {
  const double c = 0.9;
  auto slab = builtin("slab_constant", {{"c", c}});
  PointSampler sampler(slab, 1);
  auto pts = sampler.draw(200);
  auto grid = uniform_grid(2.0, 20);
  auto g = gamma1_estimate(slab, pts, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 0.9) {
      CHECK(g.admissible_counts[k] > 0);
      CHECK(g.inf_avg[k] == doctest::Approx(c).epsilon(1e-12));
    }
    if (grid[k] >= 1.0) {
      CHECK(g.admissible_counts[k] == 0);
      CHECK(g.inf_avg[k] == inf);
    }
  }
  CHECK(g.gamma_hat == inf);
  CHECK(g.nilpotent);
  CHECK(g.censored);

  auto zero = builtin("slab_constant");
  auto z = gamma1_estimate(zero, pts, uniform_grid(0.8, 8));
  for (double v : z.inf_avg) CHECK(v == 0.0);
  CHECK(z.gamma_hat == 0.0);
}

TEST_CASE("gamma1 on a half-line with inflow from infinity") {
  auto half = builtin("half_line", {{"velocity", -1.0}, {"c", 0.4}});
  PointSampler sampler(half, 2);
  auto g = gamma1_estimate(half, sampler.draw(50), uniform_grid(10.0, 20));
  for (double v : g.inf_avg) CHECK(v == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(g.gamma_hat == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_FALSE(g.nilpotent);
}

TEST_CASE("gamma2 estimates") {
  auto grid = uniform_grid(30.0, 30);
  SUBCASE("constant absorption") {
    auto half = builtin("half_line", {{"c", 0.7}});
    PointSampler sampler(half, 3);
    auto g = gamma2_estimate(half, sampler.draw(200), grid);
    CHECK(std::fabs(g.gamma_hat - 0.7) <= 1e-9);
    CHECK_FALSE(g.censored);
  }
  SUBCASE("a decaying transient is forgotten") {
    auto half = builtin("half_line", {{"c", 0.7}, {"transient", 1.0}});
    PointSampler sampler(half, 3);
    auto pts = sampler.draw(200);
    auto g = gamma2_estimate(half, pts, grid);
    CHECK(std::fabs(g.gamma_hat - 0.7) <= 5e-3);
    // Oracle: t⁻¹∫₀ᵗ (c + e^{-(x+s)}) ds = c + e^{-x}(1 - e^{-t})/t, minimised
    // over admissible sample points.
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double t = grid[k];
      double best = inf;
      for (const auto& x : pts)
        if (t < x[0]) best = std::min(best, 0.7 + std::exp(-x[0]) * (1 - std::exp(-t)) / t);
      if (std::isfinite(best)) CHECK(g.inf_avg[k] == doctest::Approx(best).epsilon(1e-8));
    }
  }
  SUBCASE("p shifts gamma2 by d/p*") {
    const double d = 0.4;
    auto p1 = builtin("half_line", {{"c", 0.7}, {"d", d}, {"sample_max", 2000.0}});
    auto p2 = builtin("half_line", {{"c", 0.7}, {"d", d}, {"sample_max", 2000.0}, {"p", 2.0}});
    PointSampler sampler(p1, 4);
    auto pts = sampler.draw(200);
    auto short_grid = uniform_grid(10.0, 20);
    auto g1 = gamma2_estimate(p1, pts, short_grid);
    auto g2 = gamma2_estimate(p2, pts, short_grid);
    CHECK(std::fabs(g1.gamma_hat - 0.7) <= 1e-9);
    CHECK(std::fabs((g2.gamma_hat - g1.gamma_hat) - d / 2) <= 1e-3);
  }
  auto half = builtin("half_line");
  CHECK_THROWS_AS(gamma2_estimate(half, {}, grid), EmptyClassError);
  CHECK_THROWS_AS(gamma1_estimate(half, {Point{1.0}}, {1.0, 0.5}), PreconditionError);
  CHECK_THROWS_AS(gamma1_estimate(half, {Point{1.0}}, {0.0, 0.5}), PreconditionError);
}

TEST_CASE("enlarging the sample never raises inf_avg") {
  auto vfp = builtin("nordstrom");
  PointSampler sampler(vfp, 5);
  auto pts = sampler.draw(120);
  std::vector<Point> half(pts.begin(), pts.begin() + 60);
  auto grid = uniform_grid(0.5, 10);
  auto small = gamma1_estimate(vfp, half, grid);
  auto big = gamma1_estimate(vfp, pts, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(big.inf_avg[k] <= small.inf_avg[k]);
    CHECK(big.admissible_counts[k] >= small.admissible_counts[k]);
  }
}

TEST_CASE("assemble_spectrum") {
  auto a = assemble_spectrum(1.0, 2.0, 0.0, 1.0);
  CHECK(a.gamma == 1.0);
  CHECK(a.generator.kind == SpectralSet::Kind::half_plane);
  CHECK(a.generator.a == -1.0);
  CHECK(a.semigroup.kind == SpectralSet::Kind::disk);
  CHECK(a.semigroup.r == doctest::Approx(std::exp(-1.0)));

  auto z = assemble_spectrum(0.0, 0.0, 0.0, 1.0);
  CHECK(z.generator.a == 0.0);
  CHECK(z.semigroup.r == 1.0);

  auto one = assemble_spectrum(inf, 0.3, 0.0, 2.0);
  CHECK(one.gamma == 0.3);

  auto nil = assemble_spectrum(inf, std::nullopt, 0.0, 1.0);
  CHECK(nil.nilpotent);
  CHECK(nil.generator.is_empty());
  CHECK(nil.semigroup.contains(0.0));
  CHECK_FALSE(nil.semigroup.contains(0.01));

  CHECK_THROWS_AS(assemble_spectrum(1.0, 1.0, 0.02, 1.0), CompositionRequiredError);
}

TEST_CASE("type estimates and the identity omega0 = -gamma") {
  const double c = 0.7;
  auto grid = uniform_grid(10.0, 20);
  SUBCASE("half-line") {
    auto half = builtin("half_line", {{"c", c}});
    PointSampler sampler(half, 8);
    auto pts = sampler.draw(100);
    auto table = norm_table(half, grid, pts);
    const double w0 = type_estimate(table);
    CHECK(std::fabs(w0 + c) <= 1e-3);
    auto g = gamma2_estimate(half, pts, grid);
    CHECK(std::fabs(w0 + g.gamma_hat) <= 5e-3);
  }
  SUBCASE("rotation") {
    auto rot = builtin("rotation", {{"c", c}});
    PointSampler sampler(rot, 9);
    CHECK(type_estimate(norm_table(rot, grid, sampler.draw(30))) ==
          doctest::Approx(-c).epsilon(1e-9));
    auto free_rot = builtin("rotation");
    CHECK(std::fabs(type_estimate(norm_table(free_rot, grid, sampler.draw(30)))) < 1e-12);
  }
  SUBCASE("slab: norm e^{-ct} before nilpotency") {
    auto slab = builtin("slab_constant", {{"c", c}});
    PointSampler sampler(slab, 10);
    auto table = norm_table(slab, uniform_grid(0.9, 18), sampler.draw(400));
    CHECK(std::fabs(type_estimate(table) + c) <= 1e-3);
  }
  CHECK_THROWS_AS(type_estimate({1, 2, 3, 4}, {1, 1, 0, 0}), NumericalError);
  CHECK_THROWS_AS(type_estimate({1, 2}, {1}), PreconditionError);
}

TEST_CASE("deep sampling favours long backward exit times") {
  auto half = builtin("half_line");
  PointSampler a(half, 11), b(half, 11);
  auto uniform = a.draw(100);
  auto deep = deep_sample(half, b, 100, 40.0);
  double mu = 0, md = 0;
  for (const auto& x : uniform) mu += x[0];
  for (const auto& x : deep) md += x[0];
  CHECK(md > 1.1 * mu);
  PointSampler c(half, 11);
  CHECK(deep == deep_sample(half, c, 100, 40.0));
}

TEST_CASE("serial and parallel growth tables agree") {
  auto lor = builtin("lorentz");
  PointSampler sampler(lor, 12);
  auto pts = sampler.draw(50);
  auto grid = uniform_grid(1.0, 10);
  auto a = gamma1_estimate(lor, pts, grid, {}, Execution::serial);
  auto b = gamma1_estimate(lor, pts, grid, {}, Execution::parallel);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_json().dump() == b.to_json().dump());
}
