#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "doctest.h"
#include "streamspec/phase.hpp"

using namespace streamspec;

namespace {
constexpr double two_pi = 2 * std::numbers::pi;
}

TEST_CASE("classify_point examples") {
  auto rot = builtin("rotation");
  PhaseClass c = classify_point(rot, Point{1.0, 0.0});
  REQUIRE(c.tag == PhaseTag::Omega3Periodic);
  CHECK(std::fabs(*c.prime_period - two_pi) < 1e-6);

  CHECK(classify_point(rot, Point{0.0, 0.0}).tag == PhaseTag::Omega3Rest);

  auto slab = builtin("slab_constant");
  PhaseClass s = classify_point(slab, Point{0.3});
  CHECK(s.tag == PhaseTag::Omega1);
  CHECK(std::fabs(s.exits.tau_plus.value - 0.7) < 1e-8);

  auto half = builtin("half_line");
  CHECK(classify_point(half, Point{3.0}).tag == PhaseTag::Omega2);
  auto back = builtin("half_line", {{"velocity", -1.0}});
  CHECK(classify_point(back, Point{3.0}).tag == PhaseTag::Omega1);

  auto fs = builtin("free_streaming");
  CHECK(classify_point(fs, Point{0.2, 0.5}).tag == PhaseTag::Omega3Infinite);

  CHECK_THROWS_AS(classify_point(slab, Point{2.0}), PreconditionError);
}

TEST_CASE("short horizons are reported as censored, not infinite") {
  auto fs = builtin("free_streaming");
  ClassificationConfig cfg;
  cfg.horizon = 5.0;  // below 4π/κ
  PhaseClass c = classify_point(fs, Point{0.2, 0.5}, cfg);
  CHECK(c.tag == PhaseTag::Censored);
  CHECK_FALSE(c.reason.empty());
}

TEST_CASE("prime period examples") {
  auto rot = builtin("rotation");
  PeriodEstimate p = estimate_prime_period(rot, Point{0.3, -1.2});
  REQUIRE_FALSE(p.censored);
  CHECK(std::fabs(p.period - two_pi) < 1e-6);

  auto fast = builtin("rotation", {{"omega", 2.0}});
  PeriodEstimate q = estimate_prime_period(fast, Point{0.5, 0.5});
  REQUIRE_FALSE(q.censored);
  CHECK(std::fabs(q.period - std::numbers::pi) < 1e-6);

  auto vfp = builtin("vfp_fourier");
  CHECK(estimate_prime_period(vfp, Point{0.5, 0.1}).censored);
  CHECK(classify_point(vfp, Point{0.5, 0.1}).tag == PhaseTag::Omega3Infinite);
}

TEST_CASE("Yorke bound and multiples of the period") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2, 2);
  for (double omega : {1.0, -0.5, 3.0}) {
    auto rot = builtin("rotation", {{"omega", omega}});
    ClassificationConfig cfg;
    cfg.horizon = 4 * two_pi / std::fabs(omega);
    for (int k = 0; k < 10; ++k) {
      Point x{u(rng), u(rng)};
      PeriodEstimate p = estimate_prime_period(rot, x, cfg);
      REQUIRE_FALSE(p.censored);
      CHECK(p.period >= two_pi / rot.field.kappa - cfg.period_tol);
      CHECK(std::fabs(p.period - two_pi / std::fabs(omega)) < 1e-6);
      const double tol = cfg.return_tol * (1 + norm2(x));
      for (int m : {2, 3}) {
        FlowResult r = advance_flow(rot, x, m * p.period, cfg.period_flow);
        CHECK(distance(r.endpoint, x) <= 10 * tol);
      }
    }
  }
}

TEST_CASE("classification is invariant under the flow") {
  auto rot = builtin("rotation");
  ClassificationConfig cfg;
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 10; ++k) {
    Point x{u(rng), u(rng)};
    PhaseClass a = classify_point(rot, x, cfg);
    REQUIRE(a.tag == PhaseTag::Omega3Periodic);
    FlowResult moved = advance_flow(rot, x, u(rng));
    PhaseClass b = classify_point(rot, moved.endpoint, cfg);
    REQUIRE(b.tag == a.tag);
    CHECK(std::fabs(*a.prime_period - *b.prime_period) <= 2 * cfg.period_refine_tol);
  }
  auto fs = builtin("free_streaming");
  PointSampler sampler(fs, 4);
  for (int k = 0; k < 5; ++k) {
    Point x = sampler.next();
    FlowResult moved = advance_flow(fs, x, u(rng));
    CHECK(classify_point(fs, moved.endpoint, cfg).tag == classify_point(fs, x, cfg).tag);
  }
  CHECK(classify_point(rot, Point{0, 0}, cfg).tag == PhaseTag::Omega3Rest);
}

TEST_CASE("the κ-independent return search exposes a wrong Lipschitz constant") {
  auto rot = builtin("rotation", {{"kappa", 0.1}});
  ClassificationConfig cfg;
  cfg.horizon = 20.0;
  PeriodEstimate r = first_return_time(rot, Point{1.0, 0.0}, cfg);
  REQUIRE_FALSE(r.censored);
  CHECK(std::fabs(r.period - two_pi) < 1e-6);
  CHECK(r.period < two_pi / rot.field.kappa);
}

TEST_CASE("sample statistics") {
  SUBCASE("lorentz slab has no Ω₃ mass") {
    auto lor = builtin("lorentz");
    PointSampler sampler(lor, 1);
    auto s = classify_sample(lor, sampler, 500);
    CHECK(s.omega3_fraction() == 0.0);
    CHECK(s.count(PhaseTag::Censored) == 0);
    CHECK(s.fraction(PhaseTag::Omega1) + s.fraction(PhaseTag::Omega2) == doctest::Approx(1.0));
  }
  SUBCASE("rotation is periodic almost everywhere") {
    auto rot = builtin("rotation");
    PointSampler sampler(rot, 2);
    auto s = classify_sample(rot, sampler, 500);
    CHECK(s.fraction(PhaseTag::Omega3Periodic) == 1.0);
    CHECK(s.max_period() == doctest::Approx(two_pi).epsilon(1e-8));
  }
  SUBCASE("free streaming never returns") {
    auto fs = builtin("free_streaming");
    PointSampler sampler(fs, 3);
    auto s = classify_sample(fs, sampler, 500);
    CHECK(s.count(PhaseTag::Omega3Periodic) == 0);
    CHECK(s.count(PhaseTag::Omega3Rest) == 0);
  }
  auto rot = builtin("rotation");
  PointSampler sampler(rot, 2);
  CHECK_THROWS_AS(classify_sample(rot, sampler, 0), PreconditionError);
}

TEST_CASE("serial and parallel classification agree exactly") {
  auto lor = builtin("lorentz");
  PointSampler sampler(lor, 9);
  auto pts = sampler.draw(60);
  auto a = classify_points(lor, pts, {}, Execution::serial);
  auto b = classify_points(lor, pts, {}, Execution::parallel);
  CHECK(classification_csv(a) == classification_csv(b));
}

TEST_CASE("classification CSV") {
  auto slab = builtin("slab_constant");
  auto s = classify_points(slab, {Point{0.25}});
  const std::string csv = classification_csv(s);
  REQUIRE(csv.rfind("x1,tag,tau_minus,tau_plus,prime_period\n0.25,Omega1,", 0) == 0);
  double tm = 0, tp = 0;
  REQUIRE(std::sscanf(csv.c_str() + csv.find("Omega1,") + 7, "%lf,%lf,", &tm, &tp) == 2);
  CHECK(std::fabs(tm - 0.25) < 1e-9);
  CHECK(std::fabs(tp - 0.75) < 1e-9);
  CHECK(csv.back() == '\n');
  CHECK(csv[csv.size() - 2] == ',');
}

TEST_CASE("configuration validation") {
  ClassificationConfig cfg;
  cfg.horizon = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.return_tol = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
