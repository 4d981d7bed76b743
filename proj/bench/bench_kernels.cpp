// Serial reference vs OpenMP kernels: wall time and agreement.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "streamspec/growth.hpp"
#include "streamspec/semigroup.hpp"

using namespace streamspec;

namespace {

double seconds(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const char* name, double serial, double parallel, double max_diff) {
  std::printf("%-22s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  max diff %.1e\n", name,
              serial, parallel, serial / parallel, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 2000;
  std::printf("threads %d, %d points\n", max_threads(), n);

  auto vfp = builtin("vfp_fourier", {{"N", 2}});
  PointSampler vs(vfp, 1);
  auto vpts = vs.draw(n);
  PointFunction f = [](PointView x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return Complex(std::exp(-r2));
  };
  std::vector<ApplyResult> a, b;
  const double ts = seconds([&] { a = apply_U_points(vfp, f, 1.0, vpts, {}, Execution::serial); });
  const double tp = seconds([&] { b = apply_U_points(vfp, f, 1.0, vpts, {}, Execution::parallel); });
  double diff = 0;
  for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(a[i].value - b[i].value));
  row("apply_U_points", ts, tp, diff);

  auto rot = builtin("rotation", {{"c", 0.2}});
  PointSampler rs(rot, 2);
  auto rpts = rs.draw(n / 4);
  SampleClassification cs, cp;
  const double cs_t = seconds([&] { cs = classify_points(rot, rpts, {}, Execution::serial); });
  const double cp_t = seconds([&] { cp = classify_points(rot, rpts, {}, Execution::parallel); });
  diff = 0;
  for (std::size_t i = 0; i < cs.classes.size(); ++i) {
    if (cs.classes[i].tag != cp.classes[i].tag) diff = INFINITY;
    if (cs.classes[i].prime_period && cp.classes[i].prime_period)
      diff = std::max(diff, std::fabs(*cs.classes[i].prime_period - *cp.classes[i].prime_period));
  }
  row("classify_points", cs_t, cp_t, diff);

  auto half = builtin("half_line", {{"c", 0.7}, {"transient", 1.0}});
  PointSampler hs(half, 3);
  auto hpts = hs.draw(n);
  auto grid = uniform_grid(20.0, 40);
  GrowthEstimate gs, gp;
  const double gs_t = seconds([&] { gs = gamma2_estimate(half, hpts, grid, {}, Execution::serial); });
  const double gp_t = seconds([&] { gp = gamma2_estimate(half, hpts, grid, {}, Execution::parallel); });
  diff = 0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (std::isfinite(gs.inf_avg[k])) diff = std::max(diff, std::fabs(gs.inf_avg[k] - gp.inf_avg[k]));
  row("gamma2_estimate", gs_t, gp_t, diff);

  std::vector<NormEstimate> ns, np;
  const double ns_t = seconds([&] { ns = norm_table(half, grid, hpts, {}, Execution::serial); });
  const double np_t = seconds([&] { np = norm_table(half, grid, hpts, {}, Execution::parallel); });
  diff = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) diff = std::max(diff, std::fabs(ns[k].value - np[k].value));
  row("norm_table", ns_t, np_t, diff);
  return 0;
}
