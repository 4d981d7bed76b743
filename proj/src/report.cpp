#include "streamspec/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "streamspec/growth.hpp"
#include "streamspec/periodic.hpp"
#include "streamspec/semigroup.hpp"

namespace streamspec {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double inf = std::numeric_limits<double>::infinity();

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double get_positive(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  const double v = j[key].get<double>();
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("'") + key + "' must be positive and finite");
  return v;
}

long get_integer(const json& j, const char* key, long fallback, long min_value) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError(std::string("'") + key + "' must be an integer");
  const long v = j[key].get<long>();
  if (v < min_value)
    throw ConfigError(std::string("'") + key + "' must be at least " + std::to_string(min_value));
  return v;
}

}  // namespace

json RunConfig::to_json() const {
  const auto& c = classification;
  json tol = {{"rtol", flow.rtol},
              {"atol", flow.atol},
              {"t_tol", flow.t_tol},
              {"return_tol", c.return_tol},
              {"period_refine_tol", c.period_refine_tol},
              {"period_tol", c.period_tol}};
  if (c.rest_tol) tol["rest_tol"] = *c.rest_tol;
  return {{"problem", problem},     {"seed", seed},       {"samples", samples},
          {"horizon", horizon},     {"t_max", t_max},     {"t_steps", t_steps},
          {"k_max", k_max},         {"t_eval", t_eval},   {"deep_sampling", deep_sampling},
          {"tolerances", tol}};
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"problem", "seed",    "samples", "horizon",
                                                 "t_max",   "t_steps", "k_max",   "t_eval",
                                                 "deep_sampling", "out_dir", "tolerances"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config key '" + key + "'");
  RunConfig cfg;
  if (!j.contains("problem")) throw ConfigError("config needs a 'problem' object");
  cfg.problem = j["problem"];
  load_problem(cfg.problem);  // fail early on a bad problem
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
      throw ConfigError("'seed' must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("samples") && !j["samples"].is_number_integer())
    throw ConfigError("'samples' must be a positive integer");
  cfg.samples = static_cast<int>(get_integer(j, "samples", cfg.samples, 1));
  cfg.horizon = get_positive(j, "horizon", cfg.horizon);
  cfg.t_max = get_positive(j, "t_max", cfg.t_max);
  cfg.t_steps = static_cast<int>(get_integer(j, "t_steps", cfg.t_steps, 3));
  cfg.k_max = get_integer(j, "k_max", cfg.k_max, 0);
  cfg.t_eval = get_positive(j, "t_eval", cfg.t_eval);
  if (j.contains("deep_sampling")) {
    if (!j["deep_sampling"].is_boolean()) throw ConfigError("'deep_sampling' must be a boolean");
    cfg.deep_sampling = j["deep_sampling"].get<bool>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw ConfigError("'out_dir' must be a string");
    cfg.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
    static const std::vector<std::string> tol_keys = {
        "rtol", "atol", "t_tol", "rest_tol", "return_tol", "period_refine_tol", "period_tol"};
    for (const auto& [key, _] : t.items())
      if (std::find(tol_keys.begin(), tol_keys.end(), key) == tol_keys.end())
        throw ConfigError("unknown tolerance '" + key + "'");
    cfg.flow.rtol = get_positive(t, "rtol", cfg.flow.rtol);
    cfg.flow.atol = get_positive(t, "atol", cfg.flow.atol);
    cfg.flow.t_tol = get_positive(t, "t_tol", cfg.flow.t_tol);
    auto& c = cfg.classification;
    if (t.contains("rest_tol")) c.rest_tol = get_positive(t, "rest_tol", 1.0);
    c.return_tol = get_positive(t, "return_tol", c.return_tol);
    c.period_refine_tol = get_positive(t, "period_refine_tol", c.period_refine_tol);
    c.period_tol = get_positive(t, "period_tol", c.period_tol);
  }
  cfg.classification.horizon = cfg.horizon;
  cfg.classification.flow = cfg.flow;
  cfg.classification.period_flow.t_tol = cfg.flow.t_tol;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON syntax error");
  }
  return parse_run_config(j);
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : cfg.to_json().dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

namespace {

struct Stage {
  ProblemSpec prob;
  SampleClassification cls;
};

Stage classify_stage(const RunConfig& cfg) {
  Stage s;
  s.prob = load_problem(cfg.problem);
  PointSampler sampler(s.prob, cfg.seed);
  s.cls = classify_sample(s.prob, sampler, cfg.samples, cfg.classification);
  return s;
}

json provenance(const RunConfig& cfg) {
  return {{"config_hash", config_hash(cfg)}, {"version", kVersion}, {"seed", cfg.seed}};
}

json classification_summary(const SampleClassification& s) {
  json counts, fractions;
  for (PhaseTag t : all_phase_tags) {
    counts[to_string(t)] = s.count(t);
    fractions[to_string(t)] = s.fraction(t);
  }
  json j = {{"samples", s.classes.size()},
            {"counts", counts},
            {"fractions", fractions},
            {"omega3_fraction", s.omega3_fraction()},
            {"hypotheses",
             {{"omega1_nonnull", {{"empirical_fraction", s.fraction(PhaseTag::Omega1)},
                                  {"status", "sampled estimate, not certified"}}},
              {"omega2_nonnull", {{"empirical_fraction", s.fraction(PhaseTag::Omega2)},
                                  {"status", "sampled estimate, not certified"}}}}}};
  if (s.count(PhaseTag::Omega3Periodic) > 0) {
    j["max_prime_period"] = s.max_period();
    j["bounded_period_hypothesis"] = "unverified (empirical max period reported)";
  }
  return j;
}

// Growth constants for Ω₁ and Ω₂ together with the norm table of U(t)
// restricted to those classes.
struct GrowthStage {
  std::optional<GrowthEstimate> g1, g2;
  std::vector<NormEstimate> norms;
  std::optional<double> omega0;
  json report;
};

GrowthStage growth_stage(const RunConfig& cfg, const Stage& st) {
  GrowthStage out;
  auto grid = uniform_grid(cfg.t_max, cfg.t_steps);
  GrowthConfig gc;
  gc.flow = cfg.flow;
  gc.tau_horizon = cfg.horizon;
  auto p1 = st.cls.points_with(PhaseTag::Omega1);
  auto p2 = st.cls.points_with(PhaseTag::Omega2);
  if (cfg.deep_sampling) {
    PointSampler extra(st.prob, cfg.seed + 1);
    auto deep = deep_sample(st.prob, extra, cfg.samples, cfg.horizon, 4, cfg.seed, cfg.flow);
    auto dc = classify_points(st.prob, deep, cfg.classification);
    for (auto& x : dc.points_with(PhaseTag::Omega1)) p1.push_back(x);
    for (auto& x : dc.points_with(PhaseTag::Omega2)) p2.push_back(x);
  }
  json& r = out.report;
  if (!p1.empty()) {
    out.g1 = gamma1_estimate(st.prob, p1, grid, gc);
    r["gamma1"] = out.g1->to_json();
  } else {
    r["gamma1"] = nullptr;
    r["gamma1_note"] = "no Omega1 points in the sample";
  }
  if (!p2.empty()) {
    out.g2 = gamma2_estimate(st.prob, p2, grid, gc);
    r["gamma2"] = out.g2->to_json();
  } else {
    r["gamma2"] = nullptr;
    r["gamma2_note"] = "no Omega2 points in the sample";
  }
  double gamma = inf;
  if (out.g1) gamma = std::min(gamma, out.g1->gamma_hat);
  if (out.g2) gamma = std::min(gamma, out.g2->gamma_hat);
  r["gamma"] = (out.g1 || out.g2) ? num(gamma) : json(nullptr);

  std::vector<Point> both = p1;
  both.insert(both.end(), p2.begin(), p2.end());
  if (!both.empty()) {
    out.norms = norm_table(st.prob, grid, both, cfg.flow);
    try {
      out.omega0 = type_estimate(out.norms);
      r["omega0_hat"] = *out.omega0;
      if (std::isfinite(gamma)) r["omega0_plus_gamma"] = *out.omega0 + gamma;
    } catch (const NumericalError& e) {
      r["omega0_hat"] = nullptr;
      r["omega0_note"] = e.what();
    }
  }
  return out;
}

struct PeriodicStage {
  std::vector<PeriodicPointData> data;
  CandidateSpectrum candidate;
  RestSpectrum rest;
  SpectralSet annuli;
  json report;
};

PeriodicStage periodic_stage(const RunConfig& cfg, const Stage& st) {
  PeriodicStage out;
  for (std::size_t i = 0; i < st.cls.points.size(); ++i) {
    const auto& c = st.cls.classes[i];
    if (c.tag == PhaseTag::Omega3Periodic)
      out.data.push_back(periodic_point_data(st.prob, st.cls.points[i], *c.prime_period,
                                             cfg.classification.period_flow));
  }
  out.candidate = candidate_spectrum_per(out.data, cfg.k_max);
  out.rest = rest_spectrum(st.prob, st.cls.points_with(PhaseTag::Omega3Rest), cfg.t_eval);
  std::vector<double> reals;
  double scale = 0.0;
  if (!out.candidate.set.is_empty())
    for (Complex z : out.candidate.set.discrete_points()) {
      reals.push_back(z.real());
      scale = std::max(scale, std::abs(z.real()));
    }
  out.annuli = reals.empty() ? SpectralSet::empty_set("annular hull")
                             : annular_hull(reals, cfg.t_eval, 1e-4 * (1.0 + scale));
  json rest = {{"generator", out.rest.generator.to_json()},
               {"semigroup", out.rest.semigroup.to_json()},
               {"t", cfg.t_eval}};
  out.report = {{"candidate_generator_spectrum", out.candidate.to_json()},
                {"K", cfg.k_max},
                {"covered_band", out.candidate.covered_band},
                {"rest_spectrum", rest},
                {"annuli", out.annuli.to_json()},
                {"periodic_points", out.data.size()}};
  return out;
}

void finish_report(json& report, const RunConfig& cfg, const Stage& st, const char* command) {
  report["command"] = command;
  report["problem"] = {{"name", st.prob.name}, {"dimension", st.prob.dimension()},
                       {"p", st.prob.p},       {"kappa", st.prob.field.kappa},
                       {"domain", st.prob.domain.description}};
  report["provenance"] = provenance(cfg);
  auto warnings = check_integrity(st.prob, 500, cfg.seed);
  if (!warnings.empty()) report["warnings"] = warnings;
}

}  // namespace

CommandOutput cmd_classify(const RunConfig& cfg) {
  Stage st = classify_stage(cfg);
  CommandOutput out;
  out.report["classification"] = classification_summary(st.cls);
  finish_report(out.report, cfg, st, "classify");
  out.files["classification.csv"] = classification_csv(st.cls);
  return out;
}

CommandOutput cmd_gamma(const RunConfig& cfg) {
  Stage st = classify_stage(cfg);
  GrowthStage g = growth_stage(cfg, st);
  CommandOutput out;
  out.report = g.report;
  out.report["classification"] = classification_summary(st.cls);
  finish_report(out.report, cfg, st, "gamma");
  if (g.g1) out.files["gamma1.csv"] = g.g1->to_csv();
  if (g.g2) out.files["gamma2.csv"] = g.g2->to_csv();
  if (!g.norms.empty()) out.files["norms.csv"] = norm_table_csv(g.norms);
  return out;
}

CommandOutput cmd_periodic(const RunConfig& cfg) {
  Stage st = classify_stage(cfg);
  PeriodicStage p = periodic_stage(cfg, st);
  CommandOutput out;
  out.report = p.report;
  out.report["classification"] = classification_summary(st.cls);
  finish_report(out.report, cfg, st, "periodic");
  out.files["periodic.csv"] = periodic_csv(p.data);
  out.files["candidate_spectrum.dat"] = p.candidate.set.to_gnuplot();
  return out;
}

CommandOutput cmd_spectrum(const RunConfig& cfg) {
  Stage st = classify_stage(cfg);
  GrowthStage g = growth_stage(cfg, st);
  const double t = cfg.t_eval;

  json per_class = json::object();
  std::vector<SpectralSet> gen_parts, semi_parts;
  auto add = [&](const std::string& name, SpectralSet gen, SpectralSet semi, json extra = {}) {
    json entry = {{"generator", gen.to_json()}, {"semigroup", semi.to_json()}};
    for (auto& [k, v] : extra.items()) entry[k] = v;
    per_class[name] = entry;
    gen_parts.push_back(std::move(gen));
    semi_parts.push_back(std::move(semi));
  };

  if (g.g1 || g.g2) {
    // Ω₁ ⊕ Ω₂ block: half plane / disk, or the nilpotent degenerate sets.
    auto a = assemble_spectrum(g.g1 ? std::optional<double>(g.g1->gamma_hat) : std::nullopt,
                               g.g2 ? std::optional<double>(g.g2->gamma_hat) : std::nullopt, 0.0,
                               t);
    add("omega1_omega2", a.generator, a.semigroup,
        {{"gamma", num(a.gamma)}, {"nilpotent", a.nilpotent}});
  }
  PeriodicStage p = periodic_stage(cfg, st);
  if (st.cls.count(PhaseTag::Omega3Rest) > 0) add("omega3_rest", p.rest.generator, p.rest.semigroup);
  if (!p.data.empty())
    add("omega3_periodic", p.candidate.set, p.annuli,
        {{"K", cfg.k_max},
         {"covered_band", p.candidate.covered_band},
         {"semigroup_note", "annular hull: the spectrum of U(t) is rotation invariant"}});
  auto inf_pts = st.cls.points_with(PhaseTag::Omega3Infinite);
  if (!inf_pts.empty()) {
    auto norms = norm_table(st.prob, uniform_grid(cfg.t_max, cfg.t_steps), inf_pts, cfg.flow);
    json extra = {{"structure", "sigma(U_inf(t)) = sigma(U_inf(t)) * T (rotation invariant)"}};
    try {
      const double w = type_estimate(norms);
      SpectralSet gen = SpectralSet::half_plane(w, "type bound along aperiodic trajectories");
      gen.note = "bound only; the spectrum itself is not computed";
      SpectralSet semi = SpectralSet::disk(std::exp(w * t), false, "type bound exp(omega t)");
      semi.note = "rotation invariant; bound only";
      extra["type_estimate"] = w;
      add("omega3_infinite", gen, semi, extra);
    } catch (const NumericalError& e) {
      extra["note"] = e.what();
      per_class["omega3_infinite"] = extra;
    }
  }

  CommandOutput out;
  SpectralSet generator = SpectralSet::union_of(gen_parts, "union of per-class spectra");
  SpectralSet semigroup = SpectralSet::union_of(semi_parts, "union of per-class spectra");
  out.report["spectrum"] = {{"generator", generator.to_json()},
                            {"semigroup", semigroup.to_json()},
                            {"t", t},
                            {"per_class", per_class}};
  out.report["growth"] = g.report;
  out.report["periodic"] = p.report;
  out.report["classification"] = classification_summary(st.cls);
  json checks = json::array();
  double worst = 0.0;
  const double bound = 2 * std::numbers::pi / st.prob.field.kappa;
  for (const auto& d : p.data) worst = std::max(worst, bound - d.prime_period);
  checks.push_back({{"name", "yorke_bound"},
                    {"passed", worst <= cfg.classification.period_tol},
                    {"residual", p.data.empty() ? 0.0 : std::max(0.0, worst)}});
  out.report["checks"] = checks;
  finish_report(out.report, cfg, st, "spectrum");
  out.files["spectrum_generator.dat"] = generator.to_gnuplot();
  out.files["spectrum_semigroup.dat"] = semigroup.to_gnuplot();
  return out;
}

namespace {

struct SuiteRow {
  std::string suite, problem;
  double residual = 0.0, tolerance = 0.0;
  std::string detail;
  bool passed() const { return residual <= tolerance; }
};

FlowOptions tight_flow() {
  FlowOptions o;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  return o;
}

void suites_for_problem(const ProblemSpec& prob, const RunConfig& cfg, std::vector<SuiteRow>& rows) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointSampler sampler(prob, cfg.seed);
  FlowOptions pure = cfg.flow;
  pure.respect_domain = false;

  SuiteRow group{"group_law", prob.name, 0.0, 1e-7, {}};
  SuiteRow lip{"flow_lipschitz", prob.name, 0.0, 1e-6, {}};
  for (int k = 0; k < 20; ++k) {
    Point x = sampler.next(), y = sampler.next();
    const double s = u(rng), t = u(rng);
    FlowResult a = advance_flow(prob, x, s, pure);
    FlowResult b = advance_flow(prob, a.endpoint, t, pure);
    FlowResult c = advance_flow(prob, x, s + t, pure);
    group.residual =
        std::max(group.residual, distance(b.endpoint, c.endpoint) / (1.0 + norm2(c.endpoint)));
    FlowResult fy = advance_flow(prob, y, t, pure);
    FlowResult fx = advance_flow(prob, x, t, pure);
    const double allowed = std::exp(prob.field.kappa * std::fabs(t)) * distance(x, y);
    lip.residual = std::max(lip.residual, (distance(fx.endpoint, fy.endpoint) - allowed) /
                                              (1.0 + allowed));
  }
  lip.residual = std::max(lip.residual, 0.0);
  rows.push_back(group);
  rows.push_back(lip);

  SuiteRow kappa{"lipschitz_estimate", prob.name, 0.0, 1e-6, {}};
  const double est = estimate_lipschitz(prob, prob.sample_region, 2000, cfg.seed);
  kappa.residual = std::max(0.0, est / prob.field.kappa - 1.0);
  kappa.detail = "sampled Lipschitz quotient relative to declared kappa";
  rows.push_back(kappa);

  // Exit-time shifts and the κ-free first-return search on a small sample.
  FlowOptions tight = tight_flow();
  SuiteRow shift{"exit_time_shift", prob.name, 0.0, 2 * cfg.flow.t_tol, {}};
  SuiteRow yorke{"yorke_bound", prob.name, 0.0, cfg.classification.period_tol, {}};
  ClassificationConfig ccfg = cfg.classification;
  long returns = 0;
  for (int k = 0; k < 10; ++k) {
    Point x = sampler.next();
    ExitTime tp = exit_time_one(prob, x, +1, cfg.horizon, tight);
    if (tp.finite()) {
      FlowResult mid = advance_flow(prob, x, 0.5 * tp.value, tight);
      if (mid.ok()) {
        ExitTime tp2 = exit_time_one(prob, mid.endpoint, +1, cfg.horizon, tight);
        if (tp2.finite())
          shift.residual = std::max(shift.residual, std::fabs(tp2.value - 0.5 * tp.value));
      }
      continue;
    }
    if (exit_time_one(prob, x, -1, cfg.horizon, tight).finite()) continue;
    if (norm2(prob.field(x)) <= ccfg.effective_rest_tol(prob)) continue;
    PeriodEstimate pe = first_return_time(prob, x, ccfg);
    if (pe.censored) continue;
    ++returns;
    const double bound = 2 * std::numbers::pi / prob.field.kappa;
    yorke.residual = std::max(yorke.residual, bound - pe.period);
  }
  yorke.detail = std::to_string(returns) + " periodic returns checked against 2*pi/kappa";
  rows.push_back(shift);
  rows.push_back(yorke);

  SuiteRow integ{"integrity", prob.name, 0.0, 0.0, {}};
  auto warnings = check_integrity(prob, 500, cfg.seed);
  integ.residual = static_cast<double>(warnings.size());
  if (!warnings.empty()) integ.detail = warnings.front();
  rows.push_back(integ);
}

void closed_form_suites(std::vector<SuiteRow>& rows) {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u(-2.0, 2.0), ut(-5.0, 5.0);
  auto rot = builtin("rotation");
  auto vfp = builtin("vfp_fourier");
  SuiteRow r{"rotation_closed_form", "rotation", 0.0, 1e-6, {}};
  SuiteRow v{"vfp_closed_form", "vfp_fourier", 0.0, 1e-6, {}};
  const double r3 = std::sqrt(3.0);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng), y = u(rng), t = ut(rng);
    FlowResult fr = advance_flow(rot, Point{x, y}, t);
    r.residual = std::max(r.residual, std::hypot(fr.endpoint[0] - (x * std::cos(t) - y * std::sin(t)),
                                                 fr.endpoint[1] - (x * std::sin(t) + y * std::cos(t))));
    const double w = r3 * t / 2, gfac = 2 / r3 * std::exp(t / 2);
    const double xi = gfac * ((r3 / 2 * std::cos(w) - 0.5 * std::sin(w)) * x + std::sin(w) * y);
    const double eta = gfac * ((r3 / 2 * std::cos(w) + 0.5 * std::sin(w)) * y - std::sin(w) * x);
    FlowResult fv = advance_flow(vfp, Point{x, y}, t);
    v.residual = std::max(v.residual, std::hypot(fv.endpoint[0] - xi, fv.endpoint[1] - eta) /
                                          std::max(1.0, std::hypot(xi, eta)));
  }
  rows.push_back(r);
  rows.push_back(v);

  auto fs = builtin("free_streaming", {{"N", 2}});
  PointSampler sampler(fs, 99);
  AlphaFn alpha = [](PointView x) {
    return (x[0] * x[2] + x[1] * x[3]) / (x[2] * x[2] + x[3] * x[3]);
  };
  auto rep = verify_alpha_cocycle(fs, alpha, sampler.draw(20), {0.5, 1.0, 2.0});
  rows.push_back({"alpha_cocycle_free_streaming", "free_streaming", rep.max_residual, 1e-8, {}});

  auto smt = smt_counterexample_report(2 * std::numbers::pi, 5);
  rows.push_back({"smt_collapse_at_2pi", "rotation", smt.collapsed_to_one ? 0.0 : 1.0, 0.0,
                  "exp(2*pi*i*k) = 1 for every k"});
}

}  // namespace

CommandOutput cmd_verify(const RunConfig& cfg, bool all_builtins) {
  std::vector<SuiteRow> rows;
  closed_form_suites(rows);
  if (all_builtins) {
    for (const auto& name : builtin_names()) suites_for_problem(builtin(name), cfg, rows);
  } else {
    suites_for_problem(load_problem(cfg.problem), cfg, rows);
  }
  CommandOutput out;
  json table = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "suite,problem,residual,tolerance,passed\n";
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.passed();
    json row = {{"suite", r.suite},
                {"problem", r.problem},
                {"residual", num(r.residual)},
                {"tolerance", r.tolerance},
                {"passed", r.passed()}};
    if (!r.detail.empty()) row["detail"] = r.detail;
    table.push_back(row);
    csv << r.suite << ',' << r.problem << ',' << r.residual << ',' << r.tolerance << ','
        << (r.passed() ? "true" : "false") << '\n';
  }
  out.report = {{"command", "verify"}, {"suites", table}, {"passed", ok},
                {"provenance", provenance(cfg)}};
  out.files["verify.csv"] = csv.str();
  out.status = ok ? 0 : 1;
  return out;
}

CommandOutput cmd_smt_demo(double t, long k_max) {
  SmtReport rep = smt_counterexample_report(t, k_max);
  CommandOutput out;
  out.report = rep.to_json();
  out.report["command"] = "demo-smt-failure";
  out.files["smt_image.dat"] = SpectralSet::discrete(rep.points).to_gnuplot();
  out.files["unit_circle.dat"] = SpectralSet::circle(1.0).to_gnuplot();
  return out;
}

void write_outputs(const CommandOutput& out, const std::filesystem::path& dir,
                   const std::string& stem, bool with_run_info) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
  };
  write(dir / (stem + ".json"), out.report.dump(2) + "\n");
  for (const auto& [name, text] : out.files) write(dir / name, text);
  if (with_run_info) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json info = {{"timestamp", stamp}, {"threads", max_threads()}, {"version", kVersion}};
    write(dir / "run_info.json", info.dump(2) + "\n");
  }
}

}  // namespace streamspec
