#include "streamspec/field_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "streamspec/expr.hpp"

namespace streamspec {

double norm2(PointView x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

Point VectorFieldSpec::operator()(PointView x) const {
  Point out(dimension);
  eval(x, out);
  return out;
}

DomainSpec DomainSpec::whole_space(int dimension) {
  DomainSpec d;
  d.contains = [](PointView) { return true; };
  d.description = "R^" + std::to_string(dimension);
  return d;
}

DomainSpec DomainSpec::box(Box b) {
  DomainSpec d;
  std::ostringstream os;
  os << "open box";
  for (const auto& iv : b) os << " (" << iv.lo << "," << iv.hi << ")";
  d.description = os.str();
  d.bounding_box = b;
  d.contains = [b](PointView x) {
    for (std::size_t i = 0; i < b.size(); ++i)
      if (!(x[i] > b[i].lo && x[i] < b[i].hi)) return false;
    return true;
  };
  return d;
}

double fd_step(PointView x) { return 1e-5 * (1.0 + norm2(x)); }

double fd_divergence(const FieldFn& field, int dimension, PointView x) {
  const double delta = fd_step(x);
  Point xp(x.begin(), x.end());
  Point fp(dimension), fm(dimension);
  double div = 0.0;
  for (int i = 0; i < dimension; ++i) {
    const double xi = xp[i];
    xp[i] = xi + delta;
    field(xp, fp);
    xp[i] = xi - delta;
    field(xp, fm);
    xp[i] = xi;
    div += (fp[i] - fm[i]) / (2.0 * delta);
  }
  return div;
}

namespace {

void require_inside(const ProblemSpec& prob, PointView x) {
  if (static_cast<int>(x.size()) != prob.dimension())
    throw PreconditionError("point dimension " + std::to_string(x.size()) +
                            " does not match problem dimension " +
                            std::to_string(prob.dimension()));
  if (!prob.domain.contains(x)) throw PreconditionError("point lies outside the domain");
}

}  // namespace

double sigma_p_unchecked(const ProblemSpec& prob, PointView x) {
  const double w = prob.inv_conjugate();
  const double hx = prob.h(x);
  if (w == 0.0) return hx;
  return hx + w * prob.field.divergence(x);
}

double nu_unchecked(const ProblemSpec& prob, PointView x) {
  return prob.h(x) + prob.field.divergence(x);
}

double sigma_p(const ProblemSpec& prob, PointView x) {
  require_inside(prob, x);
  return sigma_p_unchecked(prob, x);
}

double nu(const ProblemSpec& prob, PointView x) {
  require_inside(prob, x);
  return nu_unchecked(prob, x);
}

double estimate_lipschitz(const ProblemSpec& prob, const Box& region, int n_pairs,
                          std::uint64_t seed) {
  if (n_pairs < 1) throw PreconditionError("n_pairs must be at least 1");
  if (static_cast<int>(region.size()) != prob.dimension())
    throw PreconditionError("region dimension does not match the problem");
  for (const auto& iv : region)
    if (!(iv.hi > iv.lo)) throw PreconditionError("invalid region: zero volume");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = prob.dimension();
  Point a(n), b(n), fa(n), fb(n);
  double best = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    for (int i = 0; i < n; ++i) {
      a[i] = region[i].lo + region[i].width() * u01(rng);
      // Mix far pairs with near pairs; near pairs probe the local Jacobian.
      if (k % 2 == 0)
        b[i] = region[i].lo + region[i].width() * u01(rng);
      else
        b[i] = a[i] + 1e-3 * region[i].width() * (u01(rng) - 0.5);
    }
    const double d = distance(a, b);
    if (d == 0.0) continue;
    prob.field.eval(a, fa);
    prob.field.eval(b, fb);
    best = std::max(best, distance(fa, fb) / d);
  }
  return best;
}

namespace {

using nlohmann::json;

double get_number(const json& params, const char* key, double fallback) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_number())
    throw ConfigError(std::string("parameter '") + key + "' must be a number");
  return v.get<double>();
}

std::vector<double> get_vector(const json& params, const char* key,
                               std::vector<double> fallback, std::size_t required_size = 0) {
  if (!params.is_object() || !params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (!v.is_array())
    throw ConfigError(std::string("parameter '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw ConfigError(std::string("parameter '") + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  if (required_size != 0 && out.size() != required_size)
    throw ConfigError(std::string("parameter '") + key + "' must have " +
                      std::to_string(required_size) + " entries");
  return out;
}

int get_positive_int(const json& params, const char* key, int fallback) {
  double v = get_number(params, key, fallback);
  if (v < 1 || std::floor(v) != v)
    throw ConfigError(std::string("parameter '") + key + "' must be a positive integer");
  return static_cast<int>(v);
}

Box cube(int dimension, double lo, double hi) { return Box(dimension, Interval{lo, hi}); }

ScalarFn constant_fn(double c) {
  return [c](PointView) { return c; };
}

void apply_overrides(ProblemSpec& prob, const json& params) {
  prob.p = get_number(params, "p", prob.p);
  if (!(prob.p >= 1.0) || !std::isfinite(prob.p)) throw ConfigError("p must lie in [1, inf)");
  prob.field.kappa = get_number(params, "kappa", prob.field.kappa);
  if (!(prob.field.kappa > 0.0)) throw ConfigError("kappa must be positive");
}

ProblemSpec make_rotation(const json& params) {
  const double omega = get_number(params, "omega", 1.0);
  const double c = get_number(params, "c", 0.0);
  if (omega == 0.0) throw ConfigError("rotation: omega must be non-zero");
  ProblemSpec prob;
  prob.name = "rotation";
  prob.field.dimension = 2;
  prob.field.eval = [omega](PointView x, std::span<double> out) {
    out[0] = -omega * x[1];
    out[1] = omega * x[0];
  };
  prob.field.divergence = constant_fn(0.0);
  prob.field.kappa = std::fabs(omega);
  prob.h = constant_fn(c);
  prob.h_inf = c;
  prob.domain = DomainSpec::whole_space(2);
  prob.sample_region = cube(2, -2.0, 2.0);
  return prob;
}

ProblemSpec make_lorentz(const json& params) {
  const auto E = get_vector(params, "E", {0.5, 0.0, 1.0}, 3);
  const auto B = get_vector(params, "B", {0.0, 0.0, 1.0}, 3);
  const double q = get_number(params, "q", 1.0);
  const double width = get_number(params, "slab_width", 2.0);
  const double c = get_number(params, "c", 0.0);
  const double bnorm = norm2(B);

  ProblemSpec prob;
  prob.name = "lorentz";
  prob.field.dimension = 6;
  prob.field.eval = [E, B, q](PointView x, std::span<double> out) {
    const double v0 = x[3], v1 = x[4], v2 = x[5];
    out[0] = v0;
    out[1] = v1;
    out[2] = v2;
    out[3] = q * (E[0] + v1 * B[2] - v2 * B[1]);
    out[4] = q * (E[1] + v2 * B[0] - v0 * B[2]);
    out[5] = q * (E[2] + v0 * B[1] - v1 * B[0]);
  };
  // v×B is divergence free in v, the x-block does not depend on x.
  prob.field.divergence = constant_fn(0.0);
  prob.field.kappa = std::sqrt(1.0 + q * q * bnorm * bnorm);
  prob.h = constant_fn(c);
  prob.h_inf = c;

  const double half = 0.5 * width;
  if (width > 0.0 && std::isfinite(width)) {
    if (bnorm == 0.0) throw ConfigError("lorentz: slab_width requires a non-zero B");
    std::vector<double> bhat = {B[0] / bnorm, B[1] / bnorm, B[2] / bnorm};
    prob.domain.contains = [bhat, half](PointView x) {
      return std::fabs(x[0] * bhat[0] + x[1] * bhat[1] + x[2] * bhat[2]) < half;
    };
    std::ostringstream os;
    os << "slab |<x,B>|/|B| < " << half << " times R^3";
    prob.domain.description = os.str();
    prob.sample_region = cube(6, -1.0, 1.0);
    for (int i = 0; i < 3; ++i) prob.sample_region[i] = {-half, half};
  } else {
    prob.domain = DomainSpec::whole_space(6);
    prob.sample_region = cube(6, -1.0, 1.0);
  }
  return prob;
}

ProblemSpec make_vfp(const json& params) {
  const int N = get_positive_int(params, "N", 1);
  ProblemSpec prob;
  prob.name = "vfp_fourier";
  prob.field.dimension = 2 * N;
  prob.field.eval = [N](PointView x, std::span<double> out) {
    for (int i = 0; i < N; ++i) {
      out[i] = x[N + i];
      out[N + i] = x[N + i] - x[i];
    }
  };
  const double dN = N;
  prob.field.divergence = constant_fn(dN);
  // Operator norm of [[0, I], [-I, I]] is the golden ratio.
  prob.field.kappa = 0.5 * (1.0 + std::sqrt(5.0));
  prob.h = [N](PointView x) {
    double s = 0.0;
    for (int i = 0; i < N; ++i) s += x[N + i] * x[N + i];
    return s - N;
  };
  prob.h_inf = -dN;
  prob.domain = DomainSpec::whole_space(2 * N);
  prob.sample_region = cube(2 * N, -2.0, 2.0);
  return prob;
}

ProblemSpec make_free_streaming(const json& params) {
  const int N = get_positive_int(params, "N", 1);
  const double c = get_number(params, "c", 0.0);
  ProblemSpec prob;
  prob.name = "free_streaming";
  prob.field.dimension = 2 * N;
  prob.field.eval = [N](PointView x, std::span<double> out) {
    for (int i = 0; i < N; ++i) {
      out[i] = x[N + i];
      out[N + i] = 0.0;
    }
  };
  prob.field.divergence = constant_fn(0.0);
  prob.field.kappa = 1.0;
  prob.h = constant_fn(c);
  prob.h_inf = c;
  prob.domain = DomainSpec::whole_space(2 * N);
  prob.sample_region = cube(2 * N, -1.0, 1.0);
  return prob;
}

ProblemSpec make_nordstrom(const json& params) {
  // Potential φ(x) = a x²/2 + b x, so φ'(x) = a x + b.
  const double a = get_number(params, "a", 1.0);
  const double b = get_number(params, "b", 0.5);
  const double p_max = get_number(params, "p_max", 4.0);
  const double c = get_number(params, "c", 0.0);
  if (!(p_max > 0.0)) throw ConfigError("nordstrom: p_max must be positive");
  ProblemSpec prob;
  prob.name = "nordstrom";
  prob.field.dimension = 2;
  prob.field.eval = [a, b](PointView x, std::span<double> out) {
    const double g = std::sqrt(1.0 + x[1] * x[1]);
    out[0] = x[1] / g;
    out[1] = -g * (a * x[0] + b);
  };
  prob.field.divergence = [a, b](PointView x) {
    const double g = std::sqrt(1.0 + x[1] * x[1]);
    return -x[1] / g * (a * x[0] + b);
  };
  // Frobenius bound of the Jacobian on (0,1) x [-p_max, p_max].
  prob.field.kappa = std::sqrt(1.0 + a * a * (1.0 + p_max * p_max) +
                               (std::fabs(a) + std::fabs(b)) * (std::fabs(a) + std::fabs(b)));
  prob.h = constant_fn(c);
  prob.h_inf = c;
  prob.domain = DomainSpec::box({{0.0, 1.0}, {-std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::infinity()}});
  prob.domain.description = "(0,1) x R";
  prob.sample_region = {{0.0, 1.0}, {-1.0, 1.0}};
  return prob;
}

ProblemSpec make_gradient(const json& params) {
  const auto a = get_vector(params, "a", {1.0, 1.0});
  const double c = get_number(params, "c", 0.0);
  if (a.empty()) throw ConfigError("gradient: 'a' must be non-empty");
  const int n = static_cast<int>(a.size());
  ProblemSpec prob;
  prob.name = "gradient";
  prob.field.dimension = n;
  prob.field.eval = [a](PointView x, std::span<double> out) {
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i] * x[i];
  };
  double div = 0.0, kappa = 0.0;
  for (double ai : a) {
    div -= ai;
    kappa = std::max(kappa, std::fabs(ai));
  }
  prob.field.divergence = constant_fn(div);
  prob.field.kappa = kappa > 0.0 ? kappa : 1.0;
  prob.h = constant_fn(c);
  prob.h_inf = c;
  prob.domain = DomainSpec::whole_space(n);
  prob.sample_region = cube(n, -1.0, 1.0);
  return prob;
}

ProblemSpec make_slab_constant(const json& params) {
  const double c = get_number(params, "c", 0.0);
  ProblemSpec prob;
  prob.name = "slab_constant";
  prob.field.dimension = 1;
  prob.field.eval = [](PointView, std::span<double> out) { out[0] = 1.0; };
  prob.field.divergence = constant_fn(0.0);
  // A constant field is Lipschitz with any positive constant.
  prob.field.kappa = 1.0;
  prob.h = constant_fn(c);
  prob.h_inf = c;
  prob.domain = DomainSpec::box({{0.0, 1.0}});
  prob.sample_region = {{0.0, 1.0}};
  return prob;
}

ProblemSpec make_half_line(const json& params) {
  const double velocity = get_number(params, "velocity", 1.0);
  const double d = get_number(params, "d", 0.0);
  const double c = get_number(params, "c", 0.0);
  const double transient = get_number(params, "transient", 0.0);
  const double sample_max = get_number(params, "sample_max", 40.0);
  if (velocity == 0.0 && d == 0.0) throw ConfigError("half_line: field vanishes identically");
  if (!(sample_max > 0.0)) throw ConfigError("half_line: sample_max must be positive");
  ProblemSpec prob;
  prob.name = "half_line";
  prob.field.dimension = 1;
  prob.field.eval = [velocity, d](PointView x, std::span<double> out) {
    out[0] = velocity + d * x[0];
  };
  prob.field.divergence = constant_fn(d);
  prob.field.kappa = d != 0.0 ? std::fabs(d) : 1.0;
  prob.h = [c, transient](PointView x) { return c + transient * std::exp(-x[0]); };
  prob.h_inf = c + std::min(0.0, transient);
  prob.domain = DomainSpec::box({{0.0, std::numeric_limits<double>::infinity()}});
  prob.domain.description = "(0,inf)";
  prob.sample_region = {{0.0, sample_max}};
  return prob;
}

using Factory = ProblemSpec (*)(const json&);

struct Registered {
  const char* name;
  Factory make;
};

constexpr Registered kBuiltins[] = {
    {"rotation", make_rotation},         {"lorentz", make_lorentz},
    {"vfp_fourier", make_vfp},           {"free_streaming", make_free_streaming},
    {"nordstrom", make_nordstrom},       {"gradient", make_gradient},
    {"slab_constant", make_slab_constant}, {"half_line", make_half_line},
};

Box parse_box(const json& j, const std::string& what, int dimension) {
  if (!j.is_array() || static_cast<int>(j.size()) != dimension)
    throw ConfigError(what + " must be an array of " + std::to_string(dimension) +
                      " [lo, hi] pairs");
  Box box;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
      throw ConfigError(what + " entries must be [lo, hi] number pairs");
    Interval r{iv[0].get<double>(), iv[1].get<double>()};
    if (!(r.hi > r.lo)) throw ConfigError(what + " intervals must satisfy lo < hi");
    box.push_back(r);
  }
  return box;
}

ProblemSpec make_custom(const json& spec) {
  if (!spec.is_object()) throw ConfigError("custom: expected an object");
  if (!spec.contains("dimension") || !spec["dimension"].is_number_integer())
    throw ConfigError("custom: 'dimension' (integer) is required");
  const int n = spec["dimension"].get<int>();
  if (n < 1) throw ConfigError("custom: dimension must be positive");
  if (!spec.contains("field") || !spec["field"].is_array() ||
      static_cast<int>(spec["field"].size()) != n)
    throw ConfigError("custom: 'field' must be an array of " + std::to_string(n) +
                      " expressions");

  std::vector<expr::Expr> field;
  for (std::size_t i = 0; i < spec["field"].size(); ++i) {
    const json& e = spec["field"][i];
    if (!e.is_string()) throw ConfigError("custom: field entries must be strings");
    try {
      field.push_back(expr::parse(e.get<std::string>(), n));
    } catch (const expr::ParseError& err) {
      throw ConfigError("custom: field[" + std::to_string(i) + "]: " + err.what());
    }
  }
  expr::Expr h_expr = expr::Expr::constant(0.0);
  if (spec.contains("h")) {
    if (!spec["h"].is_string()) throw ConfigError("custom: 'h' must be a string");
    try {
      h_expr = expr::parse(spec["h"].get<std::string>(), n);
    } catch (const expr::ParseError& err) {
      throw ConfigError(std::string("custom: h: ") + err.what());
    }
  }
  expr::Expr div_expr = expr::divergence(field);

  ProblemSpec prob;
  prob.name = "custom";
  prob.field.dimension = n;
  prob.field.eval = [field](PointView x, std::span<double> out) {
    for (std::size_t i = 0; i < field.size(); ++i) out[i] = expr::evaluate_or_throw(field[i], x);
  };
  prob.field.divergence = [div_expr](PointView x) { return expr::evaluate_or_throw(div_expr, x); };
  prob.field.divergence_source = DivergenceSource::symbolic;
  prob.h = [h_expr](PointView x) { return expr::evaluate_or_throw(h_expr, x); };

  if (!spec.contains("domain") || !spec["domain"].is_object())
    throw ConfigError("custom: 'domain' object is required");
  const json& dom = spec["domain"];
  if (dom.contains("box")) {
    Box b = parse_box(dom["box"], "custom: domain.box", n);
    prob.domain = DomainSpec::box(b);
    for (auto& iv : b) {
      if (!std::isfinite(iv.lo)) iv.lo = iv.hi - 2.0;
      if (!std::isfinite(iv.hi)) iv.hi = iv.lo + 2.0;
    }
    prob.sample_region = b;
  } else if (dom.value("all", false)) {
    prob.domain = DomainSpec::whole_space(n);
    prob.sample_region = cube(n, -1.0, 1.0);
  } else {
    throw ConfigError("custom: domain must be {\"box\": [...]} or {\"all\": true}");
  }
  if (spec.contains("sample_box"))
    prob.sample_region = parse_box(spec["sample_box"], "custom: sample_box", n);

  prob.p = 1.0;
  if (spec.contains("p")) {
    if (!spec["p"].is_number()) throw ConfigError("custom: 'p' must be a number");
    prob.p = spec["p"].get<double>();
  }
  if (!(prob.p >= 1.0) || !std::isfinite(prob.p)) throw ConfigError("custom: p must lie in [1, inf)");

  if (spec.contains("kappa")) {
    if (!spec["kappa"].is_number()) throw ConfigError("custom: 'kappa' must be a number");
    prob.field.kappa = spec["kappa"].get<double>();
    if (!(prob.field.kappa > 0.0)) throw ConfigError("custom: kappa must be positive");
  } else {
    const double est = estimate_lipschitz(prob, prob.sample_region, 4000, 11);
    prob.field.kappa = est > 0.0 ? 1.1 * est : 1.0;
  }

  if (spec.contains("h_inf")) {
    if (!spec["h_inf"].is_number()) throw ConfigError("custom: 'h_inf' must be a number");
    prob.h_inf = spec["h_inf"].get<double>();
  } else {
    PointSampler sampler(prob, 13);
    double lo = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 1000; ++k) lo = std::min(lo, prob.h(sampler.next()));
    prob.h_inf = lo;
  }
  return prob;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& r : kBuiltins) v.emplace_back(r.name);
    return v;
  }();
  return names;
}

ProblemSpec builtin(const std::string& name, const json& params) {
  if (!params.is_null() && !params.is_object())
    throw ConfigError("builtin params must be an object");
  for (const auto& r : kBuiltins) {
    if (name != r.name) continue;
    ProblemSpec prob = r.make(params);
    apply_overrides(prob, params);
    return prob;
  }
  throw ConfigError("unknown builtin problem '" + name + "'");
}

ProblemSpec load_problem(const json& config) {
  if (!config.is_object()) throw ConfigError("problem config must be a JSON object");
  if (config.contains("builtin")) {
    if (!config["builtin"].is_string()) throw ConfigError("'builtin' must be a string");
    return builtin(config["builtin"].get<std::string>(),
                   config.contains("params") ? config["params"] : json::object());
  }
  if (config.contains("custom")) return make_custom(config["custom"]);
  throw ConfigError("problem config needs a 'builtin' or 'custom' key");
}

std::vector<std::string> check_integrity(const ProblemSpec& prob, int n_samples,
                                         std::uint64_t seed) {
  std::vector<std::string> warnings;
  PointSampler sampler(prob, seed);
  int violations = 0;
  double worst = prob.h_inf;
  for (int k = 0; k < n_samples; ++k) {
    Point x = sampler.next();
    double hx = 0.0;
    try {
      hx = prob.h(x);
    } catch (const Error& e) {
      warnings.push_back(std::string("h could not be evaluated at a sample point: ") + e.what());
      continue;
    }
    if (hx < prob.h_inf) {
      ++violations;
      worst = std::min(worst, hx);
    }
  }
  if (violations > 0) {
    std::ostringstream os;
    os << "h fell below declared h_inf=" << prob.h_inf << " at " << violations << " of "
       << n_samples << " samples (min " << worst << ")";
    warnings.push_back(os.str());
  }
  return warnings;
}

PointSampler::PointSampler(const ProblemSpec& prob, std::uint64_t seed)
    : prob_(&prob), rng_(seed) {
  if (static_cast<int>(prob.sample_region.size()) != prob.dimension())
    throw ConfigError("sample region dimension does not match the problem");
}

Point PointSampler::next() {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Box& box = prob_->sample_region;
  Point x(box.size());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    for (std::size_t i = 0; i < box.size(); ++i) x[i] = box[i].lo + box[i].width() * u01(rng_);
    if (prob_->domain.contains(x)) return x;
  }
  throw ConfigError("sample region does not intersect the domain");
}

std::vector<Point> PointSampler::draw(int n) {
  std::vector<Point> pts;
  pts.reserve(std::max(n, 0));
  for (int i = 0; i < n; ++i) pts.push_back(next());
  return pts;
}

}  // namespace streamspec
