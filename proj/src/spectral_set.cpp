#include "streamspec/spectral_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "streamspec/common.hpp"

namespace streamspec {

using Kind = SpectralSet::Kind;

std::string to_string(Kind k) {
  switch (k) {
    case Kind::empty: return "empty";
    case Kind::half_plane: return "half_plane";
    case Kind::disk: return "disk";
    case Kind::discrete: return "discrete";
    case Kind::vertical_lines: return "vertical_lines";
    case Kind::annulus: return "annulus";
    case Kind::union_of: return "union";
  }
  return "?";
}

SpectralSet SpectralSet::empty_set(std::string provenance) {
  SpectralSet s;
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::half_plane(double a, std::string provenance) {
  SpectralSet s;
  s.kind = Kind::half_plane;
  s.a = a + 0.0;
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::disk(double r, bool punctured, std::string provenance) {
  if (!(r >= 0.0)) throw PreconditionError("disk radius must be non-negative");
  SpectralSet s;
  s.kind = Kind::disk;
  s.r = r;
  s.punctured = punctured;
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::discrete(std::vector<Complex> pts, std::string provenance) {
  SpectralSet s;
  s.kind = pts.empty() ? Kind::empty : Kind::discrete;
  s.points = std::move(pts);
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::vertical_lines(std::vector<double> real_parts, double spacing,
                                        std::string provenance) {
  if (spacing < 0.0) throw PreconditionError("lattice spacing must be non-negative");
  SpectralSet s;
  s.kind = real_parts.empty() ? Kind::empty : Kind::vertical_lines;
  std::sort(real_parts.begin(), real_parts.end());
  s.real_parts = std::move(real_parts);
  s.spacing = spacing;
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::annulus(double r1, double r2, std::string provenance) {
  if (!(r1 >= 0.0) || !(r2 >= r1)) throw PreconditionError("annulus needs 0 <= r1 <= r2");
  SpectralSet s;
  s.kind = Kind::annulus;
  s.r = r1;
  s.r2 = r2;
  s.provenance = std::move(provenance);
  return s;
}

SpectralSet SpectralSet::circle(double radius, std::string provenance) {
  return annulus(radius, radius, std::move(provenance));
}

SpectralSet SpectralSet::union_of(std::vector<SpectralSet> members, std::string provenance) {
  SpectralSet s;
  s.provenance = std::move(provenance);
  for (auto& m : members) {
    if (m.is_empty()) continue;
    if (m.kind == Kind::union_of) {
      for (auto& inner : m.members) s.members.push_back(std::move(inner));
    } else {
      s.members.push_back(std::move(m));
    }
  }
  if (!s.members.empty()) s.kind = Kind::union_of;
  return s;
}

bool SpectralSet::is_empty() const {
  switch (kind) {
    case Kind::empty: return true;
    case Kind::union_of:
      return std::all_of(members.begin(), members.end(), [](const auto& m) { return m.is_empty(); });
    case Kind::discrete: return points.empty();
    case Kind::vertical_lines: return real_parts.empty();
    default: return false;
  }
}

bool SpectralSet::contains(Complex z, double tol) const {
  switch (kind) {
    case Kind::empty: return false;
    case Kind::half_plane: return z.real() <= a + tol;
    case Kind::disk: {
      const double m = std::abs(z);
      if (punctured && m <= tol) return false;
      return m <= r + tol;
    }
    case Kind::discrete:
      return std::any_of(points.begin(), points.end(),
                         [&](Complex p) { return std::abs(p - z) <= tol; });
    case Kind::vertical_lines:
      for (double re : real_parts) {
        if (std::fabs(z.real() - re) > tol) continue;
        if (spacing == 0.0) return true;
        const double k = std::round(z.imag() / spacing);
        if (std::fabs(z.imag() - k * spacing) <= tol) return true;
      }
      return false;
    case Kind::annulus: {
      const double m = std::abs(z);
      return m >= r - tol && m <= r2 + tol;
    }
    case Kind::union_of:
      return std::any_of(members.begin(), members.end(),
                         [&](const auto& m) { return m.contains(z, tol); });
  }
  return false;
}

SpectralSet SpectralSet::exp_map(double t) const {
  const std::string prov = provenance.empty() ? "exp map" : "exp map of " + provenance;
  switch (kind) {
    case Kind::empty: return empty_set(prov);
    case Kind::half_plane:
      if (a == -std::numeric_limits<double>::infinity()) return empty_set(prov);
      return disk(std::exp(a * t), true, prov);
    case Kind::discrete: {
      std::vector<Complex> img;
      img.reserve(points.size());
      for (Complex p : points) img.push_back(std::exp(t * p));
      return discrete(std::move(img), prov);
    }
    case Kind::vertical_lines: {
      std::vector<SpectralSet> circles;
      for (double re : real_parts) circles.push_back(circle(std::exp(re * t), prov));
      SpectralSet u = union_of(std::move(circles), prov);
      u.note = "closure of the image; the lattice image is dense on each circle only when "
               "t*spacing/(2*pi) is irrational";
      return u;
    }
    case Kind::disk:
    case Kind::annulus:
      throw PreconditionError("exp_map: " + to_string(kind) + " is not a generator-side set");
    case Kind::union_of: {
      std::vector<SpectralSet> img;
      for (const auto& m : members) img.push_back(m.exp_map(t));
      return union_of(std::move(img), prov);
    }
  }
  return empty_set(prov);
}

std::vector<Complex> SpectralSet::discrete_points() const {
  switch (kind) {
    case Kind::empty: return {};
    case Kind::discrete: return points;
    case Kind::union_of: {
      std::vector<Complex> out;
      for (const auto& m : members) {
        auto p = m.discrete_points();
        out.insert(out.end(), p.begin(), p.end());
      }
      return out;
    }
    default: throw PreconditionError("discrete_points: set has a continuous part");
  }
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

nlohmann::json SpectralSet::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case Kind::empty: break;
    case Kind::half_plane: j["re_max"] = number(a); break;
    case Kind::disk:
      j["radius"] = number(r);
      j["punctured"] = punctured;
      break;
    case Kind::discrete: {
      auto arr = nlohmann::json::array();
      for (Complex p : points) arr.push_back({number(p.real()), number(p.imag())});
      j["points"] = arr;
      break;
    }
    case Kind::vertical_lines: {
      auto arr = nlohmann::json::array();
      for (double re : real_parts) arr.push_back(number(re));
      j["real_parts"] = arr;
      j["imag_spacing"] = spacing;
      break;
    }
    case Kind::annulus:
      j["r_inner"] = number(r);
      j["r_outer"] = number(r2);
      break;
    case Kind::union_of: {
      auto arr = nlohmann::json::array();
      for (const auto& m : members) arr.push_back(m.to_json());
      j["members"] = arr;
      break;
    }
  }
  j["provenance"] = provenance;
  if (!note.empty()) j["note"] = note;
  return j;
}

std::string SpectralSet::to_gnuplot(int resolution, double window) const {
  std::ostringstream os;
  os.precision(17);
  auto circle_block = [&](double radius) {
    for (int k = 0; k <= resolution; ++k) {
      const double th = 2 * std::numbers::pi * k / resolution;
      os << radius * std::cos(th) << ' ' << radius * std::sin(th) << '\n';
    }
    os << '\n';
  };
  switch (kind) {
    case Kind::empty: break;
    case Kind::half_plane:
      if (std::isfinite(a)) os << a << ' ' << -window << '\n' << a << ' ' << window << "\n\n";
      break;
    case Kind::disk: circle_block(r); break;
    case Kind::annulus:
      circle_block(r);
      if (r2 != r) circle_block(r2);
      break;
    case Kind::discrete:
      for (Complex p : points) os << p.real() << ' ' << p.imag() << '\n';
      os << '\n';
      break;
    case Kind::vertical_lines:
      for (double re : real_parts) {
        if (spacing == 0.0) {
          os << re << ' ' << -window << '\n' << re << ' ' << window << "\n\n";
        } else {
          const long kmax = static_cast<long>(std::floor(window / spacing));
          for (long k = -kmax; k <= kmax; ++k) os << re << ' ' << k * spacing << '\n';
          os << '\n';
        }
      }
      break;
    case Kind::union_of:
      for (const auto& m : members) os << m.to_gnuplot(resolution, window);
      break;
  }
  return os.str();
}

double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double worst = 0.0;
    for (Complex p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (Complex q : to) best = std::min(best, std::abs(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace streamspec
