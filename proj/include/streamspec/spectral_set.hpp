#pragma once

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace streamspec {

using Complex = std::complex<double>;

/// Closed-form subsets of ℂ used for generator and semigroup spectra.
/// Every set carries a provenance string naming the result it came from.
struct SpectralSet {
  enum class Kind { empty, half_plane, disk, discrete, vertical_lines, annulus, union_of };

  Kind kind = Kind::empty;
  /// half_plane: {Re z ≤ a}.
  double a = 0.0;
  /// disk: {|z| ≤ r}; annulus: {r ≤ |z| ≤ r2} (a circle when r == r2).
  double r = 0.0;
  double r2 = 0.0;
  /// disk without the origin.
  bool punctured = false;
  /// discrete points.
  std::vector<Complex> points;
  /// vertical_lines: {a_j + i·k·spacing : k ∈ ℤ} for each a_j, full lines
  /// when spacing == 0.
  std::vector<double> real_parts;
  double spacing = 0.0;
  std::vector<SpectralSet> members;
  std::string provenance;
  std::string note;

  static SpectralSet empty_set(std::string provenance = {});
  static SpectralSet half_plane(double a, std::string provenance = {});
  static SpectralSet disk(double r, bool punctured = false, std::string provenance = {});
  static SpectralSet discrete(std::vector<Complex> pts, std::string provenance = {});
  static SpectralSet vertical_lines(std::vector<double> real_parts, double spacing,
                                    std::string provenance = {});
  static SpectralSet annulus(double r1, double r2, std::string provenance = {});
  static SpectralSet circle(double radius, std::string provenance = {});
  /// Flattens nested unions and drops empty members.
  static SpectralSet union_of(std::vector<SpectralSet> members, std::string provenance = {});

  bool is_empty() const;
  /// Membership with tolerance `tol` on every defining inequality.
  bool contains(Complex z, double tol = 1e-12) const;

  /// Image under z ↦ e^{tz}: half_plane(a) → punctured disk(e^{at}),
  /// discrete → discrete, vertical lines → circles of radius e^{a_j t}
  /// (closure of the image), union → union. Disk and annulus inputs are
  /// already semigroup-side sets and raise PreconditionError.
  SpectralSet exp_map(double t) const;

  /// All discrete points of the set (flattening unions). Throws
  /// PreconditionError if a non-discrete member is present.
  std::vector<Complex> discrete_points() const;

  nlohmann::json to_json() const;
  /// Two-column "re im" data, blocks separated by blank lines. Continuous
  /// boundaries are sampled with `resolution` points; half planes are drawn
  /// as their boundary line for |Im z| ≤ window.
  std::string to_gnuplot(int resolution = 256, double window = 10.0) const;
};

std::string to_string(SpectralSet::Kind k);

/// Hausdorff distance between two finite point sets (∞ if exactly one is
/// empty, 0 if both are).
double hausdorff_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

}  // namespace streamspec
