#pragma once

// Uniform tensor grids of samples of a convex function, and the text/binary
// grid file format.

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "toric/polyhedral.hpp"
#include "toric/potential.hpp"

namespace toric {

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  double step() const { return count > 1 ? (max - min) / static_cast<double>(count - 1) : 0.0; }
  double at(std::size_t i) const { return min + step() * static_cast<double>(i); }
  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

enum class PotentialKind { Kahler, Symplectic };
std::string_view to_string(PotentialKind k);

/// Row-major samples (last axis fastest). NaN marks an absent sample; the
/// reliability mask marks samples a transform could not certify.
class PotentialGrid {
 public:
  PotentialGrid() = default;
  PotentialGrid(std::vector<GridAxis> axes, PotentialKind kind);

  /// Samples f at every node; nodes outside `domain` (when given) are absent.
  static PotentialGrid sample(std::vector<GridAxis> axes, PotentialKind kind, const Potential& f,
                              const std::optional<Polyhedron>& domain = std::nullopt, bool interior_only = true);

  std::size_t dim() const { return axes_.size(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<GridAxis>& axes() const { return axes_; }
  PotentialKind kind() const { return kind_; }
  void set_kind(PotentialKind k) { kind_ = k; }

  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::vector<std::size_t>& idx) const;
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  Eigen::VectorXd point(std::size_t flat) const;

  double& operator[](std::size_t flat) { return values_[flat]; }
  double operator[](std::size_t flat) const { return values_[flat]; }
  const std::vector<double>& values() const { return values_; }
  bool present(std::size_t flat) const { return !std::isnan(values_[flat]); }
  bool reliable(std::size_t flat) const { return present(flat) && reliable_[flat] != 0; }
  void set_reliable(std::size_t flat, bool r) { reliable_[flat] = r ? 1 : 0; }

  /// Multilinear interpolation; NaN outside the box or next to absent samples.
  double interpolate(const Eigen::VectorXd& x) const;

  /// Largest violation (negative second difference scaled by 1/h^2 along
  /// axes and the sampled diagonals), zero for a discretely convex grid.
  double convexity_defect() const;
  /// Throws NotConvex when convexity_defect() > tol.
  void check_convex(double tol) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<std::size_t> strides_;
  std::vector<double> values_;
  std::vector<std::uint8_t> reliable_;
  PotentialKind kind_ = PotentialKind::Symplectic;
};

enum class GridEncoding { Csv, Binary };

void write_grid(std::ostream& out, const PotentialGrid& g, GridEncoding enc = GridEncoding::Csv);
PotentialGrid read_grid(std::istream& in);
void write_grid_file(const std::string& path, const PotentialGrid& g, GridEncoding enc = GridEncoding::Csv);
PotentialGrid read_grid_file(const std::string& path);

/// Uniform axes of `count` nodes covering [lo, hi] per coordinate.
std::vector<GridAxis> uniform_axes(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::size_t count);

/// Potential backed by a grid: centered differences at nodes, multilinearly
/// interpolated between them.
Potential grid_potential(const PotentialGrid& g);
/// u_P + v where v = g - u_P is differenced on the grid (one-sided at the
/// edges), so the facet singularities stay exact.
Potential grid_potential(const PotentialGrid& g, const Polyhedron& singular_reference);

}  // namespace toric
