#pragma once

// Exact combinatorics of rational polyhedra {x : <nu_i, x> >= -a_i}, their
// recession and dual cones, normal fans, and the Delzant (smoothness) test.
// Everything here is computed in exact rational arithmetic; floating point
// only enters downstream of these routines.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "toric/rational.hpp"

namespace toric {

/// coeffs . x + constant >= 0, or > 0 when strict.
struct LinearInequality {
  RatVec coeffs;
  Rational constant;
  bool strict = false;
};

/// Exact feasibility of a mixed strict/non-strict system (Fourier-Motzkin).
bool is_feasible(std::vector<LinearInequality> system, std::size_t dim);

/// Rational polyhedral cone given by primitive generators. Generators are kept
/// canonical: primitive, lexicographically sorted, duplicate-free.
class Cone {
 public:
  Cone(std::size_t dim, std::vector<IntVec> generators);

  /// The cone {d : <n, d> >= 0 for all n in normals}.
  static Cone from_inequalities(std::size_t dim, const std::vector<IntVec>& normals);

  std::size_t dim() const { return dim_; }
  const std::vector<IntVec>& generators() const { return generators_; }
  /// Generators of the dual cone, i.e. an inequality description of this one.
  const std::vector<IntVec>& dual_generators() const { return dual_generators_; }

  bool contains(const RatVec& x) const;
  bool contains(const IntVec& x) const;
  /// Dimension of the linear span.
  int dimension() const;
  bool is_pointed() const;
  bool is_trivial() const { return generators_.empty(); }

  friend bool operator==(const Cone& a, const Cone& b);

 private:
  std::size_t dim_;
  std::vector<IntVec> generators_;
  std::vector<IntVec> dual_generators_;
};

Cone dual_cone(const Cone& c);

struct Vertex {
  RatVec point;
  std::vector<std::size_t> active;  // facet indices tight at the vertex
  std::vector<IntVec> edges;        // primitive inward edge directions
  bool simple() const { return active.size() == point.size(); }
};

class Polyhedron {
 public:
  /// Canonicalizes (primitive normals, duplicates merged to the tightest
  /// offset, redundant inequalities removed) and checks the interior.
  static Polyhedron make(std::size_t dim, std::vector<IntVec> normals, std::vector<Rational> offsets);
  static Polyhedron make(std::vector<IntVec> normals, std::vector<Rational> offsets);

  std::size_t dim() const { return dim_; }
  std::size_t num_facets() const { return normals_.size(); }
  const std::vector<IntVec>& normals() const { return normals_; }
  const std::vector<Rational>& offsets() const { return offsets_; }

  /// <nu_i, x> + a_i, nonnegative exactly on P.
  Rational slack(std::size_t facet, const RatVec& x) const;
  double slack(std::size_t facet, const Eigen::VectorXd& x) const;
  /// Euclidean distance from x to the hyperplane of a facet (signed, positive inside).
  double facet_distance(std::size_t facet, const Eigen::VectorXd& x) const;
  double min_facet_distance(const Eigen::VectorXd& x) const;

  bool contains(const RatVec& x) const;
  bool contains_interior(const RatVec& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
  bool contains_interior(const Eigen::VectorXd& x) const;

  bool is_pointed() const;
  bool is_bounded() const;

  friend bool operator==(const Polyhedron& a, const Polyhedron& b);

 private:
  Polyhedron(std::size_t dim, std::vector<IntVec> normals, std::vector<Rational> offsets);

  std::size_t dim_;
  std::vector<IntVec> normals_;
  std::vector<Rational> offsets_;
};

/// All vertices, lexicographically sorted; empty when P is not pointed.
std::vector<Vertex> vertices(const Polyhedron& p);
Cone recession_cone(const Polyhedron& p);

struct DelzantCertificate {
  bool delzant = false;
  std::optional<std::size_t> failing_vertex;
  RatVec vertex_point;
  Integer determinant = 0;  // |det| of the edge matrix at the failing vertex, 0 if non-simple
  std::string reason;
};

/// Throws NotPointed when P has no vertex.
DelzantCertificate is_delzant(const Polyhedron& p);

class Fan {
 public:
  using ConeIndices = std::vector<std::size_t>;

  /// Validates primitivity, strong convexity, full-dimensional support, and
  /// that pairwise intersections are common faces.
  static Fan make(std::size_t dim, std::vector<IntVec> rays, std::vector<ConeIndices> max_cones);

  std::size_t dim() const { return dim_; }
  const std::vector<IntVec>& rays() const { return rays_; }
  const std::vector<ConeIndices>& max_cones() const { return max_cones_; }
  /// Every cone of the fan (all faces of the maximal cones), as ray-index sets.
  std::vector<ConeIndices> cones() const;
  Cone cone(const ConeIndices& indices) const;

 private:
  Fan(std::size_t dim, std::vector<IntVec> rays, std::vector<ConeIndices> max_cones)
      : dim_(dim), rays_(std::move(rays)), max_cones_(std::move(max_cones)) {}

  std::size_t dim_;
  std::vector<IntVec> rays_;
  std::vector<ConeIndices> max_cones_;
};

/// Faces of cone(rays[indices]) as index subsets, including the cone itself and {0}.
std::vector<Fan::ConeIndices> cone_faces(const std::vector<IntVec>& rays, const Fan::ConeIndices& indices,
                                         std::size_t dim);

/// Rays are the facet normals (same indexing); maximal cones are vertex cones.
Fan normal_fan(const Polyhedron& p);

/// {x : <nu_i, x> >= -1} for the given primitive rays.
Polyhedron anticanonical_polyhedron(const std::vector<IntVec>& rays);
Polyhedron polyhedron_of_divisor(const Fan& fan, const std::vector<Rational>& coefficients);

using IntMatrix = std::vector<IntVec>;  // row-major

/// Image B^T(P) for unimodular B.
Polyhedron act_glnz(const Polyhedron& p, const IntMatrix& b);
/// P - t.
Polyhedron act_translate(const Polyhedron& p, const RatVec& t);
/// The t with P - t = {<nu_i, x> >= -1}, when P is a translate of its anticanonical polyhedron.
std::optional<RatVec> anticanonical_translation(const Polyhedron& p);

/// One cell conv(points) + cone(rays) of a triangulation of a pointed polyhedron;
/// points.size() + rays.size() == dim + 1.
struct TriangulationCell {
  std::vector<RatVec> points;
  std::vector<IntVec> rays;
  Rational volume_factor;  // |det[p_1 - p_0, ..., p_k - p_0, r_1, ..., r_m]|
};

/// Pulling triangulation using only vertices and extreme recession rays.
std::vector<TriangulationCell> triangulate(const Polyhedron& p);

/// P intersected with the box [-r, r]^n.
Polyhedron clip_to_box(const Polyhedron& p, const Rational& radius);

}  // namespace toric
