#include "toric/polyhedral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "toric/error.hpp"

namespace toric {

namespace {

// Calls fn(subset) for every k-subset of {0, ..., n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(static_cast<const std::vector<std::size_t>&>(idx));
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

RatMatrix to_rows(const std::vector<IntVec>& vecs) {
  RatMatrix rows;
  rows.reserve(vecs.size());
  for (const auto& v : vecs) rows.push_back(to_rational(v));
  return rows;
}

IntVec negate(IntVec v) {
  for (auto& x : v) x = -x;
  return v;
}

void canonicalize_generators(std::vector<IntVec>& gens) {
  std::vector<IntVec> out;
  for (auto& g : gens)
    if (!is_zero(g)) out.push_back(primitive(g));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  gens = std::move(out);
}

// Generators of {d : <n, d> >= 0 for all n}: a lineality basis with both
// signs plus the extreme rays of the pointed part inside the orthogonal
// complement of the lineality space.
std::vector<IntVec> hrep_generators(std::size_t dim, const std::vector<IntVec>& normals) {
  std::vector<IntVec> gens;
  std::vector<RatVec> lineality;
  if (normals.empty()) {
    for (std::size_t i = 0; i < dim; ++i) {
      RatVec e(dim, Rational(0));
      e[i] = 1;
      lineality.push_back(e);
    }
  } else {
    lineality = exact::nullspace(to_rows(normals), dim);
  }
  for (const auto& l : lineality) {
    IntVec g = primitive(l);
    gens.push_back(g);
    gens.push_back(negate(g));
  }
  const std::size_t k = dim - lineality.size();
  if (k > 0) {
    for_each_subset(normals.size(), k - 1, [&](const std::vector<std::size_t>& subset) {
      RatMatrix rows;
      for (auto i : subset) rows.push_back(to_rational(normals[i]));
      for (const auto& l : lineality) rows.push_back(l);
      auto ns = exact::nullspace(rows, dim);
      if (ns.size() != 1) return;
      IntVec d = primitive(ns[0]);
      for (IntVec cand : {d, negate(d)}) {
        bool ok = std::all_of(normals.begin(), normals.end(),
                              [&](const IntVec& n) { return dot(n, cand) >= 0; });
        if (ok) gens.push_back(cand);
      }
    });
  }
  canonicalize_generators(gens);
  return gens;
}

// Normalizes an inequality so that equal directions compare equal.
bool normalize(LinearInequality& ineq) {
  auto it = std::find_if(ineq.coeffs.begin(), ineq.coeffs.end(), [](const Rational& c) { return c != 0; });
  if (it == ineq.coeffs.end()) return false;
  const Rational scale = boost::multiprecision::abs(*it);
  for (auto& c : ineq.coeffs) c /= scale;
  ineq.constant /= scale;
  return true;
}

}  // namespace

bool is_feasible(std::vector<LinearInequality> system, std::size_t dim) {
  auto compress = [](std::vector<LinearInequality>& sys) -> bool {
    std::map<RatVec, std::pair<Rational, bool>> best;
    for (auto& ineq : sys) {
      if (!normalize(ineq)) {
        if (ineq.constant < 0 || (ineq.constant == 0 && ineq.strict)) return false;
        continue;
      }
      auto [it, inserted] = best.try_emplace(ineq.coeffs, ineq.constant, ineq.strict);
      if (!inserted) {
        auto& [c, s] = it->second;
        if (ineq.constant < c || (ineq.constant == c && ineq.strict)) {
          c = ineq.constant;
          s = ineq.strict;
        }
      }
    }
    sys.clear();
    for (auto& [coeffs, cs] : best) sys.push_back({coeffs, cs.first, cs.second});
    return true;
  };

  if (!compress(system)) return false;
  for (std::size_t var = dim; var-- > 0;) {
    std::vector<LinearInequality> pos, neg, next;
    for (auto& ineq : system) {
      if (ineq.coeffs[var] > 0)
        pos.push_back(std::move(ineq));
      else if (ineq.coeffs[var] < 0)
        neg.push_back(std::move(ineq));
      else
        next.push_back(std::move(ineq));
    }
    for (const auto& p : pos) {
      for (const auto& q : neg) {
        const Rational wp = -q.coeffs[var];
        const Rational wq = p.coeffs[var];
        LinearInequality combo;
        combo.coeffs.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) combo.coeffs[j] = wp * p.coeffs[j] + wq * q.coeffs[j];
        combo.coeffs[var] = 0;
        combo.constant = wp * p.constant + wq * q.constant;
        combo.strict = p.strict || q.strict;
        next.push_back(std::move(combo));
      }
    }
    system = std::move(next);
    if (!compress(system)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Cone

Cone::Cone(std::size_t dim, std::vector<IntVec> generators) : dim_(dim), generators_(std::move(generators)) {
  for (const auto& g : generators_)
    if (g.size() != dim_) throw Error(ErrorCode::InvalidInput, "cone generator has wrong dimension");
  canonicalize_generators(generators_);
  dual_generators_ = hrep_generators(dim_, generators_);
}

Cone Cone::from_inequalities(std::size_t dim, const std::vector<IntVec>& normals) {
  return Cone(dim, hrep_generators(dim, normals));
}

bool Cone::contains(const RatVec& x) const {
  return std::all_of(dual_generators_.begin(), dual_generators_.end(),
                     [&](const IntVec& f) { return dot(f, x) >= 0; });
}

bool Cone::contains(const IntVec& x) const {
  return std::all_of(dual_generators_.begin(), dual_generators_.end(),
                     [&](const IntVec& f) { return dot(f, x) >= 0; });
}

int Cone::dimension() const {
  if (generators_.empty()) return 0;
  return exact::rank(to_rows(generators_), dim_);
}

bool Cone::is_pointed() const {
  if (dual_generators_.empty()) return dim_ == 0;
  return exact::rank(to_rows(dual_generators_), dim_) == static_cast<int>(dim_);
}

bool operator==(const Cone& a, const Cone& b) {
  if (a.dim_ != b.dim_) return false;
  if (a.generators_ == b.generators_) return true;
  auto inside = [](const Cone& outer, const Cone& inner) {
    return std::all_of(inner.generators_.begin(), inner.generators_.end(),
                       [&](const IntVec& g) { return outer.contains(g); });
  };
  return inside(a, b) && inside(b, a);
}

Cone dual_cone(const Cone& c) { return Cone(c.dim(), c.dual_generators()); }

// ---------------------------------------------------------------- Polyhedron

Polyhedron::Polyhedron(std::size_t dim, std::vector<IntVec> normals, std::vector<Rational> offsets)
    : dim_(dim), normals_(std::move(normals)), offsets_(std::move(offsets)) {}

Polyhedron Polyhedron::make(std::vector<IntVec> normals, std::vector<Rational> offsets) {
  if (normals.empty()) throw Error(ErrorCode::InvalidInput, "dimension cannot be inferred from zero normals");
  const std::size_t dim = normals.front().size();
  return make(dim, std::move(normals), std::move(offsets));
}

Polyhedron Polyhedron::make(std::size_t dim, std::vector<IntVec> normals, std::vector<Rational> offsets) {
  if (dim == 0) throw Error(ErrorCode::InvalidInput, "dimension must be positive");
  if (normals.size() != offsets.size())
    throw Error(ErrorCode::InvalidInput, "normals and offsets differ in length");

  // Primitive normals; merge equal normals keeping the tightest offset.
  std::map<IntVec, Rational> tightest;
  std::vector<IntVec> order;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (normals[i].size() != dim) throw Error(ErrorCode::InvalidInput, "normal has wrong dimension");
    if (is_zero(normals[i])) throw Error(ErrorCode::ZeroNormal, "normal " + std::to_string(i) + " is zero");
    const std::int64_t g = gcd(normals[i]);
    IntVec nu = primitive(normals[i]);
    Rational a = offsets[i] / g;
    auto [it, inserted] = tightest.try_emplace(nu, a);
    if (inserted)
      order.push_back(nu);
    else if (a < it->second)
      it->second = a;
  }

  std::vector<IntVec> ns;
  std::vector<Rational> as;
  for (const auto& nu : order) {
    ns.push_back(nu);
    as.push_back(tightest[nu]);
  }

  auto inequality = [&](std::size_t i, bool strict, bool flipped) {
    LinearInequality ineq;
    ineq.coeffs = to_rational(ns[i]);
    ineq.constant = as[i];
    if (flipped) {
      for (auto& c : ineq.coeffs) c = -c;
      ineq.constant = -ineq.constant;
    }
    ineq.strict = strict;
    return ineq;
  };

  {
    std::vector<LinearInequality> interior;
    for (std::size_t i = 0; i < ns.size(); ++i) interior.push_back(inequality(i, true, false));
    if (!is_feasible(interior, dim)) throw Error(ErrorCode::EmptyInterior, "the strict system is infeasible");
  }

  // Drop inequality i when {others, <nu_i,x> + a_i < 0} is infeasible.
  std::vector<bool> keep(ns.size(), true);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<LinearInequality> sys;
    for (std::size_t j = 0; j < ns.size(); ++j)
      if (j != i && keep[j]) sys.push_back(inequality(j, false, false));
    sys.push_back(inequality(i, true, true));
    if (!is_feasible(sys, dim)) keep[i] = false;
  }

  std::vector<IntVec> out_n;
  std::vector<Rational> out_a;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!keep[i]) continue;
    out_n.push_back(ns[i]);
    out_a.push_back(as[i]);
  }
  return Polyhedron(dim, std::move(out_n), std::move(out_a));
}

Rational Polyhedron::slack(std::size_t facet, const RatVec& x) const {
  return dot(normals_[facet], x) + offsets_[facet];
}

double Polyhedron::slack(std::size_t facet, const Eigen::VectorXd& x) const {
  double s = to_double(offsets_[facet]);
  for (std::size_t j = 0; j < dim_; ++j) s += static_cast<double>(normals_[facet][j]) * x[static_cast<Eigen::Index>(j)];
  return s;
}

double Polyhedron::facet_distance(std::size_t facet, const Eigen::VectorXd& x) const {
  return slack(facet, x) / to_eigen(normals_[facet]).norm();
}

double Polyhedron::min_facet_distance(const Eigen::VectorXd& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normals_.size(); ++i) d = std::min(d, facet_distance(i, x));
  return d;
}

bool Polyhedron::contains(const RatVec& x) const {
  for (std::size_t i = 0; i < normals_.size(); ++i)
    if (slack(i, x) < 0) return false;
  return true;
}

bool Polyhedron::contains_interior(const RatVec& x) const {
  for (std::size_t i = 0; i < normals_.size(); ++i)
    if (slack(i, x) <= 0) return false;
  return true;
}

bool Polyhedron::contains(const Eigen::VectorXd& x, double tol) const {
  for (std::size_t i = 0; i < normals_.size(); ++i)
    if (slack(i, x) < -tol) return false;
  return true;
}

bool Polyhedron::contains_interior(const Eigen::VectorXd& x) const {
  for (std::size_t i = 0; i < normals_.size(); ++i)
    if (slack(i, x) <= 0) return false;
  return true;
}

bool Polyhedron::is_pointed() const {
  return !normals_.empty() && exact::rank(to_rows(normals_), dim_) == static_cast<int>(dim_);
}

bool Polyhedron::is_bounded() const { return recession_cone(*this).is_trivial(); }

bool operator==(const Polyhedron& a, const Polyhedron& b) {
  if (a.dim_ != b.dim_ || a.normals_.size() != b.normals_.size()) return false;
  std::vector<std::pair<IntVec, Rational>> fa, fb;
  for (std::size_t i = 0; i < a.normals_.size(); ++i) fa.emplace_back(a.normals_[i], a.offsets_[i]);
  for (std::size_t i = 0; i < b.normals_.size(); ++i) fb.emplace_back(b.normals_[i], b.offsets_[i]);
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  return fa == fb;
}

// ---------------------------------------------------------------- vertices

std::vector<Vertex> vertices(const Polyhedron& p) {
  std::vector<Vertex> out;
  if (!p.is_pointed()) return out;
  const std::size_t n = p.dim();
  std::set<RatVec> seen;
  for_each_subset(p.num_facets(), n, [&](const std::vector<std::size_t>& subset) {
    RatMatrix a;
    RatVec rhs;
    for (auto i : subset) {
      a.push_back(to_rational(p.normals()[i]));
      rhs.push_back(-p.offsets()[i]);
    }
    auto x = exact::solve(a, rhs);
    if (!x || !p.contains(*x) || !seen.insert(*x).second) return;
    Vertex v;
    v.point = *x;
    std::vector<IntVec> active_normals;
    for (std::size_t i = 0; i < p.num_facets(); ++i) {
      if (p.slack(i, *x) == 0) {
        v.active.push_back(i);
        active_normals.push_back(p.normals()[i]);
      }
    }
    v.edges = Cone::from_inequalities(n, active_normals).generators();
    out.push_back(std::move(v));
  });
  std::sort(out.begin(), out.end(), [](const Vertex& a, const Vertex& b) { return a.point < b.point; });
  return out;
}

Cone recession_cone(const Polyhedron& p) { return Cone::from_inequalities(p.dim(), p.normals()); }

DelzantCertificate is_delzant(const Polyhedron& p) {
  const auto vs = vertices(p);
  if (vs.empty()) throw Error(ErrorCode::NotPointed, "polyhedron has no vertex (nontrivial lineality space)");
  DelzantCertificate cert;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const auto& v = vs[k];
    Integer det = 0;
    if (v.edges.size() == p.dim()) {
      RatMatrix m;
      for (const auto& e : v.edges) m.push_back(to_rational(e));
      det = boost::multiprecision::numerator(exact::determinant(m));
      det = boost::multiprecision::abs(det);
    }
    if (det != 1) {
      cert.delzant = false;
      cert.failing_vertex = k;
      cert.vertex_point = v.point;
      cert.determinant = det;
      cert.reason = v.edges.size() == p.dim() ? "edge directions do not form a lattice basis"
                                              : "vertex is not simple (" + std::to_string(v.edges.size()) + " edges)";
      return cert;
    }
  }
  cert.delzant = true;
  cert.determinant = 1;
  return cert;
}

// ---------------------------------------------------------------- fans

std::vector<Fan::ConeIndices> cone_faces(const std::vector<IntVec>& rays, const Fan::ConeIndices& indices,
                                         std::size_t dim) {
  std::vector<IntVec> gens;
  for (auto i : indices) gens.push_back(rays[i]);
  const auto duals = hrep_generators(dim, gens);
  std::set<Fan::ConeIndices> faces;
  const std::size_t m = duals.size();
  if (m > 20) throw Error(ErrorCode::InvalidInput, "cone has too many facets for face enumeration");
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    IntVec w(dim, 0);
    for (std::size_t j = 0; j < m; ++j)
      if (mask & (std::uint64_t{1} << j))
        for (std::size_t c = 0; c < dim; ++c) w[c] += duals[j][c];
    Fan::ConeIndices tight;
    for (auto i : indices)
      if (dot(w, rays[i]) == 0) tight.push_back(i);
    std::sort(tight.begin(), tight.end());
    faces.insert(tight);
  }
  return {faces.begin(), faces.end()};
}

Fan Fan::make(std::size_t dim, std::vector<IntVec> rays, std::vector<ConeIndices> max_cones) {
  for (const auto& r : rays) {
    if (r.size() != dim) throw Error(ErrorCode::InvalidFan, "ray has wrong dimension");
    if (!is_primitive(r)) throw Error(ErrorCode::InvalidFan, "ray is not primitive");
  }
  bool full = false;
  for (auto& c : max_cones) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (auto i : c)
      if (i >= rays.size()) throw Error(ErrorCode::InvalidFan, "cone references a missing ray");
  }
  Fan fan(dim, std::move(rays), std::move(max_cones));
  for (const auto& c : fan.max_cones_) {
    Cone cone = fan.cone(c);
    if (!cone.is_pointed()) throw Error(ErrorCode::InvalidFan, "cone is not strongly convex");
    if (cone.dimension() == static_cast<int>(dim)) full = true;
  }
  if (!full) throw Error(ErrorCode::InvalidFan, "support is not full-dimensional (no cone of top dimension)");

  for (std::size_t a = 0; a < fan.max_cones_.size(); ++a) {
    const auto faces_a = cone_faces(fan.rays_, fan.max_cones_[a], dim);
    const Cone ca = fan.cone(fan.max_cones_[a]);
    for (std::size_t b = a + 1; b < fan.max_cones_.size(); ++b) {
      const auto faces_b = cone_faces(fan.rays_, fan.max_cones_[b], dim);
      const Cone cb = fan.cone(fan.max_cones_[b]);
      std::vector<IntVec> both = ca.dual_generators();
      both.insert(both.end(), cb.dual_generators().begin(), cb.dual_generators().end());
      const Cone meet = Cone::from_inequalities(dim, both);
      auto is_face_of = [&](const std::vector<ConeIndices>& faces) {
        return std::any_of(faces.begin(), faces.end(), [&](const ConeIndices& f) { return fan.cone(f) == meet; });
      };
      if (!is_face_of(faces_a) || !is_face_of(faces_b))
        throw Error(ErrorCode::InvalidFan, "cones " + std::to_string(a) + " and " + std::to_string(b) +
                                               " do not meet in a common face");
    }
  }
  return fan;
}

std::vector<Fan::ConeIndices> Fan::cones() const {
  std::set<ConeIndices> all;
  for (const auto& c : max_cones_)
    for (auto& f : cone_faces(rays_, c, dim_)) all.insert(f);
  return {all.begin(), all.end()};
}

Cone Fan::cone(const ConeIndices& indices) const {
  std::vector<IntVec> gens;
  for (auto i : indices) gens.push_back(rays_[i]);
  return Cone(dim_, gens);
}

Fan normal_fan(const Polyhedron& p) {
  const auto vs = vertices(p);
  if (vs.empty()) throw Error(ErrorCode::NotPointed, "normal fan requires a pointed polyhedron");
  std::vector<Fan::ConeIndices> cones;
  for (const auto& v : vs) cones.push_back(v.active);
  return Fan::make(p.dim(), p.normals(), std::move(cones));
}

Polyhedron anticanonical_polyhedron(const std::vector<IntVec>& rays) {
  if (rays.empty()) throw Error(ErrorCode::InvalidInput, "no rays given");
  for (const auto& r : rays)
    if (!is_primitive(r)) throw Error(ErrorCode::InvalidInput, "anticanonical rays must be primitive");
  return Polyhedron::make(rays, std::vector<Rational>(rays.size(), Rational(1)));
}

Polyhedron polyhedron_of_divisor(const Fan& fan, const std::vector<Rational>& coefficients) {
  if (coefficients.size() != fan.rays().size())
    throw Error(ErrorCode::InvalidInput, "need one coefficient per ray");
  return Polyhedron::make(fan.dim(), fan.rays(), coefficients);
}

Polyhedron act_glnz(const Polyhedron& p, const IntMatrix& b) {
  const std::size_t n = p.dim();
  if (b.size() != n) throw Error(ErrorCode::InvalidInput, "matrix size does not match dimension");
  RatMatrix m;
  for (const auto& row : b) {
    if (row.size() != n) throw Error(ErrorCode::InvalidInput, "matrix is not square");
    m.push_back(to_rational(row));
  }
  const Rational det = exact::determinant(m);
  if (det != 1 && det != -1) throw Error(ErrorCode::NotUnimodular, "|det B| = " + to_string(boost::multiprecision::abs(det)));
  const RatMatrix inv = *exact::inverse(m);
  std::vector<IntVec> normals;
  for (const auto& nu : p.normals()) {
    IntVec out(n);
    for (std::size_t i = 0; i < n; ++i) {
      Rational s = 0;
      for (std::size_t j = 0; j < n; ++j) s += inv[i][j] * nu[j];
      out[i] = static_cast<std::int64_t>(boost::multiprecision::numerator(s));
    }
    normals.push_back(out);
  }
  return Polyhedron::make(n, normals, p.offsets());
}

Polyhedron act_translate(const Polyhedron& p, const RatVec& t) {
  if (t.size() != p.dim()) throw Error(ErrorCode::InvalidInput, "translation has wrong dimension");
  std::vector<Rational> offsets;
  for (std::size_t i = 0; i < p.num_facets(); ++i) offsets.push_back(p.offsets()[i] + dot(p.normals()[i], t));
  return Polyhedron::make(p.dim(), p.normals(), offsets);
}

std::optional<RatVec> anticanonical_translation(const Polyhedron& p) {
  const std::size_t n = p.dim();
  RatMatrix rows;
  for (std::size_t i = 0; i < p.num_facets(); ++i) {
    RatVec r = to_rational(p.normals()[i]);
    r.push_back(p.offsets()[i] - 1);
    rows.push_back(r);
  }
  // Homogeneous form: [nu_i | a_i - 1] . (t, 1) = 0.
  const auto ns = exact::nullspace(rows, n + 1);
  for (const auto& v : ns) {
    if (v[n] == 0) continue;
    RatVec t(n);
    for (std::size_t j = 0; j < n; ++j) t[j] = v[j] / v[n];
    bool ok = true;
    for (std::size_t i = 0; i < p.num_facets() && ok; ++i) ok = p.offsets()[i] + dot(p.normals()[i], t) == 1;
    if (ok) return t;
  }
  return std::nullopt;
}

Polyhedron clip_to_box(const Polyhedron& p, const Rational& radius) {
  const std::size_t n = p.dim();
  std::vector<IntVec> normals = p.normals();
  std::vector<Rational> offsets = p.offsets();
  for (std::size_t j = 0; j < n; ++j) {
    IntVec e(n, 0);
    e[j] = 1;
    normals.push_back(e);
    offsets.push_back(radius);
    e[j] = -1;
    normals.push_back(e);
    offsets.push_back(radius);
  }
  return Polyhedron::make(n, normals, offsets);
}

// ---------------------------------------------------------------- triangulation

namespace {

struct HomogenizedCone {
  std::vector<RatVec> gens;         // (x, 1) for vertices, (w, 0) for rays
  std::vector<RatVec> constraints;  // rows c with <c, g> >= 0
};

class PullingTriangulator {
 public:
  explicit PullingTriangulator(const HomogenizedCone& cone) : cone_(cone) {
    tight_.resize(cone_.constraints.size());
    for (std::size_t j = 0; j < cone_.constraints.size(); ++j)
      for (std::size_t g = 0; g < cone_.gens.size(); ++g)
        if (dot(cone_.constraints[j], cone_.gens[g]) == 0) tight_[j].push_back(g);
  }

  std::vector<std::vector<std::size_t>> run(std::size_t dim) {
    std::vector<std::size_t> all(cone_.gens.size());
    std::iota(all.begin(), all.end(), 0);
    return triangulate(all, dim);
  }

 private:
  int rank_of(const std::vector<std::size_t>& face) const {
    RatMatrix m;
    for (auto g : face) m.push_back(cone_.gens[g]);
    return m.empty() ? 0 : exact::rank(m, cone_.gens.front().size());
  }

  std::vector<std::vector<std::size_t>> triangulate(const std::vector<std::size_t>& face, std::size_t d) {
    if (face.size() == d) return {face};
    const std::size_t apex = face.front();
    std::vector<std::vector<std::size_t>> out;
    std::set<std::vector<std::size_t>> facets;
    for (const auto& tight : tight_) {
      std::vector<std::size_t> f;
      std::set_intersection(face.begin(), face.end(), tight.begin(), tight.end(), std::back_inserter(f));
      if (f.empty() || std::binary_search(f.begin(), f.end(), apex)) continue;
      if (f.size() + 1 < d || f.size() == face.size()) continue;
      if (!facets.insert(f).second) continue;
      if (rank_of(f) != static_cast<int>(d) - 1) continue;
      for (auto& simplex : triangulate(f, d - 1)) {
        simplex.push_back(apex);
        std::sort(simplex.begin(), simplex.end());
        out.push_back(std::move(simplex));
      }
    }
    return out;
  }

  const HomogenizedCone& cone_;
  std::vector<std::vector<std::size_t>> tight_;
};

}  // namespace

std::vector<TriangulationCell> triangulate(const Polyhedron& p) {
  const auto vs = vertices(p);
  if (vs.empty()) throw Error(ErrorCode::NotPointed, "triangulation requires a pointed polyhedron");
  const std::size_t n = p.dim();
  HomogenizedCone cone;
  for (const auto& v : vs) {
    RatVec g = v.point;
    g.push_back(1);
    cone.gens.push_back(g);
  }
  const auto rays = recession_cone(p).generators();
  for (const auto& w : rays) {
    RatVec g = to_rational(w);
    g.push_back(0);
    cone.gens.push_back(g);
  }
  for (std::size_t i = 0; i < p.num_facets(); ++i) {
    RatVec c = to_rational(p.normals()[i]);
    c.push_back(p.offsets()[i]);
    cone.constraints.push_back(c);
  }
  {
    RatVec c(n + 1, Rational(0));
    c[n] = 1;
    cone.constraints.push_back(c);
  }

  PullingTriangulator tri(cone);
  std::vector<TriangulationCell> cells;
  for (const auto& simplex : tri.run(n + 1)) {
    TriangulationCell cell;
    RatMatrix m;
    for (auto g : simplex) {
      m.push_back(cone.gens[g]);
      if (g < vs.size())
        cell.points.push_back(vs[g].point);
      else
        cell.rays.push_back(rays[g - vs.size()]);
    }
    cell.volume_factor = boost::multiprecision::abs(exact::determinant(m));
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace toric
