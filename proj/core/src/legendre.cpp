#include "toric/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toric/error.hpp"

namespace toric {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Hull {
  std::vector<std::size_t> idx;  // positions in the line
  std::vector<double> slope;     // slope[j] between idx[j] and idx[j+1]
};

// Lower convex hull of (x_i, v_i), x increasing.
Hull lower_hull(const std::vector<double>& x, const std::vector<double>& v) {
  Hull h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (h.idx.size() >= 2) {
      const std::size_t a = h.idx[h.idx.size() - 2], b = h.idx.back();
      // Drop b when it lies on or above the chord a -> i.
      if ((v[b] - v[a]) * (x[i] - x[a]) >= (v[i] - v[a]) * (x[b] - x[a]))
        h.idx.pop_back();
      else
        break;
    }
    h.idx.push_back(i);
  }
  for (std::size_t j = 0; j + 1 < h.idx.size(); ++j) {
    const std::size_t a = h.idx[j], b = h.idx[j + 1];
    h.slope.push_back((v[b] - v[a]) / (x[b] - x[a]));
  }
  return h;
}

struct Line {
  std::vector<double> x, v;
  std::vector<char> rel;
};

// Conjugate of one line at sorted slopes; writes values and reliability.
void transform_line(const Line& line, const GridAxis& targets, std::vector<double>& out, std::vector<char>& rel_out) {
  out.assign(targets.count, kNaN);
  rel_out.assign(targets.count, 0);
  if (line.x.empty()) return;
  const Hull h = lower_hull(line.x, line.v);
  std::size_t j = 0;
  for (std::size_t k = 0; k < targets.count; ++k) {
    const double s = targets.at(k);
    while (j < h.slope.size() && s > h.slope[j]) ++j;
    const std::size_t p = h.idx[j];
    out[k] = s * line.x[p] - line.v[p];
    const double slack = 1e-12 * (1.0 + std::abs(s));
    const bool inside = !h.slope.empty() && s >= h.slope.front() - slack && s <= h.slope.back() + slack;
    rel_out[k] = inside && line.rel[p];
  }
}

// Calls fn(base_flat) for every grid line along `axis` (index 0 on that axis).
template <typename Fn>
void for_each_line(const PotentialGrid& g, std::size_t axis, Fn&& fn) {
  for (std::size_t k = 0; k < g.size(); ++k)
    if ((k / g.stride(axis)) % g.axes()[axis].count == 0) fn(k);
}

}  // namespace

std::vector<GridAxis> default_targets(const PotentialGrid& f) {
  std::vector<GridAxis> out;
  for (std::size_t a = 0; a < f.dim(); ++a) {
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    const auto& ax = f.axes()[a];
    for_each_line(f, a, [&](std::size_t base) {
      Line line;
      for (std::size_t i = 0; i < ax.count; ++i) {
        const std::size_t k = base + i * f.stride(a);
        if (!f.present(k)) continue;
        line.x.push_back(ax.at(i));
        line.v.push_back(f[k]);
      }
      const Hull h = lower_hull(line.x, line.v);
      if (h.slope.empty()) return;
      lo = std::max(lo, h.slope.front());
      hi = std::min(hi, h.slope.back());
    });
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::InvalidInput, "grid has no line with two samples");
    // Affine lines: the chord slopes agree up to rounding.
    if (hi - lo <= 1e-9 * (1.0 + std::abs(lo)))
      out.push_back({lo, lo, 1});
    else
      out.push_back({lo, hi, std::max<std::size_t>(2, ax.count - 1)});
  }
  return out;
}

PotentialGrid legendre(const PotentialGrid& f, const std::optional<std::vector<GridAxis>>& targets,
                       double convexity_tol) {
  f.check_convex(convexity_tol);
  const std::vector<GridAxis> tg = targets ? *targets : default_targets(f);
  if (tg.size() != f.dim()) throw Error(ErrorCode::InvalidInput, "target axes do not match grid dimension");
  const PotentialKind kind = f.kind() == PotentialKind::Kahler ? PotentialKind::Symplectic : PotentialKind::Kahler;

  PotentialGrid cur = f;
  for (std::size_t pass = 0; pass < f.dim(); ++pass) {
    const std::size_t a = f.dim() - 1 - pass;
    std::vector<GridAxis> axes = cur.axes();
    axes[a] = tg[a];
    PotentialGrid next(axes, kind);
    const auto& in_ax = cur.axes()[a];
    std::vector<double> vals;
    std::vector<char> rels;
    for_each_line(cur, a, [&](std::size_t base) {
      Line line;
      for (std::size_t i = 0; i < in_ax.count; ++i) {
        const std::size_t k = base + i * cur.stride(a);
        if (!cur.present(k)) continue;
        line.x.push_back(in_ax.at(i));
        line.v.push_back(pass == 0 ? cur[k] : -cur[k]);
        line.rel.push_back(pass == 0 ? 1 : cur.reliable(k));
      }
      transform_line(line, tg[a], vals, rels);
      // Axes after a are unchanged, so the stride along a is shared.
      const std::size_t sa = cur.stride(a);
      const std::size_t out_base = (base / (sa * in_ax.count)) * sa * tg[a].count + base % sa;
      for (std::size_t k = 0; k < tg[a].count; ++k) {
        const std::size_t o = out_base + k * next.stride(a);
        next[o] = vals[k];
        next.set_reliable(o, rels[k] != 0);
      }
    });
    cur = std::move(next);
  }
  return cur;
}

InvolutionReport involution_error(const PotentialGrid& f, const std::optional<std::vector<GridAxis>>& targets) {
  const std::vector<GridAxis> tg = targets ? *targets : default_targets(f);
  InvolutionReport rep;
  rep.degenerate = std::any_of(tg.begin(), tg.end(), [](const GridAxis& a) { return a.count < 2 || a.max <= a.min; });
  const PotentialGrid g = legendre(f, tg);
  const PotentialGrid ff = legendre(g, f.axes(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f.present(k) || !ff.reliable(k)) continue;
    rep.error = std::max(rep.error, std::abs(ff[k] - f[k]));
    ++rep.samples;
  }
  if (rep.degenerate) rep.error = 0.0;
  return rep;
}

PotentialGrid affine_action(const PotentialGrid& f, const AffineAction& action) {
  const auto n = static_cast<Eigen::Index>(f.dim());
  switch (action.mode) {
    case AffineAction::Mode::Glnz: {
      if (action.matrix.size() != f.dim()) throw Error(ErrorCode::InvalidInput, "matrix size does not match grid");
      RatMatrix m;
      Eigen::MatrixXd b(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = action.matrix[static_cast<std::size_t>(i)];
        if (row.size() != f.dim()) throw Error(ErrorCode::InvalidInput, "matrix is not square");
        m.push_back(to_rational(row));
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) = static_cast<double>(row[static_cast<std::size_t>(j)]);
      }
      const Rational det = exact::determinant(m);
      if (det != 1 && det != -1) throw Error(ErrorCode::NotUnimodular, "|det B| = " + to_string(det < 0 ? Rational(-det) : det));
      PotentialGrid out(f.axes(), f.kind());
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.interpolate(b * f.point(k));
      return out;
    }
    case AffineAction::Mode::DomainShift: {
      if (action.shift.size() != n) throw Error(ErrorCode::InvalidInput, "shift has wrong dimension");
      std::vector<GridAxis> axes = f.axes();
      for (Eigen::Index i = 0; i < n; ++i) {
        axes[static_cast<std::size_t>(i)].min += action.shift[i];
        axes[static_cast<std::size_t>(i)].max += action.shift[i];
      }
      PotentialGrid out(axes, f.kind());
      for (std::size_t k = 0; k < out.size(); ++k) out[k] = f[k];
      return out;
    }
    case AffineAction::Mode::SlopeShift: {
      if (action.shift.size() != n) throw Error(ErrorCode::InvalidInput, "shift has wrong dimension");
      PotentialGrid out = f;
      for (std::size_t k = 0; k < out.size(); ++k)
        if (out.present(k)) out[k] += action.shift.dot(f.point(k));
      return out;
    }
  }
  throw Error(ErrorCode::InvalidInput, "unknown affine action");
}

namespace {

std::vector<Eigen::VectorXd> sphere_directions(std::size_t n) {
  std::vector<Eigen::VectorXd> dirs;
  const auto ni = static_cast<Eigen::Index>(n);
  if (n == 1) return {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
  if (n == 2) {
    for (int k = 0; k < 128; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 128.0;
      Eigen::VectorXd d(2);
      d << std::cos(t), std::sin(t);
      dirs.push_back(d);
    }
    return dirs;
  }
  // All nonzero vectors of {-2..2}^n, normalized.
  std::vector<int> c(n, -2);
  while (true) {
    Eigen::VectorXd d(ni);
    for (Eigen::Index i = 0; i < ni; ++i) d[i] = c[static_cast<std::size_t>(i)];
    if (d.norm() > 0) dirs.push_back(d.normalized());
    std::size_t i = 0;
    while (i < n && c[i] == 2) c[i++] = -2;
    if (i == n) break;
    ++c[i];
  }
  return dirs;
}

}  // namespace

PropernessBound properness_bound(const PotentialGrid& f, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "epsilon must be positive");
  const std::size_t n = f.dim();
  auto on_edge = [&](std::size_t k) {
    const auto idx = f.unflatten(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (idx[i] == 0 || idx[i] + 1 == f.axes()[i].count) return true;
      if (!f.present(k + f.stride(i)) || !f.present(k - f.stride(i))) return true;
    }
    return false;
  };
  PropernessBound out;
  out.slope = eps;
  out.offset = -std::numeric_limits<double>::infinity();
  for (const auto& d : sphere_directions(n)) {
    const Eigen::VectorXd x = eps * d;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (!f.present(k)) continue;
      const double v = x.dot(f.point(k)) - f[k];
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    if (!std::isfinite(best) || on_edge(arg))
      throw Error(ErrorCode::ZeroNotInterior,
                  "the epsilon-ball is not inside the slope range of f (maximizer on the sampling edge)");
    out.offset = std::max(out.offset, best);
  }
  out.verified = true;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f.present(k)) continue;
    if (f[k] < eps * f.point(k).norm() - out.offset - 1e-12 * (1.0 + std::abs(f[k]))) out.verified = false;
  }
  return out;
}

}  // namespace toric
