#include "toric/grid.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "toric/error.hpp"

namespace toric {

std::string_view to_string(PotentialKind k) { return k == PotentialKind::Kahler ? "kahler" : "symplectic"; }

PotentialGrid::PotentialGrid(std::vector<GridAxis> axes, PotentialKind kind) : axes_(std::move(axes)), kind_(kind) {
  std::size_t total = 1;
  strides_.assign(axes_.size(), 1);
  for (std::size_t i = axes_.size(); i-- > 0;) {
    if (axes_[i].count == 0) throw Error(ErrorCode::InvalidInput, "grid axis with zero samples");
    strides_[i] = total;
    total *= axes_[i].count;
  }
  values_.assign(total, std::numeric_limits<double>::quiet_NaN());
  reliable_.assign(total, 1);
}

PotentialGrid PotentialGrid::sample(std::vector<GridAxis> axes, PotentialKind kind, const Potential& f,
                                    const std::optional<Polyhedron>& domain, bool interior_only) {
  PotentialGrid g(std::move(axes), kind);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Eigen::VectorXd x = g.point(k);
    if (domain && !(interior_only ? domain->contains_interior(x) : domain->contains(x, 0.0))) continue;
    g.values_[k] = f(x);
  }
  return g;
}

std::vector<std::size_t> PotentialGrid::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = flat / strides_[i];
    flat %= strides_[i];
  }
  return idx;
}

std::size_t PotentialGrid::flatten(const std::vector<std::size_t>& idx) const {
  std::size_t flat = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) flat += idx[i] * strides_[i];
  return flat;
}

Eigen::VectorXd PotentialGrid::point(std::size_t flat) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(axes_.size()));
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = axes_[i].at(flat / strides_[i]);
    flat %= strides_[i];
  }
  return x;
}

namespace {

// Sum over the 2^n corners of the cell containing x of weight * field(corner).
template <typename T, typename Field>
std::optional<T> multilinear(const PotentialGrid& g, const Eigen::VectorXd& x, Field&& field, T zero) {
  const std::size_t n = g.dim();
  std::vector<std::size_t> base(n);
  std::vector<double> frac(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ax = g.axes()[i];
    const double xi = x[static_cast<Eigen::Index>(i)];
    if (ax.count == 1) {
      if (xi != ax.min) return std::nullopt;
      base[i] = 0;
      frac[i] = 0.0;
      continue;
    }
    const double h = ax.step();
    const double s = (xi - ax.min) / h;
    if (s < -1e-12 || s > static_cast<double>(ax.count - 1) + 1e-12) return std::nullopt;
    const auto c = static_cast<std::size_t>(std::clamp(std::floor(s), 0.0, static_cast<double>(ax.count - 2)));
    base[i] = c;
    frac[i] = std::clamp(s - static_cast<double>(c), 0.0, 1.0);
  }
  T acc = zero;
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool up = (corner >> i) & 1u;
      const double wi = up ? frac[i] : 1.0 - frac[i];
      if (wi == 0.0) {
        w = 0.0;
        break;
      }
      w *= wi;
      flat += (base[i] + (up ? 1 : 0)) * g.stride(i);
    }
    if (w == 0.0) continue;
    auto v = field(flat);
    if (!v) return std::nullopt;
    acc += w * *v;
  }
  return acc;
}

}  // namespace

double PotentialGrid::interpolate(const Eigen::VectorXd& x) const {
  auto r = multilinear<double>(
      *this, x,
      [&](std::size_t flat) -> std::optional<double> {
        if (!present(flat)) return std::nullopt;
        return values_[flat];
      },
      0.0);
  return r ? *r : std::numeric_limits<double>::quiet_NaN();
}

double PotentialGrid::convexity_defect() const {
  const std::size_t n = dim();
  double defect = 0.0;
  auto probe = [&](std::size_t k, const std::vector<int>& dir, double len2) {
    auto idx = unflatten(k);
    std::size_t plus = 0, minus = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long ip = static_cast<long>(idx[i]) + dir[i];
      const long im = static_cast<long>(idx[i]) - dir[i];
      if (ip < 0 || im < 0 || ip >= static_cast<long>(axes_[i].count) || im >= static_cast<long>(axes_[i].count)) return;
      plus += static_cast<std::size_t>(ip) * strides_[i];
      minus += static_cast<std::size_t>(im) * strides_[i];
    }
    if (!present(plus) || !present(minus)) return;
    const double d2 = (values_[plus] - 2.0 * values_[k] + values_[minus]) / len2;
    defect = std::max(defect, -d2);
  };
  for (std::size_t k = 0; k < size(); ++k) {
    if (!present(k)) continue;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> dir(n, 0);
      dir[i] = 1;
      const double hi = axes_[i].step();
      probe(k, dir, hi * hi);
      for (std::size_t j = i + 1; j < n; ++j) {
        const double hj = axes_[j].step();
        dir[j] = 1;
        probe(k, dir, hi * hi + hj * hj);
        dir[j] = -1;
        probe(k, dir, hi * hi + hj * hj);
        dir[j] = 0;
      }
    }
  }
  return defect;
}

void PotentialGrid::check_convex(double tol) const {
  const double d = convexity_defect();
  if (d > tol) throw Error(ErrorCode::NotConvex, "second differences reach -" + std::to_string(d));
}

std::vector<GridAxis> uniform_axes(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, std::size_t count) {
  std::vector<GridAxis> axes;
  for (Eigen::Index i = 0; i < lo.size(); ++i) axes.push_back({lo[i], hi[i], count});
  return axes;
}

// ---------------------------------------------------------------- file format

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "NaN" || s == "NAN") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number '" + s + "' in grid file");
  }
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void write_grid(std::ostream& out, const PotentialGrid& g, GridEncoding enc) {
  out << "toric-grid 1\n";
  out << "dim " << g.dim() << "\n";
  for (const auto& ax : g.axes()) out << "axis " << format_double(ax.min) << " " << format_double(ax.max) << " " << ax.count << "\n";
  out << "kind " << to_string(g.kind()) << "\n";
  out << "encoding " << (enc == GridEncoding::Csv ? "csv" : "binary") << "\n";
  out << "values\n";
  if (enc == GridEncoding::Csv) {
    for (double v : g.values()) out << format_double(v) << "\n";
  } else {
    for (double v : g.values()) {
      const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.write(buf, 8);
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing grid");
}

PotentialGrid read_grid(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') return std::istringstream(line);
    }
    throw Error(ErrorCode::ParseError, "truncated grid header");
  };
  std::string key;
  int version = 0;
  {
    auto ls = next_line();
    if (!(ls >> key >> version) || key != "toric-grid" || version != 1)
      throw Error(ErrorCode::ParseError, "not a toric-grid v1 file");
  }
  std::size_t dim = 0;
  {
    auto ls = next_line();
    if (!(ls >> key >> dim) || key != "dim" || dim == 0) throw Error(ErrorCode::ParseError, "expected 'dim n'");
  }
  std::vector<GridAxis> axes;
  for (std::size_t i = 0; i < dim; ++i) {
    auto ls = next_line();
    std::string lo, hi;
    GridAxis ax;
    if (!(ls >> key >> lo >> hi >> ax.count) || key != "axis" || ax.count == 0)
      throw Error(ErrorCode::ParseError, "expected 'axis min max count'");
    ax.min = parse_double(lo);
    ax.max = parse_double(hi);
    if (!(ax.max >= ax.min)) throw Error(ErrorCode::ParseError, "axis max below min");
    axes.push_back(ax);
  }
  PotentialKind kind;
  {
    auto ls = next_line();
    std::string k;
    if (!(ls >> key >> k) || key != "kind") throw Error(ErrorCode::ParseError, "expected 'kind'");
    if (k == "kahler")
      kind = PotentialKind::Kahler;
    else if (k == "symplectic")
      kind = PotentialKind::Symplectic;
    else
      throw Error(ErrorCode::ParseError, "unknown kind '" + k + "'");
  }
  GridEncoding enc;
  {
    auto ls = next_line();
    std::string e;
    if (!(ls >> key >> e) || key != "encoding") throw Error(ErrorCode::ParseError, "expected 'encoding'");
    if (e == "csv")
      enc = GridEncoding::Csv;
    else if (e == "binary")
      enc = GridEncoding::Binary;
    else
      throw Error(ErrorCode::ParseError, "unknown encoding '" + e + "'");
  }
  {
    auto ls = next_line();
    if (!(ls >> key) || key != "values") throw Error(ErrorCode::ParseError, "expected 'values'");
  }
  PotentialGrid g(std::move(axes), kind);
  if (enc == GridEncoding::Binary) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      char buf[8];
      if (!in.read(buf, 8)) throw Error(ErrorCode::ParseError, "binary payload too short");
      std::uint64_t bits;
      std::memcpy(&bits, buf, 8);
      g[k] = std::bit_cast<double>(to_little(bits));
    }
  } else {
    std::size_t k = 0;
    std::string tok;
    while (k < g.size() && std::getline(in, line)) {
      for (char& c : line)
        if (c == ',' || c == ';' || c == '\r' || c == '\t') c = ' ';
      std::istringstream ls(line);
      while (ls >> tok) {
        if (k >= g.size()) throw Error(ErrorCode::ParseError, "too many values in grid file");
        g[k++] = parse_double(tok);
      }
    }
    if (k != g.size()) throw Error(ErrorCode::ParseError, "expected " + std::to_string(g.size()) + " values");
  }
  return g;
}

void write_grid_file(const std::string& path, const PotentialGrid& g, GridEncoding enc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  write_grid(out, g, enc);
}

PotentialGrid read_grid_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_grid(in);
}

// ---------------------------------------------------------------- grid potential

Potential grid_potential(const PotentialGrid& g) {
  struct Derivs {
    PotentialGrid grid;
    std::vector<Eigen::VectorXd> grad;
    std::vector<Eigen::MatrixXd> hess;
    std::vector<bool> ok;
  };
  auto d = std::make_shared<Derivs>();
  d->grid = g;
  const std::size_t n = g.dim();
  const auto ni = static_cast<Eigen::Index>(n);
  d->grad.assign(g.size(), Eigen::VectorXd::Zero(ni));
  d->hess.assign(g.size(), Eigen::MatrixXd::Zero(ni, ni));
  d->ok.assign(g.size(), false);
  auto at = [&](std::size_t k, std::size_t i, int s) -> std::optional<std::size_t> {
    const auto idx = g.unflatten(k);
    const long j = static_cast<long>(idx[i]) + s;
    if (j < 0 || j >= static_cast<long>(g.axes()[i].count)) return std::nullopt;
    const std::size_t f = static_cast<std::size_t>(static_cast<long>(k) + s * static_cast<long>(g.stride(i)));
    if (!g.present(f)) return std::nullopt;
    return f;
  };
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.present(k)) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      const double hi = g.axes()[i].step();
      auto p = at(k, i, 1), m = at(k, i, -1);
      if (!p || !m) {
        ok = false;
        break;
      }
      const auto ii = static_cast<Eigen::Index>(i);
      d->grad[k][ii] = (g[*p] - g[*m]) / (2 * hi);
      d->hess[k](ii, ii) = (g[*p] - 2 * g[k] + g[*m]) / (hi * hi);
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        const double hj = g.axes()[j].step();
        auto pj = at(k, j, 1), mj = at(k, j, -1);
        if (!pj || !mj) {
          ok = false;
          break;
        }
        auto pp = at(*p, j, 1), pm = at(*p, j, -1), mp = at(*m, j, 1), mm = at(*m, j, -1);
        if (!pp || !pm || !mp || !mm) {
          ok = false;
          break;
        }
        const double v = (g[*pp] - g[*pm] - g[*mp] + g[*mm]) / (4 * hi * hj);
        const auto jj = static_cast<Eigen::Index>(j);
        d->hess[k](ii, jj) = v;
        d->hess[k](jj, ii) = v;
      }
    }
    d->ok[k] = ok;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto value = [d](const Eigen::VectorXd& x) { return d->grid.interpolate(x); };
  auto grad = [d, ni, nan](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    auto r = multilinear<Eigen::VectorXd>(
        d->grid, x,
        [&](std::size_t f) -> std::optional<Eigen::VectorXd> {
          if (!d->ok[f]) return std::nullopt;
          return d->grad[f];
        },
        Eigen::VectorXd::Zero(ni));
    return r ? *r : Eigen::VectorXd::Constant(ni, nan);
  };
  auto hess = [d, ni, nan](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    auto r = multilinear<Eigen::MatrixXd>(
        d->grid, x,
        [&](std::size_t f) -> std::optional<Eigen::MatrixXd> {
          if (!d->ok[f]) return std::nullopt;
          return d->hess[f];
        },
        Eigen::MatrixXd::Zero(ni, ni));
    return r ? *r : Eigen::MatrixXd::Constant(ni, ni, nan);
  };
  return Potential(n, value, grad, hess);
}

namespace {

// First and second derivative along one axis: centered where both neighbours
// exist, second-order one-sided otherwise.
std::optional<double> diff1(const PotentialGrid& g, const std::vector<double>& f, std::size_t k, std::size_t i) {
  const auto idx = g.unflatten(k);
  const long c = static_cast<long>(idx[i]), n = static_cast<long>(g.axes()[i].count);
  const long st = static_cast<long>(g.stride(i));
  auto val = [&](long off) -> std::optional<double> {
    if (c + off < 0 || c + off >= n) return std::nullopt;
    const double v = f[static_cast<std::size_t>(static_cast<long>(k) + off * st)];
    if (std::isnan(v)) return std::nullopt;
    return v;
  };
  const double h = g.axes()[i].step();
  if (auto p = val(1), m = val(-1); p && m) return (*p - *m) / (2 * h);
  for (long s : {1L, -1L})
    if (auto a = val(s), b = val(2 * s); a && b) return s * (-3 * f[k] + 4 * *a - *b) / (2 * h);
  return std::nullopt;
}

std::optional<double> diff2(const PotentialGrid& g, const std::vector<double>& f, std::size_t k, std::size_t i) {
  const auto idx = g.unflatten(k);
  const long c = static_cast<long>(idx[i]), n = static_cast<long>(g.axes()[i].count);
  const long st = static_cast<long>(g.stride(i));
  auto val = [&](long off) -> std::optional<double> {
    if (c + off < 0 || c + off >= n) return std::nullopt;
    const double v = f[static_cast<std::size_t>(static_cast<long>(k) + off * st)];
    if (std::isnan(v)) return std::nullopt;
    return v;
  };
  const double h = g.axes()[i].step();
  if (auto p = val(1), m = val(-1); p && m) return (*p - 2 * f[k] + *m) / (h * h);
  for (long s : {1L, -1L})
    if (auto a = val(s), b = val(2 * s), d = val(3 * s); a && b && d) return (2 * f[k] - 5 * *a + 4 * *b - *d) / (h * h);
  return std::nullopt;
}

}  // namespace

Potential grid_potential(const PotentialGrid& g, const Polyhedron& singular_reference) {
  const std::size_t n = g.dim();
  const auto ni = static_cast<Eigen::Index>(n);
  const Potential ref = facet_log_potential(singular_reference);
  struct Fields {
    PotentialGrid v;
    std::vector<std::vector<double>> grad;  // per axis
    std::vector<std::vector<double>> hess;  // row-major n x n
  };
  auto d = std::make_shared<Fields>();
  d->v = PotentialGrid(g.axes(), g.kind());
  for (std::size_t k = 0; k < g.size(); ++k) d->v[k] = g.present(k) ? g[k] - ref(g.point(k)) : g[k];
  // Nodes of P where the samples are missing (0 log 0 written as NaN, say)
  // get v by quadratic extrapolation along the first axis that allows it.
  // Repeated passes reach corners, whose axis neighbours are missing too.
  for (std::size_t pass = 0; pass < n; ++pass) {
    const std::vector<double> prev = d->v.values();
    bool changed = false;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!std::isnan(prev[k]) || !singular_reference.contains(g.point(k), 1e-12)) continue;
      const auto idx = g.unflatten(k);
      for (std::size_t i = 0; i < n && std::isnan(d->v[k]); ++i) {
        const long c = static_cast<long>(idx[i]), cnt = static_cast<long>(g.axes()[i].count);
        const long st = static_cast<long>(g.stride(i));
        for (long s : {1L, -1L}) {
          if (c + 3 * s < 0 || c + 3 * s >= cnt) continue;
          const auto vat = [&](long off) { return prev[static_cast<std::size_t>(static_cast<long>(k) + off * s * st)]; };
          if (std::isnan(vat(1)) || std::isnan(vat(2)) || std::isnan(vat(3))) continue;
          d->v[k] = 3 * vat(1) - 3 * vat(2) + vat(3);
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double>& vals = d->v.values();
  d->grad.assign(n, std::vector<double>(g.size(), nan));
  d->hess.assign(n * n, std::vector<double>(g.size(), nan));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isnan(vals[k])) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (auto v1 = diff1(d->v, vals, k, i)) d->grad[i][k] = *v1;
      if (auto v2 = diff2(d->v, vals, k, i)) d->hess[i * n + i][k] = *v2;
    }
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isnan(vals[k])) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        auto a = diff1(d->v, d->grad[i], k, j), b = diff1(d->v, d->grad[j], k, i);
        if (a && b) d->hess[i * n + j][k] = d->hess[j * n + i][k] = 0.5 * (*a + *b);
      }
  }
  auto field = [d](const std::vector<double>& f, const Eigen::VectorXd& x) {
    auto r = multilinear<double>(
        d->v, x,
        [&](std::size_t flat) -> std::optional<double> {
          if (std::isnan(f[flat])) return std::nullopt;
          return f[flat];
        },
        0.0);
    return r ? *r : std::numeric_limits<double>::quiet_NaN();
  };
  auto value = [d, ref](const Eigen::VectorXd& x) { return ref(x) + d->v.interpolate(x); };
  auto grad = [d, ref, field, ni](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out = ref.gradient(x);
    for (Eigen::Index i = 0; i < ni; ++i) out[i] += field(d->grad[static_cast<std::size_t>(i)], x);
    return out;
  };
  auto hess = [d, ref, field, ni](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd out = ref.hessian(x);
    for (Eigen::Index i = 0; i < ni; ++i)
      for (Eigen::Index j = 0; j < ni; ++j)
        out(i, j) += field(d->hess[static_cast<std::size_t>(i * ni + j)], x);
    return out;
  };
  return Potential(n, value, grad, hess);
}

}  // namespace toric
