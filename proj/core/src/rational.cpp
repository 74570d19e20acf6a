#include "toric/rational.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "toric/error.hpp"

namespace toric {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ZeroNormal: return "ZeroNormal";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::NotPointed: return "NotPointed";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::NotDelzant: return "NotDelzant";
    case ErrorCode::InvalidFan: return "InvalidFan";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NoTailBound: return "NoTailBound";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::NonIntegrablePotential: return "NonIntegrablePotential";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::ZeroNotInterior: return "ZeroNotInterior";
    case ErrorCode::HessianNotSPD: return "HessianNotSPD";
    case ErrorCode::InsufficientMeshResolution: return "InsufficientMeshResolution";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::PathLeavesCone: return "PathLeavesCone";
    case ErrorCode::ConvexityLost: return "ConvexityLost";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty integer in '" + std::string(whole) + "'");
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) throw Error(ErrorCode::ParseError, "dangling sign in '" + std::string(whole) + "'");
  Integer value = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error(ErrorCode::ParseError, "not a rational: '" + std::string(whole) + "'");
    value = value * 10 + (c - '0');
  }
  return negative ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(trim(s.substr(0, slash)), s);
    Integer den = parse_integer(trim(s.substr(slash + 1)), s);
    if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(s) + "'");
    return Rational(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string digits(s.substr(0, dot));
    std::string frac(s.substr(dot + 1));
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    Integer whole = parse_integer(digits, s);
    if (frac.empty()) return Rational(whole);
    Integer f = parse_integer(frac, s);
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
    const bool negative = !digits.empty() && digits.front() == '-';
    Rational r = Rational(whole) + Rational(negative ? Integer(-f) : f, scale);
    return r;
  }
  return Rational(parse_integer(s, s));
}

std::string to_string(const Rational& value) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::int64_t gcd(const IntVec& v) {
  std::int64_t g = 0;
  for (auto x : v) g = std::gcd(g, x < 0 ? -x : x);
  return g;
}

bool is_zero(const IntVec& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

bool is_primitive(const IntVec& v) { return gcd(v) == 1; }

IntVec primitive(const IntVec& v) {
  const std::int64_t g = gcd(v);
  if (g == 0) return v;
  IntVec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [g](std::int64_t x) { return x / g; });
  return out;
}

IntVec primitive(const RatVec& v) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Integer l = 1;
  for (const auto& x : v) l = boost::multiprecision::lcm(l, Integer(denominator(x)));
  std::vector<Integer> scaled;
  scaled.reserve(v.size());
  Integer g = 0;
  for (const auto& x : v) {
    Integer s = numerator(x) * (l / denominator(x));
    scaled.push_back(s);
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(s));
  }
  IntVec out(v.size(), 0);
  if (g == 0) return out;
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<std::int64_t>(scaled[i] / g);
  return out;
}

RatVec to_rational(const IntVec& v) { return RatVec(v.begin(), v.end()); }

Eigen::VectorXd to_eigen(const IntVec& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(v[i]);
  return out;
}

Eigen::VectorXd to_eigen(const RatVec& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(v[i]);
  return out;
}

Rational dot(const IntVec& a, const RatVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) s += b[i] * a[i];
  return s;
}

Rational dot(const RatVec& a, const RatVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::int64_t dot(const IntVec& a, const IntVec& b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace exact {

namespace {

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(RatMatrix& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < m.size(); ++col) {
    std::size_t p = row;
    while (p < m.size() && m[p][col] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[row]);
    const Rational inv = 1 / m[row][col];
    for (auto& x : m[row]) x *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = col; c < m[r].size(); ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(RatMatrix rows, std::size_t cols) { return static_cast<int>(rref(rows, cols).size()); }

std::vector<RatVec> nullspace(RatMatrix rows, std::size_t cols) {
  const auto pivots = rref(rows, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RatVec> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    RatVec v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RatVec> solve(RatMatrix a, RatVec b) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) a[i].push_back(b[i]);
  const auto pivots = rref(a, n);
  if (pivots.size() != n) return std::nullopt;
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

Rational determinant(RatMatrix a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && a[p][col] == 0) ++p;
    if (p == n) return 0;
    if (p != col) {
      std::swap(a[p], a[col]);
      det = -det;
    }
    det *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      if (a[r][col] == 0) continue;
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  return det;
}

std::optional<RatMatrix> inverse(RatMatrix a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    a[i].resize(2 * n, Rational(0));
    a[i][n + i] = 1;
  }
  if (rref(a, n).size() != n) return std::nullopt;
  RatMatrix inv(n, RatVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
  return inv;
}

}  // namespace exact

}  // namespace toric
