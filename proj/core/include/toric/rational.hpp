#pragma once

// Exact arithmetic used by every combinatorial routine: rationals, integer
// lattice vectors, and a handful of exact linear-algebra kernels.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <Eigen/Core>

namespace toric {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using IntVec = std::vector<std::int64_t>;
using RatVec = std::vector<Rational>;
// Row-major dense rational matrix.
using RatMatrix = std::vector<RatVec>;

/// Parses "p", "-p", "p/q" or a finite decimal such as "0.25" exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& value);
double to_double(const Rational& value);

std::int64_t gcd(const IntVec& v);
bool is_zero(const IntVec& v);
bool is_primitive(const IntVec& v);
IntVec primitive(const IntVec& v);
/// Smallest integer vector positively proportional to a nonzero rational vector.
IntVec primitive(const RatVec& v);

RatVec to_rational(const IntVec& v);
Eigen::VectorXd to_eigen(const IntVec& v);
Eigen::VectorXd to_eigen(const RatVec& v);

Rational dot(const IntVec& a, const RatVec& b);
Rational dot(const RatVec& a, const RatVec& b);
std::int64_t dot(const IntVec& a, const IntVec& b);

namespace exact {

int rank(RatMatrix rows, std::size_t cols);
/// Basis of {x : rows * x = 0}; empty when the kernel is trivial.
std::vector<RatVec> nullspace(RatMatrix rows, std::size_t cols);
/// Unique solution of a square system, or nullopt when singular.
std::optional<RatVec> solve(RatMatrix a, RatVec b);
Rational determinant(RatMatrix a);
/// Inverse of a square matrix, or nullopt when singular.
std::optional<RatMatrix> inverse(RatMatrix a);

}  // namespace exact

}  // namespace toric
