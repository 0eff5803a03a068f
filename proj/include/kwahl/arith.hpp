#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace kw {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline std::string str(const Int& v) { return v.str(); }

// "p/q", or "p" when the denominator is 1.
std::string str(const Rat& v);

Int gcd(Int a, Int b);
// Inverse of a modulo m; throws if gcd(a, m) != 1.
Int mod_inverse(const Int& a, const Int& m);
// Floor square root.
Int isqrt(const Int& v);

}  // namespace kw
