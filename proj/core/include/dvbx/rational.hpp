#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace dvbx {

/// Exact rational coefficient field. GMP keeps every identity check free of
/// overflow; all arithmetic results are canonical (reduced, positive denominator).
using Rational = mpq_class;

/// mpq_class(n, d) does not reduce on construction; always build through here.
inline Rational make_rational(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }
inline bool is_one(const Rational& r) { return r == 1; }

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace dvbx
