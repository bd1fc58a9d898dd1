#pragma once
// Error-free transformations and a minimal double-double type.
//
// Radii up to ~800 put x^4 near 4e11, and the counting/remainder kernels need
// the exact integer floor and the fractional part of sqrt(x^4 - m^2).  A lone
// double carries ~1e-5 absolute error at that magnitude, enough to flip a
// floor at a representable radius and shift N_1(x) by r_2(m).  Two doubles
// (~32 significant digits) remove the ambiguity everywhere we care about.
//
// Requires round-to-nearest IEEE doubles; do not compile with -ffast-math.

#include <cmath>
#include <cstdint>

namespace cklat {

struct dd {
    double hi = 0.0;
    double lo = 0.0;
};

inline dd two_sum(double a, double b) {
    double s  = a + b;
    double bb = s - a;
    double e  = (a - (s - bb)) + (b - bb);
    return {s, e};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return {p, e};
}

inline dd dd_renorm(double hi, double lo) { return two_sum(hi, lo); }

inline dd dd_add(dd a, dd b) {
    dd s = two_sum(a.hi, b.hi);
    return dd_renorm(s.hi, s.lo + a.lo + b.lo);
}

inline dd dd_add(dd a, double b) {
    dd s = two_sum(a.hi, b);
    return dd_renorm(s.hi, s.lo + a.lo);
}

inline dd dd_sub(dd a, double b) { return dd_add(a, -b); }
inline dd dd_sub(dd a, dd b) { return dd_add(a, dd{-b.hi, -b.lo}); }

inline dd dd_mul(dd a, double b) {
    dd p = two_prod(a.hi, b);
    return dd_renorm(p.hi, p.lo + a.lo * b);
}

inline dd dd_mul(dd a, dd b) {
    dd p = two_prod(a.hi, b.hi);
    return dd_renorm(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

// Exact square of a double.
inline dd dd_sqr(double x) { return two_prod(x, x); }

inline dd dd_sqr(dd a) {
    dd p = two_prod(a.hi, a.hi);
    return dd_renorm(p.hi, p.lo + 2.0 * a.hi * a.lo + a.lo * a.lo);
}

inline double to_double(dd a) { return a.hi + a.lo; }

// sqrt(m) as hi + lo for an exact integer m (one Newton correction;
// the fma captures the exact remainder m - s*s).
inline dd dd_sqrt_u64(std::uint64_t m) {
    double s = std::sqrt(static_cast<double>(m));
    if (s == 0.0) return {0.0, 0.0};
    double err = std::fma(-s, s, static_cast<double>(m));
    return {s, err / (2.0 * s)};
}

// Floor of a non-negative dd value < 2^62.
inline std::uint64_t dd_floor_u64(dd a) {
    double fh = std::floor(a.hi);
    double fr = (a.hi - fh) + a.lo;   // a.hi - fh is exact below 2^53
    auto f = static_cast<std::uint64_t>(fh);
    if (fr >= 1.0) {
        f += 1;
    } else if (fr < 0.0) {
        f -= 1;
    }
    return f;
}

// Sign of (a - s) with s an integer below 2^53 (exact comparison).
inline int dd_cmp_u64(dd a, std::uint64_t s) {
    dd d = two_sum(a.hi, -static_cast<double>(s));
    double v = d.hi + (d.lo + a.lo);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

// Largest f with f*f <= a, for non-negative dd a (f below 2^26 in practice).
inline std::uint64_t dd_floor_sqrt(dd a) {
    double r = std::sqrt(std::fmax(to_double(a), 0.0));
    auto f = static_cast<std::uint64_t>(r);
    while (f > 0 && dd_cmp_u64(a, f * f) < 0) --f;
    while (dd_cmp_u64(a, (f + 1) * (f + 1)) >= 0) ++f;
    return f;
}

// Compensated (Kahan) accumulator.
struct kahan {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum() const { return s; }
};

}  // namespace cklat
