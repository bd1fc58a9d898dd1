#include "cklat/lattice.hpp"

#include <cmath>

#include "cklat/parallel.hpp"

namespace cklat {

namespace {

constexpr double PI = 3.14159265358979323846264338327950288;
// pi as a double-double (hi = nearest double, lo = residual)
constexpr double PI_LO = 1.2246467991473531772e-16;

// Shared inner loop over 0 <= m <= Y with the running floor
// f(m) = floor(sqrt(q - m^2)), q = Y^2 held as a double-double.
// f is non-increasing in m, so the total number of decrements is O(Y):
// no square roots are needed for the count, and the fractional part
// frac = sqrt(q - m^2) - f comes out of  num / (sqrt(f^2 + num) + f)
// with num = q - m^2 - f^2 computed exactly.
struct CountAndRemainder {
    u64 n1 = 0;
    double t_rem = 0.0;
};

CountAndRemainder count_kernel(u64 Y, dd q, const ArithTables& t, bool want_remainder) {
    CountAndRemainder out;
    u64 f = dd_floor_sqrt(q);
    kahan trem;
    for (u64 m = 0; m <= Y; ++m) {
        u64 m2 = m * m;
        while (f > 0 && dd_cmp_u64(q, f * f + m2) < 0) --f;
        u32 r = t.r2[m];
        out.n1 += static_cast<u64>(r) * (2 * f + 1);
        if (want_remainder && r != 0) {
            dd num = dd_sub(q, static_cast<double>(f * f + m2));
            double numd = to_double(num);
            double s = std::sqrt(static_cast<double>(f * f) + numd);
            double frac = (s + static_cast<double>(f)) > 0.0
                              ? numd / (s + static_cast<double>(f))
                              : 0.0;
            trem.add(static_cast<double>(r) * (frac - 0.5));
        }
    }
    out.t_rem = trem.sum();
    return out;
}

dd x4_of(double x) { return dd_sqr(dd_sqr(x)); }

dd vol_ball_dd() {
    dd pi2 = dd_sqr(dd{PI, PI_LO});
    return dd_mul(pi2, 0.5);
}

}  // namespace

double vol_ball() { return to_double(vol_ball_dd()); }

TaylorCoeffs taylor_coeffs(int n_terms) {
    if (n_terms < 2) throw std::domain_error("taylor_coeffs: need n_terms >= 2");
    TaylorCoeffs tc;
    tc.c.resize(n_terms);
    tc.c[0] = std::pow(2.0, 1.5) * PI / 3.0;
    tc.c[1] = -PI / (5.0 * std::sqrt(2.0));
    double prod = 1.0;  // prod_{k=1}^{n-1} (1 - 1/(2k)), accumulated
    double pow2 = 2.0;  // 2^n
    for (int n = 2; n < n_terms; ++n) {
        prod *= 1.0 - 1.0 / (2.0 * (n - 1));
        pow2 *= 2.0;
        tc.c[n] = -PI * prod / (std::sqrt(2.0) * pow2 * n * (n + 1.5));
    }
    return tc;
}

double vol_ball_taylor(int n_terms) {
    TaylorCoeffs tc = taylor_coeffs(n_terms);
    kahan acc;
    for (double c : tc.c) acc.add(2.0 * c);
    return acc.sum();
}

double vol_ball_quadrature(u64 panels) {
    if (panels == 0) throw std::domain_error("vol_ball_quadrature: need panels >= 1");
    double h = 1.0 / static_cast<double>(panels);
    double s = chunked_sum(panels, 1u << 16, [&](std::size_t i) {
        double r = (static_cast<double>(i) + 0.5) * h;
        return 2.0 * r * std::sqrt(1.0 - r * r * r * r);
    });
    return 2.0 * PI * s * h;
}

u64 count_exact(double x, const ArithTables& t) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("count_exact: x must be positive");
    dd x2 = dd_sqr(x);
    u64 Y = dd_floor_u64(x2);
    if (t.limit < Y) throw std::domain_error("count_exact: sieve limit below floor(x^2)");
    return count_kernel(Y, x4_of(x), t, false).n1;
}

u64 count_bruteforce(double x) {
    if (!(x > 0.0)) throw std::domain_error("count_bruteforce: x must be positive");
    if (x > 30.0) throw std::domain_error("count_bruteforce: x > 30 rejected (cost guard)");
    dd q = x4_of(x);
    u64 total = 0;
    for (u64 u1 = 0; dd_cmp_u64(q, (u1 * u1) * (u1 * u1)) >= 0; ++u1) {
        u64 w1 = (u1 == 0) ? 1 : 2;
        for (u64 u2 = 0;; ++u2) {
            u64 a = u1 * u1 + u2 * u2;
            if (dd_cmp_u64(q, a * a) < 0) break;
            dd rest = dd_sub(q, static_cast<double>(a * a));
            u64 u3max = dd_floor_sqrt(rest);
            total += w1 * ((u2 == 0) ? 1 : 2) * (2 * u3max + 1);
        }
    }
    return total;
}

double t_remainder(double Y, const ArithTables& t) {
    if (!(Y > 0.0) || !std::isfinite(Y)) throw std::domain_error("t_remainder: Y must be positive");
    auto Yf = static_cast<u64>(std::floor(Y));
    if (t.limit < Yf) throw std::domain_error("t_remainder: sieve limit below floor(Y)");
    return count_kernel(Yf, dd_sqr(Y), t, true).t_rem;
}

double s_n_sum(int n, double Y, const ArithTables& t) {
    if (n < 0 || n > 200) throw std::domain_error("s_n_sum: need 0 <= n <= 200");
    if (!(Y > 0.0)) throw std::domain_error("s_n_sum: Y must be positive");
    auto Yf = static_cast<u64>(std::floor(Y));
    if (t.limit < Yf) throw std::domain_error("s_n_sum: sieve limit below floor(Y)");

    // g_n = ((-1)^n/n!) f^(n)(2Y) Y^{n+1/2} stays bounded; the term ratio
    // g_n/g_{n-1} = (n - 3/2)/(2n) makes S_n(Y) ~ c_n Y^2 with the right sign.
    double g = std::sqrt(2.0) * Y;
    for (int i = 1; i <= n; ++i) g *= (i - 1.5) / (2.0 * i);

    double np = n + 0.5;
    kahan acc;
    for (u64 m = 0; m <= Yf; ++m) {
        if (t.r2[m] == 0) continue;
        double ratio = static_cast<double>(m) / Y;
        if (ratio >= 1.0) continue;  // (Y - m)^{n+1/2} = 0 at m = Y
        acc.add(static_cast<double>(t.r2[m]) * std::exp(np * std::log1p(-ratio)));
    }
    return g * acc.sum();
}

double decomposition_residual(double x, int n_terms, const ArithTables& t) {
    if (n_terms < 1) throw std::domain_error("decomposition_residual: need n_terms >= 1");
    double Y = x * x;
    u64 n1 = count_exact(x, t);
    kahan s;
    for (int n = 0; n < n_terms; ++n) s.add(s_n_sum(n, Y, t));
    return static_cast<double>(n1) - 2.0 * s.sum() + 2.0 * t_remainder(Y, t);
}

ErrorSample error_term(double x, const ArithTables& t) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("error_term: x must be positive");
    dd x2 = dd_sqr(x);
    u64 Y = dd_floor_u64(x2);
    if (t.limit < Y) throw std::domain_error("error_term: sieve limit below floor(x^2)");

    dd q = x4_of(x);
    CountAndRemainder cr = count_kernel(Y, q, t, true);

    ErrorSample s;
    s.x = x;
    s.n1 = cr.n1;
    s.t_rem = cr.t_rem;
    dd err = dd_sub(dd{static_cast<double>(cr.n1), 0.0}, dd_mul(vol_ball_dd(), q));
    s.e_hat = to_double(err) / to_double(x2);
    return s;
}

}  // namespace cklat
