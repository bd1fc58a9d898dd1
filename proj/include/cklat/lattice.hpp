#pragma once
// Exact lattice counting for 3-dimensional Cygan-Koranyi balls.
//
// Writing r2(m) for the number of ways to write m as an ordered signed sum
// of two squares, the count of integer points of Cygan-Koranyi norm <= x is
//
//   N_1(x) = sum_{0 <= m <= x^2} r2(m) * (2*floor(sqrt(x^4 - m^2)) + 1),
//
// and splitting each floor into the smooth part and the sawtooth psi gives
//
//   N_1(x) = 2*sum_{n>=0} S_n(x^2) - 2*T(x^2)        (exact identity)
//
// with S_n(Y) = ((-1)^n/n!) f^(n)(2Y) sum_m r2(m) (Y-m)^{n+1/2}, f = sqrt,
// T(Y) = sum_m r2(m) psi(sqrt(Y^2 - m^2)), and S_n(Y) ~ c_n Y^2 where the
// c_n are explicit constants with 2*sum c_n = vol(B) = pi^2/2.
//
// The normalized error term studied downstream is
// E^(x) = (N_1(x) - vol(B) x^4) / x^2.

#include <optional>
#include <vector>

#include "arith.hpp"
#include "dd.hpp"

namespace cklat {

struct ErrorSample {
    double x = 0.0;
    u64 n1 = 0;
    double e_hat = 0.0;  // (N_1(x) - vol(B) x^4) / x^2
    double t_rem = 0.0;  // T(x^2)
    std::optional<double> voronoi_residual;
};

struct TaylorCoeffs {
    std::vector<double> c;  // c_0 .. c_{n_terms-1}
};

// Euclidean volume of the unit ball, pi^2/2.
double vol_ball();

// Two independent routes to the same constant (cross-checks for vol_ball):
// twice the sum of the first n_terms Taylor constants, and a composite
// midpoint rule on 2*pi*int_0^1 2r sqrt(1 - r^4) dr.
double vol_ball_taylor(int n_terms);
double vol_ball_quadrature(u64 panels);

TaylorCoeffs taylor_coeffs(int n_terms);

u64 count_exact(double x, const ArithTables& t);

// Triple-loop enumeration oracle; rejects x > 30 (cost grows like x^4).
u64 count_bruteforce(double x);

double t_remainder(double Y, const ArithTables& t);

double s_n_sum(int n, double Y, const ArithTables& t);

// N_1(x) - 2*sum_{n < n_terms} S_n(x^2) + 2*T(x^2); tends to 0 geometrically.
double decomposition_residual(double x, int n_terms, const ArithTables& t);

ErrorSample error_term(double x, const ArithTables& t);

}  // namespace cklat
