#pragma once
// Limit objects of the error-term distribution.
//
// For square-free m, the period-1 profile
//
//   phi_{1,m}(t) = -(sqrt(2)/pi) (mu^2(m)/m) sum_k r2(m k^2)/k^2 cos(2 pi k t)
//
// has characteristic factor Phi_{1,m}(sigma) = int_0^1 exp(2 pi i sigma
// phi_{1,m}(t)) dt, and the limiting density of the normalized error term is
// the Fourier transform of Phi_1 = prod_m Phi_{1,m}:
//
//   P_1(alpha) = int Phi_1(sigma) exp(-2 pi i alpha sigma) dsigma.
//
// Profiles vanish identically unless m is square-free with r2(m) > 0 (any
// prime factor p = 3 mod 4 of a square-free m forces odd p-exponent in every
// m k^2).  Factors beyond a cutoff M are replaced by the second-order
// exponent exp(-(2 pi sigma)^2/2 * sum_{m > M} int phi^2), whose L2 tail has
// the closed form (1/pi^2) sum over n with square-free core > M of r2(n)^2/n^2.
//
// Quadrature note: factor integrals use the periodic trapezoid rule with the
// cosine series truncated strictly below the Nyquist frequency of the sample
// grid.  With K < Q/2 the first-order aliasing term -- a pure-imaginary
// O(sigma * c_Q) bias that would shift the density's mean -- vanishes, and
// the remaining alias is second order in the coefficient tail.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "arith.hpp"

namespace cklat {

// A requested tolerance could not be met within the available k-range /
// quadrature budget; `achieved` carries the bound that was reached.
struct resolution_error : std::runtime_error {
    double achieved;
    resolution_error(const std::string& msg, double achieved_)
        : std::runtime_error(msg), achieved(achieved_) {}
};

struct PhiSeriesSpec {
    u64 m = 0;
    u64 k_cutoff = 0;
    double tail_bound = 0.0;  // Eq.-shaped bound on the neglected k-tail of phi
};

struct CharProfile {
    std::vector<double> sigma;                 // ascending, sigma >= 0
    std::vector<std::complex<double>> values;  // Phi_1 on the grid
    u64 m_cutoff = 0;
    double tail_l2 = 0.0;                      // sum_{m > m_cutoff} int phi^2
    u32 quad_points = 0;                       // largest quadrature resolution used
};

struct DecayEnvelope {
    double c_r2 = 0.0;  // fitted constant in r2(m) <= m^{c/log log m}
    double C1 = 0.0;    // rho = pi/(5 C1)
    double rho = 0.0;   // fitted super-exponential rate; diagnostic only
};

struct DensityGrid {
    std::vector<double> alpha;  // uniform on [-A, A]
    std::vector<double> p;
    std::vector<double> cdf;
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double alpha_extent = 0.0;
    double sigma_max = 0.0;
    u64 m_cutoff = 0;
    double tail_l2 = 0.0;
    u32 quad_points = 0;
};

// k-cutoff implied by tol via the fitted tail shape
// C * (sqrt2/(pi m)) r2(m) K^-1 (log 2K)^3; C calibrated on long direct sums.
PhiSeriesSpec phi_spec(u64 m, double tol, const ArithTables& t);

// phi_{1,m}(t) to within tol (throws resolution_error when unreachable).
double phi(u64 m, double t, double tol, const ArithTables& tables);

// int_0^1 phi_{1,m}^2 = pi^-2 (mu^2(m)/m^2) sum_k r2(mk^2)^2 / k^4.
double phi_l2(u64 m, const ArithTables& t);

// sum_{m > m_cutoff} int phi_{1,m}^2  (in-table part exact via the
// n = core * k^2 bijection, plus an integral-comparison remainder).
double phi_l2_tail(u64 m_cutoff, const ArithTables& t);

// Truncated-series evaluator with cached coefficients (shared by the factor
// quadratures and the Parseval-style tests).
class PhiEvaluator {
public:
    PhiEvaluator(u64 m, u64 k_cutoff, const ArithTables& t);
    double operator()(double t) const;
    u64 k_cutoff() const { return coeff_.size(); }
    double truncation_l2() const;  // L2 mass beyond the cutoff (table-accurate)
    u64 m() const { return m_; }

private:
    u64 m_ = 0;
    std::vector<double> coeff_;  // -(sqrt2/pi)(1/m) r2(mk^2)/k^2, k = 1..K
    friend class FactorEvaluator;
};

std::complex<double> char_factor(u64 m, double sigma, u32 quad_points,
                                 const ArithTables& t);

u64 char_product_required_cutoff(double sigma);
std::complex<double> char_product(double sigma, u64 m_cutoff, const ArithTables& t);

CharProfile char_profile_grid(double sigma_max, double d_sigma, u64 m_cutoff,
                              const ArithTables& t, bool parallel = true);

DensityGrid density(double alpha_extent, u64 n_alpha, double sigma_max,
                    double d_sigma, const ArithTables& t);

// j-th moment of the gridded density by trapezoid.
double density_moment(const DensityGrid& grid, int j);

DecayEnvelope decay_diagnostic(const DensityGrid& grid,
                               const ArithTables* tables = nullptr);

// fitted constant in Wigert's bound r2(m) <= m^{c / log log m}
double wigert_constant(const ArithTables& t);

}  // namespace cklat
