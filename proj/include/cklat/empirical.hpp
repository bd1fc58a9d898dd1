#pragma once
// Windowed statistics of the true normalized error term over [X, 2X].
//
// The window functional (1/X) int_X^2X F(E^(x)) dx is estimated by Monte
// Carlo rather than grid quadrature: E^ is a step-minus-smooth function whose
// total variation over the window grows like X^2, so deterministic quadrature
// error scales like step * X^2 while n^{-1/2} sampling error is free of that
// factor.  Samples are pure functions of (seed, index); reductions are
// deterministic ordered folds, so results do not depend on the thread count.

#include <utility>
#include <vector>

#include "arith.hpp"
#include "lattice.hpp"
#include "profile.hpp"

namespace cklat {

enum class Estimator { uniform, stratified };

struct ScanConfig {
    double X = 0.0;
    u64 n_samples = 0;
    u64 seed = 0;
    Estimator estimator = Estimator::uniform;
};

struct SampleRow {
    double x = 0.0;
    u64 n1 = 0;
    double e_hat = 0.0;
    double t_rem = 0.0;
};

double sample_radius(const ScanConfig& cfg, u64 index);

std::vector<SampleRow> scan_window(const ScanConfig& cfg, const ArithTables& t);
std::vector<SampleRow> scan_window_serial(const ScanConfig& cfg, const ArithTables& t);

// (estimate, standard error) of (1/X) int E^(x)^j dx from the rows.
std::pair<double, double> empirical_moment(int j, const std::vector<SampleRow>& rows);
std::pair<double, double> empirical_moment(int j, const ScanConfig& cfg,
                                           const ArithTables& t);

// Sorted sample values; evaluable as a staircase CDF by binary search.
std::vector<double> empirical_cdf(const std::vector<SampleRow>& rows);
double ecdf_eval(const std::vector<double>& sorted_samples, double alpha);

// sup-norm gap between the empirical staircase and the limit CDF on the grid.
// Samples escaping the grid extent raise a domain error (the limit density
// decays fast enough that extent 12 holds every reachable sample).
double ks_distance(const std::vector<double>& sorted_samples, const DensityGrid& grid);

// Mean of (x^{-2} T(x^2))^2 over the window sample.
double remainder_ms(const std::vector<SampleRow>& rows);

}  // namespace cklat
