#include "cklat/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "cklat/parallel.hpp"
#include "cklat/rng.hpp"

namespace cklat {

double sample_radius(const ScanConfig& cfg, u64 index) {
    double u = uniform01(cfg.seed, index);
    if (cfg.estimator == Estimator::stratified) {
        // one draw per stratum: still unbiased, variance-reduced
        double stratum = (static_cast<double>(index) + u) / static_cast<double>(cfg.n_samples);
        return cfg.X * (1.0 + stratum);
    }
    return cfg.X * (1.0 + u);
}

namespace {
std::vector<SampleRow> scan_impl(const ScanConfig& cfg, const ArithTables& t, bool parallel) {
    if (!(cfg.X > 0.0)) throw std::domain_error("scan_window: X must be positive");
    if (cfg.n_samples == 0) throw std::domain_error("scan_window: need n_samples >= 1");
    u64 need = static_cast<u64>(std::ceil(4.0 * cfg.X * cfg.X));
    if (t.limit < need)
        throw std::domain_error("scan_window: sieve limit below 4 X^2");
    std::vector<SampleRow> rows(cfg.n_samples);
    auto work = [&](std::size_t i) {
        double x = sample_radius(cfg, i);
        ErrorSample s = error_term(x, t);
        rows[i] = SampleRow{x, s.n1, s.e_hat, s.t_rem};
    };
    if (parallel) {
        parallel_index(cfg.n_samples, work);
    } else {
        for (u64 i = 0; i < cfg.n_samples; ++i) work(i);
    }
    return rows;
}
}  // namespace

std::vector<SampleRow> scan_window(const ScanConfig& cfg, const ArithTables& t) {
    return scan_impl(cfg, t, true);
}

std::vector<SampleRow> scan_window_serial(const ScanConfig& cfg, const ArithTables& t) {
    return scan_impl(cfg, t, false);
}

std::pair<double, double> empirical_moment(int j, const std::vector<SampleRow>& rows) {
    if (j < 1 || j > 8) throw std::domain_error("empirical_moment: need 1 <= j <= 8");
    if (rows.empty()) throw std::domain_error("empirical_moment: no samples");
    auto n = static_cast<double>(rows.size());
    double mean = chunked_sum_serial(rows.size(), 4096, [&](std::size_t i) {
                      return std::pow(rows[i].e_hat, j);
                  }) / n;
    double var = chunked_sum_serial(rows.size(), 4096, [&](std::size_t i) {
                     double d = std::pow(rows[i].e_hat, j) - mean;
                     return d * d;
                 }) / n;
    return {mean, std::sqrt(var / n)};
}

std::pair<double, double> empirical_moment(int j, const ScanConfig& cfg,
                                           const ArithTables& t) {
    return empirical_moment(j, scan_window(cfg, t));
}

std::vector<double> empirical_cdf(const std::vector<SampleRow>& rows) {
    std::vector<double> v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i].e_hat;
    std::sort(v.begin(), v.end());
    return v;
}

double ecdf_eval(const std::vector<double>& sorted_samples, double alpha) {
    auto it = std::upper_bound(sorted_samples.begin(), sorted_samples.end(), alpha);
    return static_cast<double>(it - sorted_samples.begin()) /
           static_cast<double>(sorted_samples.size());
}

namespace {
// limit CDF by linear interpolation on the grid
double limit_cdf(const DensityGrid& g, double a) {
    if (a <= g.alpha.front() || a >= g.alpha.back()) {
        throw std::domain_error("ks_distance: sample outside the density grid extent");
    }
    double da = g.alpha[1] - g.alpha[0];
    auto idx = static_cast<std::size_t>((a - g.alpha.front()) / da);
    idx = std::min(idx, g.alpha.size() - 2);
    double w = (a - g.alpha[idx]) / da;
    return g.cdf[idx] * (1.0 - w) + g.cdf[idx + 1] * w;
}
}  // namespace

double ks_distance(const std::vector<double>& sorted_samples, const DensityGrid& grid) {
    if (sorted_samples.empty()) throw std::domain_error("ks_distance: no samples");
    auto n = static_cast<double>(sorted_samples.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        double f = limit_cdf(grid, sorted_samples[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(std::fabs(f - lo), std::fabs(hi - f)));
    }
    return ks;
}

double remainder_ms(const std::vector<SampleRow>& rows) {
    if (rows.empty()) throw std::domain_error("remainder_ms: no samples");
    return chunked_sum_serial(rows.size(), 4096, [&](std::size_t i) {
               double v = rows[i].t_rem / (rows[i].x * rows[i].x);
               return v * v;
           }) / static_cast<double>(rows.size());
}

}  // namespace cklat
