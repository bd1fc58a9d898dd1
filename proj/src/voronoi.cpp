#include "cklat/voronoi.hpp"

#include <cmath>

#include "cklat/parallel.hpp"
#include "cklat/rng.hpp"

namespace cklat {

namespace {
constexpr double TWO_PI = 6.28318530717958647692528676655900577;
constexpr double SQRT2_OVER_PI = 0.45015815807855303477759959550054587;

// cos(2 pi sqrt(m) x) with the phase reduced in double-double.
inline double phase_cos(double shi, double slo, double x) {
    dd p = two_prod(shi, x);
    p = dd_renorm(p.hi, p.lo + slo * x);
    double f = std::floor(p.hi);
    double r = (p.hi - f) + p.lo;
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r += 1.0;
    return std::cos(TWO_PI * r);
}
}  // namespace

SeriesConfig default_series_config(double X) {
    if (!(X > 0.0)) throw std::domain_error("default_series_config: X must be positive");
    return SeriesConfig{static_cast<u64>(std::ceil(X * X)), X};
}

TruncatedSeries::TruncatedSeries(SeriesConfig cfg, const ArithTables& t) : cfg_(cfg) {
    if (cfg.m_cutoff > t.limit)
        throw std::domain_error("TruncatedSeries: m_cutoff exceeds sieve limit");
    for (u64 m = 1; m <= cfg.m_cutoff; ++m) {
        if (t.r2[m] == 0) continue;
        dd s = dd_sqrt_u64(m);
        sqrt_hi_.push_back(s.hi);
        sqrt_lo_.push_back(s.lo);
        weight_.push_back(static_cast<double>(t.r2[m]) / static_cast<double>(m));
    }
}

double TruncatedSeries::eval(double x) const {
    kahan acc;
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        acc.add(weight_[i] * phase_cos(sqrt_hi_[i], sqrt_lo_[i], x));
    }
    return -SQRT2_OVER_PI * acc.sum();
}

double TruncatedSeries::eval_permuted(double x, const std::vector<u32>& order) const {
    kahan acc;
    for (u32 i : order) {
        acc.add(weight_[i] * phase_cos(sqrt_hi_[i], sqrt_lo_[i], x));
    }
    return -SQRT2_OVER_PI * acc.sum();
}

double truncated_series(double x, const SeriesConfig& cfg, const ArithTables& t) {
    return TruncatedSeries(cfg, t).eval(x);
}

double prop1_residual(double x, const SeriesConfig& cfg, const ArithTables& t) {
    if (!(cfg.window_x <= x && x <= 2.0 * cfg.window_x))
        throw std::domain_error("prop1_residual: x outside [X, 2X], expansion not asserted there");
    TruncatedSeries series(cfg, t);
    ErrorSample s = error_term(x, t);
    return s.e_hat - series.eval(x) + 2.0 * s.t_rem / (x * x);
}

namespace {
std::vector<VoronoiRow> scan_impl(double X, u64 n, u64 seed, const ArithTables& t,
                                  bool parallel) {
    SeriesConfig cfg = default_series_config(X);
    TruncatedSeries series(cfg, t);
    std::vector<VoronoiRow> rows(n);
    auto work = [&](std::size_t i) {
        double x = X * (1.0 + uniform01(seed, i));
        ErrorSample s = error_term(x, t);
        VoronoiRow& r = rows[i];
        r.x = x;
        r.e_hat = s.e_hat;
        r.series = series.eval(x);
        r.t_rem = s.t_rem;
        r.residual = s.e_hat - r.series + 2.0 * s.t_rem / (x * x);
    };
    if (parallel) {
        parallel_index(n, work);
    } else {
        for (std::size_t i = 0; i < n; ++i) work(i);
    }
    return rows;
}
}  // namespace

std::vector<VoronoiRow> voronoi_scan(double X, u64 n, u64 seed, const ArithTables& t) {
    return scan_impl(X, n, seed, t, true);
}

std::vector<VoronoiRow> voronoi_scan_serial(double X, u64 n, u64 seed, const ArithTables& t) {
    return scan_impl(X, n, seed, t, false);
}

double residual_rms(const std::vector<VoronoiRow>& rows) {
    if (rows.empty()) return 0.0;
    double s = chunked_sum_serial(rows.size(), 4096,
                                  [&](std::size_t i) { return rows[i].residual * rows[i].residual; });
    return std::sqrt(s / static_cast<double>(rows.size()));
}

}  // namespace cklat
