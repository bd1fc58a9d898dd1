#pragma once
// Truncated Voronoi-type expansion of the normalized error term: on a
// dyadic window X <= x <= 2X,
//
//   E^(x) = -(sqrt(2)/pi) sum_{m <= X^2} r2(m)/m cos(2 pi sqrt(m) x)
//           - 2 x^{-2} T(x^2) + O_eps(X^{-1+eps}),
//
// so the residual E^ - series + 2 x^{-2} T(x^2) must shrink as the window
// moves out.  Phases are assembled as frac(sqrt(m) * x) in double-double:
// sqrt(m)*x reaches ~3e5 on desk-scale windows and naive reduction would
// eat six digits of the residual's decay signal.

#include <vector>

#include "arith.hpp"
#include "lattice.hpp"

namespace cklat {

struct SeriesConfig {
    u64 m_cutoff = 0;      // truncation M; Eq-faithful default is ceil(X^2)
    double window_x = 0.0; // the X anchoring the expansion
};

SeriesConfig default_series_config(double X);

// Precomputed terms (sqrt(m) split hi/lo, weights r2(m)/m) for one window.
class TruncatedSeries {
public:
    TruncatedSeries(SeriesConfig cfg, const ArithTables& t);

    // -(sqrt2/pi) * sum over stored terms, ascending m, compensated.
    double eval(double x) const;

    // Same sum in caller-supplied term order (order-robustness checks).
    double eval_permuted(double x, const std::vector<u32>& order) const;

    std::size_t term_count() const { return weight_.size(); }
    const SeriesConfig& config() const { return cfg_; }

private:
    SeriesConfig cfg_;
    std::vector<double> sqrt_hi_, sqrt_lo_, weight_;
};

double truncated_series(double x, const SeriesConfig& cfg, const ArithTables& t);

// E^(x) - series(x) + 2 x^{-2} T(x^2); only asserted on [X, 2X].
double prop1_residual(double x, const SeriesConfig& cfg, const ArithTables& t);

struct VoronoiRow {
    double x = 0.0;
    double e_hat = 0.0;
    double series = 0.0;
    double t_rem = 0.0;
    double residual = 0.0;
};

// n seeded uniform samples of the residual decomposition on [X, 2X].
std::vector<VoronoiRow> voronoi_scan(double X, u64 n, u64 seed, const ArithTables& t);
std::vector<VoronoiRow> voronoi_scan_serial(double X, u64 n, u64 seed, const ArithTables& t);

double residual_rms(const std::vector<VoronoiRow>& rows);

}  // namespace cklat
