#include "cklat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "cklat/dd.hpp"
#include "cklat/parallel.hpp"

namespace cklat {

namespace {

constexpr double PI = 3.14159265358979323846264338327950288;
constexpr double TWO_PI = 2.0 * PI;
constexpr double SQRT2_OVER_PI = 0.45015815807855303477759959550054587;

// Tail-shape constant for sum_{k>K} r2(mk^2)/k^2 <= C r2(m) K^-1 (log 2K)^3,
// calibrated against direct sums to k = 3e5 on m in {1,2,5} (max observed
// 0.0225, taken with a 4x margin).
constexpr double C_PHI_TAIL = 0.09;

constexpr u32 QUAD_MAX = 1u << 18;
constexpr double QUAD_TOL = 1e-12;

// cos(2 pi k t) phase via exact reduction of k * frac(t)
inline double cos_2pi_kt(double k, double tau) {
    dd p = two_prod(k, tau);
    double f = std::floor(p.hi);
    double r = (p.hi - f) + p.lo;
    if (r >= 1.0) r -= 1.0;
    if (r < 0.0) r += 1.0;
    return std::cos(TWO_PI * r);
}

double shape_bound(u64 m, u32 r2m, u64 K) {
    double lg = std::log(2.0 * static_cast<double>(K));
    return C_PHI_TAIL * SQRT2_OVER_PI / static_cast<double>(m) * static_cast<double>(r2m) *
           lg * lg * lg / static_cast<double>(K);
}

}  // namespace

PhiSeriesSpec phi_spec(u64 m, double tol, const ArithTables& t) {
    if (m < 1 || m > t.limit) throw std::domain_error("phi_spec: m out of table range");
    if (!(tol > 0.0)) throw std::domain_error("phi_spec: tol must be positive");
    PhiSeriesSpec spec;
    spec.m = m;
    if (!t.profile_support(m)) return spec;  // phi == 0, nothing to resolve
    u32 r2m = t.r2[m];
    u64 K = 64;
    while (shape_bound(m, r2m, K) >= tol && 2 * K <= t.limit) K *= 2;
    spec.k_cutoff = K;
    spec.tail_bound = shape_bound(m, r2m, K);
    return spec;
}

PhiEvaluator::PhiEvaluator(u64 m, u64 k_cutoff, const ArithTables& t) : m_(m) {
    coeff_.resize(k_cutoff, 0.0);
    if (!t.profile_support(m)) {
        std::fill(coeff_.begin(), coeff_.end(), 0.0);
        return;
    }
    double pref = -SQRT2_OVER_PI / static_cast<double>(m);
    for (u64 k = 1; k <= k_cutoff; ++k) {
        coeff_[k - 1] =
            pref * static_cast<double>(t.r2_core_k2(m, k)) / static_cast<double>(k * k);
    }
}

double PhiEvaluator::operator()(double t) const {
    if (!std::isfinite(t)) throw std::domain_error("PhiEvaluator: non-finite t");
    double tau = t - std::floor(t);
    kahan acc;
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
        if (coeff_[i] == 0.0) continue;
        acc.add(coeff_[i] * cos_2pi_kt(static_cast<double>(i + 1), tau));
    }
    return acc.sum();
}

double PhiEvaluator::truncation_l2() const {
    // int (phi - phi~)^2 = sum_{k>K} c_k^2 / 2; the evaluator only knows its
    // own coefficients, so this reports the complement of the stored mass
    // relative to phi_l2 computed by the caller when needed.  Stored mass:
    kahan acc;
    for (double c : coeff_) acc.add(0.5 * c * c);
    return acc.sum();
}

double phi(u64 m, double t, double tol, const ArithTables& tables) {
    if (m < 1 || m > tables.limit) throw std::domain_error("phi: m out of table range");
    if (!tables.profile_support(m)) return 0.0;
    PhiSeriesSpec spec = phi_spec(m, tol, tables);
    if (spec.tail_bound >= tol) {
        throw resolution_error(
            "phi: k-range exhausted before tol; achieved tail bound " +
                std::to_string(spec.tail_bound),
            spec.tail_bound);
    }
    return PhiEvaluator(m, spec.k_cutoff, tables)(t);
}

double phi_l2(u64 m, const ArithTables& t) {
    if (m < 1 || m > t.limit) throw std::domain_error("phi_l2: m out of table range");
    if (!t.profile_support(m)) return 0.0;
    double inv_m2 = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    kahan acc;
    double prev = -1.0;
    u64 k = 1;
    u64 block_end = 64;
    while (true) {
        for (; k <= block_end; ++k) {
            auto r = static_cast<double>(t.r2_core_k2(m, k));
            double k2 = static_cast<double>(k) * static_cast<double>(k);
            acc.add(r * r / (k2 * k2));
        }
        double cur = acc.sum();
        if (prev >= 0.0 && cur - prev <= 1e-13 * cur) break;
        if (2 * block_end > t.limit) break;  // k^-3 tail: far below 1e-12 relative here
        prev = cur;
        block_end *= 2;
    }
    return acc.sum() * inv_m2 / (PI * PI);
}

double phi_l2_tail(u64 m_cutoff, const ArithTables& t) {
    if (m_cutoff > t.limit) throw std::domain_error("phi_l2_tail: m_cutoff exceeds table");
    // sum over m > M of int phi^2 = (1/pi^2) sum over n with core(n) > M of
    // r2(n)^2 / n^2: the unique decomposition n = core * k^2 regroups the
    // double series exactly.
    double in_table = chunked_sum(t.limit - 1, 1u << 16, [&](std::size_t i) {
        u64 n = i + 2;  // n = 1 has core 1 <= M always
        if (t.core[n] <= m_cutoff) return 0.0;
        double r = static_cast<double>(t.r2[n]);
        double nd = static_cast<double>(n);
        return r * r / (nd * nd);
    });
    return (in_table + r2sq_far_tail(t)) / (PI * PI);
}

// ---------------------------------------------------------------------------
// Factor quadrature

namespace {

// Per-factor cosine cutoff: keeps the per-factor L2 truncation loss below
// ~1e-11 in aggregate while staying well under the quadrature Nyquist.
u64 char_k_cutoff(u64 m, u64 limit) {
    double raw = 1536.0 / std::pow(static_cast<double>(m), 2.0 / 3.0);
    u64 k = raw < 64.0 ? 64 : static_cast<u64>(raw);
    if (k > 4096) k = 4096;
    if (k > limit) k = limit;
    return k;
}

u32 ceil_pow2(u64 v) {
    u32 q = 1;
    while (q < v) q *= 2;
    return q;
}

}  // namespace

// Dyadically refined periodic-trapezoid evaluation of one factor.  Samples of
// the truncated phi are cached in refinement order and shared across sigma.
class FactorEvaluator {
public:
    FactorEvaluator(u64 m, const ArithTables& t, u32 q0)
        : phi_(m, char_k_cutoff(m, t.limit), t) {
        q0_ = std::max<u32>(q0, ceil_pow2(2 * phi_.k_cutoff() + 2));
        seed_level();
    }

    // Integral to absolute tolerance tol; grows the sample cache as needed.
    std::complex<double> eval(double sigma, double tol, u32 max_q) {
        double a = TWO_PI * sigma;
        std::complex<double> prev(0.0, 0.0);
        std::size_t consumed = 0;
        kahan re, im;
        u32 q = q0_;
        while (true) {
            while (samples_.size() < q) refine();
            for (; consumed < q; ++consumed) {
                double ph = a * samples_[consumed];
                re.add(std::cos(ph));
                im.add(std::sin(ph));
            }
            std::complex<double> cur(re.sum() / q, im.sum() / q);
            if (q > q0_ && std::abs(cur - prev) < tol) {
                max_q_used_ = std::max(max_q_used_, q);
                return cur;
            }
            if (2 * q > max_q) {
                throw resolution_error(
                    "char_factor: no convergence by max quadrature; last delta " +
                        std::to_string(std::abs(cur - prev)),
                    std::abs(cur - prev));
            }
            prev = cur;
            q *= 2;
        }
    }

    u32 max_q_used() const { return max_q_used_; }
    const PhiEvaluator& phi() const { return phi_; }

private:
    void seed_level() {
        samples_.reserve(q0_);
        for (u32 j = 0; j < q0_; ++j) {
            samples_.push_back(phi_(static_cast<double>(j) / q0_));
        }
    }

    // Append midpoints: the union of {j/Q} and {(j+1/2)/Q} is the 2Q-grid.
    void refine() {
        auto q = static_cast<u32>(samples_.size());
        samples_.reserve(2 * q);
        for (u32 j = 0; j < q; ++j) {
            samples_.push_back(phi_((j + 0.5) / q));
        }
    }

    PhiEvaluator phi_;
    std::vector<double> samples_;
    u32 q0_ = 0;
    u32 max_q_used_ = 0;
};

std::complex<double> char_factor(u64 m, double sigma, u32 quad_points,
                                 const ArithTables& t) {
    if (quad_points < 64 || (quad_points & (quad_points - 1)) != 0)
        throw std::domain_error("char_factor: quad_points must be a power of two >= 64");
    if (m < 1 || m > t.limit) throw std::domain_error("char_factor: m out of table range");
    if (!t.profile_support(m)) return {1.0, 0.0};  // phi == 0
    if (sigma == 0.0) return {1.0, 0.0};
    bool flip = sigma < 0.0;
    FactorEvaluator ev(m, t, quad_points);
    std::complex<double> v = ev.eval(std::fabs(sigma), QUAD_TOL, QUAD_MAX);
    return flip ? std::conj(v) : v;
}

u64 char_product_required_cutoff(double sigma) {
    double s = 1.0 + std::fabs(sigma);
    return static_cast<u64>(std::ceil(16.0 * s * s));
}

std::complex<double> char_product(double sigma, u64 m_cutoff, const ArithTables& t) {
    if (m_cutoff > t.limit) throw std::domain_error("char_product: m_cutoff exceeds table");
    u64 required = char_product_required_cutoff(sigma);
    if (m_cutoff < required) {
        throw std::domain_error("char_product: sigma too large for m_cutoff; need >= " +
                                std::to_string(required));
    }
    if (sigma == 0.0) return {1.0, 0.0};
    bool flip = sigma < 0.0;
    double s = std::fabs(sigma);
    std::complex<double> prod(1.0, 0.0);
    for (u64 m = 1; m <= m_cutoff; ++m) {
        if (!t.profile_support(m)) continue;
        FactorEvaluator ev(m, t, 64);
        prod *= ev.eval(s, QUAD_TOL, QUAD_MAX);
    }
    double w = TWO_PI * s;
    prod *= std::exp(-0.5 * w * w * phi_l2_tail(m_cutoff, t));
    return flip ? std::conj(prod) : prod;
}

// ---------------------------------------------------------------------------
// Grid evaluation and Fourier inversion

CharProfile char_profile_grid(double sigma_max, double d_sigma, u64 m_cutoff,
                              const ArithTables& t, bool parallel) {
    if (!(sigma_max > 0.0) || !(d_sigma > 0.0))
        throw std::domain_error("char_profile_grid: bad grid parameters");
    if (m_cutoff > t.limit) throw std::domain_error("char_profile_grid: m_cutoff exceeds table");
    u64 required = char_product_required_cutoff(sigma_max);
    if (m_cutoff < required) {
        throw std::domain_error("char_profile_grid: sigma_max needs m_cutoff >= " +
                                std::to_string(required));
    }

    CharProfile cp;
    cp.m_cutoff = m_cutoff;
    auto ns = static_cast<std::size_t>(std::floor(sigma_max / d_sigma)) + 1;
    cp.sigma.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) cp.sigma[i] = static_cast<double>(i) * d_sigma;
    cp.values.assign(ns, {0.0, 0.0});
    cp.tail_l2 = phi_l2_tail(m_cutoff, t);

    std::vector<u64> good;
    for (u64 m = 1; m <= m_cutoff; ++m) {
        if (t.profile_support(m)) good.push_back(m);
    }
    std::vector<std::unique_ptr<FactorEvaluator>> evals(good.size());
    auto build = [&](std::size_t i) {
        evals[i] = std::make_unique<FactorEvaluator>(good[i], t, 64);
    };
    if (parallel) {
        parallel_index(good.size(), build);
    } else {
        for (std::size_t i = 0; i < good.size(); ++i) build(i);
    }

    // sigma blocks ascending; once a whole block underflows the envelope is
    // spent (the paper's bound is a decreasing envelope) and the rest is 0.
    constexpr std::size_t BLOCK = 64;
    constexpr std::size_t CHUNK = 16;   // factors per deterministic chunk
    constexpr double UNDERFLOW_CUT = 1e-200;
    std::size_t nchunks = (good.size() + CHUNK - 1) / CHUNK;
    bool dead = false;
    for (std::size_t b0 = 0; b0 < ns && !dead; b0 += BLOCK) {
        std::size_t b1 = std::min(ns, b0 + BLOCK);
        std::vector<std::vector<std::complex<double>>> rows(
            nchunks, std::vector<std::complex<double>>(b1 - b0, {1.0, 0.0}));
        auto work = [&](std::size_t c) {
            std::size_t lo = c * CHUNK, hi = std::min(good.size(), lo + CHUNK);
            for (std::size_t gi = lo; gi < hi; ++gi) {
                for (std::size_t si = b0; si < b1; ++si) {
                    rows[c][si - b0] *= evals[gi]->eval(cp.sigma[si], QUAD_TOL, QUAD_MAX);
                }
            }
        };
        if (parallel) {
            parallel_index(nchunks, work);
        } else {
            for (std::size_t c = 0; c < nchunks; ++c) work(c);
        }
        double block_max = 0.0;
        for (std::size_t si = b0; si < b1; ++si) {
            std::complex<double> v(1.0, 0.0);
            for (std::size_t c = 0; c < nchunks; ++c) v *= rows[c][si - b0];
            double w = TWO_PI * cp.sigma[si];
            v *= std::exp(-0.5 * w * w * cp.tail_l2);
            cp.values[si] = v;
            block_max = std::max(block_max, std::abs(v));
        }
        if (block_max < UNDERFLOW_CUT && b0 > 0) dead = true;  // zero-fill rest
    }

    for (const auto& ev : evals) {
        cp.quad_points = std::max(cp.quad_points, ev->max_q_used());
    }
    return cp;
}

DensityGrid density(double alpha_extent, u64 n_alpha, double sigma_max,
                    double d_sigma, const ArithTables& t) {
    if (!(alpha_extent > 0.0)) throw std::domain_error("density: alpha_extent must be positive");
    if (n_alpha < 3) throw std::domain_error("density: need n_alpha >= 3");
    if (d_sigma > 1.0 / (4.0 * alpha_extent))
        throw std::domain_error("density: resolution guard d_sigma <= 1/(4 alpha_extent)");

    u64 m_cutoff = std::max<u64>(10000, char_product_required_cutoff(sigma_max));
    CharProfile cp = char_profile_grid(sigma_max, d_sigma, m_cutoff, t, true);

    // silent ringing guard: the true envelope at sigma_max must be spent
    double vmax = std::abs(char_product(cp.sigma.back(), m_cutoff, t));
    if (!(vmax < 1e-14)) {
        throw resolution_error(
            "density: |Phi(sigma_max)| = " + std::to_string(vmax) + " >= 1e-14; raise sigma_max",
            vmax);
    }

    DensityGrid g;
    g.alpha_extent = alpha_extent;
    g.sigma_max = cp.sigma.back();
    g.m_cutoff = m_cutoff;
    g.tail_l2 = cp.tail_l2;
    g.quad_points = cp.quad_points;
    g.alpha.resize(n_alpha);
    g.p.assign(n_alpha, 0.0);
    double da = 2.0 * alpha_extent / static_cast<double>(n_alpha - 1);
    for (u64 j = 0; j < n_alpha; ++j) {
        g.alpha[j] = -alpha_extent + da * static_cast<double>(j);
    }

    std::size_t ns = cp.sigma.size();
    parallel_index(n_alpha, [&](std::size_t j) {
        double a = TWO_PI * g.alpha[j];
        kahan acc;
        for (std::size_t i = 0; i < ns; ++i) {
            double w = (i == 0 || i + 1 == ns) ? 0.5 : 1.0;
            double th = a * cp.sigma[i];
            acc.add(w * (cp.values[i].real() * std::cos(th) +
                         cp.values[i].imag() * std::sin(th)));
        }
        g.p[j] = 2.0 * acc.sum() * d_sigma;
    });

    kahan mass, mean, var;
    for (u64 j = 0; j < n_alpha; ++j) {
        double w = (j == 0 || j + 1 == n_alpha) ? 0.5 : 1.0;
        mass.add(w * g.p[j] * da);
        mean.add(w * g.alpha[j] * g.p[j] * da);
        var.add(w * g.alpha[j] * g.alpha[j] * g.p[j] * da);
    }
    g.mass = mass.sum();
    g.mean = mean.sum();
    g.variance = var.sum();

    g.cdf.assign(n_alpha, 0.0);
    kahan cum;
    for (u64 j = 1; j < n_alpha; ++j) {
        cum.add(0.5 * (g.p[j] + g.p[j - 1]) * da);
        g.cdf[j] = std::max(cum.sum(), g.cdf[j - 1]);  // clamp: monotone despite fp dust
    }
    return g;
}

double density_moment(const DensityGrid& grid, int j) {
    if (j < 0) throw std::domain_error("density_moment: j must be >= 0");
    std::size_t n = grid.alpha.size();
    double da = grid.alpha[1] - grid.alpha[0];
    kahan acc;
    for (std::size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        acc.add(w * std::pow(grid.alpha[i], j) * grid.p[i] * da);
    }
    return acc.sum();
}

DecayEnvelope decay_diagnostic(const DensityGrid& grid, const ArithTables* tables) {
    // Fit rho in -log P ~ (pi/2)|a| exp(rho |a|):
    //   y = log(-log P) - log(pi |a| / 2) regressed on |a|.
    std::vector<std::pair<double, double>> pts;  // (|alpha|, y), sorted copy
    for (std::size_t i = 0; i < grid.alpha.size(); ++i) {
        double a = std::fabs(grid.alpha[i]);
        double p = grid.p[i];
        // keep the decaying flank above the inversion's roundoff floor
        if (a < 1.5 || !(p > 1e-14) || p >= 1e-8) continue;
        double y = std::log(-std::log(p)) - std::log(PI * a / 2.0);
        pts.emplace_back(a, y);
    }
    std::sort(pts.begin(), pts.end());
    if (pts.size() < 8) {
        throw std::domain_error("decay_diagnostic: insufficient decade coverage for the fit");
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    auto n = static_cast<double>(pts.size());
    for (auto& [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    DecayEnvelope env;
    env.rho = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    env.C1 = PI / (5.0 * env.rho);
    env.c_r2 = tables ? wigert_constant(*tables) : std::nan("");
    return env;
}

double wigert_constant(const ArithTables& t) {
    double c = 0.0;
    for (u64 m = 16; m <= t.limit; ++m) {
        if (t.r2[m] <= 4) continue;
        double lm = std::log(static_cast<double>(m));
        c = std::max(c, std::log(static_cast<double>(t.r2[m])) * std::log(lm) / lm);
    }
    return c;
}

}  // namespace cklat
