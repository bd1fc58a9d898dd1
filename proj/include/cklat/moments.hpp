#pragma once
// Constrained sign/index sums and the moment formula.
//
// For square-free m and l >= 2,
//
//   Xi(m,l) = (-1)^l (1/(sqrt(2) pi))^l (mu^2(m)/m^l)
//             sum_{e in {+-1}^l} sum_{k_1..k_l >= 1, sum e_i k_i = 0}
//             prod r2(m k_i^2)/k_i^2,
//
// truncated at k_i <= y for the computable Xi(m,l;y).  Xi(m,1) = 0 by
// definition, every Xi vanishes when mu(m) = 0 (or r2(m) = 0), and the sign
// of a nonzero Xi(m,l) is (-1)^l.  The j-th moment of the limiting density
// expands over compositions (l_1..l_s) of j with multinomial weights
// j!/(l_1!..l_s!) and strictly increasing block frequencies m_1 < .. < m_s.
//
// The truncated sum is evaluated by a signed convolution dynamic program
// over offsets s in [-l y, l y]; a literal tuple enumeration serves as its
// oracle at small sizes.

#include <vector>

#include "arith.hpp"

namespace cklat {

struct XiTerm {
    u64 m = 0;
    int ell = 0;
    double value = 0.0;
    u64 truncation_y = 0;       // 0 = exact by structure (ell = 1 or no support)
    bool converged = true;
    double tail_estimate = 0.0;
};

struct MomentTable {
    struct CompositionTerm {
        std::vector<int> parts;
        double weight = 0.0;   // j!/(l_1! .. l_s!)
        double partial = 0.0;  // ordered-tuple sum over m <= m_cutoff
    };
    int j = 0;
    double value = 0.0;
    std::vector<CompositionTerm> per_composition;
    u64 m_cutoff = 0;
    // tail of the block series beyond m_cutoff that the j = 2 assembly can
    // complete exactly in-table (zero for other j; folded into value)
    double series_completion = 0.0;
    double error_budget = 0.0;
    bool budget_flagged = false;
};

// Xi(m, ell; y) by the convolution dynamic program.
double xi_truncated(u64 m, int ell, u64 y, const ArithTables& t);

// Literal enumeration over all sign/index tuples; guard (2y)^ell <= 1e8.
double xi_bruteforce(u64 m, int ell, u64 y, const ArithTables& t);

// Converged Xi(m, ell) by geometric growth in y.  tail_estimate records
// min(fitted Eq-shape bound, 3x the last doubling delta); if the table's
// k-range is exhausted first, `converged` is false and the achieved tail is
// reported rather than thrown.
XiTerm xi(u64 m, int ell, double rel_tol, const ArithTables& t);

// (1/pi^2) sum_m r2(m)^2/m^2, summed over the full table plus an
// integral-comparison remainder for the part beyond it.
double second_moment_closed(double rel_tol, const ArithTables& t);

MomentTable theoretical_moment(int j, u64 m_cutoff, double rel_tol,
                               const ArithTables& t);

}  // namespace cklat
