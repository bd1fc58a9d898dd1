#pragma once
// Sieved arithmetic backbone: r2 (sum-of-two-squares representation counts),
// the Mobius function, square-free decompositions m = core * k^2, and a
// smallest-prime-factor table serving factorization queries.
//
// r2(0) = 1 and r2(m) is divisible by 4 for m >= 1.  r2/4 is multiplicative:
// the factor is 1 at p = 2, (e+1) at p = 1 mod 4, and (1 - e mod 2) at
// p = 3 mod 4.  r2_core_k2 exploits this to evaluate r2(m * k^2) far beyond
// the sieved range, which the profile and moment modules need for their
// k-series tails.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cklat {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

struct ArithTables {
    u64 limit = 0;
    std::vector<u32> r2;         // index 0..limit
    std::vector<int8_t> mu;      // index 0..limit, mu[0] unused
    std::vector<u32> core;       // square-free core of m, index 1..limit
    std::vector<u32> root;       // m = core[m] * root[m]^2
    std::vector<u32> spf;        // smallest prime factor, index 2..limit

    // Construction is single-threaded; the tables are immutable afterwards
    // and safe to share across any number of reader threads.
    static ArithTables build(u64 limit);

    u32 r2_at(u64 m) const {
        if (m > limit) throw std::domain_error("ArithTables: m exceeds sieve limit");
        return r2[m];
    }

    int mu_at(u64 m) const {
        if (m < 1 || m > limit) throw std::domain_error("ArithTables: m out of [1, limit]");
        return mu[m];
    }

    std::pair<u64, u64> squarefree_decompose(u64 m) const {
        if (m < 1 || m > limit) throw std::domain_error("squarefree_decompose: m out of range");
        return {core[m], root[m]};
    }

    // r2(m * k^2) for m, k in [1, limit]; valid even when m * k^2 > limit.
    u32 r2_core_k2(u64 m, u64 k) const;

    // true iff m is square-free and r2(m) > 0.  For square-free m with a
    // prime factor p = 3 mod 4, every m*k^2 has odd p-exponent, so
    // phi_{1,m} == 0 and Xi(m, .) == 0; such m never contribute.
    bool profile_support(u64 m) const {
        return m >= 1 && m <= limit && mu[m] != 0 && r2[m] != 0;
    }
};

// |{(a,b) in Z^2 : a^2 + b^2 = m}| by direct enumeration (independent oracle).
u64 r2_oracle(u64 m);

// Estimate of sum_{n > limit} r2(n)^2 / n^2: fits
// S(Y) = sum_{n<=Y} r2(n)^2 ~ h Y log Y + g Y on the top half of the table,
// then integral-compares the remainder.  Shared by the L2-tail bookkeeping
// of the profile and moment series.
double r2sq_far_tail(const ArithTables& t);

// Sawtooth psi(t) = t - floor(t) - 1/2; exactly -1/2 at integers.
double psi(double t);

u64 isqrt_u64(u64 n);

}  // namespace cklat
