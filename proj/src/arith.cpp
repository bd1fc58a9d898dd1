#include "cklat/arith.hpp"

#include <cmath>
#include <limits>

namespace cklat {

u64 isqrt_u64(u64 n) {
    if (n == 0) return 0;
    auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

ArithTables ArithTables::build(u64 limit) {
    if (limit < 1) throw std::domain_error("ArithTables::build: limit must be >= 1");
    if (limit > std::numeric_limits<u32>::max())
        throw std::domain_error("ArithTables::build: limit exceeds 32-bit table width");

    ArithTables t;
    t.limit = limit;
    t.r2.assign(limit + 1, 0);
    t.mu.assign(limit + 1, 0);
    t.core.assign(limit + 1, 0);
    t.root.assign(limit + 1, 0);
    t.spf.assign(limit + 1, 0);

    // r2 by direct enumeration of a^2 + b^2 over the first quadrant with
    // sign multiplicities; ~(pi/4)*limit increments.
    for (u64 a = 0; a * a <= limit; ++a) {
        u32 wa = (a == 0) ? 1 : 2;
        for (u64 b = 0; a * a + b * b <= limit; ++b) {
            t.r2[a * a + b * b] += wa * ((b == 0) ? 1 : 2);
        }
    }

    // smallest prime factor
    for (u64 i = 2; i <= limit; ++i) {
        if (t.spf[i] == 0) {
            for (u64 j = i; j <= limit; j += i) {
                if (t.spf[j] == 0) t.spf[j] = static_cast<u32>(i);
            }
        }
    }

    // mu and m = core * root^2 from the factorization
    if (limit >= 1) {
        t.mu[1] = 1;
        t.core[1] = 1;
        t.root[1] = 1;
    }
    for (u64 m = 2; m <= limit; ++m) {
        u64 n = m, c = 1, k = 1;
        int nfac = 0;
        bool squarefree = true;
        while (n > 1) {
            u64 p = t.spf[n];
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            ++nfac;
            if (e > 1) squarefree = false;
            if (e & 1) c *= p;
            for (int i = 0; i < e / 2; ++i) k *= p;
        }
        t.mu[m] = squarefree ? ((nfac & 1) ? -1 : 1) : 0;
        t.core[m] = static_cast<u32>(c);
        t.root[m] = static_cast<u32>(k);
    }
    return t;
}

u32 ArithTables::r2_core_k2(u64 m, u64 k) const {
    if (m < 1 || m > limit || k < 1 || k > limit)
        throw std::domain_error("r2_core_k2: arguments out of factorization range");
    // exponents of m*k^2 = (exponents of m) + 2*(exponents of k)
    u32 b = 1;
    u64 n = m;
    while (n > 1) {
        u64 p = spf[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        u64 kk = k;
        while (kk % p == 0) {
            kk /= p;
            e += 2;
        }
        if (p % 4 == 1) {
            b *= static_cast<u32>(e + 1);
        } else if (p % 4 == 3 && (e & 1)) {
            return 0;
        }
    }
    n = k;
    while (n > 1) {
        u64 p = spf[n];
        if (m % p == 0) {  // already counted
            while (n % p == 0) n /= p;
            continue;
        }
        int e = 0;
        while (n % p == 0) {
            n /= p;
            e += 2;
        }
        if (p % 4 == 1) b *= static_cast<u32>(e + 1);
        // p = 3 mod 4 with even exponent contributes factor 1
    }
    return 4 * b;
}

u64 r2_oracle(u64 m) {
    if (m == 0) return 1;
    u64 count = 0;
    u64 amax = isqrt_u64(m);
    for (i64 a = -static_cast<i64>(amax); a <= static_cast<i64>(amax); ++a) {
        u64 rest = m - static_cast<u64>(a * a);
        u64 b = isqrt_u64(rest);
        if (b * b == rest) count += (b == 0) ? 1 : 2;
    }
    return count;
}

double psi(double t) {
    if (!std::isfinite(t)) throw std::domain_error("psi: non-finite argument");
    return t - std::floor(t) - 0.5;
}

double r2sq_far_tail(const ArithTables& t) {
    u64 L = t.limit;
    u64 half = L / 2;
    if (half < 2) return 0.0;
    double s_half = 0.0;
    double comp = 0.0, sum = 0.0;
    for (u64 n = 1; n <= L; ++n) {
        auto r = static_cast<double>(t.r2[n]);
        double y = r * r - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if (n == half) s_half = sum;
    }
    double y1 = static_cast<double>(half), y2 = static_cast<double>(L);
    double a11 = y1 * std::log(y1), a12 = y1;
    double a21 = y2 * std::log(y2), a22 = y2;
    double det = a11 * a22 - a12 * a21;
    double h = (s_half * a22 - a12 * sum) / det;
    double g = (a11 * sum - s_half * a21) / det;
    return (h * (std::log(y2) + 2.0) + g) / y2;
}

}  // namespace cklat
