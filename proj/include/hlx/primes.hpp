#pragma once

/**
 * @file primes.hpp
 * @brief Segmented sieve, Chebyshev sums, Goldbach and twin representation
 *        counts, and exceptional-set scans.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gausssums.hpp"
#include "parallel.hpp"

namespace hlx {

inline constexpr u64 kMaxSieveLimit = 1000000000ULL;

/// Odd-only primality bitset plus the ordered prime list up to a limit.
class PrimeTable {
public:
    PrimeTable() = default;

    u64 limit() const { return limit_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

    bool is_prime(u64 n) const {
        if (n > limit_) throw std::out_of_range("PrimeTable::is_prime: beyond sieve limit");
        if (n < 2) return false;
        if ((n & 1) == 0) return n == 2;
        const u64 i = n >> 1;
        return !((composite_[i >> 6] >> (i & 63)) & 1);
    }

    /// pi(x) for x <= limit.
    u64 count(u64 x) const {
        check(x);
        return u64(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    }

    /// Index range [first, last) of primes in (lo, hi].
    std::pair<std::size_t, std::size_t> range(double lo, double hi) const {
        const u64 h = u64(std::max(0.0, std::floor(hi)));
        check(h);
        const u64 l = u64(std::max(0.0, std::floor(lo)));
        auto a = std::upper_bound(primes_.begin(), primes_.end(), l);
        auto b = std::upper_bound(primes_.begin(), primes_.end(), h);
        return {std::size_t(a - primes_.begin()), std::size_t(std::max(a, b) - primes_.begin())};
    }

    /// a_n = log n for primes n in (X1, X], zero elsewhere; indices 0..X.
    std::vector<double> window_weights(double X1, double X) const {
        const u64 x = u64(std::floor(X));
        check(x);
        std::vector<double> a(x + 1, 0.0);
        const auto [i0, i1] = range(X1, X);
        for (std::size_t i = i0; i < i1; ++i) a[primes_[i]] = std::log(double(primes_[i]));
        return a;
    }

    void check(u64 x) const {
        if (x > limit_) throw std::out_of_range("PrimeTable: argument beyond sieve limit");
    }

private:
    friend PrimeTable sieve(u64 limit, unsigned threads);

    u64 limit_ = 0;
    std::vector<u64> composite_;  // bit i set: 2i+1 composite (or 1)
    std::vector<std::uint32_t> primes_;
};

/// Segmented odd-only sieve of Eratosthenes up to limit <= 10^9.
inline PrimeTable sieve(u64 limit, unsigned threads = 1) {
    if (limit > kMaxSieveLimit) throw std::invalid_argument("sieve: limit above 10^9");
    PrimeTable t;
    t.limit_ = limit;
    const u64 nbits = (limit + 1) / 2;  // odd numbers 1, 3, ..., up to limit
    t.composite_.assign(std::max<u64>(1, (nbits + 63) / 64), 0);

    const u64 root = u64(std::sqrt(double(limit))) + 1;
    std::vector<std::uint32_t> base;
    {
        std::vector<char> small(root + 1, 1);
        for (u64 i = 3; i <= root; i += 2) {
            if (!small[i]) continue;
            base.push_back(std::uint32_t(i));
            for (u64 j = i * i; j <= root; j += 2 * i) small[j] = 0;
        }
    }

    constexpr u64 kSegmentBits = u64(1) << 21;  // 256 KiB of bits
    const u64 segments = (nbits + kSegmentBits - 1) / kSegmentBits;
    u64* bits = t.composite_.data();
    parallel_for(segments, threads, [&](std::size_t s) {
        const u64 lo = s * kSegmentBits;                  // first bit index
        const u64 hi = std::min(nbits, lo + kSegmentBits);  // exclusive
        for (std::uint32_t p : base) {
            const u64 pp = u64(p) * p;
            if ((pp >> 1) >= hi) break;
            // first odd multiple of p with bit index >= lo, at least p^2
            u64 start = std::max(pp, ((2 * lo + 1 + p - 1) / p) * p);
            if ((start & 1) == 0) start += p;
            for (u64 j = start >> 1; j < hi; j += p) bits[j >> 6] |= u64(1) << (j & 63);
        }
    });
    bits[0] |= 1;  // 1 is not prime
    // bits past nbits in the final word
    const u64 tail = nbits - 64 * (t.composite_.size() - 1);
    if (tail < 64) bits[t.composite_.size() - 1] |= ~u64(0) << tail;

    if (limit >= 2) t.primes_.push_back(2);
    t.primes_.reserve(limit < 100 ? 30 : std::size_t(1.1 * double(limit) / std::log(double(limit))));
    for (std::size_t w = 0; w < t.composite_.size(); ++w) {
        u64 word = ~bits[w];
        while (word) {
            const int b = std::countr_zero(word);
            t.primes_.push_back(std::uint32_t(2 * (u64(w) * 64 + b) + 1));
            word &= word - 1;
        }
    }
    return t;
}

/// theta(x) = sum_{p <= x} log p.
inline double theta(const PrimeTable& t, double x) {
    const auto [a, b] = t.range(0, x);
    CompensatedSum s;
    for (std::size_t i = a; i < b; ++i) s.add(std::log(double(t.primes()[i])));
    return s.value().real();
}

/// psi(x) = sum_{n <= x} Lambda(n), prime powers included.
inline double psi_lambda(const PrimeTable& t, double x) {
    const auto [a, b] = t.range(0, x);
    const u64 xi = u64(std::floor(x));
    CompensatedSum s;
    for (std::size_t i = a; i < b; ++i) {
        const u64 p = t.primes()[i];
        const double lp = std::log(double(p));
        for (u64 pk = p; pk <= xi; pk *= p) {
            s.add(lp);
            if (pk > xi / p) break;
        }
    }
    return s.value().real();
}

/// psi(x, chi) = sum_{p <= x} chi(p) log p over primes only.
inline cplx psi_chi(const PrimeTable& t, double x, const DirichletCharacter& chi) {
    const auto [a, b] = t.range(0, x);
    const auto& tab = chi.table();
    const u64 q = chi.modulus(), n = chi.order();
    std::vector<cplx> roots(n);
    for (u64 k = 0; k < n; ++k) roots[k] = RootOfUnity::unit_root(k, n);
    CompensatedSum s;
    for (std::size_t i = a; i < b; ++i) {
        const u64 p = t.primes()[i];
        const std::int32_t k = tab[p % q];
        if (k >= 0) s.add(std::log(double(p)) * roots[std::size_t(k)]);
    }
    return s.value();
}

/// X1 = X^{1 - eps0}.
inline double window_start(double X, double eps0) {
    if (!(eps0 > 0 && eps0 < 1)) throw std::invalid_argument("window_start: eps0 must lie in (0, 1)");
    return std::pow(X, 1 - eps0);
}

/// R(m) = sum_{p + p' = m, p, p' in (X1, X]} log p log p', ordered pairs.
inline double goldbach_count(const PrimeTable& t, i64 m, double X1, double X) {
    const u64 x = u64(std::floor(X));
    t.check(x);
    if (m < 4) return 0;
    const auto [a, b] = t.range(X1, X);
    const u64 x1 = u64(std::max(0.0, std::floor(X1)));
    CompensatedSum s;
    for (std::size_t i = a; i < b; ++i) {
        const u64 p = t.primes()[i];
        if (p >= u64(m)) break;
        const u64 q = u64(m) - p;
        if (q > x1 && q <= x && t.is_prime(q)) s.add(std::log(double(p)) * std::log(double(q)));
    }
    return s.value().real();
}

/// R'(m) = sum_{p - p' = m, p, p' in (X1, X]} log p log p'.
inline double twin_count(const PrimeTable& t, i64 m, double X1, double X) {
    const u64 x = u64(std::floor(X));
    t.check(x);
    const i64 x1 = i64(std::max(0.0, std::floor(X1)));
    const auto [a, b] = t.range(X1, X);
    CompensatedSum s;
    for (std::size_t i = a; i < b; ++i) {
        const i64 pp = t.primes()[i];
        const i64 p = pp + m;
        if (p > i64(x)) break;
        if (p > x1 && t.is_prime(u64(p))) s.add(std::log(double(p)) * std::log(double(pp)));
    }
    return s.value().real();
}

struct ExceptionalSet {
    u64 X = 0;
    u64 count = 0;
    std::vector<u64> members;  ///< ascending
};

/// E(X): even m in [2, X] with no representation p + p' over all primes.
inline ExceptionalSet goldbach_exceptions(const PrimeTable& t, u64 X, unsigned threads = 1) {
    t.check(X);
    const auto& pr = t.primes();
    constexpr u64 kBlock = 1 << 16;
    const u64 blocks = (X / 2 + kBlock - 1) / kBlock;
    std::vector<std::vector<u64>> found(blocks);
    parallel_for(blocks, threads, [&](std::size_t bi) {
        const u64 first = 2 + 2 * bi * kBlock;
        const u64 last = std::min(X, first + 2 * (kBlock - 1));
        for (u64 m = first; m <= last; m += 2) {
            bool ok = false;
            for (std::uint32_t p : pr) {
                if (2 * u64(p) > m) break;
                if (t.is_prime(m - p)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) found[bi].push_back(m);
        }
    });
    ExceptionalSet e;
    e.X = X;
    for (auto& v : found) e.members.insert(e.members.end(), v.begin(), v.end());
    e.count = e.members.size();
    return e;
}

/// E'(X): even m in [2, X] with no p - p' = m among primes p <= sieve limit.
inline ExceptionalSet twin_exceptions(const PrimeTable& t, u64 X, unsigned threads = 1) {
    if (X >= t.limit()) throw std::out_of_range("twin_exceptions: sieve limit must exceed X");
    const auto& pr = t.primes();
    const u64 L = t.limit();
    const u64 evens = X / 2;
    constexpr u64 kBlock = 1 << 14;
    const u64 blocks = (evens + kBlock - 1) / kBlock;
    std::vector<std::vector<u64>> found(blocks);
    parallel_for(blocks, threads, [&](std::size_t bi) {
        const u64 first = 2 + 2 * bi * kBlock;
        const u64 last = std::min(X, first + 2 * (kBlock - 1));
        for (u64 m = first; m <= last; m += 2) {
            bool ok = false;
            for (std::uint32_t p : pr) {
                if (p + m > L) break;
                if (t.is_prime(p + m)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) found[bi].push_back(m);
        }
    });
    ExceptionalSet e;
    e.X = X;
    for (auto& v : found) e.members.insert(e.members.end(), v.begin(), v.end());
    e.count = e.members.size();
    return e;
}

}  // namespace hlx
