#pragma once

/**
 * @file numthy.hpp
 * @brief Exact integer arithmetic: factorization, totient, Moebius, divisors.
 *
 * Factorization uses trial division up to 10^6 followed by Pollard rho
 * (Brent variant) with a deterministic Miller-Rabin test, which is exact for
 * all 64-bit inputs. Everything here is a pure function.
 */

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hlx {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

struct PrimePower {
    u64 prime = 0;
    int exponent = 0;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// p^e || n for each prime p | n, primes strictly increasing.
struct Factorization {
    u64 n = 1;
    std::vector<PrimePower> factors;

    u64 product() const {
        u64 r = 1;
        for (auto [p, e] : factors)
            for (int i = 0; i < e; ++i) r *= p;
        return r;
    }
    /// Exponent of p in n (0 if p does not divide n).
    int order(u64 p) const {
        for (auto [q, e] : factors)
            if (q == p) return e;
        return 0;
    }
    bool squarefree() const {
        return std::all_of(factors.begin(), factors.end(),
                           [](const PrimePower& f) { return f.exponent == 1; });
    }
};

inline u64 gcd(u64 a, u64 b) { return std::gcd(a, b); }
inline u64 lcm(u64 a, u64 b) { return a / std::gcd(a, b) * b; }
inline u64 abs_u(i64 x) { return x < 0 ? u64(0) - u64(x) : u64(x); }

/// Non-negative residue of x mod m.
inline u64 mod_floor(i64 x, u64 m) {
    i64 r = x % i64(m);
    return u64(r < 0 ? r + i64(m) : r);
}

inline u64 mul_mod(u64 a, u64 b, u64 m) { return u64(u128(a) * b % m); }

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
    if (m == 1) return 0;
    u64 r = 1;
    base %= m;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    return r;
}

inline u64 ipow(u64 b, int e) {
    u64 r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Inverse of a mod m; requires gcd(a, m) = 1.
inline u64 inv_mod(u64 a, u64 m) {
    i64 t = 0, nt = 1;
    i64 r = i64(m), nr = i64(a % m);
    while (nr) {
        i64 q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw std::invalid_argument("inv_mod: not invertible");
    return u64(t < 0 ? t + i64(m) : t);
}

namespace detail {

inline bool mr_witness(u64 n, u64 a, u64 d, int s) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < s; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;
}

inline u64 pollard_brent(u64 n) {
    if (n % 2 == 0) return 2;
    for (u64 c = 1;; ++c) {
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        const u64 m = 128;
        u64 r = 1;
        auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

}  // namespace detail

/// Deterministic Miller-Rabin; exact for every n < 2^64.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (detail::mr_witness(n, a, d, s)) return false;
    return true;
}

namespace detail {
inline void rho_split(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    rho_split(d, out);
    rho_split(n / d, out);
}
}  // namespace detail

inline Factorization factorize(u64 n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be positive");
    Factorization f;
    f.n = n;
    auto push = [&](u64 p) {
        if (!f.factors.empty() && f.factors.back().prime == p)
            ++f.factors.back().exponent;
        else
            f.factors.push_back({p, 1});
    };
    constexpr u64 kTrialLimit = 1'000'000;
    for (u64 p = 2; p * p <= n && p <= kTrialLimit; p += (p == 2 ? 1 : 2)) {
        while (n % p == 0) {
            push(p);
            n /= p;
        }
    }
    if (n > 1) {
        std::vector<u64> rest;
        detail::rho_split(n, rest);
        std::sort(rest.begin(), rest.end());
        for (u64 p : rest) push(p);
    }
    return f;
}

inline u64 euler_phi(const Factorization& f) {
    u64 r = 1;
    for (auto [p, e] : f.factors) r *= (p - 1) * ipow(p, e - 1);
    return r;
}
inline u64 euler_phi(u64 n) { return euler_phi(factorize(n)); }

inline int moebius(const Factorization& f) {
    if (!f.squarefree()) return 0;
    return f.factors.size() % 2 ? -1 : 1;
}
inline int moebius(u64 n) { return moebius(factorize(n)); }

inline bool is_squarefree(u64 n) { return factorize(n).squarefree(); }

/// All positive divisors, ascending.
inline std::vector<u64> divisors(const Factorization& f) {
    std::vector<u64> d{1};
    for (auto [p, e] : f.factors) {
        const std::size_t base = d.size();
        u64 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) d.push_back(d[i] * pk);
        }
    }
    std::sort(d.begin(), d.end());
    return d;
}
inline std::vector<u64> divisors(u64 n) { return divisors(factorize(n)); }

/// Product of p^a over p^a || n with p | m.
inline u64 part_dividing(u64 n, u64 m) {
    u64 r = 1;
    for (auto [p, e] : factorize(n).factors)
        if (m % p == 0) r *= ipow(p, e);
    return r;
}

/// Linear sieve of phi and mu on [0, limit]. Used by hot loops and oracles.
class ArithmeticTable {
public:
    explicit ArithmeticTable(std::size_t limit) : phi_(limit + 1), mu_(limit + 1), lpf_(limit + 1) {
        if (limit >= 1) {
            phi_[1] = 1;
            mu_[1] = 1;
        }
        std::vector<std::uint32_t> primes;
        for (std::size_t i = 2; i <= limit; ++i) {
            if (lpf_[i] == 0) {
                lpf_[i] = std::uint32_t(i);
                phi_[i] = std::uint32_t(i - 1);
                mu_[i] = -1;
                primes.push_back(std::uint32_t(i));
            }
            for (std::uint32_t p : primes) {
                std::size_t ip = i * p;
                if (p > lpf_[i] || ip > limit) break;
                lpf_[ip] = p;
                if (i % p == 0) {
                    phi_[ip] = phi_[i] * p;
                    mu_[ip] = 0;
                } else {
                    phi_[ip] = phi_[i] * (p - 1);
                    mu_[ip] = std::int8_t(-mu_[i]);
                }
            }
        }
    }
    std::size_t limit() const { return phi_.size() - 1; }
    std::uint32_t phi(std::size_t n) const { return phi_[n]; }
    int mu(std::size_t n) const { return mu_[n]; }
    std::uint32_t least_prime_factor(std::size_t n) const { return lpf_[n]; }
    const std::uint32_t* phi_data() const { return phi_.data(); }
    const std::int8_t* mu_data() const { return mu_.data(); }

private:
    std::vector<std::uint32_t> phi_;
    std::vector<std::int8_t> mu_;
    std::vector<std::uint32_t> lpf_;
};

}  // namespace hlx
