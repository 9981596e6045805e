#pragma once

/**
 * @file gausssums.hpp
 * @brief Gauss sums tau(chi) and twisted Ramanujan sums c_chi(m).
 *
 *   c_chi(m) = sum_{h=1}^{q} chi(h) e(hm/q),   tau(chi) = c_chi(1).
 *
 * Direct sums accumulate multiplicities of each root of unity exactly and
 * only convert to floating point at the end when the common order is at most
 * 2^20. Closed forms reduce to the primitive character inducing chi.
 */

#include <complex>
#include <vector>

#include "characters.hpp"

namespace hlx {

using cplx = std::complex<double>;

enum class GaussMethod { direct, closed_form };

struct GaussSumValue {
    std::string label;
    cplx value;
    GaussMethod method = GaussMethod::direct;
};

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
public:
    void add(cplx x) {
        add_part(re_, cre_, x.real());
        add_part(im_, cim_, x.imag());
    }
    cplx value() const { return {re_ + cre_, im_ + cim_}; }

private:
    static void add_part(double& s, double& c, double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

/// Sum of roots of unity e(j/M) with integer multiplicities.
class CyclotomicSum {
public:
    static constexpr u64 kExactOrderLimit = u64(1) << 20;

    explicit CyclotomicSum(u64 order) : order_(order) {
        if (order_ <= kExactOrderLimit) counts_.assign(order_, 0);
    }

    void add(u64 j, i64 weight = 1) {
        j %= order_;
        if (!counts_.empty())
            counts_[j] += weight;
        else
            fallback_.add(double(weight) * RootOfUnity::unit_root(j, order_));
    }

    bool exact() const { return !counts_.empty(); }

    cplx value() const {
        if (counts_.empty()) return fallback_.value();
        CompensatedSum s;
        for (u64 j = 0; j < order_; ++j)
            if (counts_[j]) s.add(double(counts_[j]) * RootOfUnity::unit_root(j, order_));
        return s.value();
    }

private:
    u64 order_;
    std::vector<i64> counts_;
    CompensatedSum fallback_;
};

/// c_chi(m) by summation over h = 1..q.
inline cplx c_chi_direct(const DirichletCharacter& chi, i64 m) {
    const u64 q = chi.modulus();
    const u64 n = chi.order();
    const u64 big = lcm(n, q);
    CyclotomicSum sum(big);
    const u64 mm = mod_floor(m, q);
    for (u64 h = 1; h <= q; ++h) {
        auto v = chi.evaluate(i64(h));
        if (v.zero) continue;
        const u64 chi_part = v.k * (big / v.order);
        const u64 exp_part = mul_mod(h % q, mm, q) * (big / q);
        sum.add(chi_part + exp_part);
    }
    return sum.value();
}

inline cplx tau(const DirichletCharacter& chi) { return c_chi_direct(chi, 1); }

inline GaussSumValue gauss_sum(const DirichletCharacter& chi) {
    return {chi.label(), tau(chi), GaussMethod::direct};
}

/// tau(chi) for chi mod k from its primitive part: mu(k/r) chi*(k/r) tau(chi*).
inline cplx tau_induced(const DirichletCharacter& chi) {
    const u64 k = chi.modulus();
    const u64 r = chi.conductor();
    if (k % r != 0) throw std::invalid_argument("tau_induced: conductor does not divide modulus");
    const int mu = moebius(k / r);
    if (mu == 0) return {0.0, 0.0};
    const auto star = chi.primitive_part();
    return double(mu) * star.value(i64(k / r)) * tau(star);
}

/// Closed form of c_chi(m): zero unless r | q1 = q/(q,|m|), otherwise
///   conj(chi*)(m/(q,|m|)) * phi(q)/phi(q1) * mu(q1/r) * chi*(q1/r) * tau(chi*).
inline cplx c_chi_closed(const DirichletCharacter& chi, i64 m) {
    const u64 q = chi.modulus();
    const u64 r = chi.conductor();
    const u64 g = gcd(q, abs_u(m));  // (q, 0) = q
    const u64 q1 = q / g;
    if (q1 % r != 0) return {0.0, 0.0};
    const int mu = moebius(q1 / r);
    if (mu == 0) return {0.0, 0.0};
    const auto star = chi.primitive_part();
    const i64 mred = m / i64(g);
    const cplx lead = std::conj(star.value(mred));
    const double ratio = double(euler_phi(q)) / double(euler_phi(q1));
    return lead * ratio * double(mu) * star.value(i64(q1 / r)) * tau(star);
}

}  // namespace hlx
