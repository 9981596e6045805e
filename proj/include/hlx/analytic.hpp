#pragma once

/**
 * @file analytic.hpp
 * @brief Complex Gamma, beta integrals, pair sums I and I', T(rho, eta), and
 *        the Deuring-Heilbronn bound.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

#include "gausssums.hpp"

namespace hlx {

/// rho = beta + i gamma = 1 - delta + i gamma.
class ZeroPoint {
public:
    ZeroPoint(double beta, double gamma) : beta_(beta), gamma_(gamma) {
        if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("ZeroPoint: beta must lie in (0, 1]");
    }
    static ZeroPoint from_delta(double delta, double gamma) { return ZeroPoint(1 - delta, gamma); }
    static ZeroPoint pole() { return ZeroPoint(1, 0); }

    double beta() const { return beta_; }
    double gamma() const { return gamma_; }
    double delta() const { return 1 - beta_; }
    cplx rho() const { return {beta_, gamma_}; }
    ZeroPoint conj() const { return ZeroPoint(beta_, -gamma_); }

private:
    double beta_;
    double gamma_;
};

namespace detail {

inline bool is_nonpositive_integer(cplx s) {
    return s.imag() == 0 && s.real() <= 0 && std::floor(s.real()) == s.real();
}

/// Lanczos (g = 7, n = 9) for Re z >= 1/2.
inline cplx lanczos_gamma(cplx z) {
    static constexpr double g = 7;
    static constexpr double p[] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                   771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    z -= 1.0;
    cplx a = p[0];
    for (int i = 1; i < 9; ++i) a += p[i] / (z + double(i));
    const cplx t = z + g + 0.5;
    const cplx log_val = 0.5 * std::log(2 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
    return std::exp(log_val);
}

}  // namespace detail

/// Gamma(s) for complex s; relative error about 1e-13 for |s| <= 100.
inline cplx complex_gamma(cplx s) {
    if (detail::is_nonpositive_integer(s)) throw std::invalid_argument("complex_gamma: pole at nonpositive integer");
    if (s.real() < 0.5) {
        const cplx pi = std::numbers::pi;
        return pi / (std::sin(pi * s) * detail::lanczos_gamma(1.0 - s));
    }
    return detail::lanczos_gamma(s);
}

/**
 * log Gamma(s) on the branch continuous in C minus the nonpositive real axis,
 * by upward recurrence and the Stirling series.
 */
inline cplx log_gamma(cplx s) {
    if (detail::is_nonpositive_integer(s)) throw std::invalid_argument("log_gamma: pole at nonpositive integer");
    cplx shift = 0;
    while (std::abs(s) < 15 || s.real() < 8) {
        shift += std::log(s);
        s += 1.0;
    }
    cplx r = (s - 0.5) * std::log(s) - s + 0.5 * std::log(2 * std::numbers::pi);
    const cplx inv = 1.0 / s, inv2 = inv * inv;
    cplx pw = inv;
    for (int k = 1; k <= 12; ++k) {
        r += boost::math::bernoulli_b2n<double>(k) / double(2 * k * (2 * k - 1)) * pw;
        pw *= inv2;
    }
    return r - shift;
}

struct BetaCheck {
    cplx quadrature;
    cplx formula;
    double difference;
    double quadrature_error;  ///< error estimate reported by the integrator
};

/// int_0^1 x^{s-1} (1-x)^{w-1} dx by tanh-sinh quadrature vs Gamma(s) Gamma(w) / Gamma(s+w).
inline BetaCheck beta_check(cplx s, cplx w) {
    if (!(s.real() > 0 && w.real() > 0)) throw std::invalid_argument("beta_check: Re s and Re w must be positive");
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    auto integrand = [&](double x, double xc) {
        // xc is the signed distance to the nearer endpoint
        const double left = xc < 0 ? -xc : x;
        const double right = xc < 0 ? 1 - x : xc;
        return std::exp((s - 1.0) * std::log(left) + (w - 1.0) * std::log(right));
    };
    double err_re = 0, err_im = 0;
    const double re = integrator.integrate([&](double x, double xc) { return integrand(x, xc).real(); }, 0.0, 1.0,
                                           1e-13, &err_re);
    const double im = integrator.integrate([&](double x, double xc) { return integrand(x, xc).imag(); }, 0.0, 1.0,
                                           1e-13, &err_im);
    BetaCheck r;
    r.quadrature = {re, im};
    r.formula = complex_gamma(s) * complex_gamma(w) / complex_gamma(s + w);
    r.difference = std::abs(r.quadrature - r.formula);
    r.quadrature_error = std::hypot(err_re, err_im);
    return r;
}

namespace detail {

/// sum_{k = lo+1}^{hi} f(k) with a Neumaier accumulator.
template <class F>
cplx compensated_range_sum(i64 lo, i64 hi, F&& f) {
    CompensatedSum sum;
    for (i64 k = lo + 1; k <= hi; ++k) sum.add(f(k));
    return sum.value();
}

inline cplx power(double base, cplx exponent) { return std::exp(exponent * std::log(base)); }

}  // namespace detail

/// sum over k in (lo, hi] of k^{rho1-1} (m-k)^{rho2-1}; terms with m-k <= 0 are excluded.
inline cplx pair_sum_window(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, i64 lo, i64 hi) {
    hi = std::min(hi, m - 1);
    if (hi <= lo) return {0, 0};
    const cplx a = r1.rho() - 1.0, b = r2.rho() - 1.0;
    return detail::compensated_range_sum(std::max<i64>(lo, 0), hi, [&](i64 k) {
        return std::exp(a * std::log(double(k)) + b * std::log(double(m - k)));
    });
}

/// I(rho1, rho2, m) = sum_{k + l = m, k, l in (X1, X]} k^{rho1-1} l^{rho2-1}.
inline cplx pair_sum_exact(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, double X1, double X) {
    if (!(X1 < X)) throw std::invalid_argument("pair_sum_exact: need X1 < X");
    const i64 x1 = i64(std::floor(X1)), x = i64(std::floor(X));
    // k in (x1, x] and m - k in (x1, x]  <=>  k in (max(x1, m - x - 1), min(x, m - x1 - 1)]
    const i64 lo = std::max(x1, m - x - 1);
    const i64 hi = std::min(x, m - x1 - 1);
    return pair_sum_window(r1, r2, m, lo, hi);
}

/// I'(rho1, rho2, m) = sum_{k - l = m, k, l in (X1, X]} k^{rho1-1} l^{conj(rho2)-1}.
inline cplx pair_sum_exact_twin(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, double X1, double X) {
    if (!(X1 < X)) throw std::invalid_argument("pair_sum_exact_twin: need X1 < X");
    const i64 x1 = i64(std::floor(X1)), x = i64(std::floor(X));
    // k in (x1, x] and k - m in (x1, x]
    const i64 lo = std::max(x1, x1 + m);
    const i64 hi = std::min(x, x + m);
    const cplx a = r1.rho() - 1.0, b = std::conj(r2.rho()) - 1.0;
    if (hi <= lo) return {0, 0};
    return detail::compensated_range_sum(lo, hi, [&](i64 k) {
        return std::exp(a * std::log(double(k)) + b * std::log(double(k - m)));
    });
}

/// I' on the window X/4 < k <= X - m: sum k^{rho1-1} (k+m)^{conj(rho2)-1}.
inline cplx pair_sum_twin_quarter_window(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, double X) {
    const i64 lo = i64(std::floor(X / 4)), hi = i64(std::floor(X)) - m;
    if (hi <= lo) return {0, 0};
    const cplx a = r1.rho() - 1.0, b = std::conj(r2.rho()) - 1.0;
    return detail::compensated_range_sum(lo, hi, [&](i64 k) {
        return std::exp(a * std::log(double(k)) + b * std::log(double(k + m)));
    });
}

/// Gamma(rho1) Gamma(rho2) / Gamma(rho1 + rho2).
inline cplx gamma_factor(const ZeroPoint& r1, const ZeroPoint& r2) {
    return std::exp(log_gamma(r1.rho()) + log_gamma(r2.rho()) - log_gamma(r1.rho() + r2.rho()));
}

/// Gamma(rho1) Gamma(rho2) / Gamma(rho1 + rho2) m^{rho1+rho2-1}, valid for m >= 2Y, |gamma_i| <= Y.
inline cplx pair_sum_asymptotic(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, double Y) {
    if (Y < 1) throw std::invalid_argument("pair_sum_asymptotic: Y must be >= 1");
    if (std::max(std::abs(r1.gamma()), std::abs(r2.gamma())) > Y)
        throw std::invalid_argument("pair_sum_asymptotic: |gamma| exceeds Y");
    if (double(m) < 2 * Y) throw std::invalid_argument("pair_sum_asymptotic: need m >= 2Y");
    return gamma_factor(r1, r2) * detail::power(double(m), r1.rho() + r2.rho() - 1.0);
}

/// Same main term with Y = max(|gamma1|, |gamma2|, 1).
inline cplx pair_sum_asymptotic(const ZeroPoint& r1, const ZeroPoint& r2, i64 m) {
    return pair_sum_asymptotic(r1, r2, m, std::max({std::abs(r1.gamma()), std::abs(r2.gamma()), 1.0}));
}

struct TSumResult {
    cplx value;
    bool bound_applicable = false;  ///< |gamma|/X1 <= |eta| <= 1/2
    double ratio = 0;               ///< |T| |eta| X1^delta when applicable
};

/// T(rho, eta) = sum_{X1 < n <= X} n^{rho-1} e(n eta).
inline TSumResult t_sum(const ZeroPoint& r, double eta, double X1, double X) {
    if (std::abs(eta) > 0.5) throw std::invalid_argument("t_sum: |eta| must be <= 1/2");
    const i64 lo = i64(std::floor(X1)), hi = i64(std::floor(X));
    const cplx a = r.rho() - 1.0;
    const long double e = eta;
    TSumResult out;
    out.value = detail::compensated_range_sum(lo, hi, [&](i64 n) {
        long double frac = (long double)n * e;
        frac -= std::floor(frac);
        const double phase = double(2 * std::numbers::pi_v<long double> * frac);
        return std::exp(a * std::log(double(n)) + cplx(0, phase));
    });
    out.bound_applicable = std::abs(r.gamma()) / X1 <= std::abs(eta) && eta != 0;
    if (out.bound_applicable) out.ratio = std::abs(out.value) * std::abs(eta) * std::pow(X1, r.delta());
    return out;
}

struct DecayReport {
    cplx value;
    double ratio;  ///< |I'| sqrt(max(|gamma1|, |gamma2|, 1)) / X^{1 - delta1 - delta2}
};

/// Decay of I' over the X/4 < k <= X - m window, for m in [X/4, X/2].
inline DecayReport iprime_decay_check(const ZeroPoint& r1, const ZeroPoint& r2, i64 m, double X) {
    if (double(m) < X / 4 || double(m) > X / 2) throw std::invalid_argument("iprime_decay_check: m must lie in [X/4, X/2]");
    DecayReport d;
    d.value = pair_sum_twin_quarter_window(r1, r2, m, X);
    const double M = std::max({std::abs(r1.gamma()), std::abs(r2.gamma()), 1.0});
    d.ratio = std::abs(d.value) * std::sqrt(M) / std::pow(X, 1 - r1.delta() - r2.delta());
    return d;
}

struct DecaySup {
    double sup_ratio = 0;
    double gamma1 = 0, gamma2 = 0;  ///< grid point attaining the sup
    std::vector<double> ratios;     ///< one per grid point, in input order
};

/// sup of the decay ratio over a (gamma1, gamma2) grid at fixed betas.
inline DecaySup iprime_decay_sup(double beta1, double beta2, const std::vector<std::pair<double, double>>& grid,
                                 i64 m, double X) {
    DecaySup out;
    for (const auto& [g1, g2] : grid) {
        const double r = iprime_decay_check(ZeroPoint(beta1, g1), ZeroPoint(beta2, g2), m, X).ratio;
        out.ratios.push_back(r);
        if (r >= out.sup_ratio) {
            out.sup_ratio = r;
            out.gamma1 = g1;
            out.gamma2 = g2;
        }
    }
    return out;
}

struct DhBound {
    double Y;
    double bound;
};

/// Deuring-Heilbronn lower bound for delta_1; pure formula evaluation.
inline DhBound dh_lower_bound(double delta, double gamma, u64 q1, u64 q2, u64 k, double eps) {
    if (!(delta > 0 && delta < 1.0 / 7)) throw std::invalid_argument("dh_lower_bound: need 0 < delta < 1/7");
    if (!(eps > 0)) throw std::invalid_argument("dh_lower_bound: need eps > 0");
    if (q1 == 0 || q2 == 0 || k == 0) throw std::invalid_argument("dh_lower_bound: moduli must be positive");
    const double g2 = (std::abs(gamma) + 2) * (std::abs(gamma) + 2);
    const double Y = std::pow(double(q1) * double(q1) * double(q2) * double(k) * g2, 3.0 / 8.0);
    const double expo = (1 + eps) * delta / (1 - 6 * delta);
    const double bound = (1 - eps) * (1 - 6 * delta) * std::numbers::ln2 * std::pow(Y, -expo) / std::log(Y);
    return {Y, bound};
}

}  // namespace hlx
