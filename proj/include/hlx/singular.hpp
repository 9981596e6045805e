#pragma once

/**
 * @file singular.hpp
 * @brief Classical and generalized singular series.
 *
 * For primitive chi1 mod r1, chi2 mod r2 and q0 = [r1, r2]:
 *
 *   S(chi1, chi2, m) = sum_{t >= 1} b(q0 t),
 *   b(q) = phi(q)^-2 c_{chi1 chi2 chi_0,q}(-m) tau(~chi1 chi_0,q) tau(~chi2 chi_0,q)
 *
 * (twin variant: chi1 ~chi2 in the Ramanujan sum and the last tau conjugated).
 * Three routes are provided: the partial series (each term from the
 * induced-Gauss-sum and twisted-Ramanujan-sum identities), the value of b(q0)
 * from finite sums times an Euler product, and the closed form in terms of
 * the decomposition (l1, l2, d, e, f, r*, r').
 */

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "gausssums.hpp"

namespace hlx {

enum class Variant { goldbach, twin };

inline std::string to_string(Variant v) { return v == Variant::goldbach ? "goldbach" : "twin"; }

inline Variant parse_variant(const std::string& s) {
    if (s == "goldbach") return Variant::goldbach;
    if (s == "twin") return Variant::twin;
    throw std::invalid_argument("unknown variant '" + s + "' (expected goldbach or twin)");
}

// ---------------------------------------------------------------------------
// Euler products over primes, accelerated with the prime zeta function.

namespace detail {

inline std::vector<u64> small_primes(u64 limit) {
    std::vector<bool> comp(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) comp[j] = true;
    }
    return out;
}

/// zeta(s) - 1 for real s >= 2 by Euler-Maclaurin from n = 16.
inline double zeta_minus_one(double s) {
    constexpr int N = 16;
    double sum = 0;
    for (int n = N - 1; n >= 2; --n) sum += std::pow(double(n), -s);
    const double nn = N;
    sum += std::pow(nn, 1 - s) / (s - 1) + 0.5 * std::pow(nn, -s);
    double rising = s;  // s (s+1) ... (s+2j-2)
    double fact = 2;    // (2j)!
    double npow = std::pow(nn, -s - 1);
    for (int j = 1; j <= 10; ++j) {
        const double term = boost::math::bernoulli_b2n<double>(j) / fact * rising * npow;
        sum += term;
        if (std::abs(term) < 1e-30) break;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= (2 * j + 1) * (2 * j + 2);
        npow /= nn * nn;
    }
    return sum;
}

/// P(k) - sum_{p <= B} p^-k = sum_{p > B} p^-k, via P(k) = sum_n mu(n)/n log zeta(nk).
inline double prime_zeta_tail(int k, const std::vector<u64>& primes_to_b) {
    double p_k = 0;
    for (int n = 1; n * k <= 90; ++n) {
        const int mu = moebius(u64(n));
        if (mu == 0) continue;
        p_k += double(mu) / n * std::log1p(zeta_minus_one(double(n * k)));
    }
    double head = 0;
    for (auto it = primes_to_b.rbegin(); it != primes_to_b.rend(); ++it) head += std::pow(double(*it), -k);
    return p_k - head;
}

struct EulerProductResult {
    double value;
    double error_bound;
};

/// prod_{p > 2} prod_j (1 - alpha_j/p)^{e_j}; requires sum_j e_j alpha_j = 0.
inline EulerProductResult odd_euler_product(const std::vector<std::pair<std::complex<double>, int>>& factors) {
    constexpr u64 B = 1000;
    static const std::vector<u64> primes = small_primes(B);
    auto local = [&](double p) {
        std::complex<double> f = 1;
        for (auto [a, e] : factors) f *= std::pow(1.0 - a / p, double(e));
        return f.real();
    };
    double log_head = 0;
    for (u64 p : primes)
        if (p > 2) log_head += std::log(local(double(p)));
    // log prod_{p > B} = -sum_{k >= 2} c_k/k P_B(k), c_k = sum_j e_j alpha_j^k
    double log_tail = 0, error = 0;
    for (int k = 2;; ++k) {
        std::complex<double> ck = 0;
        for (auto [a, e] : factors) ck += double(e) * std::pow(a, k);
        const double bound = std::abs(ck) / k * std::pow(double(B), 1 - k) / (k - 1);
        if (bound < 1e-20) {
            // remaining terms decay at least geometrically with ratio max|alpha|/B
            double amax = 0;
            for (auto [a, e] : factors) amax = std::max(amax, std::abs(a));
            error = bound / (1 - amax / double(B));
            break;
        }
        log_tail -= ck.real() / k * prime_zeta_tail(k, primes);
    }
    const double value = std::exp(log_head + log_tail);
    return {value, value * (error + 1e-15)};
}

struct EulerConstants {
    double c2;            ///< prod_{p>2} (1 - 1/(p-1)^2)
    double abs_odd;       ///< prod_{p>2} (1 + 1/(p-1)^2)
    double b_const;       ///< prod_{p>2} (1 + 2/(p(p-2)))
    double error_bound;   ///< absolute bound on the error of each value
};

inline const EulerConstants& euler_constants() {
    static const EulerConstants k = [] {
        using c = std::complex<double>;
        auto c2 = odd_euler_product({{c(2, 0), 1}, {c(1, 0), -2}});
        auto ab = odd_euler_product({{c(1, 1), 1}, {c(1, -1), 1}, {c(1, 0), -2}});
        auto bb = odd_euler_product({{c(1, 1), 1}, {c(1, -1), 1}, {c(2, 0), -1}});
        return EulerConstants{c2.value, ab.value, bb.value,
                              std::max({c2.error_bound, ab.error_bound, bb.error_bound})};
    }();
    return k;
}

/// Shared phi/mu table, grown on demand.
inline std::shared_ptr<const ArithmeticTable> arithmetic_table(std::size_t limit) {
    static std::mutex mu;
    static std::shared_ptr<const ArithmeticTable> table;
    std::lock_guard lock(mu);
    if (!table || table->limit() < limit)
        table = std::make_shared<const ArithmeticTable>(std::max<std::size_t>(limit, 1 << 16));
    return table;
}

/// sum_{k > K, k squarefree} 1/phi(k)^2, as a certified upper bound.
inline double squarefree_phi2_tail(u64 K) {
    static std::mutex mu;
    static std::vector<double> prefix{0.0};  // prefix[k] = sum_{j <= k}
    std::lock_guard lock(mu);
    if (prefix.size() <= K) {
        const std::size_t old = prefix.size();
        const std::size_t target = std::max<std::size_t>(K + 1, 2 * old);
        auto t = arithmetic_table(target);
        prefix.resize(target);
        for (std::size_t k = old; k < target; ++k) {
            double term = 0;
            if (t->mu(k) != 0) {
                const double ph = t->phi(k);
                term = 1.0 / (ph * ph);
            }
            prefix[k] = prefix[k - 1] + term;
        }
    }
    const auto& ec = euler_constants();
    const double full = 2.0 * ec.abs_odd;  // p = 2 contributes 1 + 1/(2-1)^2
    return std::max(0.0, full - prefix[K]) + 4 * ec.error_bound + 1e-13;
}

}  // namespace detail

inline double twin_prime_constant() { return detail::euler_constants().c2; }

/// B = prod_{p>2} (1 + 2/(p(p-2))).
inline double constant_b() { return detail::euler_constants().b_const; }

/**
 * prod_{p not dividing q0} f_p with f_p = 1 - 1/(p-1)^2 for p not dividing m and
 * 1 + 1/(p-1) for p | m. With absolute=true, f_p = 1 + 1/(p-1)^2 for p not dividing m.
 */
inline double euler_factor(i64 m, u64 q0, bool absolute = false) {
    if (m == 0) throw std::invalid_argument("euler_factor: m must be nonzero");
    const u64 am = abs_u(m);
    const auto& ec = detail::euler_constants();
    double two;
    if (q0 % 2 == 0)
        two = 1;
    else if (am % 2 == 0 || absolute)
        two = 2;
    else
        return 0.0;
    double v = two * (absolute ? ec.abs_odd : ec.c2);
    auto fm = factorize(am);
    auto fq = factorize(q0);
    auto divides_q0 = [&](u64 p) { return q0 % p == 0; };
    std::vector<u64> ps;
    for (auto [p, e] : fm.factors) ps.push_back(p);
    for (auto [p, e] : fq.factors)
        if (am % p != 0) ps.push_back(p);
    for (u64 p : ps) {
        if (p == 2) continue;
        const double pm1 = double(p - 1);
        const double generic = absolute ? 1 + 1 / (pm1 * pm1) : 1 - 1 / (pm1 * pm1);
        v /= generic;
        if (!divides_q0(p)) v *= double(p) / pm1;  // then p | m
    }
    return v;
}

/// Classical singular series S(m) with certified absolute precision.
inline double classical_singular_series(i64 m, double abs_precision = 1e-12) {
    if (m < 1) throw std::invalid_argument("classical_singular_series: m must be >= 1");
    if (abs_precision < 1e-14) throw std::invalid_argument("classical_singular_series: abs_precision must be >= 1e-14");
    const double v = euler_factor(m, 1);
    const double err = detail::euler_constants().error_bound * std::max(1.0, v) * 4;
    if (err > abs_precision) throw std::runtime_error("classical_singular_series: requested precision not attainable");
    return v;
}

// ---------------------------------------------------------------------------

struct PairDecomposition {
    u64 r1 = 1, r2 = 1;
    u64 g = 1;              ///< (r1, r2)
    u64 q0 = 1;             ///< [r1, r2]
    u64 l1 = 1, l2 = 1;
    u64 e = 1, f = 1, d = 1;
    u64 rstar = 1;          ///< conductor of chi1 chi2 (twin: chi1 ~chi2)
    bool rprime_integral = true;
    u64 rprime = 1;
    u64 q1 = 1;             ///< q0 / (q0, |m|)
};

enum class VanishReason {
    none,
    l1_not_squarefree,
    l2_not_squarefree,
    chi1_at_l2_zero,
    chi2_at_l1_zero,
    m_shares_l1,
    m_shares_l2,
    rprime_nonintegral,
    rprime_not_dividing,
    rstar_not_dividing_q1,
    mu_zero,
    chistar_zero,
    euler_factor_zero,
};

inline std::string to_string(VanishReason r) {
    switch (r) {
        case VanishReason::none: return "";
        case VanishReason::l1_not_squarefree: return "l1_not_squarefree";
        case VanishReason::l2_not_squarefree: return "l2_not_squarefree";
        case VanishReason::chi1_at_l2_zero: return "chi1_at_l2_zero";
        case VanishReason::chi2_at_l1_zero: return "chi2_at_l1_zero";
        case VanishReason::m_shares_l1: return "m_shares_l1";
        case VanishReason::m_shares_l2: return "m_shares_l2";
        case VanishReason::rprime_nonintegral: return "rprime_nonintegral";
        case VanishReason::rprime_not_dividing: return "rprime_not_dividing";
        case VanishReason::rstar_not_dividing_q1: return "rstar_not_dividing_q1";
        case VanishReason::mu_zero: return "mu_zero";
        case VanishReason::chistar_zero: return "chistar_zero";
        case VanishReason::euler_factor_zero: return "euler_factor_zero";
    }
    return "?";
}

enum class SeriesMethod { partial_series, semi_closed, closed_form };

inline std::string to_string(SeriesMethod m) {
    switch (m) {
        case SeriesMethod::partial_series: return "partial_series";
        case SeriesMethod::semi_closed: return "semi_closed";
        case SeriesMethod::closed_form: return "closed_form";
    }
    return "?";
}

struct SingularSeriesValue {
    cplx value{0, 0};
    double A = 0;           ///< sum_t |b(q0 t)|
    double tail_bound = 0;
    cplx b_q0{0, 0};
    PairDecomposition decomposition;
    SeriesMethod method = SeriesMethod::closed_form;
    VanishReason vanish = VanishReason::none;
};

struct PartialSum {
    cplx value{0, 0};
    double tail_bound = 0;
    u64 terms = 0;          ///< number of nonzero terms summed
};

struct BoundReport {
    double smod = 0;            ///< |S(chi1, chi2, m)|
    double classical = 0;       ///< S(m)
    double A = 0;
    double U = 1;
    bool classical_ok = true;   ///< |S| <= S(m)
    bool a_applicable = true;   ///< p = 2 Euler factor nonzero, so A <= B|S| is meaningful
    bool a_ok = true;           ///< A <= B |S| (true when not applicable)
    bool large = false;         ///< |S| > (sqrt 3 / 2) S(m)
    bool relations_hold = false;
    bool dichotomy_ok = true;   ///< large implies relations_hold
    double log2_reading = 0;    ///< S(m) (log_2 U)^2 / sqrt U
    double loglog_reading = 0;  ///< S(m) (log log U)^2 / sqrt U, NaN when U <= e
    bool log2_ok = true;
    bool loglog_ok = true;
    bool ok() const { return classical_ok && a_ok && dichotomy_ok; }
};

/**
 * A pair of primitive characters with everything that does not depend on m
 * precomputed. Methods are const and safe to call concurrently.
 */
class SingularPair {
public:
    SingularPair(DirichletCharacter chi1, DirichletCharacter chi2, Variant variant)
        : chi1_(std::move(chi1)), chi2_(std::move(chi2)), variant_(variant),
          chi1_bar_(chi1_.conjugate()), chi2_bar_(chi2_.conjugate()),
          psi_(product(chi1_, variant == Variant::twin ? chi2_bar_ : chi2_)),
          star_(psi_.primitive_part()) {
        if (!chi1_.is_primitive() || !chi2_.is_primitive())
            throw std::invalid_argument("SingularPair: characters must be primitive");
        r1_ = chi1_.modulus();
        r2_ = chi2_.modulus();
        q0_ = lcm(r1_, r2_);
        tau1_bar_ = tau(chi1_bar_);
        tau2_bar_ = tau(chi2_bar_);
        tau_star_ = tau(star_);
        // direct finite sums at q = q0 (m independent part)
        auto a = chi1_bar_.induce(q0_);
        auto b = chi2_bar_.induce(q0_);
        tau_a_q0_ = tau(a);
        tau_b_q0_ = tau(b);
        psi_q0_ = std::make_shared<DirichletCharacter>(psi_.induce(q0_));
    }

    const DirichletCharacter& chi1() const { return chi1_; }
    const DirichletCharacter& chi2() const { return chi2_; }
    const DirichletCharacter& chistar() const { return star_; }
    Variant variant() const { return variant_; }
    u64 q0() const { return q0_; }

    PairDecomposition decompose(i64 m) const {
        PairDecomposition p;
        p.r1 = r1_;
        p.r2 = r2_;
        p.g = gcd(r1_, r2_);
        p.q0 = q0_;
        p.l1 = r1_ / p.g;
        p.l2 = r2_ / p.g;
        const u64 am = abs_u(m);
        p.e = gcd(am, p.g);
        p.f = part_dividing(p.g, am == 0 ? p.g : am);
        p.d = p.g / p.f;
        p.rstar = star_.modulus();
        p.rprime_integral = p.rstar % (p.l1 * p.l2) == 0;
        p.rprime = p.rprime_integral ? p.rstar / (p.l1 * p.l2) : 0;
        p.q1 = q0_ / gcd(q0_, am);
        return p;
    }

    /// b(q) from direct finite sums; requires q0 | q.
    cplx coefficient(u64 q, i64 m) const {
        if (q % q0_ != 0) throw std::invalid_argument("coefficient_b: [r1, r2] must divide q");
        cplx ta, tb, c;
        if (q == q0_) {
            ta = tau_a_q0_;
            tb = tau_b_q0_;
            c = c_chi_direct(*psi_q0_, -m);
        } else {
            ta = tau(chi1_bar_.induce(q));
            tb = tau(chi2_bar_.induce(q));
            c = c_chi_direct(psi_.induce(q), -m);
        }
        if (variant_ == Variant::twin) tb = std::conj(tb);
        const double ph = double(euler_phi(q));
        return c * ta * tb / (ph * ph);
    }

    /// Route (a): b(q0) from finite sums times the Euler product over p not dividing q0.
    SingularSeriesValue semi_closed(i64 m) const {
        check_m(m);
        SingularSeriesValue v;
        v.method = SeriesMethod::semi_closed;
        v.decomposition = decompose(m);
        v.b_q0 = coefficient(q0_, m);
        const double ef = euler_factor(m, q0_);
        v.value = v.b_q0 * ef;
        v.A = std::abs(v.b_q0) * euler_factor(m, q0_, true);
        if (ef == 0) v.vanish = VanishReason::euler_factor_zero;
        return v;
    }

    /// Route (b): closed form for b(q0) with explicit vanishing detection.
    SingularSeriesValue closed(i64 m) const {
        check_m(m);
        SingularSeriesValue v;
        v.method = SeriesMethod::closed_form;
        const auto p = decompose(m);
        v.decomposition = p;
        v.vanish = closed_vanish(p, m);
        if (v.vanish != VanishReason::none) return v;
        const u64 am = abs_u(m);
        const i64 mred = -m / i64(gcd(q0_, am));
        const u64 y = p.q1 / p.rstar;
        cplx num = tau1_bar_ * (variant_ == Variant::twin ? std::conj(tau2_bar_) : tau2_bar_) * tau_star_;
        num *= std::conj(star_.value(mred)) * double(moebius(y)) * star_.value(i64(y));
        num *= double(moebius(p.l1) * moebius(p.l2)) * chi1_bar_.value(i64(p.l2));
        num *= variant_ == Variant::twin ? chi2_.value(i64(p.l1)) : chi2_bar_.value(i64(p.l1));
        const double pl1 = double(euler_phi(p.l1)), pl2 = double(euler_phi(p.l2));
        const double den = pl1 * pl1 * pl2 * pl2 * double(euler_phi(p.d)) * double(euler_phi(p.f)) *
                           double(euler_phi(p.d * p.f / p.e));
        v.b_q0 = num / den;
        const double ef = euler_factor(m, q0_);
        v.value = v.b_q0 * ef;
        v.A = std::abs(v.b_q0) * euler_factor(m, q0_, true);
        if (ef == 0) v.vanish = VanishReason::euler_factor_zero;
        return v;
    }

    /// |b(q0)| by the modulus formula; 0 when r' is not an integer.
    double modulus_formula(i64 m) const {
        const auto p = decompose(m);
        if (!p.rprime_integral || (p.d * p.f) % p.e != 0) return 0.0;
        const double pl1 = double(euler_phi(p.l1)), pl2 = double(euler_phi(p.l2));
        return double(p.l1) / (pl1 * pl1) * double(p.l2) / (pl2 * pl2) * double(p.d) / double(euler_phi(p.d)) *
               double(p.f) / double(euler_phi(p.f)) * std::sqrt(double(p.rprime)) /
               double(euler_phi(p.d * p.f / p.e));
    }

    /**
     * Route (c): sum_{t <= T} b(q0 t), each term from tau_induced and the
     * closed twisted Ramanujan sum at modulus q0 t, with the tail bound
     * |b(q0)| sum_{h | m, (h, q0) = 1, h squarefree} (1/phi(h)) sum_{k > T/h} mu^2(k)/phi(k)^2.
     */
    PartialSum partial(i64 m, u64 T) const {
        check_m(m);
        const auto& s = series_terms(T);
        const u64 am = abs_u(m);
        const u64 rs = star_.modulus();
        const auto* table = s.table.get();
        std::vector<std::uint32_t> gtab;
        const bool small_m = am <= 4096;
        if (small_m) {
            gtab.resize(am);
            for (u64 x = 0; x < am; ++x) gtab[x] = std::uint32_t(gcd(x, am));
        }
        const FastMod mod_m{small_m ? std::uint32_t(am) : 1u};
        const FastMod mod_r{std::uint32_t(rs)};
        const auto& star_table = star_.table();
        const std::uint32_t order = std::uint32_t(s.order);
        const std::uint32_t scale = std::uint32_t(s.scale_star);
        // exponent of conj(chi*)(-m/g) for each g | m, or -1 when it vanishes
        auto conj_exponent = [&](u64 g) -> std::int32_t {
            const std::int32_t ez = star_table[mod_floor(-m / i64(g), rs)];
            return ez < 0 ? -1 : std::int32_t((order - u64(ez) * scale % order) % order);
        };
        std::vector<std::int32_t> ez_by_g;
        if (small_m) {
            ez_by_g.assign(am + 1, -1);
            for (u64 g : divisors(am)) ez_by_g[g] = conj_exponent(g);
        }
        const std::int32_t ez_one = conj_exponent(1);
        std::vector<FastMod> div_by_g;
        if (small_m) {
            div_by_g.assign(am + 1, FastMod{1});
            for (u64 g : divisors(am)) div_by_g[g] = FastMod{std::uint32_t(g)};
        }
        double sum_re = 0, sum_im = 0;  // ~10^4 terms of size <= 1: plain summation is accurate to ~1e-12
        PartialSum out;
        cplx first{0, 0};
        const auto* mu_tab = table->mu_data();
        const auto* phi_tab = table->phi_data();
        const std::uint32_t q0 = std::uint32_t(q0_);
        for (const auto& term : s.terms) {
            const std::uint32_t q = term.q;
            if (q > q0 * T) break;
            const std::uint32_t g = small_m ? gtab[mod_m.mod(q)] : std::uint32_t(gcd(q, am));
            std::uint32_t q1 = q;
            std::int32_t ez = ez_one;
            double ratio = 1.0;
            if (g != 1) {
                q1 = small_m ? div_by_g[g].div(q) : q / g;
                ez = small_m ? ez_by_g[g] : conj_exponent(g);
                ratio = double(phi_tab[q]) / double(phi_tab[q1]);
            }
            const std::uint32_t y = mod_r.div(q1);
            if (y * std::uint32_t(rs) != q1) continue;
            const std::int32_t ey = star_table[mod_r.mod(y)];
            if ((ey | ez) < 0 || mu_tab[y] == 0) continue;
            std::uint32_t exp = term.exponent + std::uint32_t(ey) * scale + std::uint32_t(ez);
            exp = exp >= order ? exp - order : exp;
            exp = exp >= order ? exp - order : exp;
            const double w = term.weight * double(mu_tab[y]) * ratio;
            const cplx& root = s.roots[exp];
            sum_re += w * root.real();
            sum_im += w * root.imag();
            if (q == q0) first = w * root;
            ++out.terms;
        }
        out.value = cplx(sum_re, sum_im) * s.constant;
        const double b0 = std::abs(first * s.constant);
        double tail = 0;
        if (b0 > 0) {
            for (u64 h : divisors(am)) {
                if (!is_squarefree(h) || gcd(h, q0_) != 1) continue;
                tail += detail::squarefree_phi2_tail(T / h) / double(euler_phi(h));
            }
        }
        out.tail_bound = b0 * tail;
        return out;
    }

    double u_statistic(i64 m) const {
        if (m == 0) throw std::invalid_argument("u_statistic: m must be nonzero");
        const u64 am = abs_u(m);
        const double g = double(gcd(r1_, r2_));
        const double a = double(r1_) / g, b = double(r2_) / g;
        return std::max({a * a, b * b, double(r1_ / gcd(am, r1_)), double(r2_ / gcd(am, r2_)),
                         double(star_.modulus())});
    }

    BoundReport bounds(i64 m, const SingularSeriesValue& v) const {
        BoundReport r;
        const double tol = 1e-9;
        r.smod = std::abs(v.value);
        r.classical = m > 0 ? euler_factor(m, 1) : euler_factor(-m, 1);
        r.A = v.A;
        r.U = u_statistic(m);
        r.classical_ok = r.smod <= r.classical * (1 + tol) + tol;
        r.a_applicable = !(q0_ % 2 != 0 && abs_u(m) % 2 != 0);
        r.a_ok = !r.a_applicable || r.A <= constant_b() * r.smod * (1 + tol) + tol;
        r.large = r.smod > std::sqrt(3.0) / 2 * r.classical * (1 + tol) + tol;
        const u64 am = abs_u(m);
        const u64 g = gcd(r1_, r2_);
        r.relations_hold = 36 % (r1_ / gcd(r1_, am)) == 0 && 36 % (r2_ / gcd(r2_, am)) == 0 &&
                           3 % (r1_ / g) == 0 && 3 % (r2_ / g) == 0 && 36 % star_.modulus() == 0;
        r.dichotomy_ok = !r.large || r.relations_hold;
        const double l2 = std::log2(r.U);
        r.log2_reading = r.classical * l2 * l2 / std::sqrt(r.U);
        r.log2_ok = r.smod <= r.log2_reading * (1 + tol) + tol;
        if (r.U > std::numbers::e) {
            const double ll = std::log(std::log(r.U));
            r.loglog_reading = r.classical * ll * ll / std::sqrt(r.U);
            r.loglog_ok = r.smod <= r.loglog_reading * (1 + tol) + tol;
        } else {
            r.loglog_reading = std::numeric_limits<double>::quiet_NaN();
            r.loglog_ok = true;
        }
        return r;
    }

private:
    /// Lemire's remainder/division by a fixed 32-bit divisor.
    struct FastMod {
        explicit FastMod(std::uint32_t d) : d(d), M(d > 1 ? ~u64(0) / d + 1 : 0) {}
        std::uint32_t mod(std::uint32_t a) const {
            if (d == 1) return 0;
            const u64 low = M * a;
            return std::uint32_t((u128(low) * d) >> 64);
        }
        std::uint32_t div(std::uint32_t a) const { return d == 1 ? a : std::uint32_t((u128(M) * a) >> 64); }
        std::uint32_t d;
        u64 M;
    };

    struct SeriesTerm {
        std::uint32_t q;
        std::uint32_t exponent;  ///< of the m independent character values, mod order
        double weight;           ///< mu(q/r1) mu(q/r2) / phi(q)^2
    };

    struct SeriesTerms {
        u64 T = 0;
        u64 order = 1;
        u64 scale_star = 1;
        cplx constant{1, 0};
        std::vector<cplx> roots;
        std::vector<SeriesTerm> terms;
        std::shared_ptr<const ArithmeticTable> table;
    };

    void check_m(i64 m) const {
        if (m == 0) throw std::invalid_argument("singular series: m must be nonzero");
    }

    VanishReason closed_vanish(const PairDecomposition& p, i64 m) const {
        const u64 am = abs_u(m);
        if (!is_squarefree(p.l1)) return VanishReason::l1_not_squarefree;
        if (!is_squarefree(p.l2)) return VanishReason::l2_not_squarefree;
        if (gcd(p.l2, r1_) != 1) return VanishReason::chi1_at_l2_zero;
        if (gcd(p.l1, r2_) != 1) return VanishReason::chi2_at_l1_zero;
        if (gcd(am, p.l1) != 1) return VanishReason::m_shares_l1;
        if (gcd(am, p.l2) != 1) return VanishReason::m_shares_l2;
        if (!p.rprime_integral) return VanishReason::rprime_nonintegral;
        if ((p.g / p.e) % p.rprime != 0) return VanishReason::rprime_not_dividing;
        if (p.q1 % p.rstar != 0) return VanishReason::rstar_not_dividing_q1;
        const u64 y = p.q1 / p.rstar;
        if (moebius(y) == 0) return VanishReason::mu_zero;
        const i64 mred = -m / i64(gcd(q0_, am));
        if (star_.evaluate(i64(y)).zero || star_.evaluate(mred).zero) return VanishReason::chistar_zero;
        return VanishReason::none;
    }

    const SeriesTerms& series_terms(u64 T) const {
        std::lock_guard lock(series_mutex_);
        if (series_ && series_->T >= T) return *series_;
        auto s = std::make_shared<SeriesTerms>();
        s->T = T;
        const u64 limit = q0_ * T;
        if (limit > u64(std::numeric_limits<std::uint32_t>::max()) / 2)
            throw std::invalid_argument("series_partial: q0 * T too large");
        s->table = detail::arithmetic_table(limit);
        s->order = lcm(lcm(chi1_.order(), chi2_.order()), star_.order());
        s->scale_star = s->order / star_.order();
        const u64 s1 = s->order / chi1_.order(), s2 = s->order / chi2_.order();
        s->roots.resize(s->order);
        for (u64 j = 0; j < s->order; ++j) s->roots[j] = RootOfUnity::unit_root(j, s->order);
        s->constant = tau1_bar_ * (variant_ == Variant::twin ? std::conj(tau2_bar_) : tau2_bar_) * tau_star_;
        const auto& t1 = chi1_.table();
        const auto& t2 = chi2_.table();
        for (u64 t = 1; t <= T; ++t) {
            const u64 q = q0_ * t;
            const u64 a1 = q / r1_, a2 = q / r2_;
            const int mu1 = s->table->mu(a1), mu2 = s->table->mu(a2);
            if (mu1 == 0 || mu2 == 0) continue;
            const std::int32_t x1 = t1[a1 % r1_], x2 = t2[a2 % r2_];
            if (x1 < 0 || x2 < 0) continue;
            // conj(chi1)(a1), and conj(chi2)(a2) or chi2(a2) for the twin variant
            u64 ex = (s->order - u64(x1) * s1 % s->order) % s->order;
            if (variant_ == Variant::twin)
                ex = (ex + u64(x2) * s2) % s->order;
            else
                ex = (ex + s->order - u64(x2) * s2 % s->order) % s->order;
            const double ph = s->table->phi(q);
            s->terms.push_back({std::uint32_t(q), std::uint32_t(ex), double(mu1 * mu2) / (ph * ph)});
        }
        series_ = s;
        return *series_;
    }

    DirichletCharacter chi1_, chi2_;
    Variant variant_;
    DirichletCharacter chi1_bar_, chi2_bar_;
    DirichletCharacter psi_;   ///< chi1 chi2 (twin: chi1 ~chi2) mod q0
    DirichletCharacter star_;  ///< its primitive part
    u64 r1_ = 1, r2_ = 1, q0_ = 1;
    cplx tau1_bar_, tau2_bar_, tau_star_;
    cplx tau_a_q0_, tau_b_q0_;
    std::shared_ptr<DirichletCharacter> psi_q0_;
    mutable std::mutex series_mutex_;
    mutable std::shared_ptr<SeriesTerms> series_;
};

// ---------------------------------------------------------------------------
// Free-function surface.

inline cplx coefficient_b(const DirichletCharacter& chi1, const DirichletCharacter& chi2, u64 q, i64 m,
                          Variant variant) {
    return SingularPair(chi1, chi2, variant).coefficient(q, m);
}

inline PartialSum series_partial(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 m, u64 T,
                                 Variant variant) {
    return SingularPair(chi1, chi2, variant).partial(m, T);
}

struct ClosedFormResult {
    SingularSeriesValue semi_closed;
    SingularSeriesValue closed;
    double modulus_formula = 0;
    bool paths_agree = true;
};

inline ClosedFormResult closed_form(const SingularPair& pair, i64 m, double tol = 1e-9) {
    ClosedFormResult r;
    r.semi_closed = pair.semi_closed(m);
    r.closed = pair.closed(m);
    r.modulus_formula = pair.modulus_formula(m);
    const double scale = std::max(1.0, std::abs(r.closed.value));
    r.paths_agree = std::abs(r.semi_closed.value - r.closed.value) <= tol * scale &&
                    std::abs(r.semi_closed.b_q0 - r.closed.b_q0) <= tol * std::max(1.0, std::abs(r.closed.b_q0));
    return r;
}

inline ClosedFormResult closed_form(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 m,
                                    Variant variant) {
    return closed_form(SingularPair(chi1, chi2, variant), m);
}

inline double u_statistic(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 m, Variant variant) {
    return SingularPair(chi1, chi2, variant).u_statistic(m);
}

inline BoundReport bound_report(const DirichletCharacter& chi1, const DirichletCharacter& chi2, i64 m,
                                Variant variant) {
    SingularPair pair(chi1, chi2, variant);
    return pair.bounds(m, pair.closed(m));
}

/// All primitive characters with conductor <= max_conductor, by conductor then index.
inline std::vector<DirichletCharacter> primitive_characters_up_to(u64 max_conductor) {
    std::vector<DirichletCharacter> out;
    for (u64 r = 1; r <= max_conductor; ++r)
        for (auto& c : enumerate_primitive_characters(r)) out.push_back(std::move(c));
    return out;
}

}  // namespace hlx
