#pragma once

/**
 * @file circle.hpp
 * @brief Circle-method engine on a discrete frequency grid.
 *
 * S(k/N) = sum_{X1 < p <= X} log p e(kp/N) for k = 0..N-1 with N > 2X, so
 *   (1/N) sum_k S(k/N)^2 e(-mk/N) = R(m)   and
 *   (1/N) sum_k |S(k/N)|^2 e(-mk/N) = R'(m)
 * exactly. Restricting k to the major arcs gives R1, the complement R2.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "analytic.hpp"
#include "parallel.hpp"
#include "primes.hpp"
#include "singular.hpp"
#include "zeros.hpp"

namespace hlx {

/// Least power of two strictly above 2X.
inline std::size_t grid_size_for(double X) {
    std::size_t n = 1;
    while (double(n) <= 2 * X) n <<= 1;
    return n;
}

class FrequencyGrid {
public:
    static constexpr std::size_t kDefaultMemoryBudget = std::size_t(2) << 30;

    std::size_t size() const { return values_.size(); }
    double X1() const { return X1_; }
    double X() const { return X_; }
    const std::vector<cplx>& values() const { return values_; }
    cplx operator[](std::size_t k) const { return values_[k]; }

    /// e(-j/N) for j = 0..N-1.
    cplx unit(std::size_t j) const { return roots_[j]; }

    friend FrequencyGrid build_grid(const PrimeTable&, double, double, std::size_t, std::size_t);

private:
    double X1_ = 0, X_ = 0;
    std::vector<cplx> values_;
    std::vector<cplx> roots_;
};

namespace detail {

struct FftwPlan {
    fftw_plan plan = nullptr;
    ~FftwPlan() {
        if (plan) fftw_destroy_plan(plan);
    }
};

/// out[m] = sum_k in[k] e(-mk/N), in place.
inline void forward_dft(std::vector<cplx>& data) {
    FftwPlan p;
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    p.plan = fftw_plan_dft_1d(int(data.size()), ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!p.plan) throw std::runtime_error("FFTW planning failed");
    fftw_execute(p.plan);
}

}  // namespace detail

/// Grid of S(k/N) via a real-to-complex transform of a_n = log p [X1 < p <= X].
inline FrequencyGrid build_grid(const PrimeTable& primes, double X1, double X, std::size_t N,
                                std::size_t memory_budget = FrequencyGrid::kDefaultMemoryBudget) {
    if (!(double(N) > 2 * X)) throw std::invalid_argument("build_grid: need N > 2X");
    if (N > std::size_t(1) << 30) throw std::invalid_argument("build_grid: N too large");
    const std::size_t bytes = N * (2 * sizeof(cplx) + sizeof(double));
    if (bytes > memory_budget)
        throw std::runtime_error("build_grid: grid of size " + std::to_string(N) + " needs " + std::to_string(bytes) +
                                 " bytes, above the memory budget");
    FrequencyGrid g;
    g.X1_ = X1;
    g.X_ = X;
    std::vector<double> a(N, 0.0);
    {
        const auto w = primes.window_weights(std::min(X1, X), X);
        std::copy(w.begin(), w.end(), a.begin());
    }
    const std::size_t half = N / 2 + 1;
    std::vector<cplx> spec(half);
    {
        detail::FftwPlan p;
        p.plan = fftw_plan_dft_r2c_1d(int(N), a.data(), reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
        if (!p.plan) throw std::runtime_error("FFTW planning failed");
        fftw_execute(p.plan);
    }
    // FFTW's forward sign is e(-nk/N); S(k/N) carries e(+nk/N)
    g.values_.resize(N);
    for (std::size_t k = 0; k < half; ++k) g.values_[k] = std::conj(spec[k]);
    for (std::size_t k = half; k < N; ++k) g.values_[k] = std::conj(g.values_[N - k]);
    g.roots_.resize(N);
    for (std::size_t j = 0; j < N; ++j) g.roots_[j] = std::conj(RootOfUnity::unit_root(j, N));
    return g;
}

/// S(alpha) by direct summation.
inline cplx s_alpha_direct(const PrimeTable& primes, double alpha, double X1, double X) {
    const auto [i0, i1] = primes.range(X1, X);
    CompensatedSum s;
    const long double al = alpha;
    for (std::size_t i = i0; i < i1; ++i) {
        const u64 p = primes.primes()[i];
        long double f = al * (long double)p;
        f -= std::floor(f);
        const double ph = double(2 * std::numbers::pi_v<long double> * f);
        s.add(std::log(double(p)) * cplx(std::cos(ph), std::sin(ph)));
    }
    return s.value();
}

/// S(k/N) by direct summation with the exact root index kp mod N.
inline cplx s_grid_direct(const PrimeTable& primes, std::size_t k, std::size_t N, double X1, double X) {
    const auto [i0, i1] = primes.range(X1, X);
    CompensatedSum s;
    for (std::size_t i = i0; i < i1; ++i) {
        const u64 p = primes.primes()[i];
        s.add(std::log(double(p)) * RootOfUnity::unit_root((u64(k) * p) % N, N));
    }
    return s.value();
}

struct GridChecks {
    double s0_rel_error = 0;       ///< |S(0) - (theta(X) - theta(X1))| / |S(0)|
    double hermitian_error = 0;    ///< max |S(N-k) - conj S(k)|
    double parseval_rel_error = 0; ///< (1/N) sum |S|^2 against sum log^2 p
};

inline GridChecks check_grid(const FrequencyGrid& g, const PrimeTable& primes) {
    GridChecks c;
    const double th = theta(primes, g.X()) - theta(primes, g.X1());
    c.s0_rel_error = th == 0 ? std::abs(g[0]) : std::abs(g[0] - th) / th;
    const std::size_t N = g.size();
    for (std::size_t k = 1; k < N; ++k) c.hermitian_error = std::max(c.hermitian_error, std::abs(g[N - k] - std::conj(g[k])));
    long double lhs = 0;
    for (const auto& v : g.values()) lhs += (long double)std::norm(v);
    lhs /= (long double)N;
    long double rhs = 0;
    const auto [i0, i1] = primes.range(g.X1(), g.X());
    for (std::size_t i = i0; i < i1; ++i) {
        const long double l = std::log((long double)primes.primes()[i]);
        rhs += l * l;
    }
    c.parseval_rel_error = rhs == 0 ? double(lhs) : double(std::abs(lhs - rhs) / rhs);
    return c;
}

enum class OverlapPolicy { strict, farey_mediant };

struct Arc {
    u64 q = 1, a = 0;
    double center = 0, halfwidth = 0;
};

struct ArcDissection {
    u64 X = 0, P = 0;
    double Q = 0, vartheta = 0;
    OverlapPolicy policy = OverlapPolicy::strict;
    bool full_circle = false;  ///< every point major
    bool empty = false;        ///< no major arcs
    std::vector<Arc> arcs;     ///< ordered by center in [0, 1)
};

/// Farey fractions a/q in [0, 1) with q <= P, ordered by value.
inline std::vector<std::pair<u64, u64>> farey_fractions(u64 P) {
    std::vector<std::pair<u64, u64>> f;  // (a, q)
    // standard next-term recurrence from 0/1
    u64 a = 0, b = 1, c = 1, d = P;
    f.emplace_back(0, 1);
    while (c < d) {
        const u64 k = (P + b) / d;
        const u64 e = k * c - a, g = k * d - b;
        a = c;
        b = d;
        c = e;
        d = g;
        f.emplace_back(a, b);
    }
    return f;
}

/// Major arcs M(q, a) = [a/q - 1/(qQ), a/q + 1/(qQ)], q <= P, (a, q) = 1, Q = X/P.
inline ArcDissection dissect(u64 X, u64 P, OverlapPolicy policy = OverlapPolicy::strict) {
    if (X < 4 || P < 1) throw std::invalid_argument("dissect: need X >= 4, P >= 1");
    if (policy == OverlapPolicy::strict && double(P) > std::sqrt(double(X)))
        throw std::invalid_argument("dissect: P > sqrt(X) requires the Farey-mediant overlap policy");
    ArcDissection d;
    d.X = X;
    d.P = P;
    d.Q = double(X) / double(P);
    d.vartheta = std::log(double(P)) / std::log(double(X));
    d.policy = policy;
    for (auto [a, q] : farey_fractions(P)) d.arcs.push_back({q, a, double(a) / double(q), double(P) / (double(q) * X)});
    if (policy == OverlapPolicy::strict) {
        // consecutive arcs (cyclically) must not meet: exact test P(q + q') < X |aq' - a'q|
        const std::size_t n = d.arcs.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Arc& l = d.arcs[i];
            const Arc& r = d.arcs[(i + 1) % n];
            const i64 num = (i + 1 == n) ? i64(r.a + r.q) * i64(l.q) - i64(l.a) * i64(r.q)  // wrap: r + 1
                                         : i64(r.a) * i64(l.q) - i64(l.a) * i64(r.q);
            if (n == 1) break;
            const unsigned __int128 lhs = (unsigned __int128)P * (l.q + r.q);
            const unsigned __int128 rhs = (unsigned __int128)X * u64(num);
            if (lhs >= rhs)
                throw std::runtime_error("dissect: arcs around " + std::to_string(l.a) + "/" + std::to_string(l.q) +
                                         " and " + std::to_string(r.a) + "/" + std::to_string(r.q) + " overlap");
        }
    }
    return d;
}

inline ArcDissection full_circle_dissection(u64 X) {
    ArcDissection d;
    d.X = X;
    d.full_circle = true;
    return d;
}

inline ArcDissection empty_dissection(u64 X) {
    ArcDissection d;
    d.X = X;
    d.empty = true;
    return d;
}

namespace detail {

inline i64 floor_div(__int128 a, __int128 b) {
    __int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return i64(q);
}
inline i64 ceil_div(__int128 a, __int128 b) { return -floor_div(-a, b); }

}  // namespace detail

/// Grid indices k with k/N in the arc; boundaries inclusive, mediant cuts half-open.
inline std::vector<std::size_t> arc_indices(const ArcDissection& d, std::size_t arc, std::size_t N) {
    const Arc& A = d.arcs[arc];
    const __int128 qX = (__int128)A.q * d.X;
    i64 lo = detail::ceil_div(((__int128)A.a * d.X - d.P) * N, qX);
    i64 hi = detail::floor_div(((__int128)A.a * d.X + d.P) * N, qX);
    if (d.policy == OverlapPolicy::farey_mediant && d.arcs.size() > 1) {
        const std::size_t n = d.arcs.size();
        const Arc& L = d.arcs[(arc + n - 1) % n];
        const Arc& R = d.arcs[(arc + 1) % n];
        // left mediant (shifted by -1 across 0), right mediant (shifted by +1 across 1)
        const __int128 la = arc == 0 ? __int128(L.a) - L.q + A.a : __int128(L.a) + A.a;
        const __int128 ra = arc + 1 == n ? __int128(A.a) + R.a + R.q : __int128(A.a) + R.a;
        lo = std::max(lo, detail::ceil_div(la * N, __int128(L.q + A.q)));
        hi = std::min(hi, detail::ceil_div(ra * N, __int128(A.q + R.q)) - 1);
    }
    std::vector<std::size_t> out;
    for (i64 k = lo; k <= hi; ++k) out.push_back(std::size_t(((k % i64(N)) + i64(N)) % i64(N)));
    return out;
}

/// Membership of each grid point in the major arcs.
inline std::vector<char> major_mask(const ArcDissection& d, std::size_t N) {
    std::vector<char> mask(N, d.full_circle ? 1 : 0);
    if (d.full_circle || d.empty) return mask;
    for (std::size_t i = 0; i < d.arcs.size(); ++i)
        for (std::size_t k : arc_indices(d, i, N)) {
            if (mask[k]) throw std::logic_error("major_mask: grid point claimed by two arcs");
            mask[k] = 1;
        }
    return mask;
}

struct SplitResult {
    cplx R1, R2;
    cplx total() const { return R1 + R2; }
};

/// R1 and R2 at a single m by direct sums over the grid.
inline SplitResult split_r1_r2(const FrequencyGrid& g, const std::vector<char>& mask, i64 m,
                               Variant variant = Variant::goldbach) {
    const std::size_t N = g.size();
    if (mask.size() != N) throw std::invalid_argument("split_r1_r2: mask size mismatch");
    const std::size_t mm = std::size_t(mod_floor(m, N));
    std::complex<long double> r1 = 0, r2 = 0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < N; ++k) {
        const cplx s = g[k];
        const cplx f = variant == Variant::goldbach ? s * s : cplx(std::norm(s), 0);
        const cplx t = f * g.unit(idx);
        (mask[k] ? r1 : r2) += std::complex<long double>(t.real(), t.imag());
        idx += mm;
        if (idx >= N) idx -= N;
    }
    const long double inv = 1.0L / (long double)N;
    return {cplx(double(r1.real() * inv), double(r1.imag() * inv)), cplx(double(r2.real() * inv), double(r2.imag() * inv))};
}

inline SplitResult split_r1_r2(const FrequencyGrid& g, const ArcDissection& d, i64 m, Variant variant = Variant::goldbach) {
    return split_r1_r2(g, major_mask(d, g.size()), m, variant);
}

/// (1/N) sum_{k in mask} F(k) e(-mk/N) for every m at once; F = S^2 or |S|^2.
inline std::vector<cplx> masked_convolution(const FrequencyGrid& g, const std::vector<char>& mask,
                                            Variant variant = Variant::goldbach, bool complement = false) {
    const std::size_t N = g.size();
    std::vector<cplx> data(N);
    for (std::size_t k = 0; k < N; ++k) {
        const bool on = bool(mask[k]) != complement;
        if (!on) continue;
        const cplx s = g[k];
        data[k] = variant == Variant::goldbach ? s * s : cplx(std::norm(s), 0);
    }
    detail::forward_dft(data);
    for (auto& v : data) v /= double(N);
    return data;
}

/// I(m) = #{k + l = m : k, l in (X1, X]}.
inline double hl_count(i64 m, double X1, double X) {
    return pair_sum_exact(ZeroPoint::pole(), ZeroPoint::pole(), m, X1, X).real();
}

struct PredictionTerm {
    std::size_t i = 0, j = 0;
    std::string chi_i, chi_j;
    cplx rho_i, rho_j;
    int sign = 1;            ///< A(rho_i) A(rho_j)
    cplx singular;           ///< S(chi_i, chi_j, m) or S'(...)
    cplx analytic;           ///< Gamma factor times m^{rho_i + rho_j - 1}, or I'
    cplx contribution;
    bool included = true;
    std::string excluded_by;  ///< truncation filter that removed the term
};

struct Prediction {
    cplx value;
    std::vector<PredictionTerm> terms;
    std::size_t n_terms = 0;  ///< included terms
};

struct PredictionOptions {
    Variant variant = Variant::goldbach;
    double X1 = 0, X = 0;           ///< window for exact pair sums (twin, or exact_window)
    bool exact_window = false;      ///< Goldbach: use pair_sum_exact over (X1, X] instead of the Gamma form
    bool twin_asymptotic = false;   ///< twin: Gamma-form stand-in for I' (diagnostic only)
    std::optional<double> U;        ///< truncation: |gamma| <= U and U(chi_i, chi_j, m) <= U
    std::optional<double> P;        ///< truncation: [r_i, r_j] <= P
};

/**
 * sum over (i, j) in E x E of A_i A_j S(chi_i, chi_j, m) Gamma(rho_i) Gamma(rho_j) / Gamma(rho_i + rho_j)
 * m^{rho_i + rho_j - 1}; the twin form uses S' and I'(rho_i, rho_j, m).
 */
inline Prediction predict_r1(i64 m, const GeneralizedExceptionalSet& E, const PredictionOptions& opt = {}) {
    if (m == 0) throw std::invalid_argument("predict_r1: m must be nonzero");
    Prediction out;
    CompensatedSum total;
    const auto& mem = E.members;
    std::vector<DirichletCharacter> chars;
    for (const auto& x : mem) chars.push_back(DirichletCharacter(x.q, x.index));
    for (std::size_t i = 0; i < mem.size(); ++i) {
        for (std::size_t j = 0; j < mem.size(); ++j) {
            PredictionTerm t;
            t.i = i;
            t.j = j;
            t.chi_i = mem[i].label();
            t.chi_j = mem[j].label();
            t.rho_i = mem[i].rho();
            t.rho_j = mem[j].rho();
            t.sign = mem[i].sign * mem[j].sign;
            const SingularPair pair(chars[i], chars[j], opt.variant);
            if (opt.U) {
                if (std::abs(mem[i].gamma) > *opt.U || std::abs(mem[j].gamma) > *opt.U) t.excluded_by = "gamma_above_U";
                else if (pair.u_statistic(m) > *opt.U) t.excluded_by = "u_statistic_above_U";
            }
            if (opt.P && t.excluded_by.empty() && double(lcm(chars[i].modulus(), chars[j].modulus())) > *opt.P)
                t.excluded_by = "lcm_above_P";
            if (!t.excluded_by.empty()) {
                t.included = false;
                out.terms.push_back(t);
                continue;
            }
            t.singular = pair.closed(m).value;
            const ZeroPoint zi = mem[i].point(), zj = mem[j].point();
            if (opt.variant == Variant::goldbach) {
                t.analytic = opt.exact_window ? pair_sum_exact(zi, zj, m, opt.X1, opt.X)
                                              : gamma_factor(zi, zj) * detail::power(double(m), t.rho_i + t.rho_j - 1.0);
            } else {
                t.analytic = opt.twin_asymptotic
                                 ? gamma_factor(zi, zj.conj()) * detail::power(double(std::abs(m)), t.rho_i + std::conj(t.rho_j) - 1.0)
                                 : pair_sum_exact_twin(zi, zj, m, opt.X1, opt.X);
            }
            t.contribution = double(t.sign) * t.singular * t.analytic;
            total.add(t.contribution);
            ++out.n_terms;
            out.terms.push_back(t);
        }
    }
    out.value = total.value();
    return out;
}

struct ChooseP {
    double P = 0;
    double eps0 = 0;
    std::vector<std::pair<double, double>> forbidden;  ///< half-open [lo, hi) intervals of P
    bool conditions_hold = false;
};

/// Checks both gap conditions for P against every member of E.
inline bool check_p_conditions(double P, const GeneralizedExceptionalSet& E, double X, double eps0) {
    const double up = std::pow(X, eps0), down = std::pow(X, -eps0), down4 = std::pow(X, -4 * eps0);
    for (const auto& a : E.members) {
        for (const auto& b : E.members) {
            const double L = double(lcm(a.q, b.q));
            if (L <= P && L > P * down) return false;
        }
        const double g = std::abs(a.gamma), r = double(a.q);
        if (g <= P / r * up && g > P / r * down4) return false;
    }
    return true;
}

/**
 * Largest admissible P in [P0 X^{-eps'}, P0]: each condition excludes one
 * half-open interval of P, and descending below the lowest interval that
 * contains the candidate terminates.
 */
inline ChooseP choose_p(double P0, const GeneralizedExceptionalSet& E, double X, double eps_prime) {
    if (!(P0 >= 1) || !(X > 1) || !(eps_prime > 0)) throw std::invalid_argument("choose_p: need P0 >= 1, X > 1, eps' > 0");
    if (P0 > std::pow(X, 4.0 / 9.0) * (1 + 1e-12)) throw std::invalid_argument("choose_p: P0 above X^{4/9}");
    ChooseP out;
    const double M1 = double(E.members.size());  // M + 1
    out.eps0 = eps_prime / (10 * M1 * M1);
    const double up = std::pow(X, out.eps0), up4 = std::pow(X, 4 * out.eps0), down = std::pow(X, -out.eps0);
    for (const auto& a : E.members) {
        for (const auto& b : E.members) {
            const double L = double(lcm(a.q, b.q));
            out.forbidden.emplace_back(L, L * up);  // P X^{-eps0} < L <= P
        }
        const double g = std::abs(a.gamma);
        if (g > 0) out.forbidden.emplace_back(g * double(a.q) * down, g * double(a.q) * up4);
    }
    std::sort(out.forbidden.begin(), out.forbidden.end());
    out.forbidden.erase(std::unique(out.forbidden.begin(), out.forbidden.end()), out.forbidden.end());
    const double floor_p = P0 * std::pow(X, -eps_prime);
    double P = P0;
    for (bool moved = true; moved;) {
        moved = false;
        for (const auto& [lo, hi] : out.forbidden)
            if (P >= lo && P < hi) {
                P = std::nextafter(lo, 0.0);
                moved = true;
            }
    }
    if (P < floor_p) throw std::logic_error("choose_p: no admissible P in range");
    out.P = P;
    out.conditions_hold = check_p_conditions(P, E, X, out.eps0);
    return out;
}

struct MinorDiagnostics {
    std::size_t minor_points = 0;
    double max_abs_s = 0;
    double max_ratio = 0;     ///< max |S| / envelope over minor points
    double mean_ratio = 0;
    double median_ratio = 0;
    double sum_r2_squared = 0;        ///< sum over all m of |R2(m)|^2
    double minor_fourth_moment = 0;   ///< (1/N) sum_minor |S|^4, equal to the above
    double parseval_envelope = 0;     ///< max(X^2/P, X^{8/5}) X L^9
    std::size_t count_above_sqrtL = 0;     ///< even m <= X with |R2(m)| > X / sqrt(L)
    double exception_envelope_52 = 0;      ///< L^10 max(X/P, X^{3/5})
    std::size_t count_above_power = 0;     ///< even m <= X with |R2(m)| > X^{1-eps}
    double exception_envelope_53 = 0;      ///< max(X^{1+3eps}/P, X^{3/5+3eps})
    std::vector<cplx> r2;                  ///< R2(m), m = 0..N-1
};

/// Best rational approximation a/q to k/N with q <= Q (last continued-fraction convergent).
inline std::pair<u64, u64> best_approximation(u64 k, u64 N, double Q) {
    u64 p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    u64 num = k, den = N;
    while (den != 0) {
        const u64 a = num / den;
        const u64 p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (double(q2) > Q) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const u64 r = num - a * den;
        num = den;
        den = r;
    }
    return {p1, q1};
}

/// Envelope (N q^{-1/2} + N^{4/5} + (N q)^{1/2}) log^4 N with N = X.
inline double vaughan_envelope(double X, u64 q) {
    const double l = std::log(X);
    return (X / std::sqrt(double(q)) + std::pow(X, 0.8) + std::sqrt(X * double(q))) * l * l * l * l;
}

inline MinorDiagnostics minor_arc_diagnostics(const FrequencyGrid& g, const ArcDissection& d, double eps = 0.1,
                                              double envelope_c = 1) {
    MinorDiagnostics r;
    const std::size_t N = g.size();
    const auto mask = major_mask(d, N);
    const double X = double(d.X);
    const double L = std::log(X);
    const double Q = d.full_circle || d.empty || d.P == 0 ? X : d.Q;
    std::vector<double> ratios;
    long double fourth = 0;
    for (std::size_t k = 0; k < N; ++k) {
        if (mask[k]) continue;
        ++r.minor_points;
        const double a = std::abs(g[k]);
        r.max_abs_s = std::max(r.max_abs_s, a);
        const auto [p, q] = best_approximation(k, N, Q);
        (void)p;
        ratios.push_back(a / (envelope_c * vaughan_envelope(X, std::max<u64>(q, 1))));
        fourth += (long double)a * a * a * a;
    }
    r.minor_fourth_moment = double(fourth / (long double)N);
    if (!ratios.empty()) {
        r.max_ratio = *std::max_element(ratios.begin(), ratios.end());
        r.mean_ratio = std::accumulate(ratios.begin(), ratios.end(), 0.0) / double(ratios.size());
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
        r.median_ratio = ratios[ratios.size() / 2];
    }
    r.r2 = masked_convolution(g, mask, Variant::goldbach, true);
    long double s2 = 0;
    for (const auto& v : r.r2) s2 += (long double)std::norm(v);
    r.sum_r2_squared = double(s2);
    r.parseval_envelope = std::max(X * X / double(std::max<u64>(d.P, 1)), std::pow(X, 1.6)) * X * std::pow(L, 9);
    const double t52 = X / std::sqrt(L), t53 = std::pow(X, 1 - eps);
    for (u64 m = 2; m <= d.X && m < N; m += 2) {
        const double v = std::abs(r.r2[m]);
        if (v > t52) ++r.count_above_sqrtL;
        if (v > t53) ++r.count_above_power;
    }
    const double P = double(std::max<u64>(d.P, 1));
    r.exception_envelope_52 = std::pow(L, 10) * std::max(X / P, std::pow(X, 0.6));
    r.exception_envelope_53 = std::max(std::pow(X, 1 + 3 * eps) / P, std::pow(X, 0.6 + 3 * eps));
    return r;
}

struct CharacterRouteCheck {
    cplx r1_grid;           ///< grid sum over arcs with q <= q_max
    cplx r1_characters;     ///< same arcs, S rebuilt from characters
    double max_point_error = 0;
    std::size_t points = 0;
};

/**
 * Rebuilds S(a/q + eta) = phi(q)^{-1} sum_chi chi(a) tau(conj chi) S(chi*, eta)
 * with S(chi, eta) = sum_{X1 < p <= X} chi(p) log p e(eta p) on every grid
 * point of the arcs with q <= q_max, and compares the arc integrals.
 */
inline CharacterRouteCheck validate_character_route(const PrimeTable& primes, const FrequencyGrid& g,
                                                    const ArcDissection& d, i64 m, u64 q_max) {
    if (d.full_circle || d.empty) throw std::invalid_argument("validate_character_route: needs explicit arcs");
    if (double(d.P) >= g.X1()) throw std::invalid_argument("validate_character_route: needs P < X1");
    const std::size_t N = g.size();
    const auto [i0, i1] = primes.range(g.X1(), g.X());
    std::vector<u64> ps(primes.primes().begin() + i0, primes.primes().begin() + i1);
    std::vector<double> logs(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) logs[i] = std::log(double(ps[i]));
    CharacterRouteCheck out;
    CompensatedSum grid_sum, char_sum;
    const std::size_t mm = std::size_t(mod_floor(m, N));
    for (u64 q = 1; q <= std::min(q_max, d.P); ++q) {
        const auto chars = enumerate_characters(q);
        std::vector<cplx> taus;
        std::vector<DirichletCharacter> stars;
        for (const auto& c : chars) {
            taus.push_back(tau(c.conjugate()));
            stars.push_back(c.primitive_part());
        }
        for (std::size_t ai = 0; ai < d.arcs.size(); ++ai) {
            if (d.arcs[ai].q != q) continue;
            const u64 a = d.arcs[ai].a;
            for (std::size_t k : arc_indices(d, ai, N)) {
                // eta = k/N - a/q, as an exact fraction (kq - aN)/(qN), folded to the nearest representative
                i64 num = i64(k) * i64(q) - i64(a) * i64(N);
                const i64 den = i64(q) * i64(N);
                if (2 * num > den) num -= den;
                if (2 * num < -den) num += den;
                cplx s_alpha = 0;
                for (std::size_t c = 0; c < chars.size(); ++c) {
                    CompensatedSum sc;
                    const auto& tab = stars[c].table();
                    const u64 r = stars[c].modulus(), ord = stars[c].order();
                    for (std::size_t i = 0; i < ps.size(); ++i) {
                        const std::int32_t e = tab[ps[i] % r];
                        if (e < 0) continue;
                        // e(eta p) with eta p = num p / den exactly
                        const i64 ph = i64((__int128(num) * i64(ps[i])) % den);
                        const u64 phase = u64(ph < 0 ? ph + den : ph);
                        sc.add(logs[i] * RootOfUnity::unit_root(u64(e), ord) * RootOfUnity::unit_root(phase, u64(den)));
                    }
                    s_alpha += chars[c].value(i64(a)) * taus[c] * sc.value();
                }
                s_alpha /= double(euler_phi(q));
                out.max_point_error = std::max(out.max_point_error, std::abs(s_alpha - g[k]));
                const cplx e = g.unit((k * mm) % N);
                grid_sum.add(g[k] * g[k] * e);
                char_sum.add(s_alpha * s_alpha * e);
                ++out.points;
            }
        }
    }
    out.r1_grid = grid_sum.value() / double(N);
    out.r1_characters = char_sum.value() / double(N);
    return out;
}

}  // namespace hlx
