#pragma once

/**
 * @file zeros.hpp
 * @brief Low-lying zeros of zeta and Dirichlet L-functions, the zero file,
 *        the generalized exceptional set, and the explicit formula check.
 *
 * L(s, chi) = q^{-s} sum_{a mod q} chi(a) zeta(s, a/q) with the Hurwitz zeta
 * function evaluated by Euler-Maclaurin. On the critical line the rotated
 *   Z_chi(t) = eps^{-1/2} e^{i theta_chi(t)} L(1/2 + it, chi)
 * is real, so zeros are located by sign changes and bisection.
 */

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "analytic.hpp"
#include "constants.hpp"
#include "gausssums.hpp"
#include "parallel.hpp"
#include "primes.hpp"

namespace hlx {

/// zeta(s, a) for 0 < a <= 1 and s != 1.
inline cplx hurwitz_zeta(cplx s, double a) {
    if (s == cplx(1, 0)) throw std::invalid_argument("hurwitz_zeta: pole at s = 1");
    if (!(a > 0 && a <= 1)) throw std::invalid_argument("hurwitz_zeta: a must lie in (0, 1]");
    const int N = int(std::ceil(0.5 * std::abs(s.imag()))) + 20;
    CompensatedSum sum;
    for (int n = 0; n < N; ++n) sum.add(std::exp(-s * std::log(n + a)));
    const double na = N + a;
    const cplx lna = std::log(na);
    const cplx base = std::exp(-s * lna);  // (N+a)^{-s}
    sum.add(base * na / (s - 1.0));
    sum.add(0.5 * base);
    // B_{2k}/(2k)! s(s+1)...(s+2k-2) (N+a)^{-s-2k+1}
    cplx rising = s;
    cplx pw = base / na;
    const double inv_na2 = 1 / (na * na);
    for (int k = 1; k <= 30; ++k) {
        const double coeff = boost::math::bernoulli_b2n<double>(k) / boost::math::factorial<double>(unsigned(2 * k));
        const cplx term = coeff * rising * pw;
        sum.add(term);
        if (std::abs(term) < 1e-17 * std::abs(base)) break;
        rising *= (s + double(2 * k - 1)) * (s + double(2 * k));
        pw *= inv_na2;
    }
    return sum.value();
}

/// L(s, chi) by the Hurwitz decomposition.
inline cplx dirichlet_l(cplx s, const DirichletCharacter& chi) {
    const u64 q = chi.modulus();
    if (q == 1) return hurwitz_zeta(s, 1.0);
    const auto& tab = chi.table();
    const u64 n = chi.order();
    CompensatedSum sum;
    for (u64 a = 1; a < q; ++a) {
        if (tab[a] < 0) continue;
        sum.add(RootOfUnity::unit_root(u64(tab[a]), n) * hurwitz_zeta(s, double(a) / double(q)));
    }
    return std::exp(-s * std::log(double(q))) * sum.value();
}

inline cplx riemann_zeta(cplx s) { return hurwitz_zeta(s, 1.0); }

/// Real-valued rotation of L(1/2 + it, chi) for primitive chi.
class RotatedL {
public:
    explicit RotatedL(const DirichletCharacter& chi) : chi_(chi) {
        if (!chi.is_primitive()) throw std::invalid_argument("RotatedL: character must be primitive");
        a_ = chi.parity() == 1 ? 0 : 1;
        const double q = double(chi.modulus());
        // root number tau(chi) / (i^a sqrt q)
        const cplx eps = chi.modulus() == 1 ? cplx(1, 0) : tau(chi) / (std::pow(cplx(0, 1), a_) * std::sqrt(q));
        rot_ = 1.0 / std::sqrt(eps);
        log_q_pi_ = std::log(q / std::numbers::pi);
    }

    double theta(double t) const {
        return 0.5 * t * log_q_pi_ + log_gamma(cplx(0.25 + 0.5 * a_, 0.5 * t)).imag();
    }

    /// Complex value whose imaginary part vanishes up to rounding.
    cplx raw(double t) const { return rot_ * std::exp(cplx(0, theta(t))) * dirichlet_l(cplx(0.5, t), chi_); }

    double operator()(double t) const { return raw(t).real(); }

    const DirichletCharacter& character() const { return chi_; }

private:
    DirichletCharacter chi_;
    int a_ = 0;
    cplx rot_;
    double log_q_pi_ = 0;
};

/// Hardy's Z(t).
inline double hardy_z(double t) {
    static const RotatedL z(DirichletCharacter::trivial());
    return z(t);
}

enum class ZeroSource { computed, ingested };

struct ZeroRecord {
    u64 q = 1;
    u64 index = 1;
    double gamma = 0;
    double beta = 0.5;
    ZeroSource source = ZeroSource::ingested;
    double precision = 0;

    std::string label() const { return std::to_string(q) + "." + std::to_string(index); }
    cplx rho() const { return {beta, gamma}; }
};

struct ZeroScan {
    std::vector<ZeroRecord> zeros;
    std::vector<std::string> warnings;
    double height = 0;
};

namespace detail {

inline double bisect_zero(const RotatedL& z, double lo, double hi, double flo, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = z(mid);
        if (fm == 0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/**
 * Zeros 0 < gamma <= T of L(s, chi) on the critical line: scan with the given
 * step, refine same-sign local minima of |Z| on a finer grid, bisect to tol.
 */
inline ZeroScan scan_zeros(const DirichletCharacter& chi, double T, double step = 0.05, double tol = 1e-10,
                           unsigned threads = 1) {
    if (!(T > 0)) throw std::invalid_argument("scan_zeros: height must be positive");
    const RotatedL z(chi);
    const std::size_t n = std::size_t(std::ceil(T / step)) + 1;
    std::vector<double> t(n + 1), v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = std::min(T, double(i) * step);
    t[n] = T;
    parallel_for(n + 1, threads, [&](std::size_t i) { v[i] = z(t[i]); });

    ZeroScan out;
    out.height = T;
    for (std::size_t i = 0; i <= n; ++i)
        if (!std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << "gap: non-finite value at t = " << t[i] << " for " << chi.label();
            out.warnings.push_back(msg.str());
        }

    std::vector<std::pair<double, double>> brackets;
    auto sign_changes = [&](double lo, double flo, double hi, double fhi) {
        if (std::isfinite(flo) && std::isfinite(fhi) && ((flo < 0) != (fhi < 0))) brackets.emplace_back(lo, hi);
    };
    for (std::size_t i = 0; i + 1 <= n; ++i) {
        if (t[i + 1] <= t[i]) continue;
        sign_changes(t[i], v[i], t[i + 1], v[i + 1]);
        // a same-sign dip may hide two close zeros
        if (i >= 1 && (v[i - 1] < 0) == (v[i] < 0) && (v[i] < 0) == (v[i + 1] < 0) &&
            std::abs(v[i]) < std::abs(v[i - 1]) && std::abs(v[i]) < std::abs(v[i + 1])) {
            const int fine = 40;
            double prev_t = t[i - 1], prev_v = v[i - 1];
            std::vector<std::pair<double, double>> found;
            for (int j = 1; j <= 2 * fine; ++j) {
                const double tj = t[i - 1] + (t[i + 1] - t[i - 1]) * j / (2 * fine);
                const double vj = z(tj);
                if (std::isfinite(vj) && std::isfinite(prev_v) && ((vj < 0) != (prev_v < 0)))
                    found.emplace_back(prev_t, tj);
                prev_t = tj;
                prev_v = vj;
            }
            brackets.insert(brackets.end(), found.begin(), found.end());
        }
    }
    std::sort(brackets.begin(), brackets.end());
    brackets.erase(std::unique(brackets.begin(), brackets.end()), brackets.end());

    std::vector<double> roots(brackets.size());
    parallel_for(brackets.size(), threads, [&](std::size_t i) {
        const auto [lo, hi] = brackets[i];
        roots[i] = detail::bisect_zero(z, lo, hi, z(lo), tol);
    });
    std::sort(roots.begin(), roots.end());
    for (double g : roots) {
        if (g <= 0 || g > T) continue;
        if (!out.zeros.empty() && std::abs(out.zeros.back().gamma - g) < 10 * tol) continue;
        ZeroRecord r;
        r.q = chi.modulus();
        r.index = chi.modulus() == 1 ? 1 : chi.index();
        r.gamma = g;
        r.beta = 0.5;
        r.source = ZeroSource::computed;
        r.precision = tol;
        out.zeros.push_back(r);
    }
    return out;
}

inline ZeroScan compute_zeta_zeros(double T, unsigned threads = 1) {
    if (T > 500) throw std::invalid_argument("compute_zeta_zeros: height above 500");
    return scan_zeros(DirichletCharacter::trivial(), T, 0.05, 1e-10, threads);
}

inline ZeroScan compute_dirichlet_zeros(const DirichletCharacter& chi, double T, unsigned threads = 1) {
    if (chi.modulus() > 100) throw std::invalid_argument("compute_dirichlet_zeros: modulus above 100");
    if (T > 100) throw std::invalid_argument("compute_dirichlet_zeros: height above 100");
    return scan_zeros(chi, T, 0.05, 1e-10, threads);
}

/**
 * N(T) for zeta from the argument principle on the rectangle with corners
 * 2, 2 + iT, -1 + iT, -1 (reduced by symmetry to the standard
 * N(T) = theta(T)/pi + 1 + arg zeta(1/2 + iT)/pi).
 */
inline long zeta_zero_count(double T) {
    if (!(T > 1)) throw std::invalid_argument("zeta_zero_count: T must exceed 1");
    // Re zeta(2 + it) > 0, so the argument there is the principal one
    double arg = std::arg(riemann_zeta(cplx(2, T)));
    double sigma = 2;
    cplx prev = riemann_zeta(cplx(2, T));
    double h = 0.01;
    while (sigma > 0.5) {
        double next = std::max(0.5, sigma - h);
        cplx val = riemann_zeta(cplx(next, T));
        double d = std::arg(val / prev);
        if (std::abs(d) > std::numbers::pi / 4 && h > 1e-6) {
            h *= 0.5;
            continue;
        }
        arg += d;
        prev = val;
        sigma = next;
        h = std::min(0.01, h * 2);
    }
    const RotatedL z(DirichletCharacter::trivial());
    const double n = z.theta(T) / std::numbers::pi + 1 + arg / std::numbers::pi;
    return std::lround(n);
}

/// Zero records grouped by character, with per-character coverage height.
class ZeroTable {
public:
    const std::vector<ZeroRecord>& records() const { return records_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Height to which the zeros of q.index are known to be complete (0 if unknown).
    double coverage(u64 q, u64 index) const {
        auto it = coverage_.find(key(q, index));
        return it == coverage_.end() ? 0 : it->second;
    }
    void set_coverage(u64 q, u64 index, double T) {
        double& c = coverage_[key(q, index)];
        c = std::max(c, T);
    }
    const std::map<std::pair<u64, u64>, double>& coverage_map() const { return coverage_; }

    /// Adds records, dropping any within 1e-6 of an existing (label, gamma).
    void merge(const std::vector<ZeroRecord>& recs) {
        for (const auto& r : recs) {
            if (!(r.beta > 0 && r.beta < 1)) throw std::invalid_argument("zero record: beta outside (0, 1)");
            bool dup = false;
            for (const auto& e : records_)
                if (e.q == r.q && e.index == r.index && std::abs(e.gamma - r.gamma) < 1e-6) {
                    dup = true;
                    break;
                }
            if (dup) {
                std::ostringstream msg;
                msg << "duplicate zero " << r.label() << " gamma " << std::setprecision(12) << r.gamma << " dropped";
                warnings_.push_back(msg.str());
                continue;
            }
            records_.push_back(r);
        }
        std::stable_sort(records_.begin(), records_.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
            if (a.q != b.q) return a.q < b.q;
            if (a.index != b.index) return a.index < b.index;
            return a.gamma < b.gamma;
        });
    }

    void add_scan(const ZeroScan& scan, const DirichletCharacter& chi) {
        merge(scan.zeros);
        set_coverage(chi.modulus(), chi.modulus() == 1 ? 1 : chi.index(), scan.height);
        warnings_.insert(warnings_.end(), scan.warnings.begin(), scan.warnings.end());
    }

    /// Zeros of L(s, chi) with 0 < gamma, ascending.
    std::vector<ZeroRecord> for_character(u64 q, u64 index) const {
        std::vector<ZeroRecord> out;
        for (const auto& r : records_)
            if (r.q == q && r.index == index) out.push_back(r);
        return out;
    }

private:
    static std::pair<u64, u64> key(u64 q, u64 index) { return {q, q == 1 ? 1 : index}; }

    std::vector<ZeroRecord> records_;
    std::vector<std::string> warnings_;
    std::map<std::pair<u64, u64>, double> coverage_;
};

/// Format: `q index gamma [beta]` per line, `#` comments; `# coverage q index T` records completeness.
inline ZeroTable parse_zeros(std::istream& in, const std::string& origin = "<stream>") {
    ZeroTable table;
    std::vector<ZeroRecord> recs;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            std::istringstream c(line.substr(hash + 1));
            std::string word;
            u64 q = 0, idx = 0;
            double T = 0;
            if (c >> word && word == "coverage") {
                if (!(c >> q >> idx >> T)) fail("malformed coverage comment");
                table.set_coverage(q, idx, T);
            }
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string w; ls >> w;) tok.push_back(w);
        if (tok.empty()) continue;
        if (tok.size() < 3 || tok.size() > 4) fail("expected `q index gamma [beta]`");
        ZeroRecord r;
        try {
            std::size_t used = 0;
            auto num = [&](const std::string& s) {
                const double v = std::stod(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
                return v;
            };
            r.q = std::stoull(tok[0], &used);
            if (used != tok[0].size()) throw std::invalid_argument(tok[0]);
            r.index = std::stoull(tok[1], &used);
            if (used != tok[1].size()) throw std::invalid_argument(tok[1]);
            r.gamma = num(tok[2]);
            if (tok.size() == 4) r.beta = num(tok[3]);
        } catch (const std::logic_error&) {
            fail("unparsable number");
        }
        if (r.q == 0) fail("modulus must be positive");
        if (r.gamma < 0) fail("gamma must be nonnegative (conjugates are implied)");
        if (!(r.beta > 0 && r.beta < 1)) fail("beta outside (0, 1)");
        if (r.q == 1) r.index = 1;
        r.source = ZeroSource::ingested;
        recs.push_back(r);
    }
    table.merge(recs);
    return table;
}

inline ZeroTable load_zeros(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open zero file " + path);
    return parse_zeros(in, path);
}

inline void write_zeros(const ZeroTable& table, std::ostream& out) {
    out << "# q index gamma beta\n";
    for (const auto& [k, T] : table.coverage_map())
        out << "# coverage " << k.first << " " << k.second << " " << std::setprecision(12) << T << "\n";
    for (const auto& r : table.records())
        out << r.q << " " << r.index << " " << std::setprecision(12) << r.gamma << " " << r.beta << "\n";
}

inline void save_zeros(const ZeroTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write zero file " + path);
    write_zeros(table, out);
}

struct ExceptionalMember {
    bool pole = false;
    u64 q = 1, index = 1;  ///< primitive character of the zero (mod 1 for the pole)
    double beta = 1, gamma = 0;
    int sign = 1;  ///< A(rho): +1 for the pole, -1 for zeros
    bool siegel = false;

    cplx rho() const { return {beta, gamma}; }
    ZeroPoint point() const { return ZeroPoint(beta, gamma); }
    std::string label() const { return std::to_string(q) + "." + std::to_string(index); }
};

struct GeneralizedExceptionalSet {
    double H = 0, P = 0, X = 0, h = 0;
    std::vector<ExceptionalMember> members;  ///< pole first, then by (q, index, gamma)
};

/**
 * The pole plus all zeros with beta >= 1 - H/log X, |gamma| <= sqrt X and
 * conductor <= P. A stored zero beta + i gamma of chi contributes its
 * conjugate beta - i gamma as a zero of conj(chi).
 */
inline GeneralizedExceptionalSet build_exceptional_set(const ZeroTable& zeros, double H, double P, double X,
                                                       double h = 0.05) {
    if (!(H > 0) || !(P >= 1) || !(X >= 16)) throw std::invalid_argument("build_exceptional_set: need H > 0, P >= 1, X >= 16");
    GeneralizedExceptionalSet e;
    e.H = H;
    e.P = P;
    e.X = X;
    e.h = h;
    ExceptionalMember pole;
    pole.pole = true;
    e.members.push_back(pole);
    const double L = std::log(X);
    std::vector<ExceptionalMember> found;
    for (const auto& r : zeros.records()) {
        const DirichletCharacter chi(r.q, r.index);
        if (double(chi.conductor()) > P) continue;
        if (r.beta < 1 - H / L || std::abs(r.gamma) > std::sqrt(X)) continue;
        ExceptionalMember m;
        m.q = r.q;
        m.index = r.q == 1 ? 1 : r.index;
        m.beta = r.beta;
        m.gamma = r.gamma;
        m.sign = -1;
        m.siegel = r.gamma == 0 && chi.is_real() && (1 - r.beta) <= h / L;
        found.push_back(m);
        if (r.gamma != 0) {
            const auto cc = chi.conjugate();
            ExceptionalMember c = m;
            c.index = r.q == 1 ? 1 : cc.index();
            c.gamma = -r.gamma;
            found.push_back(c);
        }
    }
    std::sort(found.begin(), found.end(), [](const ExceptionalMember& a, const ExceptionalMember& b) {
        return std::tie(a.q, a.index, a.gamma, a.beta) < std::tie(b.q, b.index, b.gamma, b.beta);
    });
    e.members.insert(e.members.end(), found.begin(), found.end());
    return e;
}

struct ExplicitFormulaCheck {
    double x = 0, T = 0;
    cplx lhs, rhs;
    double residual = 0;
    double budget = 0;
    std::size_t zeros_used = 0;
    std::size_t offline_partners = 0;  ///< 1 - conj(rho) partners added for beta > 1/2
    bool ok() const { return residual <= budget; }
};

/**
 * psi(x, chi) against E(chi) x - sum_{|gamma| <= T} x^rho / rho. Zeros of
 * chi with gamma < 0 are read as conjugates of the stored zeros of conj(chi).
 */
inline ExplicitFormulaCheck verify_explicit_formula(const PrimeTable& primes, double x, const DirichletCharacter& chi,
                                                    double T, const ZeroTable& zeros, double C = 3) {
    if (!chi.is_primitive()) throw std::invalid_argument("verify_explicit_formula: character must be primitive");
    if (T < std::sqrt(x)) throw std::invalid_argument("verify_explicit_formula: need T >= sqrt(x)");
    const u64 q = chi.modulus();
    const u64 idx = q == 1 ? 1 : chi.index();
    const auto conj = chi.conjugate();
    const u64 cidx = q == 1 ? 1 : conj.index();
    for (u64 i : {idx, cidx})
        if (zeros.coverage(q, i) < T) {
            std::ostringstream msg;
            msg << "verify_explicit_formula: zeros of " << q << "." << i << " cover height "
                << zeros.coverage(q, i) << " < T = " << T;
            throw std::runtime_error(msg.str());
        }
    ExplicitFormulaCheck r;
    r.x = x;
    r.T = T;
    r.lhs = psi_chi(primes, x, chi);
    const double lx = std::log(x);
    CompensatedSum zsum;
    auto add_zero = [&](cplx rho) {
        zsum.add(std::exp(rho * lx) / rho);
        ++r.zeros_used;
    };
    auto add_with_partner = [&](cplx rho) {
        add_zero(rho);
        if (rho.real() > 0.5) {
            add_zero(cplx(1 - rho.real(), rho.imag()));
            ++r.offline_partners;
        }
    };
    for (const auto& z : zeros.for_character(q, idx))
        if (z.gamma <= T) add_with_partner(z.rho());
    for (const auto& z : zeros.for_character(q, cidx))
        if (z.gamma <= T && z.gamma > 0) add_with_partner(std::conj(z.rho()));
    const double E = chi.is_principal() ? 1 : 0;
    r.rhs = E * x - zsum.value();
    r.residual = std::abs(r.lhs - r.rhs);
    const double lqx = std::log(double(q) * x);
    r.budget = C * std::sqrt(x) * lqx * lqx;
    return r;
}

}  // namespace hlx
