#pragma once

/**
 * @file characters.hpp
 * @brief Exact Dirichlet characters with Conrey labelling.
 *
 * A character mod q is stored as discrete-log exponents on the canonical
 * generators of (Z/p^e)^* for each p^e || q: the least primitive root of p
 * that is also a primitive root mod p^2 for odd p, and the pair (-1, 5) for
 * 2^e with e >= 3. The Conrey index n identifies chi_q(n, .) with
 *
 *   chi_{p^e}(n, m) = e(log(n) log(m) / phi(p^e))                   (p odd)
 *   chi_{2^e}(n, m) = e(a(n) a(m) / 2 + b(n) b(m) / 2^(e-2))         (m = (-1)^a 5^b)
 *
 * Values are returned exactly as e(k/N) with N the character order.
 */

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "numthy.hpp"

namespace hlx {

/// e(k/N) = exp(2 pi i k / N), or zero.
struct RootOfUnity {
    u64 k = 0;
    u64 order = 1;
    bool zero = false;

    static RootOfUnity zero_value() { return {0, 1, true}; }

    std::complex<double> value() const {
        if (zero) return {0.0, 0.0};
        return unit_root(k, order);
    }

    /// cos/sin of 2 pi k/N with the argument folded into [0, pi/4].
    static std::complex<double> unit_root(u64 k, u64 n) {
        k %= n;
        if (k == 0) return {1.0, 0.0};
        // exact quarter turns
        if ((4 * k) % n == 0) {
            switch ((4 * k) / n) {
                case 1: return {0.0, 1.0};
                case 2: return {-1.0, 0.0};
                case 3: return {0.0, -1.0};
            }
        }
        const long double x = 2.0L * std::numbers::pi_v<long double> * (long double)k / (long double)n;
        return {double(std::cos(x)), double(std::sin(x))};
    }

    RootOfUnity operator*(const RootOfUnity& o) const {
        if (zero || o.zero) return zero_value();
        u64 n = lcm(order, o.order);
        u64 kk = (k * (n / order) + o.k * (n / o.order)) % n;
        return reduced(kk, n);
    }
    RootOfUnity conj() const {
        if (zero) return *this;
        return reduced((order - k % order) % order, order);
    }
    static RootOfUnity reduced(u64 k, u64 n) {
        k %= n;
        u64 g = gcd(k, n);
        if (k == 0) return {0, 1, false};
        return {k / g, n / g, false};
    }
    friend bool operator==(const RootOfUnity& a, const RootOfUnity& b) {
        if (a.zero || b.zero) return a.zero == b.zero;
        auto ra = reduced(a.k, a.order), rb = reduced(b.k, b.order);
        return ra.k == rb.k && ra.order == rb.order;
    }
};

namespace detail {

/// Discrete logarithms for (Z/p^e)^*, shared across characters.
struct PrimePowerLogs {
    u64 p = 0;
    int e = 0;
    u64 pe = 0;
    u64 generator = 0;  // odd p only
    // odd p: log base generator, -1 for non-units.
    // p = 2: a * 2^(e-2) + b with residue (-1)^a 5^b, -1 for even residues.
    std::vector<std::int32_t> log;

    u64 two_b_modulus() const { return e >= 3 ? (u64(1) << (e - 2)) : 1; }
};

inline u64 least_primitive_root(u64 p) {
    if (p == 2) return 1;
    const u64 phi = p - 1;
    auto fac = factorize(phi);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (auto [r, e] : fac.factors)
            if (pow_mod(g, phi / r, p) == 1) {
                ok = false;
                break;
            }
        if (!ok) continue;
        // also a primitive root mod p^2, hence mod every p^e
        if (pow_mod(g, p - 1, p * p) == 1) continue;
        return g;
    }
}

inline std::shared_ptr<const PrimePowerLogs> prime_power_logs(u64 p, int e) {
    static std::mutex mu;
    static std::map<std::pair<u64, int>, std::shared_ptr<const PrimePowerLogs>> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(p, e);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    auto t = std::make_shared<PrimePowerLogs>();
    t->p = p;
    t->e = e;
    t->pe = ipow(p, e);
    t->log.assign(t->pe, -1);
    if (p == 2) {
        const u64 bm = t->two_b_modulus();
        const int amax = e >= 2 ? 2 : 1;
        for (int a = 0; a < amax; ++a) {
            u64 x = a ? t->pe - 1 : 1 % t->pe;
            for (u64 b = 0; b < bm; ++b) {
                t->log[x] = std::int32_t(u64(a) * bm + b);
                x = x * 5 % t->pe;
            }
        }
        if (t->pe == 2) t->log[1] = 0;
    } else {
        t->generator = least_primitive_root(p);
        const u64 phi = (p - 1) * ipow(p, e - 1);
        u64 x = 1;
        for (u64 k = 0; k < phi; ++k) {
            t->log[x] = std::int32_t(k);
            x = x * t->generator % t->pe;
        }
    }
    cache.emplace(key, t);
    return t;
}

}  // namespace detail

/// One prime-power component of a character.
struct CharacterComponent {
    u64 p = 0;
    int e = 0;
    u64 pe = 0;
    u64 log_a = 0;  // odd p: exponent mod phi(p^e); p = 2: sign exponent in {0,1}
    u64 log_b = 0;  // p = 2 only: exponent mod 2^(e-2)

    u64 phi() const { return (p - 1) * ipow(p, e - 1); }
    u64 two_b_modulus() const { return e >= 3 ? (u64(1) << (e - 2)) : 1; }

    /// Exponent of the conductor of this component.
    int conductor_exponent() const {
        if (p != 2) {
            if (log_a == 0) return 0;
            int v = 0;
            u64 a = log_a;
            while (a % p == 0 && v < e - 1) {
                a /= p;
                ++v;
            }
            return e - v;
        }
        if (e < 2) return 0;
        if (log_b == 0) return log_a ? 2 : 0;
        int v = 0;
        u64 b = log_b;
        while (b % 2 == 0) {
            b /= 2;
            ++v;
        }
        return e - v;
    }

    /// Order of this component as a character.
    u64 order() const {
        if (p != 2) return phi() / gcd(log_a, phi());
        const u64 bm = two_b_modulus();
        return lcm(log_a ? 2 : 1, bm / gcd(log_b, bm));
    }

    friend bool operator==(const CharacterComponent&, const CharacterComponent&) = default;
};

class DirichletCharacter {
public:
    /// chi_q(n, .) in the Conrey labelling; gcd(n, q) must be 1.
    DirichletCharacter(u64 q, u64 n) : q_(q) {
        if (q == 0) throw std::invalid_argument("DirichletCharacter: modulus must be positive");
        if (q > kMaxModulus) throw std::invalid_argument("DirichletCharacter: modulus exceeds 10^6");
        n %= q;
        if (q == 1) n = 0;
        if (gcd(n, q) != 1) throw std::invalid_argument("DirichletCharacter: index not coprime to modulus");
        for (auto [p, e] : factorize(q).factors) {
            auto logs = detail::prime_power_logs(p, e);
            CharacterComponent c{p, e, logs->pe, 0, 0};
            std::int32_t l = logs->log[n % logs->pe];
            if (p == 2) {
                const u64 bm = c.two_b_modulus();
                c.log_a = u64(l) / bm;
                c.log_b = u64(l) % bm;
            } else {
                c.log_a = u64(l);
            }
            components_.push_back(c);
        }
        finish();
    }

    /// Principal character mod q.
    static DirichletCharacter principal(u64 q) { return DirichletCharacter(q, 1); }
    static DirichletCharacter trivial() { return DirichletCharacter(1, 1); }

    /// Parse "q.index".
    static DirichletCharacter from_label(const std::string& label) {
        auto dot = label.find('.');
        if (dot == std::string::npos) throw std::invalid_argument("character label must be q.index: " + label);
        try {
            return DirichletCharacter(std::stoull(label.substr(0, dot)), std::stoull(label.substr(dot + 1)));
        } catch (const std::logic_error& e) {
            throw std::invalid_argument("bad character label '" + label + "': " + e.what());
        }
    }

    u64 modulus() const { return q_; }
    u64 index() const { return index_; }
    u64 order() const { return order_; }
    u64 conductor() const { return conductor_; }
    bool is_primitive() const { return conductor_ == q_; }
    bool is_principal() const { return order_ == 1; }
    bool is_real() const { return order_ <= 2; }
    std::string label() const { return std::to_string(q_) + "." + std::to_string(q_ == 1 ? 1 : index_); }
    const std::vector<CharacterComponent>& components() const { return components_; }

    /// chi(-1) = +1 (even) or -1 (odd).
    int parity() const { return evaluate(-1) == RootOfUnity{0, 1, false} ? 1 : -1; }

    RootOfUnity evaluate(i64 n) const {
        const u64 m = mod_floor(n, q_);
        if (gcd(m, q_) != 1 && q_ != 1) return RootOfUnity::zero_value();
        u64 k = 0;
        for (const auto& c : components_) {
            auto logs = detail::prime_power_logs(c.p, c.e);
            std::int32_t l = logs->log[m % c.pe];
            if (c.p == 2) {
                const u64 bm = c.two_b_modulus();
                const u64 am = u64(l) / bm, bmv = u64(l) % bm;
                if (c.log_a && am) k += order_ / 2;
                if (bm > 1) {
                    // e(log_b * b(m) / bm): order of this part divides bm and order_
                    const u64 num = c.log_b * bmv % bm;
                    const u64 g = gcd(num, bm);
                    if (num) k += (num / g) * (order_ / (bm / g));
                }
            } else {
                const u64 phi = c.phi();
                const u64 num = c.log_a * u64(l) % phi;
                const u64 g = gcd(num, phi);
                if (num) k += (num / g) * (order_ / (phi / g));
            }
            k %= order_;
        }
        return RootOfUnity::reduced(k, order_);
    }

    std::complex<double> value(i64 n) const { return evaluate(n).value(); }

    /// Value table over residues 0..q-1: exponent k of e(k/order), or -1 for zero.
    const std::vector<std::int32_t>& table() const {
        std::call_once(cache_->once, [this] {
            cache_->table.assign(q_, -1);
            for (u64 m = 0; m < q_; ++m) {
                auto v = evaluate(i64(m));
                if (!v.zero) cache_->table[m] = std::int32_t(v.k * (order_ / v.order));
            }
        });
        return cache_->table;
    }

    /// The primitive character inducing this one, as a character mod its conductor.
    DirichletCharacter primitive_part() const {
        std::vector<CharacterComponent> comps;
        for (const auto& c : components_) {
            const int f = c.conductor_exponent();
            if (f == 0) continue;
            CharacterComponent r{c.p, f, ipow(c.p, f), 0, 0};
            if (c.p == 2) {
                r.log_a = c.log_a;
                r.log_b = f >= 3 ? c.log_b >> (c.e - f) : 0;
            } else {
                r.log_a = c.log_a / ipow(c.p, c.e - f);
            }
            comps.push_back(r);
        }
        return DirichletCharacter(conductor_, std::move(comps));
    }

    /// Lift a character mod r to modulus q with r | q.
    DirichletCharacter induce(u64 q) const {
        if (q == 0 || q % q_ != 0) throw std::invalid_argument("induce: modulus must be a multiple of " + std::to_string(q_));
        std::vector<CharacterComponent> comps;
        for (auto [p, e] : factorize(q).factors) {
            CharacterComponent r{p, e, ipow(p, e), 0, 0};
            for (const auto& c : components_) {
                if (c.p != p) continue;
                if (p == 2) {
                    r.log_a = c.log_a;
                    r.log_b = c.e >= 3 ? c.log_b << (e - c.e) : 0;
                } else {
                    r.log_a = c.log_a * ipow(p, e - c.e);
                }
            }
            comps.push_back(r);
        }
        return DirichletCharacter(q, std::move(comps));
    }

    DirichletCharacter conjugate() const {
        std::vector<CharacterComponent> comps = components_;
        for (auto& c : comps) {
            if (c.p == 2) {
                const u64 bm = c.two_b_modulus();
                c.log_b = (bm - c.log_b % bm) % bm;
            } else {
                c.log_a = (c.phi() - c.log_a) % c.phi();
            }
        }
        return DirichletCharacter(q_, std::move(comps));
    }

    /// Pointwise product, as a character mod lcm of the moduli.
    friend DirichletCharacter product(const DirichletCharacter& x, const DirichletCharacter& y) {
        const u64 q = lcm(x.q_, y.q_);
        auto a = x.induce(q), b = y.induce(q);
        auto comps = a.components_;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            auto& c = comps[i];
            const auto& d = b.components_[i];
            if (c.p == 2) {
                c.log_a = (c.log_a + d.log_a) % 2;
                const u64 bm = c.two_b_modulus();
                c.log_b = (c.log_b + d.log_b) % bm;
                if (c.e < 2) c.log_a = 0;
            } else {
                c.log_a = (c.log_a + d.log_a) % c.phi();
            }
        }
        return DirichletCharacter(q, std::move(comps));
    }

    friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
        return a.q_ == b.q_ && a.components_ == b.components_;
    }

    static constexpr u64 kMaxModulus = 1'000'000;

private:
    DirichletCharacter(u64 q, std::vector<CharacterComponent> comps) : q_(q), components_(std::move(comps)) { finish(); }

    void finish() {
        order_ = 1;
        conductor_ = 1;
        // Conrey index by CRT over the component residues
        u64 idx = 0, mod = 1;
        for (const auto& c : components_) {
            order_ = lcm(order_, c.order());
            conductor_ *= ipow(c.p, c.conductor_exponent());
            u64 residue;
            if (c.p == 2) {
                residue = (c.log_a ? c.pe - 1 : 1) % c.pe;
                residue = residue * pow_mod(5, c.log_b, c.pe) % c.pe;
                if (c.pe == 2) residue = 1;
            } else {
                auto logs = detail::prime_power_logs(c.p, c.e);
                residue = pow_mod(logs->generator, c.log_a, c.pe);
            }
            // combine idx mod `mod` with residue mod pe
            const u64 t = mul_mod((residue + c.pe - idx % c.pe) % c.pe, inv_mod(mod % c.pe, c.pe), c.pe);
            idx += mod * t;
            mod *= c.pe;
        }
        index_ = q_ == 1 ? 1 : idx % q_;
        cache_ = std::make_shared<TableCache>();
    }

    struct TableCache {
        std::once_flag once;
        std::vector<std::int32_t> table;
    };

    u64 q_ = 1;
    u64 index_ = 1;
    u64 order_ = 1;
    u64 conductor_ = 1;
    std::vector<CharacterComponent> components_;
    std::shared_ptr<TableCache> cache_;
};

/// All phi(q) characters mod q, ordered by Conrey index.
inline std::vector<DirichletCharacter> enumerate_characters(u64 q) {
    if (q == 0) throw std::invalid_argument("enumerate_characters: q must be positive");
    std::vector<DirichletCharacter> out;
    if (q == 1) {
        out.push_back(DirichletCharacter::trivial());
        return out;
    }
    for (u64 n = 1; n < q; ++n)
        if (gcd(n, q) == 1) out.emplace_back(q, n);
    return out;
}

/// Primitive characters mod q only.
inline std::vector<DirichletCharacter> enumerate_primitive_characters(u64 q) {
    auto all = enumerate_characters(q);
    std::vector<DirichletCharacter> out;
    for (auto& c : all)
        if (c.is_primitive()) out.push_back(std::move(c));
    return out;
}

struct ConductorResult {
    u64 conductor;
    DirichletCharacter primitive;
};

inline ConductorResult conductor_and_primitive_part(const DirichletCharacter& chi) {
    return {chi.conductor(), chi.primitive_part()};
}

}  // namespace hlx
