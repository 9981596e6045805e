#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "hlx/characters.hpp"

using namespace hlx;

namespace {

using cd = std::complex<double>;

bool close(cd a, cd b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

std::vector<cd> values(const DirichletCharacter& chi) {
    std::vector<cd> v(chi.modulus());
    for (u64 a = 0; a < chi.modulus(); ++a) v[a] = chi.value(i64(a));
    return v;
}

bool same_values(const std::vector<cd>& a, const std::vector<cd>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!close(a[i], b[i], 1e-9)) return false;
    return true;
}

// Least d | q such that chi(a) = 1 whenever a = 1 mod d and (a, q) = 1.
u64 brute_conductor(const DirichletCharacter& chi) {
    const u64 q = chi.modulus();
    for (u64 d : divisors(q)) {
        bool ok = true;
        for (u64 a = 1; a < q && ok; a += d)
            if (gcd(a, q) == 1 && !close(chi.value(i64(a)), 1.0, 1e-9)) ok = false;
        if (ok) return d;
    }
    return q;
}

// Number of primitive characters mod q via sum_{d | q} mu(q/d) phi(d).
i64 primitive_count(u64 q) {
    i64 s = 0;
    for (u64 d : divisors(q)) s += moebius(q / d) * i64(euler_phi(d));
    return s;
}

int legendre(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

}  // namespace

TEST(Characters, HandValues) {
    DirichletCharacter c52(5, 2);
    EXPECT_EQ(c52.order(), 4u);
    EXPECT_TRUE(close(c52.value(2), cd(0, 1)));
    EXPECT_EQ(DirichletCharacter(3, 2).parity(), -1);
    EXPECT_EQ(DirichletCharacter(7, 3).order(), 6u);
    EXPECT_EQ(DirichletCharacter(12, 5).conductor(), 3u);
    EXPECT_EQ(DirichletCharacter(12, 7).conductor(), 4u);
    EXPECT_EQ(DirichletCharacter(8, 5).conductor(), 8u);
    EXPECT_EQ(DirichletCharacter(8, 3).conductor(), 8u);
    EXPECT_EQ(DirichletCharacter(8, 7).conductor(), 4u);
    EXPECT_EQ(DirichletCharacter::from_label("12.5"), DirichletCharacter(12, 5));
    EXPECT_EQ(DirichletCharacter::trivial().label(), "1.1");
    EXPECT_EQ(DirichletCharacter::trivial().conductor(), 1u);
}

TEST(Characters, InvalidInputs) {
    EXPECT_THROW(DirichletCharacter(0, 1), std::invalid_argument);
    EXPECT_THROW(DirichletCharacter(12, 4), std::invalid_argument);
    EXPECT_THROW(DirichletCharacter(2'000'000, 1), std::invalid_argument);
    EXPECT_THROW(DirichletCharacter::from_label("12"), std::invalid_argument);
    EXPECT_THROW(DirichletCharacter(10, 3).induce(15), std::invalid_argument);
}

TEST(Characters, ConreySymmetry) {
    for (u64 q = 2; q <= 120; ++q)
        for (u64 n = 1; n < q; ++n) {
            if (gcd(n, q) != 1) continue;
            DirichletCharacter chi(q, n);
            for (u64 m = 1; m < q; ++m)
                if (gcd(m, q) == 1) {
                    DirichletCharacter psi(q, m);
                    ASSERT_TRUE(close(chi.value(i64(m)), psi.value(i64(n)), 1e-9)) << q << " " << n << " " << m;
                }
        }
}

TEST(Characters, FullGroupStructure) {
    // Completely multiplicative, periodic, supported on units, and pairwise distinct:
    // this pins down the whole character group.
    for (u64 q = 1; q <= 72; ++q) {
        auto chars = enumerate_characters(q);
        ASSERT_EQ(chars.size(), euler_phi(q));
        std::vector<std::vector<cd>> tables;
        for (const auto& chi : chars) {
            auto v = values(chi);
            for (u64 a = 0; a < q; ++a) {
                EXPECT_EQ(std::abs(v[a]) > 0.5, gcd(a, q) == 1);
                EXPECT_TRUE(close(chi.value(i64(a + 3 * q)), v[a]));
                EXPECT_TRUE(close(chi.value(i64(a) - i64(5 * q)), v[a]));
                for (u64 b = 0; b < q; ++b) ASSERT_TRUE(close(v[a * b % q], v[a] * v[b], 1e-9));
            }
            for (const auto& t : tables) EXPECT_FALSE(same_values(t, v));
            tables.push_back(v);
        }
    }
}

TEST(Characters, Orthogonality) {
    for (u64 q = 1; q <= 200; q += (q < 60 ? 1 : 7)) {
        auto chars = enumerate_characters(q);
        const double phi = double(euler_phi(q));
        // row orthogonality
        for (std::size_t i = 0; i < chars.size(); i += 1 + chars.size() / 12)
            for (std::size_t j = 0; j < chars.size(); j += 1 + chars.size() / 12) {
                cd s = 0;
                for (u64 a = 0; a < q; ++a) s += chars[i].value(i64(a)) * std::conj(chars[j].value(i64(a)));
                EXPECT_TRUE(close(s, i == j ? phi : 0.0, 1e-8)) << q << " " << i << " " << j;
            }
        // column orthogonality
        for (u64 a = 0; a < q; ++a) {
            cd s = 0;
            for (const auto& chi : chars) s += chi.value(i64(a));
            EXPECT_TRUE(close(s, a % q == 1 % q ? phi : 0.0, 1e-8)) << q << " " << a;
        }
    }
}

TEST(Characters, ConductorMatchesBruteForce) {
    for (u64 q = 1; q <= 200; ++q)
        for (const auto& chi : enumerate_characters(q)) {
            ASSERT_EQ(chi.conductor(), brute_conductor(chi)) << chi.label();
            auto star = chi.primitive_part();
            EXPECT_EQ(star.modulus(), chi.conductor());
            EXPECT_TRUE(star.is_primitive());
            EXPECT_EQ(star.order(), chi.order());
            for (u64 a = 1; a < q; ++a)
                if (gcd(a, q) == 1) {
                    ASSERT_TRUE(close(star.value(i64(a)), chi.value(i64(a)), 1e-9));
                }
        }
}

TEST(Characters, InductionRoundTrip) {
    for (u64 q = 1; q <= 200; ++q)
        for (const auto& chi : enumerate_characters(q)) {
            auto star = chi.primitive_part();
            EXPECT_EQ(star.induce(q), chi) << chi.label();
            auto up = chi.induce(2 * q);
            EXPECT_EQ(up.conductor(), chi.conductor());
            EXPECT_EQ(up.primitive_part(), star);
        }
}

TEST(Characters, PrimitiveCounts) {
    for (u64 q = 1; q <= 500; ++q) {
        i64 n = i64(enumerate_primitive_characters(q).size());
        EXPECT_EQ(n, primitive_count(q)) << q;
    }
}

TEST(Characters, LegendreSymbol) {
    for (u64 p = 3; p < 400; p += 2) {
        if (!is_prime(p)) continue;
        int found = 0;
        for (const auto& chi : enumerate_characters(p)) {
            if (chi.order() != 2) continue;
            ++found;
            for (u64 a = 0; a < p; ++a) EXPECT_TRUE(close(chi.value(i64(a)), double(legendre(a, p)))) << p;
        }
        EXPECT_EQ(found, 1);
    }
}

TEST(Characters, ProductAndConjugate) {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 300; ++it) {
        u64 q1 = rng() % 60 + 1, q2 = rng() % 60 + 1;
        auto c1 = enumerate_characters(q1), c2 = enumerate_characters(q2);
        const auto& x = c1[rng() % c1.size()];
        const auto& y = c2[rng() % c2.size()];
        auto z = product(x, y);
        ASSERT_EQ(z.modulus(), lcm(q1, q2));
        for (u64 a = 0; a < z.modulus(); ++a)
            ASSERT_TRUE(close(z.value(i64(a)), x.value(i64(a)) * y.value(i64(a)), 1e-9));
        auto xb = x.conjugate();
        for (u64 a = 0; a < q1; ++a) ASSERT_TRUE(close(xb.value(i64(a)), std::conj(x.value(i64(a))), 1e-12));
        EXPECT_EQ(product(x, xb), DirichletCharacter::principal(q1));
    }
}

TEST(Characters, TableMatchesEvaluate) {
    DirichletCharacter chi(9999, 1234 + 1);
    const auto& t = chi.table();
    for (u64 a = 0; a < chi.modulus(); a += 37) {
        auto v = chi.evaluate(i64(a));
        if (v.zero)
            EXPECT_EQ(t[a], -1);
        else
            EXPECT_TRUE(close(RootOfUnity::unit_root(u64(t[a]), chi.order()), v.value()));
    }
}

TEST(Characters, LargeModulusHomomorphism) {
    std::mt19937_64 rng(5);
    const u64 q = 2 * 2 * 2 * 2 * 3 * 3 * 7 * 11 * 13;  // 144144
    for (int it = 0; it < 20; ++it) {
        u64 n;
        do n = rng() % q; while (gcd(n, q) != 1);
        DirichletCharacter chi(q, n);
        for (int k = 0; k < 200; ++k) {
            u64 a = rng() % q, b = rng() % q;
            ASSERT_TRUE(close(chi.value(i64(mul_mod(a, b, q))), chi.value(i64(a)) * chi.value(i64(b)), 1e-9));
        }
        EXPECT_EQ(chi.conductor(), brute_conductor(chi));
    }
}
