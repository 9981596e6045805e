#include <gtest/gtest.h>

#include <cmath>

#include "hlx/singular.hpp"

using namespace hlx;

namespace {

std::vector<u64> sieve_primes(u64 limit) {
    std::vector<bool> comp(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) comp[j] = true;
    }
    return out;
}

// prod_{p | m} (1 + 1/(p-1)) prod_{p not | m, p <= limit} (1 - 1/(p-1)^2), straight from the definition.
double classical_by_product(u64 m, const std::vector<u64>& primes) {
    double v = 1;
    for (u64 p : primes) {
        const double pm1 = double(p - 1);
        v *= (m % p == 0) ? 1 + 1 / pm1 : 1 - 1 / (pm1 * pm1);
    }
    return v;
}

DirichletCharacter quadratic(u64 p) {
    for (auto& c : enumerate_characters(p))
        if (c.order() == 2) return c;
    throw std::logic_error("no quadratic character");
}

}  // namespace

TEST(EulerConstants, TwinPrimeConstantAgainstPrimeProduct) {
    auto primes = sieve_primes(10'000'000);
    long double c2 = 1, b = 1;
    for (u64 p : primes) {
        if (p == 2) continue;
        const long double pm1 = p - 1;
        c2 *= 1 - 1 / (pm1 * pm1);
        b *= 1 + 2.0L / ((long double)p * (p - 2));
    }
    // the truncated products overshoot by at most exp(sum_{p > 10^7} 2/p^2) - 1 < 2e-8
    EXPECT_NEAR(twin_prime_constant(), double(c2), 2e-8);
    EXPECT_LE(twin_prime_constant(), double(c2));
    EXPECT_NEAR(constant_b(), double(b), 4e-8);
    EXPECT_GE(constant_b(), double(b));
}

TEST(EulerConstants, InternalConsistency) {
    const auto& ec = detail::euler_constants();
    EXPECT_NEAR(ec.b_const, ec.abs_odd / ec.c2, 1e-14);
    EXPECT_LT(ec.error_bound, 1e-13);
}

TEST(EulerConstants, ZetaMinusOne) {
    EXPECT_NEAR(detail::zeta_minus_one(2), std::numbers::pi * std::numbers::pi / 6 - 1, 1e-15);
    EXPECT_NEAR(detail::zeta_minus_one(4), std::pow(std::numbers::pi, 4) / 90 - 1, 1e-15);
    EXPECT_NEAR(detail::zeta_minus_one(40) / std::pow(2.0, -40), 1.0, 1e-6);
}

TEST(ClassicalSeries, HandValues) {
    EXPECT_EQ(classical_singular_series(3), 0.0);
    EXPECT_EQ(classical_singular_series(1), 0.0);
    EXPECT_NEAR(classical_singular_series(4), 1.32032363169, 1e-10);
    EXPECT_NEAR(classical_singular_series(6), 2 * classical_singular_series(4), 1e-14);
    EXPECT_NEAR(classical_singular_series(2), classical_singular_series(4), 1e-15);
    EXPECT_THROW(classical_singular_series(0), std::invalid_argument);
    EXPECT_THROW(classical_singular_series(4, 1e-16), std::invalid_argument);
}

TEST(ClassicalSeries, AgreesWithDefinitionProduct) {
    auto primes = sieve_primes(200000);
    for (u64 m = 1; m <= 300; ++m)
        EXPECT_NEAR(classical_singular_series(i64(m)), classical_by_product(m, primes), 2e-5) << m;
}

TEST(Coefficient, TrivialPair) {
    auto one = DirichletCharacter::trivial();
    for (Variant v : {Variant::goldbach, Variant::twin}) {
        for (i64 m : {1, 2, 7, 100}) EXPECT_LT(std::abs(coefficient_b(one, one, 1, m, v) - cplx(1, 0)), 1e-14);
        for (i64 m : {2, 4, 100}) EXPECT_LT(std::abs(coefficient_b(one, one, 2, m, v) - cplx(1, 0)), 1e-14);
    }
    EXPECT_THROW(coefficient_b(quadratic(3), one, 4, 2, Variant::goldbach), std::invalid_argument);
}

TEST(Coefficient, NonSquarefreeMultiplierVanishes) {
    auto chis = primitive_characters_up_to(12);
    for (const auto& a : chis)
        for (const auto& b : chis) {
            if (lcm(a.modulus(), b.modulus()) > 12) continue;
            for (Variant v : {Variant::goldbach, Variant::twin}) {
                SingularPair pair(a, b, v);
                for (u64 t : {4, 8, 9, 12})
                    for (i64 m : {1, 2, 6, 12, 30})
                        ASSERT_LT(std::abs(pair.coefficient(pair.q0() * t, m)), 1e-12)
                            << a.label() << " " << b.label() << " t=" << t;
            }
        }
}

TEST(Series, TermsMatchDirectFiniteSums) {
    auto chis = primitive_characters_up_to(8);
    for (const auto& a : chis)
        for (const auto& b : chis) {
            if (lcm(a.modulus(), b.modulus()) > 8) continue;
            for (Variant v : {Variant::goldbach, Variant::twin}) {
                SingularPair pair(a, b, v);
                for (i64 m : {1, 2, 3, 4, 6, 10, 12, -6}) {
                    cplx direct = 0;
                    for (u64 T = 1; T <= 10; ++T) {
                        direct += pair.coefficient(pair.q0() * T, m);
                        ASSERT_LT(std::abs(pair.partial(m, T).value - direct), 1e-11)
                            << a.label() << " " << b.label() << " " << to_string(v) << " m=" << m << " T=" << T;
                    }
                }
            }
        }
}

TEST(Series, TailBoundMonotoneAndCovering) {
    auto one = DirichletCharacter::trivial();
    SingularPair pair(one, one, Variant::goldbach);
    double prev = 1e9;
    const double exact = classical_singular_series(12);
    for (u64 T : {10, 100, 1000, 10000}) {
        auto p = pair.partial(12, T);
        EXPECT_LE(p.tail_bound, prev);
        EXPECT_LE(std::abs(p.value - exact), p.tail_bound) << T;
        prev = p.tail_bound;
    }
    auto p = pair.partial(4, 10000);
    EXPECT_NEAR(p.value.real(), classical_singular_series(4), p.tail_bound);
}

TEST(ClosedForm, TrivialPairIsClassical) {
    auto one = DirichletCharacter::trivial();
    for (Variant v : {Variant::goldbach, Variant::twin}) {
        SingularPair pair(one, one, v);
        for (i64 m = 1; m <= 1000; ++m) {
            auto r = closed_form(pair, m);
            ASSERT_NEAR(r.closed.value.real(), classical_singular_series(m), 1e-12);
            ASSERT_NEAR(r.closed.value.imag(), 0, 1e-14);
            ASSERT_TRUE(r.paths_agree);
        }
    }
}

TEST(ClosedForm, SpecExampleQuadraticMod3) {
    auto one = DirichletCharacter::trivial();
    auto chi = quadratic(3);
    SingularPair pair(one, chi, Variant::goldbach);
    auto c = pair.closed(6);
    auto p = pair.partial(6, 10000);
    EXPECT_LE(std::abs(p.value - c.value), p.tail_bound + 1e-9);
    // 3 | m kills the term: c_chi(0) = 0 for the nonprincipal character mod 3
    EXPECT_EQ(c.vanish, VanishReason::m_shares_l2);
    EXPECT_LT(std::abs(p.value), 1e-15);
    auto c4 = pair.closed(4);
    auto p4 = pair.partial(4, 10000);
    EXPECT_GT(std::abs(c4.value), 0.1);
    EXPECT_LE(std::abs(p4.value - c4.value), p4.tail_bound + 1e-9);
}

TEST(ClosedForm, OddMWithOddModuliVanishes) {
    auto chis = primitive_characters_up_to(15);
    for (const auto& a : chis)
        for (const auto& b : chis) {
            if (lcm(a.modulus(), b.modulus()) % 2 == 0) continue;
            SingularPair pair(a, b, Variant::goldbach);
            for (i64 m = 1; m <= 41; m += 2) EXPECT_EQ(pair.closed(m).value, cplx(0, 0));
        }
}

TEST(ClosedForm, ThreeWayAgreementSmallRange) {
    auto chis = primitive_characters_up_to(12);
    int nonzero = 0;
    for (const auto& a : chis)
        for (const auto& b : chis) {
            if (lcm(a.modulus(), b.modulus()) > 12) continue;
            for (Variant v : {Variant::goldbach, Variant::twin}) {
                SingularPair pair(a, b, v);
                for (i64 m = 1; m <= 60; ++m) {
                    auto r = closed_form(pair, m);
                    auto p = pair.partial(m, 2000);
                    ASSERT_TRUE(r.paths_agree) << a.label() << " " << b.label() << " m=" << m;
                    ASSERT_LE(std::abs(p.value - r.closed.value), p.tail_bound + 1e-9)
                        << a.label() << " " << b.label() << " " << to_string(v) << " m=" << m;
                    if (std::abs(r.closed.b_q0) > 1e-12) {
                        ++nonzero;
                        ASSERT_NEAR(std::abs(r.closed.b_q0), r.modulus_formula, 1e-10);
                        EXPECT_EQ(r.closed.vanish == VanishReason::none ||
                                      r.closed.vanish == VanishReason::euler_factor_zero,
                                  true);
                    } else {
                        ASSERT_LT(std::abs(r.semi_closed.b_q0), 1e-12);
                    }
                    auto br = pair.bounds(m, r.closed);
                    EXPECT_TRUE(br.ok()) << a.label() << " " << b.label() << " m=" << m;
                }
            }
        }
    EXPECT_GT(nonzero, 100);
}

TEST(ClosedForm, ConjugationSymmetry) {
    auto chis = primitive_characters_up_to(13);
    for (const auto& a : chis)
        for (const auto& b : chis) {
            if (lcm(a.modulus(), b.modulus()) > 30) continue;
            for (Variant v : {Variant::goldbach, Variant::twin}) {
                SingularPair pair(a, b, v), bar(a.conjugate(), b.conjugate(), v);
                for (i64 m : {2, 6, 12, 15, 30}) {
                    cplx x = pair.semi_closed(m).value, y = bar.semi_closed(m).value;
                    ASSERT_LT(std::abs(std::conj(x) - y), 1e-10);
                }
            }
        }
}

TEST(UStatistic, Examples) {
    auto one = DirichletCharacter::trivial();
    EXPECT_EQ(u_statistic(one, one, 10, Variant::goldbach), 1.0);
    DirichletCharacter c52(5, 2);
    // chi^2 is the quadratic character mod 5, conductor 5
    EXPECT_EQ(u_statistic(c52, c52, 5, Variant::goldbach), 5.0);
    EXPECT_EQ(u_statistic(c52, c52, 5, Variant::twin), 1.0);
    // chi mod 3, chi mod 4: r_i^2/(r1,r2)^2 = 9, 16; r_i/(12, r_i) = 1; cond = 12
    EXPECT_EQ(u_statistic(quadratic(3), DirichletCharacter(4, 3), 12, Variant::goldbach), 16.0);
    EXPECT_THROW(u_statistic(one, one, 0, Variant::goldbach), std::invalid_argument);
}

TEST(Bounds, TrivialPairEquality) {
    auto one = DirichletCharacter::trivial();
    auto r = bound_report(one, one, 10, Variant::goldbach);
    EXPECT_TRUE(r.ok());
    EXPECT_NEAR(r.smod, r.classical, 1e-14);
    EXPECT_TRUE(r.large);
    EXPECT_TRUE(r.relations_hold);
}

TEST(Decomposition, Invariants) {
    auto chis = primitive_characters_up_to(20);
    for (const auto& a : chis)
        for (const auto& b : chis) {
            SingularPair pair(a, b, Variant::goldbach);
            for (i64 m : {1, 2, 6, 9, 36, -12}) {
                auto p = pair.decompose(m);
                EXPECT_EQ(p.d * p.f, p.g);
                EXPECT_EQ(p.q0, p.d * p.f * p.l1 * p.l2);
            }
        }
}
