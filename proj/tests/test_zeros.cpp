#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hlx/zeros.hpp"

using namespace hlx;

namespace {

// Reference values below were produced once with mpmath at 30 digits and frozen.

DirichletCharacter quadratic(u64 q) {
    for (auto& c : enumerate_primitive_characters(q))
        if (c.order() == 2) return c;
    throw std::logic_error("no primitive quadratic character");
}

const PrimeTable& primes_1e4() {
    static const PrimeTable t = sieve(10000);
    return t;
}

const ZeroTable& zero_table() {
    static const ZeroTable table = [] {
        ZeroTable z;
        z.add_scan(compute_zeta_zeros(250), DirichletCharacter::trivial());
        for (u64 q : {3, 4}) z.add_scan(compute_dirichlet_zeros(quadratic(q), 100), quadratic(q));
        return z;
    }();
    return table;
}

}  // namespace

TEST(Hurwitz, ClassicalValues) {
    const double pi = std::numbers::pi;
    EXPECT_NEAR(std::abs(riemann_zeta(2.0) - pi * pi / 6), 0, 1e-14);
    EXPECT_NEAR(std::abs(riemann_zeta(-1.0) + 1.0 / 12), 0, 1e-13);
    EXPECT_NEAR(std::abs(riemann_zeta(0.5) + 1.4603545088095868), 0, 1e-13);
    const cplx s(0.7, 12);
    EXPECT_LT(std::abs(hurwitz_zeta(s, 0.5) - (std::pow(2.0, s) - 1.0) * riemann_zeta(s)), 1e-12);
    EXPECT_THROW(hurwitz_zeta(1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(hurwitz_zeta(2.0, 0.0), std::invalid_argument);
}

TEST(Hurwitz, AgainstFrozenReference) {
    EXPECT_LT(std::abs(hurwitz_zeta(cplx(0.5, 30), 0.3) - cplx(1.238965152124647, -1.588185288258636)), 1e-12);
    EXPECT_LT(std::abs(hurwitz_zeta(cplx(2, -7), 0.01) - cplx(6821.282338381352, -7313.366642841179)), 1e-8);
    EXPECT_LT(std::abs(hurwitz_zeta(cplx(0.5, 400), 0.77) - cplx(-1.778319380405187, -2.352641392785163)), 1e-11);
}

TEST(Hurwitz, DirichletSeriesAtSigmaThree) {
    // absolutely convergent region: direct sum plus integral tail
    const auto chi = DirichletCharacter(5, 2);
    const cplx s(3, 2);
    CompensatedSum direct;
    for (i64 n = 1; n <= 200000; ++n) direct.add(chi.value(n) * std::exp(-s * std::log(double(n))));
    EXPECT_LT(std::abs(dirichlet_l(s, chi) - direct.value()), 1e-10);
}

TEST(LFunction, AgainstFrozenReference) {
    const auto c3 = quadratic(3), c4 = quadratic(4);
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, 20), c3) - cplx(0.7612833440716295, -0.3147508867440714)), 1e-12);
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, 73.3), c3) - cplx(0.9682873406987856, 0.199513637529096)), 1e-12);
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, 20), c4) - cplx(2.851065154483346, -0.3648365790849139)), 1e-12);
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, 73.3), c4) - cplx(0.8785037564490113, -1.143154904684029)), 1e-12);
    const DirichletCharacter c5(5, 2);
    ASSERT_EQ(c5.value(2), cplx(0, 1));
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, 10), c5) - cplx(2.124996823450796, 2.163859185370421)), 1e-12);
    EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, -10), c5) - cplx(0.6408173587457763, -0.1574197907529031)), 1e-12);
    EXPECT_LT(std::abs(dirichlet_l(cplx(2, 1.5), c5) - cplx(1.120418418188105, 0.1716584051803817)), 1e-12);
    // conj(L(conj s, chi)) = L(s, conj chi)
    EXPECT_LT(std::abs(std::conj(dirichlet_l(cplx(0.5, 10), c5)) - dirichlet_l(cplx(0.5, -10), c5.conjugate())), 1e-12);
}

TEST(RotatedL, HardyZAgainstReference) {
    EXPECT_NEAR(hardy_z(50), -0.340735005955025, 1e-11);
    EXPECT_NEAR(hardy_z(200.5), 3.578675925068839, 1e-10);
    EXPECT_NEAR(hardy_z(480.3), -8.173884655903281, 1e-9);
}

TEST(RotatedL, RealOnCriticalLine) {
    for (u64 q : {1, 3, 4, 5, 7, 8, 11, 12, 13, 24, 97}) {
        for (const auto& chi : enumerate_primitive_characters(q)) {
            const RotatedL z(chi);
            for (double t : {0.3, 5.5, 17.25, 60.0, 99.0}) {
                const cplx v = z.raw(t);
                EXPECT_LT(std::abs(v.imag()), 1e-9 * std::max(1.0, std::abs(v))) << chi.label() << " t=" << t;
            }
        }
    }
    EXPECT_THROW(RotatedL(DirichletCharacter(12, 7)), std::invalid_argument);  // conductor 4
}

TEST(ZetaZeros, FirstZerosAndCount) {
    const auto scan = compute_zeta_zeros(100);
    EXPECT_TRUE(scan.warnings.empty());
    ASSERT_EQ(scan.zeros.size(), 29u);
    EXPECT_NEAR(scan.zeros[0].gamma, 14.13472514173469, 1e-8);
    EXPECT_NEAR(scan.zeros[1].gamma, 21.02203963877155, 1e-8);
    EXPECT_NEAR(scan.zeros[2].gamma, 25.01085758014569, 1e-8);
    EXPECT_NEAR(scan.zeros[28].gamma, 98.83119421819369, 1e-8);
    for (const auto& z : scan.zeros) {
        EXPECT_GT(z.gamma, 14);
        EXPECT_EQ(z.beta, 0.5);
        EXPECT_EQ(z.source, ZeroSource::computed);
    }
    EXPECT_EQ(zeta_zero_count(100), 29);
    EXPECT_THROW(compute_zeta_zeros(501), std::invalid_argument);
}

TEST(ZetaZeros, ScanMatchesArgumentPrinciple) {
    const auto& all = zero_table().for_character(1, 1);
    for (double T : {30.0, 50.0, 77.7, 100.0, 150.0, 249.0}) {
        const auto n = std::count_if(all.begin(), all.end(), [&](const ZeroRecord& r) { return r.gamma <= T; });
        EXPECT_EQ(long(n), zeta_zero_count(T)) << T;
    }
}

TEST(DirichletZeros, LowestZeros) {
    const auto z3 = zero_table().for_character(3, quadratic(3).index());
    const auto z4 = zero_table().for_character(4, quadratic(4).index());
    ASSERT_FALSE(z3.empty());
    ASSERT_FALSE(z4.empty());
    EXPECT_NEAR(z3[0].gamma, 8.0397371556815, 1e-4);
    EXPECT_NEAR(z4[0].gamma, 6.0209489046976, 1e-4);
    // each located zero is a zero of L
    for (const auto& z : z3) EXPECT_LT(std::abs(dirichlet_l(z.rho(), quadratic(3))), 1e-7) << z.gamma;
    EXPECT_THROW(compute_dirichlet_zeros(DirichletCharacter(101, 2), 10), std::invalid_argument);
}

TEST(DirichletZeros, ConjugateCharacterReflects) {
    const DirichletCharacter c(5, 2);
    const auto plus = compute_dirichlet_zeros(c.conjugate(), 30).zeros;
    // zeros of conj(chi) at +gamma are zeros of chi at -gamma
    ASSERT_FALSE(plus.empty());
    for (const auto& z : plus) EXPECT_LT(std::abs(dirichlet_l(cplx(0.5, -z.gamma), c)), 1e-7);
    const auto own = compute_dirichlet_zeros(c, 30).zeros;
    ASSERT_FALSE(own.empty());
    EXPECT_GT(std::abs(own[0].gamma - plus[0].gamma), 1e-3);
}

TEST(ZeroFile, RoundTrip) {
    std::istringstream empty("");
    EXPECT_TRUE(parse_zeros(empty).records().empty());

    ZeroTable t;
    t.add_scan(compute_dirichlet_zeros(quadratic(4), 20), quadratic(4));
    t.merge({ZeroRecord{3, 2, 0, 0.999, ZeroSource::ingested, 0}});
    std::ostringstream out;
    write_zeros(t, out);
    std::istringstream in(out.str());
    const auto back = parse_zeros(in);
    ASSERT_EQ(back.records().size(), t.records().size());
    for (std::size_t i = 0; i < t.records().size(); ++i) {
        EXPECT_NEAR(back.records()[i].gamma, t.records()[i].gamma, 1e-10 * std::max(1.0, t.records()[i].gamma));
        EXPECT_EQ(back.records()[i].beta, t.records()[i].beta);
        EXPECT_EQ(back.records()[i].label(), t.records()[i].label());
    }
    EXPECT_EQ(back.coverage(4, quadratic(4).index()), 20);
    // the saved form is a fixed point
    std::ostringstream again;
    write_zeros(back, again);
    EXPECT_EQ(again.str(), out.str());
}

TEST(ZeroFile, DedupAndErrors) {
    std::istringstream dup("1 1 14.1347251417\n1 1 14.1347255\n# comment\n1 1 21.022\n");
    const auto t = parse_zeros(dup);
    EXPECT_EQ(t.records().size(), 2u);
    ASSERT_EQ(t.warnings().size(), 1u);

    std::istringstream bad("1 1 14.13\n1 1 abc\n");
    try {
        parse_zeros(bad, "f.txt");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("f.txt:2"), std::string::npos);
    }
    std::istringstream beta("3 2 5.0 1.0\n");
    EXPECT_THROW(parse_zeros(beta), std::runtime_error);
    std::istringstream fields("3 2\n");
    EXPECT_THROW(parse_zeros(fields), std::runtime_error);
}

TEST(ExceptionalSet, PoleAndFilter) {
    ZeroTable empty;
    auto e = build_exceptional_set(empty, 20, 50, 1e5);
    ASSERT_EQ(e.members.size(), 1u);
    EXPECT_TRUE(e.members[0].pole);
    EXPECT_EQ(e.members[0].sign, 1);

    // critical-line zeros fail beta >= 1 - H/L when H < L/2
    const double L = std::log(1e5);
    auto crit = build_exceptional_set(zero_table(), 0.4 * L, 50, 1e5);
    EXPECT_EQ(crit.members.size(), 1u);

    ZeroTable syn;
    syn.merge({ZeroRecord{3, 2, 0, 0.999, ZeroSource::ingested, 0}});
    auto s = build_exceptional_set(syn, 10, 50, 1e6);
    ASSERT_EQ(s.members.size(), 2u);
    EXPECT_EQ(s.members[1].sign, -1);
    EXPECT_EQ(s.members[1].label(), "3.2");
    EXPECT_TRUE(s.members[1].siegel);  // delta = 0.001 <= 0.05/log 10^6
    EXPECT_FALSE(build_exceptional_set(syn, 10, 2, 1e6).members.size() > 1);  // conductor above P
    EXPECT_THROW(build_exceptional_set(syn, 10, 50, 10), std::invalid_argument);
}

TEST(ExceptionalSet, ComplexZerosComeWithConjugates) {
    ZeroTable t;
    t.merge({ZeroRecord{5, 2, 3.0, 0.97, ZeroSource::ingested, 0}});
    auto e = build_exceptional_set(t, 20, 50, 1e4);
    ASSERT_EQ(e.members.size(), 3u);
    EXPECT_EQ(e.members[1].label(), "5.2");
    EXPECT_EQ(e.members[1].gamma, 3.0);
    EXPECT_EQ(e.members[2].label(), "5.3");
    EXPECT_EQ(e.members[2].gamma, -3.0);
    EXPECT_FALSE(e.members[1].siegel);
}

TEST(ExceptionalSet, OrderIndependent) {
    std::vector<ZeroRecord> recs = {{3, 2, 0, 0.99, ZeroSource::ingested, 0},
                                    {5, 2, 2.0, 0.95, ZeroSource::ingested, 0},
                                    {1, 1, 14.13, 0.96, ZeroSource::ingested, 0}};
    ZeroTable a, b;
    a.merge(recs);
    std::reverse(recs.begin(), recs.end());
    b.merge(recs);
    const auto ea = build_exceptional_set(a, 20, 50, 1e4), eb = build_exceptional_set(b, 20, 50, 1e4);
    ASSERT_EQ(ea.members.size(), eb.members.size());
    for (std::size_t i = 0; i < ea.members.size(); ++i) {
        EXPECT_EQ(ea.members[i].label(), eb.members[i].label());
        EXPECT_EQ(ea.members[i].gamma, eb.members[i].gamma);
    }
}

TEST(ExplicitFormula, WithinBudget) {
    const auto& z = zero_table();
    for (double x : {100.0, 1000.0, 5000.0}) {
        for (const auto& chi : {DirichletCharacter::trivial(), quadratic(3), quadratic(4)}) {
            const double T = std::max(std::sqrt(x), 100.0);
            const auto r = verify_explicit_formula(primes_1e4(), x, chi, T, z);
            EXPECT_TRUE(r.ok()) << chi.label() << " x=" << x << " residual " << r.residual << " budget " << r.budget;
            EXPECT_GT(r.zeros_used, 0u);
            EXPECT_EQ(r.offline_partners, 0u);
        }
    }
}

TEST(ExplicitFormula, ResidualShrinksWithHeight) {
    const auto& z = zero_table();
    double low = 0, high = 0;
    for (double x : {100.0, 400.0, 1000.0}) {
        const double s = std::sqrt(x);
        low += verify_explicit_formula(primes_1e4(), x + 0.5, DirichletCharacter::trivial(), 2 * s, z).residual;
        high += verify_explicit_formula(primes_1e4(), x + 0.5, DirichletCharacter::trivial(), std::min(10 * s, 250.0), z).residual;
    }
    EXPECT_GE(low, high);
}

TEST(ExplicitFormula, Preconditions) {
    const auto& z = zero_table();
    EXPECT_THROW(verify_explicit_formula(primes_1e4(), 10000, DirichletCharacter::trivial(), 50, z), std::invalid_argument);
    EXPECT_THROW(verify_explicit_formula(primes_1e4(), 100, DirichletCharacter::trivial(), 300, z), std::runtime_error);
    EXPECT_THROW(verify_explicit_formula(primes_1e4(), 100, DirichletCharacter(5, 2), 20, z), std::runtime_error);
    // non-principal: no x term
    const auto r = verify_explicit_formula(primes_1e4(), 1000, quadratic(4), 40, z);
    EXPECT_LT(std::abs(r.rhs), 0.5 * 1000);
}
