#include "berwald/certify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace berwald;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

DirectionSet e1() { return custom_directions({v2(1, 0)}); }

ConcavityDescriptor half_power(int n) { return ConcavityDescriptor::catalog("gaussian_half_power", n); }

}  // namespace

TEST(ChainF, SquareClosedForms) {
    InequalityReport R = chain_F(cube_body(2), Measure::lebesgue(2), ConcavityDescriptor::power(0.5), {1, 2}, e1());
    ASSERT_EQ(R.terms.size(), 4u);
    EXPECT_NEAR(R.values[0][0], 1.0, 1e-10);
    EXPECT_NEAR(R.values[1][0], std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(R.values[2][0], 1.5, 1e-9);
    EXPECT_NEAR(R.values[3][0], 2.0, 1e-10);
    EXPECT_TRUE(R.pass);
    EXPECT_FALSE(R.equality);
}

TEST(ChainF, TriangleEquality) {
    InequalityReport R = chain_F(simplex_body(2), Measure::lebesgue(2), ConcavityDescriptor::power(0.5),
                                 {-0.5, 0.0, 1.0, 2.0}, directions(2, 16));
    EXPECT_TRUE(R.pass);
    EXPECT_TRUE(R.equality);
    for (const LinkMargin& L : R.links) EXPECT_LT(L.max_abs, 1e-6) << L.lower;
}

TEST(ChainF, RefusesQType) {
    EXPECT_THROW(chain_F(cube_body(2), Measure::gaussian(2), ConcavityDescriptor::ehrhard(), {1}, e1()), DomainError);
    EXPECT_THROW(chain_F(cube_body(2), Measure::gaussian(2), ConcavityDescriptor::power(0.5), {1}, e1()), DomainError);
}

TEST(ChainLog, GaussianSquare) {
    Measure g = Measure::gaussian(2);
    InequalityReport R = chain_log(cube_body(2), g, ConcavityDescriptor::log(), {0.5, 1, 2}, directions(2, 12));
    EXPECT_TRUE(R.pass);
    for (const LinkMargin& L : R.links) EXPECT_GT(L.min_margin, 1e-4) << L.lower;
    const double A = measure_of_body(g, cube_body(2)).value;
    EXPECT_NEAR(R.params["last_link_coefficient"].get<double>(), A, 1e-12);
    InequalityReport E = chain_log(cube_body(2), g, ConcavityDescriptor::ehrhard(), {0.5, 1, 2}, directions(2, 12));
    EXPECT_TRUE(E.pass);
    double a = GaussianCDF::inverse(A);
    EXPECT_NEAR(E.params["last_link_coefficient"].get<double>(), std::exp(-a * a / 2) / std::sqrt(2 * std::numbers::pi),
                1e-10);
}

TEST(ChainLog, LastLinkIsTheLimitOfTheChain) {
    // C(p) rho_{R_p} tends to (1/Q') rho_{Pi°} as p -> -1.
    Measure g = Measure::gaussian(2);
    InequalityReport E = chain_log(symmetric_cube_body(2), g, ConcavityDescriptor::ehrhard(), {-0.999}, e1());
    EXPECT_NEAR(E.links.back().min_margin, 0.0, 0.02);
}

TEST(ChainSymmetric, Examples) {
    ConvexBody Q = symmetric_cube_body(2);
    DirectionSet D = directions(2, 12, 42, true);
    InequalityReport g = chain_symmetric(Q, Measure::gaussian(2), {1, 2}, D);
    EXPECT_TRUE(g.pass);
    for (const LinkMargin& L : g.links) EXPECT_GE(L.min_margin, -1e-6);
    InequalityReport c = chain_symmetric(Q, Measure::cauchy(2, 2.5), {1}, D);
    EXPECT_TRUE(c.pass);
    EXPECT_THROW(chain_symmetric(cube_body(2), Measure::gaussian(2), {1}, D), DomainError);
    // Lebesgue: polarized bodies equal radial ones and c(n,p) = C(p) for power(1/n).
    InequalityReport l = chain_symmetric(Q, Measure::lebesgue(2), {1, 2}, D);
    InequalityReport f = chain_F(Q, Measure::lebesgue(2), ConcavityDescriptor::power(0.5), {1, 2}, D);
    for (size_t t = 0; t < l.values.size(); ++t)
        for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(l.values[t][i], f.values[t][i], 1e-9 * f.values[t][i]);
}

TEST(RogersShephard, Examples) {
    Measure leb = Measure::lebesgue(2);
    InequalityReport t = rogers_shephard_check(simplex_body(2), leb, leb, ConcavityDescriptor::power(0.5));
    EXPECT_NEAR(t.values[0][0], 3.0, 1e-12);
    EXPECT_NEAR(t.values[1][0], 3.0, 1e-6);
    EXPECT_TRUE(t.pass);
    EXPECT_TRUE(t.equality);
    InequalityReport q = rogers_shephard_check(cube_body(2), leb, leb, ConcavityDescriptor::power(0.5));
    EXPECT_NEAR(q.values[0][0], 4.0, 1e-12);
    EXPECT_NEAR(q.values[1][0], 6.0, 1e-6);
    EXPECT_FALSE(q.equality);
    InequalityReport g = rogers_shephard_check(symmetric_cube_body(2), leb, Measure::gaussian(2), half_power(2));
    EXPECT_TRUE(g.pass);
    EXPECT_GT(g.links[0].min_margin, 0.0);
}

TEST(Zhang, Examples) {
    Measure leb = Measure::lebesgue(2);
    InequalityReport t = zhang_check(simplex_body(2), leb, leb, ConcavityDescriptor::power(0.5));
    EXPECT_NEAR(t.values[0][0], 1.5, 1e-12);
    EXPECT_NEAR(t.values[1][0], 1.5, 1e-6);
    EXPECT_TRUE(t.equality);
    InequalityReport q = zhang_check(cube_body(2), leb, leb, ConcavityDescriptor::power(0.5));
    EXPECT_NEAR(q.values[1][0], 2.0, 1e-6);
    EXPECT_TRUE(q.pass);
    EXPECT_FALSE(q.equality);
    // Dilating K leaves the margin unchanged.
    InequalityReport q2 = zhang_check(dilate(cube_body(2), 2.0), leb, leb, ConcavityDescriptor::power(0.5));
    EXPECT_NEAR(q2.links[0].min_margin, q.links[0].min_margin, 1e-8);
}

TEST(GoodSetInclusion, Examples) {
    Measure leb = Measure::lebesgue(2);
    InequalityReport t = good_set_inclusion(simplex_body(2), leb, ConcavityDescriptor::power(0.5), directions(2, 16));
    EXPECT_TRUE(t.equality);
    InequalityReport q = good_set_inclusion(cube_body(2), leb, ConcavityDescriptor::power(0.5), e1());
    EXPECT_NEAR(q.values[0][0], 1.0, 1e-12);
    EXPECT_NEAR(q.values[1][0], 2.0, 1e-12);
    InequalityReport g = good_set_inclusion(cube_body(2), Measure::gaussian(2), half_power(2), directions(2, 16));
    EXPECT_TRUE(g.pass);
    EXPECT_TRUE(g.params.contains("hypothesis"));
}

TEST(CertifyProperty, SimplexEqualityCubeStrict) {
    Measure leb = Measure::lebesgue(3);
    auto F = ConcavityDescriptor::power(1.0 / 3);
    DirectionSet D = directions(3, 24);
    EXPECT_TRUE(chain_F(simplex_body(3), leb, F, {1, 2}, D).equality);
    EXPECT_TRUE(rogers_shephard_check(simplex_body(3), leb, leb, F).equality);
    EXPECT_TRUE(zhang_check(simplex_body(3), leb, leb, F).equality);
    EXPECT_FALSE(chain_F(cube_body(3), leb, F, {1, 2}, D).equality);
    EXPECT_FALSE(rogers_shephard_check(cube_body(3), leb, leb, F).equality);
    EXPECT_FALSE(zhang_check(cube_body(3), leb, leb, F).equality);
}

TEST(CertifyProperty, Reproducible) {
    Measure g = Measure::gaussian(2);
    InequalityReport a = chain_log(cube_body(2), g, ConcavityDescriptor::log(), {1, 2}, directions(2, 8));
    InequalityReport b = chain_log(cube_body(2), g, ConcavityDescriptor::log(), {1, 2}, directions(2, 8));
    EXPECT_EQ(a.to_csv(), b.to_csv());
}

TEST(InequalityReportTest, JsonAndCsv) {
    InequalityReport R = chain_F(cube_body(2), Measure::lebesgue(2), ConcavityDescriptor::power(0.5), {1, 2}, e1());
    nlohmann::json j = R.to_json();
    for (const char* k : {"claim", "params", "margins", "pass", "equality", "tolerances", "runtime_ms"})
        EXPECT_TRUE(j.contains(k)) << k;
    EXPECT_EQ(j["claim"], "reverse_chain_F");
    EXPECT_EQ(j["margins"].size(), 3u);
    std::string csv = R.to_csv();
    EXPECT_EQ(csv.rfind("# claim=reverse_chain_F\ntheta_1,theta_2,rho_DK,", 0), 0u);
}
