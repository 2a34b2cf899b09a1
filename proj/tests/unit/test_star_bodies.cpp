#include "berwald/star_bodies.hpp"

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

DirectionSet one(double a, double b) { return custom_directions({v2(a, b).normalized()}); }

const ConvexBody& square() {
    static const ConvexBody K = cube_body(2);
    return K;
}
const ConvexBody& triangle() {
    static const ConvexBody K = simplex_body(2);
    return K;
}

}  // namespace

TEST(RadialMeanBody, SquareExamples) {
    Measure leb = Measure::lebesgue(2);
    EXPECT_NEAR(radial_mean_body(square(), leb, 1, one(1, 0)).rho[0], 0.5, 1e-10);
    EXPECT_NEAR(radial_mean_body(square(), leb, 2, one(1, 0)).rho[0], 1 / std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(radial_mean_body(square(), leb, -0.5, one(1, 0)).rho[0], 0.25, 1e-10);
    EXPECT_NEAR(radial_mean_body(square(), leb, INFINITY, one(1, 1)).rho[0], std::sqrt(2.0), 1e-12);
}

TEST(RadialMeanBody, TriangleClosedForm) {
    // g(r theta) = Vol(T) (1 - r/rho_DT)^2, so rho_{R_p} = rho_DT (2 B(p+1, 2))^{1/p} = rho_DT / c_{2,p}.
    Measure leb = Measure::lebesgue(2);
    DirectionSet D = directions(2, 12);
    ConvexBody DT = difference_body(triangle());
    for (double p : {-0.5, 0.5, 1.0, 3.0}) {
        StarBodySamples S = radial_mean_body(triangle(), leb, p, D);
        double c = std::pow(2 * std::beta(p + 1, 2.0), -1.0 / p);
        for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(S.rho[i], radial_origin(DT, D.dirs[i]) / c, 1e-9) << p;
    }
}

TEST(PolarizedMeanBody, Examples) {
    Measure leb = Measure::lebesgue(2);
    DirectionSet D = directions(2, 8);
    StarBodySamples a = radial_mean_body(triangle(), leb, 1.5, D), b = polarized_mean_body(triangle(), leb, 1.5, D);
    for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(a.rho[i], b.rho[i], 1e-10);
    StarBodySamples c = polarized_mean_body(symmetric_cube_body(2), Measure::gaussian(2), 1,
                                            custom_directions({v2(1, 0), v2(-1, 0)}));
    EXPECT_NEAR(c.rho[0], c.rho[1], 1e-10);
    EXPECT_LT(c.asymmetry(), 1e-10);
    StarBodySamples d = polarized_mean_body(symmetric_cube_body(2), Measure::gaussian(2), INFINITY, one(1, 0));
    EXPECT_NEAR(d.rho[0], 2.0, 1e-12);
}

TEST(SpectralMeanBody, Examples) {
    EXPECT_NEAR(spectral_mean_body(square(), 1, one(1, 0)).rho[0], 1.0, 1e-10);
    EXPECT_NEAR(spectral_mean_body(square(), -1, one(1, 0)).rho[0], 1.0, 1e-12);
    EXPECT_NEAR(spectral_mean_body(triangle(), -1, one(1, 0)).rho[0], 0.5, 1e-12);
}

TEST(ProjectionBodyTest, Examples) {
    EXPECT_NEAR(projection_support(square(), Measure::lebesgue(2), Direction(v2(1, 0))), 1.0, 1e-12);
    // Minkowski's formula and the projected vertices both give sqrt 2 here.
    EXPECT_NEAR(projection_support(triangle(), Measure::lebesgue(2), Direction(v2(1, 1).normalized())),
                std::sqrt(2.0), 1e-12);
    // Left edge: phi(0) int_0^1 phi(y) dy.
    double edge = GaussianCDF::pdf(0) * (GaussianCDF::cdf(1) - 0.5);
    EXPECT_NEAR(projection_support(square(), Measure::gaussian(2), Direction(v2(1, 0))), edge, 1e-9);
    EXPECT_NEAR(edge, 0.13617, 1e-5);
}

TEST(ProjectionBodyTest, PolarRadial) {
    ProjectionBody B = weighted_projection_body(triangle(), Measure::lebesgue(2), one(1, 1));
    EXPECT_NEAR(polar_radial(B.h, 0), std::sqrt(0.5), 1e-12);
    SupportBodySamples h2 = B.h;
    h2.h[0] *= 2;
    EXPECT_NEAR(polar_radial(h2, 0), 0.5 * std::sqrt(0.5), 1e-12);
    h2.h[0] = 0;
    EXPECT_THROW(polar_radial(h2, 0), DomainError);
}

TEST(ProjectionBodyTest, LebesgueMatchesProjectedVertices) {
    for (int n : {2, 3}) {
        for (const ConvexBody& K : {simplex_body(n), cube_body(n), cross_polytope_body(n)}) {
            DirectionSet D = directions(n, 40);
            ProjectionBody B = weighted_projection_body(K, Measure::lebesgue(n), D);
            for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(B.h.h[i], projection_volume(K, D.dirs[i]), 1e-9);
            EXPECT_LT(B.eta.norm(), 1e-10);
        }
    }
}

TEST(ProjectionBodyTest, ShiftIdentity) {
    ConvexBody K = ConvexBody::from_vertices({v2(0.2, -0.1), v2(1.4, 0.3), v2(0.9, 1.2), v2(-0.3, 0.8)});
    DirectionSet D = directions(2, 32);
    ProjectionBody B = weighted_projection_body(K, Measure::gaussian(2), D);
    EXPECT_GT(B.eta.norm(), 1e-3);
    for (size_t i = 0; i < D.size(); ++i)
        EXPECT_NEAR(B.h.h[i], B.h_tilde.h[i] - B.eta.dot(D.dirs[i].vec()), 1e-12);
    // Support of the zonotope matches the formula.
    ConvexBody Z = B.zonotope();
    for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(support(Z, D.dirs[i]), B.h.h[i], 1e-12);
}

TEST(PolarProjectionMeasure, ExactAndSampled) {
    Measure leb = Measure::lebesgue(2);
    EXPECT_NEAR(polar_projection_measure(triangle(), leb, leb).value, 3.0, 1e-12);
    EXPECT_NEAR(polar_projection_measure(square(), leb, leb).value, 2.0, 1e-12);
    // Radial integration over arc directions agrees with the exact polar.
    ProjectionBody B = weighted_projection_body(triangle(), leb, arc_directions({}, 1));
    ConvexBody Z = B.zonotope();
    std::vector<double> crit;
    for (const Facet& F : Z.facets()) crit.push_back(std::atan2(F.normal[1], F.normal[0]));
    DirectionSet D = arc_directions(crit, 16);
    StarBodySamples S = polar_radial(weighted_projection_body(triangle(), leb, D).h);
    EXPECT_NEAR(star_measure(leb, S), 3.0, 1e-10);
}

TEST(LimitShape, Examples) {
    Measure leb = Measure::lebesgue(2);
    LimitShapeReport a = limit_shape_check(square(), leb, Direction(v2(1, 0)));
    for (double v : a.values) EXPECT_NEAR(v, 1.0, 1e-9);
    EXPECT_NEAR(a.target, 1.0, 1e-12);
    LimitShapeReport b = limit_shape_check(triangle(), leb, Direction(v2(1, 0)));
    EXPECT_NEAR(b.target, 0.5, 1e-12);
    EXPECT_LT(b.deviation, 0.01);
    EXPECT_NEAR(b.extrapolated, 0.5, 1e-4);
    // Closed form for the triangle: (p+1)^{1/p} rho_DT / c_{2,p} with rho_DT(e1) = 1.
    for (size_t k = 0; k < b.p.size(); ++k) {
        double p = b.p[k];
        EXPECT_NEAR(b.values[k], std::pow(p + 1, 1.0 / p) * std::pow(2 * std::beta(p + 1, 2.0), 1.0 / p), 1e-8);
    }
    LimitShapeReport c = limit_shape_check(square(), Measure::gaussian(2), Direction(v2(1, 0)));
    EXPECT_LT(c.deviation, 0.03);
}

TEST(TranslatedAverage, Examples) {
    Measure leb = Measure::lebesgue(2);
    MeasureOptions o;
    o.rel_tol = 1e-8;
    EXPECT_NEAR(translated_average(leb, leb, square(), o).value, 1.0, 1e-7);
    EXPECT_NEAR(translated_average(leb, leb, triangle(), o).value, 0.5, 1e-7);
}

TEST(HomogeneousLemma, Examples) {
    DirectionSet D = arc_directions(critical_angles(difference_body(square())), 12);
    DirectionSet DT = arc_directions(critical_angles(difference_body(triangle())), 12);
    Measure leb = Measure::lebesgue(2), g = Measure::gaussian(2), nu1 = Measure::radial_power(2, 1.0);
    EXPECT_LT(homogeneous_lemma_check(leb, leb, triangle(), DT).gap, 1e-6);
    EXPECT_LT(homogeneous_lemma_check(leb, g, square(), D).gap, 1e-3);
    EXPECT_LT(homogeneous_lemma_check(nu1, leb, square(), D).gap, 1e-3);
    EXPECT_LT(homogeneous_lemma_check(nu1, g, square(), D).gap, 1e-3);
    EXPECT_THROW(homogeneous_lemma_check(g, leb, square(), D), DomainError);
}

TEST(Covariance, Examples) {
    DirectionSet D = directions(2, 8);
    Mat I = Mat::Identity(2, 2);
    EXPECT_NEAR(covariance_check(triangle(), Measure::gaussian(2), I, 1, D), 0.0, 1e-9);
    Mat R(2, 2);
    double a = 0.7;
    R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    EXPECT_LT(covariance_check(triangle(), Measure::gaussian(2), R, 1, D), 1e-6);
    Mat S(2, 2);
    S << 1, 0.5, 0, 1;
    EXPECT_LT(covariance_check(square(), Measure::lebesgue(2), S, 2, D), 1e-5);
    EXPECT_THROW(covariance_check(square(), Measure::lebesgue(2), 2 * I, 1, D), DomainError);
}

TEST(StarBodyProperty, JensenChain) {
    DirectionSet D = directions(2, 24);
    ConvexBody K = ConvexBody::from_vertices({v2(0, 0), v2(2, 0.3), v2(1.5, 1.4), v2(-0.2, 1)});
    for (const Measure& mu : {Measure::lebesgue(2), Measure::gaussian(2)}) {
        std::vector<double> grid{-0.75, -0.25, 0.0, 0.5, 1.0, 2.0, 5.0, INFINITY};
        std::vector<StarBodySamples> S;
        for (double p : grid) S.push_back(radial_mean_body(K, mu, p, D));
        for (size_t k = 0; k + 1 < S.size(); ++k)
            for (size_t i = 0; i < D.size(); ++i) EXPECT_LE(S[k].rho[i], S[k + 1].rho[i] * (1 + 1e-8));
    }
}

TEST(StarBodyProperty, SpectralRelation) {
    DirectionSet D = directions(3, 20);
    ConvexBody K = cross_polytope_body(3);
    for (double p : {-0.5, 0.5, 1.0, 2.0}) {
        StarBodySamples R = radial_mean_body(K, Measure::lebesgue(3), p, D), S = spectral_mean_body(K, p, D);
        for (size_t i = 0; i < D.size(); ++i) EXPECT_NEAR(S.rho[i], std::pow(p + 1, 1.0 / p) * R.rho[i], 1e-9 * S.rho[i]);
    }
}

TEST(StarBodySamplesTest, Csv) {
    StarBodySamples S = radial_mean_body(square(), Measure::lebesgue(2), 1, one(1, 0));
    std::string csv = S.to_csv();
    EXPECT_NE(csv.find("theta_1,theta_2,rho,error"), std::string::npos);
    EXPECT_NE(csv.find("radial_mean"), std::string::npos);
}
