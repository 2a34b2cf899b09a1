#pragma once

#include "berwald/covariogram.hpp"
#include "berwald/geometry.hpp"
#include "berwald/measures.hpp"
#include "berwald/quadrature.hpp"

#include <string>
#include <vector>

namespace berwald {

// Radial function sampled on a direction set.
struct StarBodySamples {
    DirectionSet dirs;
    std::vector<double> rho;
    std::vector<double> error;
    std::vector<bool> flagged;
    std::string family;  // radial_mean, polarized_mean, spectral_mean, polar_projection, difference
    double p = 0.0;
    std::string measure;
    std::string body = "K";

    size_t size() const { return rho.size(); }
    bool any_flagged() const;
    // max |rho(theta) - rho(-theta)| / rho(theta) over direction pairs present in the set.
    double asymmetry() const;
    std::string to_csv() const;
};

struct SupportBodySamples {
    DirectionSet dirs;
    std::vector<double> h;
    std::vector<double> error;
    std::string label;

    size_t size() const { return h.size(); }
    std::string to_csv() const;
};

// Defaults: 64 directions in the plane, 256 in space, 512 beyond.
DirectionSet default_directions(int n, bool symmetric = false, std::uint64_t seed = 42);

// rho(theta) = ((p / mu K) Mel(g(. theta))(p))^{1/p}; p = 0 through the log limit, p = +inf gives DK.
StarBodySamples radial_mean_body(const ConvexBody& K, const Measure& mu, double p, const DirectionSet& dirs,
                                 const CovariogramOptions& opt = {});
// Same with the polarized covariogram.
StarBodySamples polarized_mean_body(const ConvexBody& K, const Measure& mu, double p, const DirectionSet& dirs,
                                    const CovariogramOptions& opt = {});
// Lebesgue only: (p+1)^{1/p} rho_{R_p K}; p = -1 gives Vol(K) / Vol(P_{theta-perp} K).
StarBodySamples spectral_mean_body(const ConvexBody& K, double p, const DirectionSet& dirs,
                                   const CovariogramOptions& opt = {});

struct ProjectionBody {
    // h_Pi(theta) = sum <theta, n_i>_- w_i with w_i = int_{F_i} phi.
    SupportBodySamples h;
    // h_{Pi~}(theta) = (1/2) sum |<theta, n_i>| w_i.
    SupportBodySamples h_tilde;
    // eta = (1/2) sum n_i w_i, so that h = h_tilde - <eta, theta>.
    Vec eta;
    std::vector<Vec> normals;
    std::vector<double> weights;

    // Pi_mu K as the zonotope sum of the segments [0, -w_i n_i].
    ConvexBody zonotope() const;
};

ProjectionBody weighted_projection_body(const ConvexBody& K, const Measure& mu, const DirectionSet& dirs,
                                        const MeasureOptions& opt = {});
double projection_support(const ConvexBody& K, const Measure& mu, const Direction& theta,
                          const MeasureOptions& opt = {});

// rho_{L°}(theta_i) = 1 / h_L(theta_i).
double polar_radial(const SupportBodySamples& h, size_t i);
StarBodySamples polar_radial(const SupportBodySamples& h);

// nu(Pi°_mu K) from the exact polar of the projection zonotope.
MeasureValue polar_projection_measure(const ConvexBody& K, const Measure& mu, const Measure& nu,
                                      const MeasureOptions& opt = {});

// (1/alpha) sum_i w_i phi_nu(theta_i) rho(theta_i)^alpha for alpha-homogeneous nu.
double star_measure(const Measure& nu, const StarBodySamples& S);

struct LimitShapeReport {
    std::vector<double> p;
    std::vector<double> values;  // (p+1)^{1/p} rho_{R_p}(theta)
    double target = 0.0;         // mu(K) rho_{Pi°}(theta)
    double extrapolated = 0.0;   // linear in p+1 through the last two values
    double deviation = 0.0;      // |values.back() - target| / target
};

LimitShapeReport limit_shape_check(const ConvexBody& K, const Measure& mu, const Direction& theta,
                                   std::vector<double> ps = {-0.9, -0.99, -0.999}, const CovariogramOptions& opt = {});

// nu_mu(K) = (1/mu K) int_{DK} g_{mu,K} dnu.
MeasureValue translated_average(const Measure& nu, const Measure& mu, const ConvexBody& K,
                                const MeasureOptions& opt = {});

struct LemmaReport {
    double star_side = 0.0;        // nu(R_{alpha,mu} K)
    double translated_side = 0.0;  // nu_mu(K)
    double gap = 0.0;              // relative
    double alpha = 0.0;
};

// Needs nu alpha-homogeneous; compares nu(R_{alpha,mu} K) with nu_mu(K).
LemmaReport homogeneous_lemma_check(const Measure& nu, const Measure& mu, const ConvexBody& K, const DirectionSet& dirs,
                                    const CovariogramOptions& opt = {});

// sup over dirs of |rho_{R_{p,mu} TK} - rho_{T R_{p,mu o T} K}| / rho_{R_{p,mu} TK}; needs det T = 1.
double covariance_check(const ConvexBody& K, const Measure& mu, const Mat& T, double p, const DirectionSet& dirs,
                        const CovariogramOptions& opt = {});

}  // namespace berwald
