#pragma once

#include "berwald/geometry.hpp"
#include "berwald/measures.hpp"
#include "berwald/quadrature.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace berwald {

// Standard: mu(K ∩ (K + x)). Polarized: mu((K + x/2) ∩ (K - x/2)).
enum class CovariogramKind { Standard, Polarized };

std::string to_string(CovariogramKind k);

MeasureValue covariogram_at(const ConvexBody& K, const Measure& mu, const Vec& x, const MeasureOptions& opt = {});
MeasureValue polarized_covariogram_at(const ConvexBody& K, const Measure& mu, const Vec& x,
                                      const MeasureOptions& opt = {});
MeasureValue covariogram_at(CovariogramKind kind, const ConvexBody& K, const Measure& mu, const Vec& x,
                            const MeasureOptions& opt = {});

// d/dr of the covariogram at r along theta, from facet motion: each facet of the
// intersection body moves with normal velocity min(0, <n,theta>) (standard) or
// -|<n,theta>|/2 (polarized), so the derivative is the velocity-weighted sum of facet integrals.
MeasureValue covariogram_slope(CovariogramKind kind, const ConvexBody& K, const Measure& mu, const Direction& theta,
                               double r, const MeasureOptions& opt = {});

struct CovariogramOptions {
    int nodes = 129;
    MeasureOptions measure;
    // Node slopes from facet motion; otherwise estimated from the samples.
    bool exact_slopes = true;
};

struct CovariogramProfile {
    ConvexBody body;
    Measure measure;
    Direction theta;
    CovariogramKind kind = CovariogramKind::Standard;
    double rho_DK = 0.0;
    double mass = 0.0;
    Profile1D profile;
    double max_error = 0.0;
    bool flagged = false;

    // "r,g" rows for plotting.
    std::string to_csv() const;
};

CovariogramProfile profile(const ConvexBody& K, const Measure& mu, const Direction& theta,
                           CovariogramKind kind = CovariogramKind::Standard, const CovariogramOptions& opt = {});

// Covariogram profiles of one (K, mu, kind) across directions, cached per direction.
class CovariogramField {
public:
    CovariogramField(ConvexBody K, Measure mu, CovariogramKind kind = CovariogramKind::Standard,
                     CovariogramOptions opt = {});

    const ConvexBody& body() const { return K_; }
    const ConvexBody& difference() const { return DK_; }
    const Measure& measure() const { return mu_; }
    CovariogramKind kind() const { return kind_; }
    double mass() const { return mass_; }
    double rho_DK(const Direction& theta) const { return radial_origin(DK_, theta); }

    std::shared_ptr<const CovariogramProfile> at(const Direction& theta) const;
    size_t cached() const;

private:
    ConvexBody K_, DK_;
    Measure mu_;
    CovariogramKind kind_;
    CovariogramOptions opt_;
    double mass_;
    mutable std::mutex mu_lock_;
    mutable std::map<std::vector<double>, std::shared_ptr<const CovariogramProfile>> cache_;
};

struct DerivativeEstimate {
    double value = 0.0;
    // One-sided differences at h, h/2, h/4 and the two Richardson levels.
    std::array<double, 3> differences{};
    std::array<double, 2> richardson{};
    double h = 0.0;
};

// One-sided difference quotients at h, h/2, h/4 with h = rho_DK/64 and two-level
// Richardson extrapolation; estimates -h_{Pi_mu K}(theta).
DerivativeEstimate derivative_at_zero(const CovariogramProfile& P);

struct ConcavityReport {
    int trials = 0;
    double worst_margin = HUGE_VAL;
    int violations = 0;
    double tolerance = 1e-6;
    bool passed = true;
    Vec worst_x, worst_y;
    double worst_lambda = 0.0;
};

// Samples x, y uniformly in DK and lambda in (0,1) and checks
// F(g(lambda x + (1-lambda) y)) >= lambda F(g(x)) + (1-lambda) F(g(y)) (reversed for R-type).
// Throws DomainError when the descriptor does not apply to mu or to the intersection family.
ConcavityReport concavity_check(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F, int trials,
                                std::uint64_t seed, CovariogramKind kind = CovariogramKind::Standard,
                                double tolerance = 1e-6, const MeasureOptions& opt = {});

struct RayAffinityReport {
    int rays = 0;
    double max_deviation = 0.0;
};

// Max over rays and samples of |g^s(r theta) - mu(K)^s (1 - r/rho_DK(theta))|, normalized by mu(K)^s.
RayAffinityReport ray_affinity(const ConvexBody& K, const Measure& mu, double s, const DirectionSet& rays,
                               int samples_per_ray = 16, const MeasureOptions& opt = {});

}  // namespace berwald
