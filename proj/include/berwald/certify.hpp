#pragma once

#include "berwald/berwald_core.hpp"
#include "berwald/star_bodies.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace berwald {

// One link a <= b of a chain, margins (b - a) / |b| per direction.
struct LinkMargin {
    std::string lower, upper;
    std::vector<double> margins;
    double min_margin = 0.0;
    size_t argmin = 0;
    double max_abs = 0.0;
};

struct InequalityReport {
    std::string claim;
    std::string statement;
    nlohmann::json params = nlohmann::json::object();
    // Chain terms in order, each sampled on dirs (scalar inequalities use one pseudo-direction).
    std::vector<std::string> terms;
    std::vector<std::vector<double>> values;
    std::vector<LinkMargin> links;
    DirectionSet dirs;
    double tolerance = 1e-6;
    double equality_tolerance = 1e-4;
    bool pass = false;
    bool equality = false;
    double runtime_ms = 0.0;

    // Recomputes links, pass and equality from terms and values.
    void finalize();
    const LinkMargin& link(const std::string& lower, const std::string& upper) const;
    nlohmann::json to_json() const;
    // One row per direction: theta components then every term.
    std::string to_csv() const;
};

struct CertifyOptions {
    double tolerance = 1e-6;
    double equality_tolerance = 1e-4;
    CovariogramOptions covariogram;
    MeasureOptions measure;
};

// rho_DK <= C(q) rho_{R_q} <= C(p) rho_{R_p} <= (F/F')(mu K) rho_{Pi°}, p <= q on the grid.
InequalityReport chain_F(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F,
                         std::vector<double> p_grid, const DirectionSet& dirs, const CertifyOptions& opt = {});
// C(q) rho_{R_q} <= C(p) rho_{R_p} <= (1/Q')(mu K) rho_{Pi°}.
InequalityReport chain_log(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& Q,
                           std::vector<double> p_grid, const DirectionSet& dirs, const CertifyOptions& opt = {});
// DK <= binom(n+q,q)^{1/q} P_q <= binom(n+p,p)^{1/p} P_p <= n mu(K) Pi°, K symmetric and mu in M_n.
InequalityReport chain_symmetric(const ConvexBody& K, const Measure& mu, std::vector<double> p_grid,
                                 const DirectionSet& dirs, const CertifyOptions& opt = {});
// nu(DK) <= binom(1/s+alpha, alpha) min(nu_mu(K), nu_mu(-K)) for alpha-homogeneous nu and s-concave mu.
InequalityReport rogers_shephard_check(const ConvexBody& K, const Measure& nu, const Measure& mu,
                                       const ConcavityDescriptor& F, const CertifyOptions& opt = {});
// s^alpha binom(1/s+alpha, alpha) <= (mu(K)^alpha / nu_mu(K)) nu(Pi°_mu K).
InequalityReport zhang_check(const ConvexBody& K, const Measure& nu, const Measure& mu, const ConcavityDescriptor& F,
                             const CertifyOptions& opt = {});
// rho_DK <= (F/F')(mu K) rho_{Pi°}.
InequalityReport good_set_inclusion(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F,
                                    const DirectionSet& dirs, const CertifyOptions& opt = {});

}  // namespace berwald
