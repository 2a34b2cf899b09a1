#pragma once

#include "berwald/geometry.hpp"
#include "berwald/measures.hpp"
#include "berwald/quadrature.hpp"

#include <random>
#include <string>
#include <vector>

namespace berwald {

// f(x) = max(0, min_i <a_i,x> + c_i) on K, 0 outside K. Roof functions are the
// special case with one piece per facet not through the apex.
class ConcaveFunction {
public:
    struct Piece {
        Vec a;
        double c = 0.0;
    };

    static ConcaveFunction min_affine(ConvexBody K, std::vector<Piece> pieces, std::string label = "min_affine");
    // M (1 - gauge_{K - x0}(x - x0)).
    static ConcaveFunction roof(const ConvexBody& K, double M, const Vec& x0);
    static ConcaveFunction roof(const RoofFunction& r) { return roof(r.body(), r.height(), r.apex()); }
    static ConcaveFunction constant(ConvexBody K, double c);
    // m random pieces, each nonnegative on K, so f > 0 on the interior of K.
    static ConcaveFunction random_min_affine(const ConvexBody& K, int m, std::mt19937_64& rng);

    double operator()(const Vec& x) const;
    const ConvexBody& body() const { return K_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    const std::string& label() const { return label_; }
    double sup_norm() const { return sup_; }
    const Vec& argmax() const { return argmax_; }
    // Heights in (0, ||f||_inf) of the hypograph vertices; t -> mu({f >= t}) is smooth between them.
    const std::vector<double>& breakpoints() const { return breaks_; }

    // {f >= t} for t > 0 (K for t <= 0); empty or lower-dimensional gives nullopt.
    std::optional<ConvexBody> level_set(double t) const;
    // Index of the piece whose constraint is the facet (normal, offset) of level_set(t), or -1 for a facet of K.
    int piece_of_facet(const Facet& F, double t) const;

    // c f.
    ConcaveFunction scaled(double c) const;
    // min(f, cap).
    ConcaveFunction truncated(double cap) const;

private:
    ConvexBody K_;
    std::vector<Piece> pieces_;
    std::string label_;
    double sup_ = 0.0;
    Vec argmax_;
    std::vector<double> breaks_;

    ConcaveFunction(ConvexBody K, std::vector<Piece> pieces, std::string label);
};

struct LevelProfileOptions {
    int nodes = 65;
    int max_nodes = 513;
    // Stop doubling once means move less than this (relative).
    double refine_tol = 1e-7;
    MeasureOptions measure;
};

// psi(t) = mu({f >= t}) on about `nodes` points, Chebyshev-Lobatto between breakpoints, node slopes from facet motion.
Profile1D level_profile(const ConcaveFunction& f, const Measure& mu, int nodes, const MeasureOptions& opt = {});

// Analytic reference profile psi_{F, A}.
Profile1D reference_profile(const ConcavityDescriptor& F, double A);

double psi_reference(const ConcavityDescriptor& F, double A, double t);

struct ConstantValue {
    double value = 0.0;
    bool flagged = false;
    std::string note;
};

// C(p, mu, K) = ((p / mu(K)) Mel(psi_{F, mu(K)})(p))^{-1/p}; p = 0 through the log limit.
// A divergent Mellin transform gives +inf with flagged set.
ConstantValue constant_C(double p, const ConcavityDescriptor& F, double muK);
// Closed forms C(p, s) for s-concave measures: binom(1/s+p, p) (s > 0), 1/Gamma(p+1) (s = 0),
// s (p + 1/s) binom(-1/s, p) (s < 0). These satisfy Mel(psi_s)(p)^{-1} = p C(p, s).
double closed_form_C(double p, double s);
// (n B(p+1, n))^{-1/p}, exp(H_n) at p = 0.
double constant_c_np(int n, double p);

struct MeanValue {
    double value = 0.0;
    double error = 0.0;
    bool flagged = false;
};

// M_{p,mu} f = ((1/mu(K)) int f^p dmu)^{1/p}; geometric mean at p = 0.
MeanValue berwald_mean(const ConcaveFunction& f, const Measure& mu, double p, const LevelProfileOptions& opt = {});

struct BerwaldCurve {
    std::vector<double> p;
    std::vector<double> T;
    std::vector<double> constants;
    std::vector<double> means;
    std::vector<double> errors;
    std::vector<bool> flagged;
    int nodes_used = 0;
    double sup_norm = 0.0;
    double mass = 0.0;

    // Largest relative increase T(p_{k+1}) / T(p_k) - 1 over finite neighbours (<= 0 when nonincreasing).
    double worst_increase() const;
    bool nonincreasing(double rel_tol = 1e-6) const;
    std::string to_csv() const;
};

std::vector<double> default_p_grid();

// T_f(p) = C(p, mu, K) M_{p,mu} f over the grid (sorted ascending). Throws DomainError when the
// descriptor does not apply to mu or to the level sets of f.
BerwaldCurve berwald_curve(const ConcaveFunction& f, const Measure& mu, const ConcavityDescriptor& F,
                           std::vector<double> p_grid = default_p_grid(), const LevelProfileOptions& opt = {});
// Several descriptors for the same (f, mu); the means are computed once.
std::vector<BerwaldCurve> berwald_curves(const ConcaveFunction& f, const Measure& mu,
                                         const std::vector<ConcavityDescriptor>& Fs,
                                         std::vector<double> p_grid = default_p_grid(),
                                         const LevelProfileOptions& opt = {});

struct EqualityCertificate {
    double deviation = 0.0;  // sup_t |mu({f >= t}) - F^{-1}[F(mu K)(1 - t/||f||)]| / mu(K)
    bool zero_anchored = false;
    bool certified = false;
    int grid_points = 0;
    std::string scope = "grid";
};

EqualityCertificate equality_certificate(const ConcaveFunction& f, const Measure& mu, const ConcavityDescriptor& F,
                                         int grid_points = 65, const MeasureOptions& opt = {});

struct MomentBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  // rhs - lhs
    double half_space_mass = 0.0;
    double tail_bound = 0.0;
    bool flagged = false;
    std::string note;
};

// (int <x,theta>_+^q dmu)^{1/q} <= mu(H+)^{1/q-1/p} (C(p)/C(q)) (int <x,theta>_+^p dmu)^{1/p},
// C taken at A = mu(H+). Needs a rotation-invariant finite catalog measure.
MomentBound halfspace_moment_ratio(const Measure& mu, const Direction& theta, double p, double q,
                                   const ConcavityDescriptor& F);

struct NormBound {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool flagged = false;
};

// For f = g^{1/beta} with g concave: (int f^q)^{1/q} <= mu(K)^{(1-q)/q} (C(1/beta)/C(q/beta))^{1/beta} int f.
NormBound lq_l1_bound(const ConcaveFunction& g, const Measure& mu, const ConcavityDescriptor& F, double beta, double q,
                      const LevelProfileOptions& opt = {});

struct PerturbationMargin {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

// binom(1/s+p, 1/s) int l_K^{p-1} psi dmu >= binom(1/s+q, 1/s) int l_K^{q-1} psi dmu, l_K the roof
// of K at the origin; mu must be s-concave and 1/s-homogeneous.
PerturbationMargin perturbation_check(const ConvexBody& K, const Measure& mu, const ConcaveFunction& psi, double p,
                                      double q);

}  // namespace berwald
