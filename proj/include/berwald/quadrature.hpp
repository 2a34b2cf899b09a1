#pragma once

#include "berwald/geometry.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace berwald {

// A nonnegative function on [0, B] (B may be infinite), zero beyond B.
class Profile1D {
public:
    using Fn = std::function<double(double)>;

    // quotient, if given, must return (psi(t) - psi(0)) / t without cancellation.
    // breaks are interior points where psi is not smooth.
    static Profile1D analytic(Fn psi, double B, std::vector<double> breaks = {}, Fn quotient = nullptr);
    // Monotone cubic Hermite through (t_k, y_k). With slopes the node derivatives are
    // taken as given (then limited when monotone); otherwise they are estimated.
    static Profile1D sampled(std::vector<double> t, std::vector<double> y, std::vector<double> slopes = {},
                             bool monotone = true);

    // Chebyshev-Lobatto nodes B(1 - cos(pi k / (m-1)))/2, k = 0..m-1.
    static std::vector<double> chebyshev_nodes(double B, int m);

    double operator()(double t) const;
    // (psi(t) - psi(0)) / t, evaluated stably near 0.
    double quotient(double t) const;
    double support() const { return B_; }
    bool infinite_support() const { return !std::isfinite(B_); }
    double at_zero() const { return psi0_; }
    // psi(B-) for finite support; nonzero means a jump to 0 at B.
    double right_limit() const;
    bool is_sampled() const { return !nodes_.empty(); }
    bool monotone() const { return monotone_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& breaks() const { return breaks_; }
    // Right derivative at 0 (node slope for sampled profiles).
    double slope_at_zero() const;

    // t -> psi(t / alpha).
    Profile1D scaled(double alpha) const;

    // Integral of t^{q} * cubic piece over the first interval, exact (sampled only).
    double first_interval_moment(double q, bool subtract_zero) const;

private:
    Fn fn_;
    Fn quot_;
    double B_ = 0.0;
    double psi0_ = 0.0;
    std::vector<double> breaks_;
    std::vector<double> nodes_, values_, slopes_;
    bool monotone_ = true;
};

struct MellinOptions {
    double rel_tol = 1e-10;
    // Results whose error estimate exceeds flag_rel_tol * |value| are flagged.
    double flag_rel_tol = 1e-3;
    int max_depth = 18;
};

struct MellinResult {
    double value = 0.0;
    double error = 0.0;
    bool flagged = false;
    std::string note;
};

// Two-branch Mellin transform: p > 0 gives int t^{p-1} psi; p in (-1,0) gives the
// subtracted continuation int t^{p-1}(psi - psi(0)) + B^p psi(0) / p.
MellinResult mellin(const Profile1D& psi, double p, const MellinOptions& opt = {});

// Limit of ((p/psi(0)) Mel(psi)(p))^{1/p} as p -> 0, i.e. the geometric mean
// exp(int log t d(-psi)/psi(0)).
MellinResult mellin_log_limit(const Profile1D& psi, const MellinOptions& opt = {});

struct FractionalLimit {
    std::array<double, 3> s{0.9, 0.99, 0.999};
    std::array<double, 3> values{};
    double extrapolated = 0.0;
    double target = 0.0;
};

// (1-s) int t^{-s} psi(t) dt for s -> 1, extrapolated by a quadratic in 1-s.
FractionalLimit fractional_limit_check(const Profile1D& psi, const MellinOptions& opt = {});

// Boost-backed adaptive Gauss-Kronrod on [a, b] (b may be +inf).
struct Integral {
    double value = 0.0;
    double error = 0.0;
};
Integral integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                      int max_depth = 18);

enum class DirectionScheme { Uniform, Fibonacci, Seeded, Arcs, Custom };

std::string to_string(DirectionScheme s);

struct DirectionSet {
    int dim = 0;
    std::vector<Direction> dirs;
    // Quadrature weights for integrals over the sphere.
    std::vector<double> weights;
    DirectionScheme scheme = DirectionScheme::Custom;
    std::uint64_t seed = 0;
    bool symmetric = false;
    size_t size() const { return dirs.size(); }
};

// n=2 uniform angles, n=3 Fibonacci sphere, n>=4 seeded normalized Gaussians.
DirectionSet directions(int n, int count, std::uint64_t seed = 42, bool symmetric = false);
DirectionSet directions(int n, int count, DirectionScheme scheme, std::uint64_t seed = 42, bool symmetric = false);
// Planar Gauss-Legendre directions on the arcs between sorted critical angles.
DirectionSet arc_directions(std::vector<double> critical_angles, int per_arc);
DirectionSet custom_directions(const std::vector<Vec>& vs);
// Angles of lines through pairs of vertices, the breakpoints of planar radial functions.
std::vector<double> critical_angles(const ConvexBody& K);

double sphere_area(int n);

}  // namespace berwald
