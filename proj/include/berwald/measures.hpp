#pragma once

#include "berwald/geometry.hpp"
#include "berwald/simplex_quadrature.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace berwald {

// Standard normal CDF and its inverse.
struct GaussianCDF {
    static double cdf(double x);
    static double pdf(double x);
    static double inverse(double u);
};

enum class MeasureKind { Lebesgue, Gaussian, RadialPower, Cauchy, Exponential };

// A measure on R^n given by a density, optionally pulled back through a
// volume-preserving linear map (density phi(Tx)).
class Measure {
public:
    static Measure lebesgue(int n);
    static Measure gaussian(int n, double sigma = 1.0);
    static Measure radial_power(int n, double alpha);
    static Measure cauchy(int n, double beta);
    static Measure exponential(int n, double c = 1.0);

    // Density phi o T; requires |det T - 1| <= 1e-9.
    Measure pullback(const Mat& T) const;

    double density(const Vec& x) const;

    int dim() const { return n_; }
    MeasureKind kind() const { return kind_; }
    double param() const { return param_; }
    std::string name() const;

    bool is_lebesgue() const { return kind_ == MeasureKind::Lebesgue; }
    bool is_gaussian() const { return kind_ == MeasureKind::Gaussian; }
    bool is_pulled_back() const { return T_.has_value(); }
    // Degree alpha with mu(tA) = t^alpha mu(A).
    std::optional<double> homogeneity() const;
    bool is_even() const;
    // Radial density e^{-w(|x|)} with w increasing and w(e^t) convex.
    bool in_class_Mn() const;
    // Largest s for which Borell's classification gives s-concavity on all convex sets.
    std::optional<double> concavity_exponent() const;
    bool is_log_concave() const;
    // Density blows up at the origin.
    bool singular_at_origin() const;
    // Decay exponent k with phi(x) ~ |x|^{-k}, or nullopt for faster than any power.
    std::optional<double> radial_decay() const;

private:
    Measure(MeasureKind k, int n, double param) : kind_(k), n_(n), param_(param) {}
    double base_density(const Vec& x) const;

    MeasureKind kind_;
    int n_;
    double param_;
    double norm_ = 1.0;
    std::optional<Mat> T_;
};

struct MeasureOptions {
    double rel_tol = 1e-7;
    double abs_tol = 1e-15;
    long max_evaluations = 4'000'000;
    long mc_samples = 1L << 20;
    std::uint64_t seed = 42;
};

struct MeasureValue {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

MeasureValue measure_of_body(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt = {});
// Integral of the density over each facet of K, in facet order.
std::vector<MeasureValue> facet_integrals(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt = {});
MeasureValue boundary_measure(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt = {});
// Integral of g(x) * density(x) over K.
MeasureValue integrate_over_body(const Measure& mu, const ConvexBody& K, const std::function<double(const Vec&)>& g,
                                 const MeasureOptions& opt = {});

enum class TransformKind { F, Q, R };
enum class ValidityClass { AllConvex, ContainsOrigin, Symmetric };

std::string to_string(TransformKind k);
std::string to_string(ValidityClass v);

// Monotone transform used to express the concavity of a measure.
class ConcavityDescriptor {
public:
    // name in {power, log, ehrhard, gaussian_half_power, symmetric_power}.
    // power reads s; gaussian_half_power and symmetric_power read the dimension n.
    static ConcavityDescriptor catalog(const std::string& name, double param = 0.0);
    static ConcavityDescriptor power(double s);
    static ConcavityDescriptor log();
    static ConcavityDescriptor ehrhard();

    TransformKind kind() const { return kind_; }
    ValidityClass validity() const { return validity_; }
    const std::string& name() const { return name_; }
    std::optional<double> exponent() const { return s_; }
    bool is_log() const { return name_ == "log"; }
    bool is_ehrhard() const { return name_ == "ehrhard"; }

    double transform(double x) const;
    double inverse(double y) const;
    double derivative(double x) const;
    bool zero_anchored() const;

    // Reference profile psi_{f,A}: F^{-1}(F(A)(1-t)), Q^{-1}(Q(A)-t), R^{-1}(R(A)(1+t)).
    double psi_reference(double A, double t) const;
    // Support length of psi_reference (1 for F, infinite otherwise).
    double reference_support() const;

    // Whether the measure is known to be concave in this sense on the validity class.
    bool valid_for(const Measure& mu) const;
    // Whether a body belongs to the validity class.
    bool admits(const ConvexBody& K) const;

private:
    TransformKind kind_ = TransformKind::F;
    ValidityClass validity_ = ValidityClass::AllConvex;
    std::string name_;
    std::optional<double> s_;
};

}  // namespace berwald
