#include "berwald/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace berwald {

double GaussianCDF::cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double GaussianCDF::pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double GaussianCDF::inverse(double u) {
    if (std::isnan(u)) return u;
    if (u <= 0.0) return -HUGE_VAL;
    if (u >= 1.0) return HUGE_VAL;
    // Acklam's rational seed.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (u < plow) {
        double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        double q = u - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley steps; the upper tail works on the complement to keep precision.
    for (int it = 0; it < 3; ++it) {
        double e = (u > 0.5) ? -(0.5 * std::erfc(x / std::numbers::sqrt2) - (1.0 - u)) : cdf(x) - u;
        double t = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
        x -= t / (1.0 + 0.5 * x * t);
    }
    return x;
}

Measure Measure::lebesgue(int n) { return Measure(MeasureKind::Lebesgue, n, 0.0); }

Measure Measure::gaussian(int n, double sigma) {
    if (!(sigma > 0)) throw DomainError("gaussian: sigma must be positive");
    Measure m(MeasureKind::Gaussian, n, sigma);
    m.norm_ = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.5 * n);
    return m;
}

Measure Measure::radial_power(int n, double alpha) {
    if (!(alpha > 0)) throw DomainError("radial_power: alpha must be positive");
    return Measure(MeasureKind::RadialPower, n, alpha);
}

Measure Measure::cauchy(int n, double beta) {
    if (!(beta > 0)) throw DomainError("cauchy: beta must be positive");
    return Measure(MeasureKind::Cauchy, n, beta);
}

Measure Measure::exponential(int n, double c) {
    if (!(c > 0)) throw DomainError("exponential: rate must be positive");
    return Measure(MeasureKind::Exponential, n, c);
}

Measure Measure::pullback(const Mat& T) const {
    if (T.rows() != n_ || T.cols() != n_) throw DomainError("pullback: matrix shape mismatch");
    if (std::abs(T.determinant() - 1.0) > 1e-9) throw DomainError("pullback: determinant must equal 1");
    Measure m = *this;
    m.T_ = T_ ? Mat(*T_ * T) : T;
    return m;
}

double Measure::base_density(const Vec& x) const {
    switch (kind_) {
        case MeasureKind::Lebesgue:
            return 1.0;
        case MeasureKind::Gaussian:
            return norm_ * std::exp(-0.5 * x.squaredNorm() / (param_ * param_));
        case MeasureKind::RadialPower: {
            double r = x.norm();
            return r > 0 ? std::pow(r, param_ - n_) : 0.0;
        }
        case MeasureKind::Cauchy:
            return std::pow(1.0 + x.squaredNorm(), -param_);
        case MeasureKind::Exponential:
            return std::exp(-param_ * x.norm());
    }
    return 0.0;
}

double Measure::density(const Vec& x) const { return T_ ? base_density(*T_ * x) : base_density(x); }

std::string Measure::name() const {
    std::ostringstream os;
    switch (kind_) {
        case MeasureKind::Lebesgue: os << "lebesgue"; break;
        case MeasureKind::Gaussian: os << "gaussian(sigma=" << param_ << ")"; break;
        case MeasureKind::RadialPower: os << "radial_power(alpha=" << param_ << ")"; break;
        case MeasureKind::Cauchy: os << "cauchy(beta=" << param_ << ")"; break;
        case MeasureKind::Exponential: os << "exponential(c=" << param_ << ")"; break;
    }
    if (T_) os << "@pullback";
    return os.str();
}

std::optional<double> Measure::homogeneity() const {
    if (kind_ == MeasureKind::Lebesgue) return static_cast<double>(n_);
    if (kind_ == MeasureKind::RadialPower) return param_;
    return std::nullopt;
}

bool Measure::is_even() const { return true; }

bool Measure::in_class_Mn() const {
    if (T_ && !(T_->transpose() * *T_).isApprox(Mat::Identity(n_, n_), 1e-12)) return kind_ == MeasureKind::Lebesgue;
    if (kind_ == MeasureKind::RadialPower) return param_ <= n_;
    return true;
}

std::optional<double> Measure::concavity_exponent() const {
    switch (kind_) {
        case MeasureKind::Lebesgue: return 1.0 / n_;
        case MeasureKind::Gaussian:
        case MeasureKind::Exponential: return 0.0;
        case MeasureKind::Cauchy:
            if (param_ > n_) return -1.0 / (param_ - n_);
            return std::nullopt;
        case MeasureKind::RadialPower: return std::nullopt;
    }
    return std::nullopt;
}

bool Measure::is_log_concave() const {
    auto s = concavity_exponent();
    return s && *s >= 0.0;
}

bool Measure::singular_at_origin() const { return kind_ == MeasureKind::RadialPower && param_ < n_; }

std::optional<double> Measure::radial_decay() const {
    switch (kind_) {
        case MeasureKind::Lebesgue: return 0.0;
        case MeasureKind::RadialPower: return n_ - param_;
        case MeasureKind::Cauchy: return 2.0 * param_;
        default: return std::nullopt;
    }
}

namespace {

SimplexQuadOptions quad_opts(const MeasureOptions& o) { return {o.rel_tol, o.abs_tol, o.max_evaluations}; }

MeasureValue monte_carlo(const Measure& mu, const ConvexBody& K, const std::function<double(const Vec&)>& g,
                         const MeasureOptions& opt) {
    auto cells = K.fan();
    std::vector<double> cum;
    double total = 0.0;
    for (const Mat& S : cells) {
        total += simplex_measure(S);
        cum.push_back(total);
    }
    std::seed_seq seq{static_cast<std::uint64_t>(opt.seed), static_cast<std::uint64_t>(K.dim())};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = K.dim();
    double sum = 0.0, sum2 = 0.0;
    Vec lam(n + 1);
    for (long i = 0; i < opt.mc_samples; ++i) {
        double u = unif(rng) * total;
        size_t c = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (c >= cells.size()) c = cells.size() - 1;
        double z = 0.0;
        for (int j = 0; j <= n; ++j) {
            lam[j] = -std::log1p(-unif(rng));
            z += lam[j];
        }
        Vec x = cells[c] * (lam / z);
        double v = mu.density(x) * g(x);
        sum += v;
        sum2 += v * v;
    }
    double N = static_cast<double>(opt.mc_samples);
    double mean = sum / N;
    double var = std::max(sum2 / N - mean * mean, 0.0);
    return {total * mean, total * std::sqrt(var / N), true};
}

}  // namespace

MeasureValue integrate_over_body(const Measure& mu, const ConvexBody& K, const std::function<double(const Vec&)>& g,
                                 const MeasureOptions& opt) {
    if (K.dim() != mu.dim()) throw DomainError("measure and body dimensions differ");
    if (K.dim() >= 5) return monte_carlo(mu, K, g, opt);
    Vec apex = K.centroid();
    if (mu.singular_at_origin() && K.contains(Vec::Zero(K.dim()))) apex = Vec::Zero(K.dim());
    auto f = [&](const Vec& x) { return mu.density(x) * g(x); };
    QuadResult q = integrate_simplices(f, K.fan(apex), quad_opts(opt));
    return {q.value, q.error, q.converged};
}

std::vector<MeasureValue> facet_integrals(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt) {
    std::vector<MeasureValue> out;
    out.reserve(K.facets().size());
    bool constant = mu.is_lebesgue();
    auto f = [&](const Vec& x) { return mu.density(x); };
    for (const Facet& F : K.facets()) {
        if (constant) {
            out.push_back({F.area, 0.0, true});
            continue;
        }
        QuadResult q = integrate_simplices(f, F.pieces, quad_opts(opt));
        out.push_back({q.value, q.error, q.converged});
    }
    return out;
}

MeasureValue measure_of_body(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt) {
    if (K.dim() != mu.dim()) throw DomainError("measure and body dimensions differ");
    if (mu.is_lebesgue()) return {K.volume(), 0.0, true};
    if (mu.is_gaussian() && !mu.is_pulled_back() && K.dim() >= 2 && K.dim() <= 4) {
        // Divergence theorem with V = (Phi(x_1/sigma) - Phi(c_1/sigma)) phi_{n-1}(x') e_1, div V = phi.
        // Anchoring at the centroid keeps the facet fluxes of small bodies far from 0 from cancelling.
        const double sg = mu.param();
        const double c = std::pow(2 * std::numbers::pi * sg * sg, -0.5 * (K.dim() - 1));
        const double x0 = K.centroid()[0] / sg;
        auto V = [&](const Vec& x) {
            double r2 = x.squaredNorm() - x[0] * x[0];
            double u = x[0] / sg;
            // Phi(u) - Phi(x0) without subtracting two numbers near 1.
            double dPhi = u > 0 && x0 > 0 ? GaussianCDF::cdf(-x0) - GaussianCDF::cdf(-u)
                                          : GaussianCDF::cdf(u) - GaussianCDF::cdf(x0);
            return dPhi * c * std::exp(-0.5 * r2 / (sg * sg));
        };
        MeasureValue out;
        for (const Facet& F : K.facets()) {
            if (std::abs(F.normal[0]) < 1e-15) continue;
            QuadResult q = integrate_simplices(V, F.pieces, quad_opts(opt));
            out.value += F.normal[0] * q.value;
            out.error += std::abs(F.normal[0]) * q.error;
            out.converged = out.converged && q.converged;
        }
        return out;
    }
    if (auto alpha = mu.homogeneity(); alpha && K.dim() <= 4) {
        // Divergence theorem: alpha * mu(K) = sum_F b_F * int_F phi.
        auto w = facet_integrals(mu, K, opt);
        MeasureValue out;
        for (size_t i = 0; i < w.size(); ++i) {
            double b = K.facets()[i].offset;
            out.value += b * w[i].value;
            out.error += std::abs(b) * w[i].error;
            out.converged = out.converged && w[i].converged;
        }
        out.value /= *alpha;
        out.error /= *alpha;
        return out;
    }
    return integrate_over_body(mu, K, [](const Vec&) { return 1.0; }, opt);
}

MeasureValue boundary_measure(const Measure& mu, const ConvexBody& K, const MeasureOptions& opt) {
    MeasureValue out;
    for (const MeasureValue& w : facet_integrals(mu, K, opt)) {
        out.value += w.value;
        out.error += w.error;
        out.converged = out.converged && w.converged;
    }
    return out;
}

std::string to_string(TransformKind k) {
    switch (k) {
        case TransformKind::F: return "F";
        case TransformKind::Q: return "Q";
        case TransformKind::R: return "R";
    }
    return "?";
}

std::string to_string(ValidityClass v) {
    switch (v) {
        case ValidityClass::AllConvex: return "all_convex";
        case ValidityClass::ContainsOrigin: return "contains_origin";
        case ValidityClass::Symmetric: return "symmetric";
    }
    return "?";
}

ConcavityDescriptor ConcavityDescriptor::power(double s) {
    if (!std::isfinite(s) || s == 0.0) throw DomainError("power descriptor needs finite nonzero s; use log for s = 0");
    ConcavityDescriptor d;
    d.name_ = "power";
    d.s_ = s;
    d.kind_ = s > 0 ? TransformKind::F : TransformKind::R;
    return d;
}

ConcavityDescriptor ConcavityDescriptor::log() {
    ConcavityDescriptor d;
    d.name_ = "log";
    d.kind_ = TransformKind::Q;
    return d;
}

ConcavityDescriptor ConcavityDescriptor::ehrhard() {
    ConcavityDescriptor d;
    d.name_ = "ehrhard";
    d.kind_ = TransformKind::Q;
    return d;
}

ConcavityDescriptor ConcavityDescriptor::catalog(const std::string& name, double param) {
    if (name == "power") return power(param);
    if (name == "log") return log();
    if (name == "ehrhard") return ehrhard();
    if (name == "gaussian_half_power" || name == "symmetric_power") {
        int n = static_cast<int>(std::lround(param));
        if (n < 2 || n > kMaxDim || std::abs(param - n) > 1e-12)
            throw DomainError(name + " needs the dimension n in [2, 6]");
        ConcavityDescriptor d = power(name == "symmetric_power" ? 1.0 / n : 0.5 / n);
        d.name_ = name;
        d.validity_ = name == "symmetric_power" ? ValidityClass::Symmetric : ValidityClass::ContainsOrigin;
        return d;
    }
    throw DomainError("unknown concavity descriptor '" + name + "'");
}

double ConcavityDescriptor::transform(double x) const {
    if (s_) return std::pow(x, *s_);
    if (is_log()) return std::log(x);
    return GaussianCDF::inverse(x);
}

double ConcavityDescriptor::inverse(double y) const {
    if (s_) return std::pow(y, 1.0 / *s_);
    if (is_log()) return std::exp(y);
    return GaussianCDF::cdf(y);
}

double ConcavityDescriptor::derivative(double x) const {
    if (s_) return *s_ * std::pow(x, *s_ - 1.0);
    if (is_log()) return 1.0 / x;
    return 1.0 / GaussianCDF::pdf(GaussianCDF::inverse(x));
}

bool ConcavityDescriptor::zero_anchored() const { return kind_ == TransformKind::F && transform(0.0) == 0.0; }

double ConcavityDescriptor::psi_reference(double A, double t) const {
    if (!(A > 0)) throw DomainError("psi_reference: A must be positive");
    if (t < 0) return 0.0;
    switch (kind_) {
        case TransformKind::F:
            if (t >= 1.0) return 0.0;
            if (s_) return A * std::pow(1.0 - t, 1.0 / *s_);
            return inverse(transform(A) * (1.0 - t));
        case TransformKind::Q:
            if (is_log()) return A * std::exp(-t);
            return inverse(transform(A) - t);
        case TransformKind::R:
            return A * std::pow(1.0 + t, 1.0 / *s_);
    }
    return 0.0;
}

double ConcavityDescriptor::reference_support() const { return kind_ == TransformKind::F ? 1.0 : HUGE_VAL; }

bool ConcavityDescriptor::valid_for(const Measure& mu) const {
    auto s_mu = mu.concavity_exponent();
    if (name_ == "power") return s_mu && *s_ <= *s_mu + 1e-15;
    if (name_ == "log") return s_mu && *s_mu >= 0.0;
    if (name_ == "ehrhard") return mu.is_gaussian();
    if (name_ == "gaussian_half_power") return mu.is_gaussian() || (s_mu && *s_ <= *s_mu);
    if (name_ == "symmetric_power") return mu.in_class_Mn();
    return false;
}

bool ConcavityDescriptor::admits(const ConvexBody& K) const {
    switch (validity_) {
        case ValidityClass::AllConvex: return true;
        case ValidityClass::ContainsOrigin: return K.contains(Vec::Zero(K.dim()));
        case ValidityClass::Symmetric: return K.is_symmetric();
    }
    return false;
}

}  // namespace berwald
