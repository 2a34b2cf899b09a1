#include "berwald/covariogram.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace berwald {

std::string to_string(CovariogramKind k) { return k == CovariogramKind::Standard ? "standard" : "polarized"; }

namespace {

std::optional<ConvexBody> section(CovariogramKind kind, const ConvexBody& K, const Vec& x) {
    return kind == CovariogramKind::Standard ? intersect_shift(K, x) : polarized_intersection(K, x);
}

}  // namespace

MeasureValue covariogram_at(CovariogramKind kind, const ConvexBody& K, const Measure& mu, const Vec& x,
                            const MeasureOptions& opt) {
    if (x.size() != K.dim()) throw DomainError("shift dimension differs from body");
    if (x.norm() == 0.0) return measure_of_body(mu, K, opt);
    auto L = section(kind, K, x);
    if (!L) return {0.0, 0.0, true};
    return measure_of_body(mu, *L, opt);
}

MeasureValue covariogram_at(const ConvexBody& K, const Measure& mu, const Vec& x, const MeasureOptions& opt) {
    return covariogram_at(CovariogramKind::Standard, K, mu, x, opt);
}

MeasureValue polarized_covariogram_at(const ConvexBody& K, const Measure& mu, const Vec& x, const MeasureOptions& opt) {
    return covariogram_at(CovariogramKind::Polarized, K, mu, x, opt);
}

MeasureValue covariogram_slope(CovariogramKind kind, const ConvexBody& K, const Measure& mu, const Direction& theta,
                               double r, const MeasureOptions& opt) {
    std::optional<ConvexBody> L = r == 0.0 ? std::optional<ConvexBody>(K) : section(kind, K, r * theta.vec());
    if (!L) return {0.0, 0.0, true};
    auto w = facet_integrals(mu, *L, opt);
    MeasureValue out;
    for (size_t i = 0; i < w.size(); ++i) {
        double c = L->facets()[i].normal.dot(theta.vec());
        double v = kind == CovariogramKind::Standard ? std::min(0.0, c) : -0.5 * std::abs(c);
        out.value += v * w[i].value;
        out.error += std::abs(v) * w[i].error;
        out.converged = out.converged && w[i].converged;
    }
    return out;
}

std::string CovariogramProfile::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "r,g\n";
    for (size_t k = 0; k < profile.nodes().size(); ++k) os << profile.nodes()[k] << "," << profile.values()[k] << "\n";
    return os.str();
}

CovariogramProfile profile(const ConvexBody& K, const Measure& mu, const Direction& theta, CovariogramKind kind,
                           const CovariogramOptions& opt) {
    if (theta.dim() != K.dim()) throw DomainError("direction dimension differs from body");
    const ConvexBody DK = difference_body(K);
    const double rho = radial_origin(DK, theta);
    std::vector<double> t = Profile1D::chebyshev_nodes(rho, opt.nodes);
    std::vector<double> y(t.size(), 0.0), m;
    double max_err = 0.0;
    bool flagged = false;
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        MeasureValue v = covariogram_at(kind, K, mu, t[k] * theta.vec(), opt.measure);
        y[k] = v.value;
        max_err = std::max(max_err, v.error);
        flagged = flagged || !v.converged;
    }
    if (opt.exact_slopes) {
        m.assign(t.size(), 0.0);
        for (size_t k = 0; k + 1 < t.size(); ++k) {
            MeasureValue s = covariogram_slope(kind, K, mu, theta, t[k], opt.measure);
            m[k] = s.value;
            flagged = flagged || !s.converged;
        }
        // The body is degenerate at the endpoint; use a one-sided three-point rule there.
        size_t e = t.size() - 1;
        double h1 = t[e] - t[e - 1], h2 = t[e - 1] - t[e - 2];
        double d1 = (y[e] - y[e - 1]) / h1, d2 = (y[e - 1] - y[e - 2]) / h2;
        double est = d1 + h1 * (d1 - d2) / (h1 + h2);
        m[e] = std::min(0.0, est);
    }
    double mass = y[0];
    return CovariogramProfile{
        .body = K,
        .measure = mu,
        .theta = theta,
        .kind = kind,
        .rho_DK = rho,
        .mass = mass,
        .profile = Profile1D::sampled(t, y, m, true),
        .max_error = max_err,
        .flagged = flagged,
    };
}

CovariogramField::CovariogramField(ConvexBody K, Measure mu, CovariogramKind kind, CovariogramOptions opt)
    : K_(std::move(K)), DK_(difference_body(K_)), mu_(std::move(mu)), kind_(kind), opt_(opt),
      mass_(measure_of_body(mu_, K_, opt_.measure).value) {}

std::shared_ptr<const CovariogramProfile> CovariogramField::at(const Direction& theta) const {
    std::vector<double> key(theta.dim());
    for (int i = 0; i < theta.dim(); ++i) key[i] = std::round(theta[i] * 1e12);
    {
        std::lock_guard lock(mu_lock_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto P = std::make_shared<const CovariogramProfile>(profile(K_, mu_, theta, kind_, opt_));
    std::lock_guard lock(mu_lock_);
    return cache_.emplace(key, P).first->second;
}

size_t CovariogramField::cached() const {
    std::lock_guard lock(mu_lock_);
    return cache_.size();
}

DerivativeEstimate derivative_at_zero(const CovariogramProfile& P) {
    MeasureOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 0.0;
    o.max_evaluations = 40'000'000;
    DerivativeEstimate d;
    d.h = P.rho_DK / 64.0;
    double g0 = measure_of_body(P.measure, P.body, o).value;
    for (int k = 0; k < 3; ++k) {
        double h = d.h / (1 << k);
        double gh = covariogram_at(P.kind, P.body, P.measure, h * P.theta.vec(), o).value;
        d.differences[k] = (gh - g0) / h;
    }
    d.richardson[0] = 2 * d.differences[1] - d.differences[0];
    d.richardson[1] = 2 * d.differences[2] - d.differences[1];
    d.value = (4 * d.richardson[1] - d.richardson[0]) / 3;
    return d;
}

namespace {

void require_applicable(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F, CovariogramKind kind) {
    if (!F.valid_for(mu)) throw DomainError("descriptor " + F.name() + " does not apply to measure " + mu.name());
    // Standard sections K ∩ (K+x) are arbitrary convex bodies; polarized sections of a
    // symmetric body are symmetric and so contain the origin.
    bool symmetric_family = kind == CovariogramKind::Polarized && K.is_symmetric();
    if (F.validity() != ValidityClass::AllConvex && !symmetric_family)
        throw DomainError("descriptor validity class " + to_string(F.validity()) +
                          " does not cover the covariogram sections of this body");
}

// Uniform point of DK by rejection from its bounding box.
Vec sample_in(const ConvexBody& DK, std::mt19937_64& rng) {
    const int n = DK.dim();
    Vec lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        hi[i] = support(DK, e);
        lo[i] = -support(DK, Vec(-e));
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (true) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
        if (DK.contains(x, 0.0)) return x;
    }
}

}  // namespace

ConcavityReport concavity_check(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F, int trials,
                                std::uint64_t seed, CovariogramKind kind, double tolerance, const MeasureOptions& opt) {
    require_applicable(K, mu, F, kind);
    const ConvexBody DK = difference_body(K);
    std::seed_seq seq{seed, std::uint64_t{0x636f76}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    const bool decreasing = F.kind() == TransformKind::R;
    ConcavityReport rep;
    rep.tolerance = tolerance;
    rep.trials = trials;
    for (int it = 0; it < trials; ++it) {
        Vec x = sample_in(DK, rng), y = sample_in(DK, rng);
        double l = lam(rng);
        Vec z = l * x + (1 - l) * y;
        double gx = covariogram_at(kind, K, mu, x, opt).value;
        double gy = covariogram_at(kind, K, mu, y, opt).value;
        double gz = covariogram_at(kind, K, mu, z, opt).value;
        double margin;
        if (!F.zero_anchored() && (gx <= 0 || gy <= 0)) {
            margin = HUGE_VAL;
        } else if (!F.zero_anchored() && gz <= 0) {
            margin = -HUGE_VAL;
        } else {
            double a = F.transform(gz), b = l * F.transform(gx) + (1 - l) * F.transform(gy);
            margin = decreasing ? b - a : a - b;
        }
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_x = x;
            rep.worst_y = y;
            rep.worst_lambda = l;
        }
        if (margin < -tolerance) ++rep.violations;
    }
    rep.passed = rep.violations == 0;
    return rep;
}

RayAffinityReport ray_affinity(const ConvexBody& K, const Measure& mu, double s, const DirectionSet& rays,
                               int samples_per_ray, const MeasureOptions& opt) {
    const ConvexBody DK = difference_body(K);
    const double m = std::pow(measure_of_body(mu, K, opt).value, s);
    RayAffinityReport rep;
    rep.rays = static_cast<int>(rays.size());
    for (const Direction& th : rays.dirs) {
        double rho = radial_origin(DK, th);
        for (int k = 1; k <= samples_per_ray; ++k) {
            double r = rho * k / (samples_per_ray + 1.0);
            double g = covariogram_at(K, mu, r * th.vec(), opt).value;
            double dev = std::abs(std::pow(g, s) - m * (1 - r / rho)) / m;
            rep.max_deviation = std::max(rep.max_deviation, dev);
        }
    }
    return rep;
}

}  // namespace berwald
