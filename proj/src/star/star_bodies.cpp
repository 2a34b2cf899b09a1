#include "berwald/star_bodies.hpp"

#include "berwald/simplex_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace berwald {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string direction_header(int n) {
    std::ostringstream os;
    for (int i = 0; i < n; ++i) os << "theta_" << i + 1 << ",";
    return os.str();
}

// ((p / A) Mel(g)(p))^{1/p} for one covariogram profile, with an error estimate.
struct RadialValue {
    double value = 0.0;
    double error = 0.0;
    bool flagged = false;
};

RadialValue radial_from_profile(const CovariogramProfile& P, double p) {
    RadialValue out;
    if (std::isinf(p)) {
        out.value = P.rho_DK;
        return out;
    }
    const double A = P.mass;
    if (p == 0.0) {
        MellinResult r = mellin_log_limit(P.profile);
        out.value = r.value;
        out.error = r.error + r.value * P.max_error / A;
        out.flagged = r.flagged || P.flagged;
        return out;
    }
    MellinResult r = mellin(P.profile, p);
    double v = p / A * r.value;
    if (r.flagged || !(v > 0)) return {kInf, kInf, true};
    out.value = std::pow(v, 1.0 / p);
    // Relative error of v, carried through the 1/p power; sampling error of g enters through A.
    double rel = r.error / std::abs(r.value) + P.max_error / A;
    out.error = out.value * rel / std::abs(p);
    out.flagged = P.flagged;
    return out;
}

StarBodySamples mean_body(const ConvexBody& K, const Measure& mu, double p, const DirectionSet& dirs,
                          CovariogramKind kind, const CovariogramOptions& opt) {
    if (!(p > -1)) throw DomainError("mean bodies need p > -1");
    if (dirs.dim != K.dim() || mu.dim() != K.dim()) throw DomainError("dimension mismatch");
    StarBodySamples S;
    S.dirs = dirs;
    S.family = kind == CovariogramKind::Standard ? "radial_mean" : "polarized_mean";
    S.p = p;
    S.measure = mu.name();
    for (const Direction& th : dirs.dirs) {
        RadialValue v;
        if (std::isinf(p)) {
            v.value = radial_origin(difference_body(K), th);
        } else {
            v = radial_from_profile(profile(K, mu, th, kind, opt), p);
        }
        S.rho.push_back(v.value);
        S.error.push_back(v.error);
        S.flagged.push_back(v.flagged);
    }
    return S;
}

}  // namespace

bool StarBodySamples::any_flagged() const { return std::any_of(flagged.begin(), flagged.end(), [](bool b) { return b; }); }

double StarBodySamples::asymmetry() const {
    double worst = 0.0;
    for (size_t i = 0; i < rho.size(); ++i)
        for (size_t j = i + 1; j < rho.size(); ++j)
            if ((dirs.dirs[i].vec() + dirs.dirs[j].vec()).norm() < 1e-12)
                worst = std::max(worst, std::abs(rho[i] - rho[j]) / std::max(rho[i], rho[j]));
    return worst;
}

std::string StarBodySamples::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "# " << family << " p=" << p << " measure=" << measure << " body=" << body << "\n";
    os << direction_header(dirs.dim) << "rho,error\n";
    for (size_t i = 0; i < rho.size(); ++i) {
        for (int k = 0; k < dirs.dim; ++k) os << dirs.dirs[i][k] << ",";
        os << rho[i] << "," << error[i] << "\n";
    }
    return os.str();
}

std::string SupportBodySamples::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "# " << label << "\n";
    os << direction_header(dirs.dim) << "h,error\n";
    for (size_t i = 0; i < h.size(); ++i) {
        for (int k = 0; k < dirs.dim; ++k) os << dirs.dirs[i][k] << ",";
        os << h[i] << "," << error[i] << "\n";
    }
    return os.str();
}

DirectionSet default_directions(int n, bool symmetric, std::uint64_t seed) {
    int count = n == 2 ? 64 : n == 3 ? 256 : 512;
    return directions(n, count, seed, symmetric);
}

StarBodySamples radial_mean_body(const ConvexBody& K, const Measure& mu, double p, const DirectionSet& dirs,
                                 const CovariogramOptions& opt) {
    return mean_body(K, mu, p, dirs, CovariogramKind::Standard, opt);
}

StarBodySamples polarized_mean_body(const ConvexBody& K, const Measure& mu, double p, const DirectionSet& dirs,
                                    const CovariogramOptions& opt) {
    return mean_body(K, mu, p, dirs, CovariogramKind::Polarized, opt);
}

StarBodySamples spectral_mean_body(const ConvexBody& K, double p, const DirectionSet& dirs,
                                   const CovariogramOptions& opt) {
    if (!(p >= -1)) throw DomainError("spectral mean bodies need p >= -1");
    const Measure leb = Measure::lebesgue(K.dim());
    if (p == -1.0) {
        StarBodySamples S;
        S.dirs = dirs;
        S.family = "spectral_mean";
        S.p = p;
        S.measure = leb.name();
        for (const Direction& th : dirs.dirs) {
            S.rho.push_back(K.volume() / projection_volume(K, th));
            S.error.push_back(0.0);
            S.flagged.push_back(false);
        }
        return S;
    }
    StarBodySamples S = radial_mean_body(K, leb, p, dirs, opt);
    S.family = "spectral_mean";
    // (p+1)^{1/p} -> e at p = 0.
    double f = p == 0.0 ? std::exp(1.0) : std::isinf(p) ? 1.0 : std::pow(p + 1, 1.0 / p);
    for (size_t i = 0; i < S.size(); ++i) {
        S.rho[i] *= f;
        S.error[i] *= f;
    }
    return S;
}

ConvexBody ProjectionBody::zonotope() const {
    std::vector<Vec> gens;
    for (size_t i = 0; i < normals.size(); ++i)
        if (weights[i] > 0) gens.push_back(-weights[i] * normals[i]);
    return berwald::zonotope(static_cast<int>(eta.size()), gens);
}

ProjectionBody weighted_projection_body(const ConvexBody& K, const Measure& mu, const DirectionSet& dirs,
                                        const MeasureOptions& opt) {
    if (mu.dim() != K.dim() || dirs.dim != K.dim()) throw DomainError("dimension mismatch");
    auto w = facet_integrals(mu, K, opt);
    ProjectionBody B;
    B.eta = Vec::Zero(K.dim());
    std::vector<double> werr;
    for (size_t i = 0; i < w.size(); ++i) {
        B.normals.push_back(K.facets()[i].normal);
        B.weights.push_back(w[i].value);
        werr.push_back(w[i].error);
        B.eta += 0.5 * w[i].value * K.facets()[i].normal;
    }
    B.h.dirs = B.h_tilde.dirs = dirs;
    B.h.label = "projection body support, measure=" + mu.name();
    B.h_tilde.label = "symmetric projection body support, measure=" + mu.name();
    for (const Direction& th : dirs.dirs) {
        double h = 0.0, ht = 0.0, e = 0.0, et = 0.0;
        for (size_t i = 0; i < B.normals.size(); ++i) {
            double c = th.vec().dot(B.normals[i]);
            h += std::max(0.0, -c) * B.weights[i];
            ht += 0.5 * std::abs(c) * B.weights[i];
            e += std::max(0.0, -c) * werr[i];
            et += 0.5 * std::abs(c) * werr[i];
        }
        B.h.h.push_back(h);
        B.h.error.push_back(e);
        B.h_tilde.h.push_back(ht);
        B.h_tilde.error.push_back(et);
    }
    return B;
}

double projection_support(const ConvexBody& K, const Measure& mu, const Direction& theta, const MeasureOptions& opt) {
    return weighted_projection_body(K, mu, custom_directions({theta.vec()}), opt).h.h.front();
}

double polar_radial(const SupportBodySamples& h, size_t i) {
    if (!(h.h.at(i) > 0)) throw DomainError("polar radial needs a positive support value");
    return 1.0 / h.h[i];
}

StarBodySamples polar_radial(const SupportBodySamples& h) {
    StarBodySamples S;
    S.dirs = h.dirs;
    S.family = "polar_projection";
    S.measure = h.label;
    for (size_t i = 0; i < h.size(); ++i) {
        double r = polar_radial(h, i);
        S.rho.push_back(r);
        S.error.push_back(r * r * h.error[i]);
        S.flagged.push_back(false);
    }
    return S;
}

MeasureValue polar_projection_measure(const ConvexBody& K, const Measure& mu, const Measure& nu,
                                      const MeasureOptions& opt) {
    DirectionSet none;
    none.dim = K.dim();
    ProjectionBody B = weighted_projection_body(K, mu, none, opt);
    return measure_of_body(nu, polar(B.zonotope()), opt);
}

double star_measure(const Measure& nu, const StarBodySamples& S) {
    auto alpha = nu.homogeneity();
    if (!alpha) throw DomainError("star_measure needs a homogeneous measure");
    if (S.dirs.weights.size() != S.size()) throw DomainError("direction set carries no quadrature weights");
    double acc = 0.0;
    for (size_t i = 0; i < S.size(); ++i)
        acc += S.dirs.weights[i] * nu.density(S.dirs.dirs[i].vec()) * std::pow(S.rho[i], *alpha);
    return acc / *alpha;
}

LimitShapeReport limit_shape_check(const ConvexBody& K, const Measure& mu, const Direction& theta,
                                   std::vector<double> ps, const CovariogramOptions& opt) {
    std::sort(ps.begin(), ps.end(), std::greater<>());
    for (double p : ps)
        if (!(p > -1 && p < 0)) throw DomainError("limit shape check needs p in (-1, 0)");
    LimitShapeReport R;
    CovariogramProfile P = profile(K, mu, theta, CovariogramKind::Standard, opt);
    for (double p : ps) {
        RadialValue v = radial_from_profile(P, p);
        R.p.push_back(p);
        R.values.push_back(std::pow(p + 1, 1.0 / p) * v.value);
    }
    R.target = P.mass / projection_support(K, mu, theta, opt.measure);
    const size_t m = R.values.size();
    if (m >= 2) {
        double x1 = ps[m - 2] + 1, x2 = ps[m - 1] + 1;
        R.extrapolated = R.values[m - 1] - x2 * (R.values[m - 2] - R.values[m - 1]) / (x1 - x2);
    } else {
        R.extrapolated = R.values.back();
    }
    R.deviation = std::abs(R.values.back() - R.target) / R.target;
    return R;
}

MeasureValue translated_average(const Measure& nu, const Measure& mu, const ConvexBody& K, const MeasureOptions& opt) {
    if (nu.dim() != K.dim() || mu.dim() != K.dim()) throw DomainError("dimension mismatch");
    const ConvexBody DK = difference_body(K);
    MeasureValue A = measure_of_body(mu, K, opt);
    // Fan from the origin: g is largest there and a singular nu density sits at a vertex.
    const Vec o = Vec::Zero(K.dim());
    SimplexQuadOptions so{opt.rel_tol, opt.abs_tol, opt.max_evaluations};
    QuadResult q = integrate_simplices([&](const Vec& x) { return nu.density(x) * covariogram_at(K, mu, x, opt).value; },
                                       DK.fan(o), so);
    return {q.value / A.value, q.error / A.value + q.value * A.error / (A.value * A.value), q.converged && A.converged};
}

LemmaReport homogeneous_lemma_check(const Measure& nu, const Measure& mu, const ConvexBody& K, const DirectionSet& dirs,
                                    const CovariogramOptions& opt) {
    auto alpha = nu.homogeneity();
    if (!alpha) throw DomainError("homogeneous lemma needs a homogeneous measure nu");
    LemmaReport R;
    R.alpha = *alpha;
    R.star_side = star_measure(nu, radial_mean_body(K, mu, *alpha, dirs, opt));
    R.translated_side = translated_average(nu, mu, K, opt.measure).value;
    R.gap = std::abs(R.star_side - R.translated_side) / R.translated_side;
    return R;
}

double covariance_check(const ConvexBody& K, const Measure& mu, const Mat& T, double p, const DirectionSet& dirs,
                        const CovariogramOptions& opt) {
    if (std::abs(T.determinant() - 1) > 1e-9) throw DomainError("covariance check needs det T = 1");
    const ConvexBody TK = linear_image(K, T);
    const Measure muT = mu.pullback(T);
    const Mat Ti = T.inverse();
    StarBodySamples lhs = radial_mean_body(TK, mu, p, dirs, opt);
    std::vector<Vec> pre;
    std::vector<double> scale;
    for (const Direction& th : dirs.dirs) {
        Vec u = Ti * th.vec();
        scale.push_back(u.norm());
        pre.push_back(u / u.norm());
    }
    StarBodySamples rhs = radial_mean_body(K, muT, p, custom_directions(pre), opt);
    double worst = 0.0;
    for (size_t i = 0; i < dirs.size(); ++i)
        worst = std::max(worst, std::abs(lhs.rho[i] - rhs.rho[i] / scale[i]) / lhs.rho[i]);
    return worst;
}

}  // namespace berwald
