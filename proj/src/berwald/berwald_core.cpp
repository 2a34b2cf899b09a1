#include "berwald/berwald_core.hpp"

#include "geom/hull.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace berwald {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binom_real(double x, double k) {
    // Gamma(x+1) / (Gamma(k+1) Gamma(x-k+1)) for arguments where all three are positive.
    return std::exp(std::lgamma(x + 1) - std::lgamma(k + 1) - std::lgamma(x - k + 1));
}

}  // namespace

ConcaveFunction::ConcaveFunction(ConvexBody K, std::vector<Piece> pieces, std::string label)
    : K_(std::move(K)), pieces_(std::move(pieces)), label_(std::move(label)) {
    const int n = K_.dim();
    if (pieces_.empty()) throw DomainError("concave function needs at least one affine piece");
    for (const Piece& P : pieces_)
        if (P.a.size() != n || !std::isfinite(P.c)) throw DomainError("affine piece dimension mismatch");
    // max t subject to x in K, t <= <a_i,x> + c_i, t >= 0: a vertex of a polytope in R^{n+1}.
    std::vector<Halfspace> hs;
    for (const Facet& F : K_.facets()) {
        Vec a = Vec::Zero(n + 1);
        a.head(n) = F.normal;
        hs.push_back({a, F.offset});
    }
    for (const Piece& P : pieces_) {
        Vec a(n + 1);
        a.head(n) = -P.a;
        a[n] = 1.0;
        double s = a.norm();
        hs.push_back({a / s, P.c / s});
    }
    Vec down = Vec::Zero(n + 1);
    down[n] = -1.0;
    hs.push_back({down, 0.0});
    auto verts = detail::enumerate_vertices(n + 1, hs, 1e-10 * std::max(1.0, K_.scale()));
    if (verts.empty()) throw DomainError("concave function is negative on all of K");
    sup_ = -kInf;
    Vec sum = Vec::Zero(n);
    int count = 0;
    for (const Vec& v : verts) sup_ = std::max(sup_, v[n]);
    for (const Vec& v : verts)
        if (v[n] >= sup_ - 1e-12 * std::max(1.0, sup_)) {
            sum += v.head(n);
            ++count;
        }
    argmax_ = sum / count;
    if (!(sup_ > 0)) throw DomainError("concave function vanishes on K");
    const double gap = 1e-9 * sup_;
    for (const Vec& v : verts)
        if (v[n] > gap && v[n] < sup_ - gap) breaks_.push_back(v[n]);
    std::sort(breaks_.begin(), breaks_.end());
    std::vector<double> kept;
    for (double b : breaks_)
        if (kept.empty() || b - kept.back() > gap) kept.push_back(b);
    breaks_ = std::move(kept);
}

ConcaveFunction ConcaveFunction::min_affine(ConvexBody K, std::vector<Piece> pieces, std::string label) {
    return ConcaveFunction(std::move(K), std::move(pieces), std::move(label));
}

ConcaveFunction ConcaveFunction::roof(const ConvexBody& K, double M, const Vec& x0) {
    if (!(M > 0)) throw DomainError("roof height must be positive");
    if (!K.contains(x0, K.tol())) throw DomainError("roof apex outside K");
    std::vector<Piece> pieces;
    for (const Facet& F : K.facets()) {
        double d = F.offset - F.normal.dot(x0);
        if (d <= K.tol()) continue;
        pieces.push_back({-M * F.normal / d, M * F.offset / d});
    }
    return ConcaveFunction(K, std::move(pieces), "roof");
}

ConcaveFunction ConcaveFunction::constant(ConvexBody K, double c) {
    if (!(c > 0)) throw DomainError("constant must be positive");
    const int n = K.dim();
    return ConcaveFunction(std::move(K), {Piece{Vec::Zero(n), c}}, "constant");
}

ConcaveFunction ConcaveFunction::random_min_affine(const ConvexBody& K, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    const int n = K.dim();
    std::vector<Piece> pieces;
    for (int i = 0; i < m; ++i) {
        Vec a(n);
        for (int j = 0; j < n; ++j) a[j] = g(rng);
        double lo = kInf, hi = -kInf;
        for (const Vec& v : K.vertices()) {
            lo = std::min(lo, a.dot(v));
            hi = std::max(hi, a.dot(v));
        }
        // Smallest value on K is a positive fraction of the spread, so f > 0 on K.
        pieces.push_back({a, -lo + u(rng) * (hi - lo)});
    }
    return ConcaveFunction(K, std::move(pieces), "random_min_affine");
}

double ConcaveFunction::operator()(const Vec& x) const {
    if (!K_.contains(x, K_.tol())) return 0.0;
    double v = kInf;
    for (const Piece& P : pieces_) v = std::min(v, P.a.dot(x) + P.c);
    return std::max(v, 0.0);
}

std::optional<ConvexBody> ConcaveFunction::level_set(double t) const {
    if (t <= 0) return K_;
    if (t > sup_) return std::nullopt;
    std::vector<Halfspace> hs = K_.halfspaces();
    for (const Piece& P : pieces_) {
        double s = P.a.norm();
        if (s < 1e-14) {
            if (P.c < t) return std::nullopt;
            continue;
        }
        hs.push_back({-P.a / s, (P.c - t) / s});
    }
    return ConvexBody::try_from_bounded_halfspaces(K_.dim(), hs);
}

int ConcaveFunction::piece_of_facet(const Facet& F, double t) const {
    const double unit = std::max(1.0, K_.scale());
    for (size_t i = 0; i < pieces_.size(); ++i) {
        double s = pieces_[i].a.norm();
        if (s < 1e-14) continue;
        Vec nrm = -pieces_[i].a / s;
        double off = (pieces_[i].c - t) / s;
        if ((F.normal - nrm).norm() < 1e-7 && std::abs(F.offset - off) < 1e-8 * unit) return static_cast<int>(i);
    }
    return -1;
}

ConcaveFunction ConcaveFunction::scaled(double c) const {
    if (!(c > 0)) throw DomainError("scale must be positive");
    std::vector<Piece> p = pieces_;
    for (Piece& q : p) {
        q.a *= c;
        q.c *= c;
    }
    return ConcaveFunction(K_, std::move(p), label_);
}

ConcaveFunction ConcaveFunction::truncated(double cap) const {
    std::vector<Piece> p = pieces_;
    p.push_back({Vec::Zero(K_.dim()), cap});
    return ConcaveFunction(K_, std::move(p), label_ + "_truncated");
}

namespace {

// Level-set measures and their t-derivatives, cached by node.
class LevelSampler {
public:
    LevelSampler(const ConcaveFunction& f, const Measure& mu, const MeasureOptions& opt)
        : f_(f), mu_(mu), opt_(opt) {}

    struct Sample {
        double value = 0.0;
        double slope = 0.0;
        double error = 0.0;
        bool exists = false;
        bool converged = true;
    };

    const Sample& at(double t) {
        auto it = cache_.find(t);
        if (it != cache_.end()) return it->second;
        Sample s;
        auto L = f_.level_set(t);
        if (L) {
            s.exists = true;
            MeasureValue v = measure_of_body(mu_, *L, opt_);
            s.value = v.value;
            s.error = v.error;
            s.converged = v.converged;
            auto w = facet_integrals(mu_, *L, opt_);
            for (size_t i = 0; i < w.size(); ++i) {
                int k = f_.piece_of_facet(L->facets()[i], std::max(t, 0.0));
                if (k < 0) continue;
                s.slope -= w[i].value / f_.pieces()[k].a.norm();
                s.converged = s.converged && w[i].converged;
            }
        }
        return cache_.emplace(t, s).first->second;
    }

    // q Chebyshev-Lobatto nodes on each interval between consecutive breakpoints.
    std::vector<double> grid(int q) const {
        std::vector<double> edges{0.0};
        edges.insert(edges.end(), f_.breakpoints().begin(), f_.breakpoints().end());
        edges.push_back(f_.sup_norm());
        std::vector<double> t{0.0};
        for (size_t k = 0; k + 1 < edges.size(); ++k) {
            std::vector<double> c = Profile1D::chebyshev_nodes(edges[k + 1] - edges[k], q);
            for (int i = 1; i < q; ++i) t.push_back(edges[k] + c[i]);
            t.back() = edges[k + 1];
        }
        return t;
    }

    int intervals() const { return static_cast<int>(f_.breakpoints().size()) + 1; }

    Profile1D build(int q, bool& converged) {
        const double M = f_.sup_norm();
        std::vector<double> t = grid(q);
        const int m = static_cast<int>(t.size());
        std::vector<double> y(m), d(m);
        converged = true;
        for (int k = 0; k < m; ++k) {
            const Sample& s = at(t[k]);
            y[k] = s.value;
            d[k] = s.slope;
            converged = converged && s.converged;
            if (k > 0 && y[k] > y[k - 1]) {
                // Quadrature noise between close nodes; anything beyond the error estimates is real trouble.
                if (y[k] - y[k - 1] > 4 * (s.error + at(t[k - 1]).error) + 1e-14 * y[0]) converged = false;
                y[k] = y[k - 1];
            }
        }
        if (!at(M).exists) {
            // The top level set is lower-dimensional; take the slope just below it, else a one-sided estimate.
            const Sample& below = at(M * (1 - 1e-10));
            int e = m - 1;
            if (below.exists) {
                d[e] = below.slope;
            } else {
                double h1 = t[e] - t[e - 1], h2 = t[e - 1] - t[e - 2];
                double d1 = (y[e] - y[e - 1]) / h1, d2 = (y[e - 1] - y[e - 2]) / h2;
                d[e] = std::min(0.0, d1 + h1 * (d1 - d2) / (h1 + h2));
            }
        }
        return Profile1D::sampled(t, y, d, true);
    }

private:
    const ConcaveFunction& f_;
    const Measure& mu_;
    MeasureOptions opt_;
    std::map<double, Sample> cache_;
};

int per_interval(int nodes, int intervals) { return std::max(4, (nodes - 2) / intervals + 2); }

// p-th moment (1/mu K) int f^p = (p/mu K) Mel(psi)(p); p = 0 gives the log-limit (geometric mean).
struct MomentSet {
    std::vector<double> means, errors;
    std::vector<bool> flagged;
    int nodes = 0;
    double mass = 0.0;
};

MomentSet means_with_refinement(const ConcaveFunction& f, const Measure& mu, const std::vector<double>& ps,
                                const LevelProfileOptions& opt) {
    LevelSampler S(f, mu, opt.measure);
    MomentSet out;
    std::vector<double> prev;
    const int J = S.intervals();
    for (int q = per_interval(opt.nodes, J);; q = 2 * q - 1) {
        const int m = J * (q - 1) + 1;
        bool conv = true;
        Profile1D psi = S.build(q, conv);
        const double A = psi.at_zero();
        MomentSet cur;
        cur.nodes = m;
        cur.mass = A;
        for (double p : ps) {
            MeanValue mv;
            if (p == 0.0) {
                MellinResult r = mellin_log_limit(psi);
                mv = {r.value, r.error, r.flagged};
            } else {
                MellinResult r = mellin(psi, p);
                double v = p / A * r.value;
                if (r.flagged || !(v > 0)) {
                    mv = {kInf, kInf, true};
                } else {
                    double val = std::pow(v, 1.0 / p);
                    mv = {val, val * r.error / std::abs(p * r.value), false};
                }
            }
            mv.flagged = mv.flagged || !conv;
            cur.means.push_back(mv.value);
            cur.errors.push_back(mv.error);
            cur.flagged.push_back(mv.flagged);
        }
        bool settled = !prev.empty();
        for (size_t k = 0; settled && k < ps.size(); ++k) {
            if (!std::isfinite(cur.means[k])) continue;
            double change = std::abs(cur.means[k] - prev[k]) / std::abs(cur.means[k]);
            cur.errors[k] = std::max(cur.errors[k], change * std::abs(cur.means[k]));
            if (change > opt.refine_tol) settled = false;
        }
        if (settled || (!prev.empty() && J * (2 * q - 2) + 1 > opt.max_nodes)) {
            if (!settled && !prev.empty())
                for (size_t k = 0; k < ps.size(); ++k)
                    if (std::isfinite(cur.means[k]) &&
                        std::abs(cur.means[k] - prev[k]) > opt.refine_tol * std::abs(cur.means[k]))
                        cur.flagged[k] = true;
            return cur;
        }
        prev = cur.means;
    }
}

double ehrhard_quotient(double a, double t) {
    // (Phi(a - t) - Phi(a)) / t = -mean of phi over [a - t, a].
    if (t > 0.5) return (GaussianCDF::cdf(a - t) - GaussianCDF::cdf(a)) / t;
    static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                0.9739065285171717};
    static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513270398341,
                                0.0666713443086881};
    double mid = a - 0.5 * t, acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += w[k] * (GaussianCDF::pdf(mid + 0.5 * t * x[k]) + GaussianCDF::pdf(mid - 0.5 * t * x[k]));
    return -0.5 * acc;
}

void require_level_sets(const ConcaveFunction& f, const Measure& mu, const ConcavityDescriptor& F) {
    if (!F.valid_for(mu)) throw DomainError("descriptor " + F.name() + " does not apply to measure " + mu.name());
    switch (F.validity()) {
        case ValidityClass::AllConvex:
            return;
        case ValidityClass::ContainsOrigin: {
            Vec o = Vec::Zero(f.body().dim());
            if (f(o) < f.sup_norm() * (1 - 1e-9))
                throw DomainError("level sets must contain the origin: f needs its maximum at 0");
            return;
        }
        case ValidityClass::Symmetric: {
            for (double frac : {0.0, 0.25, 0.5, 0.75}) {
                auto L = f.level_set(frac * f.sup_norm());
                if (L && !L->is_symmetric()) throw DomainError("level sets must be origin-symmetric");
            }
            return;
        }
    }
}

}  // namespace

Profile1D level_profile(const ConcaveFunction& f, const Measure& mu, int nodes, const MeasureOptions& opt) {
    LevelSampler S(f, mu, opt);
    bool conv = true;
    return S.build(per_interval(nodes, S.intervals()), conv);
}

double psi_reference(const ConcavityDescriptor& F, double A, double t) { return F.psi_reference(A, t); }

Profile1D reference_profile(const ConcavityDescriptor& F, double A) {
    if (!(A > 0)) throw DomainError("reference profile needs A > 0");
    auto psi = [F, A](double t) { return F.psi_reference(A, t); };
    if (auto s = F.exponent()) {
        double e = 1.0 / *s;
        if (*s > 0)
            return Profile1D::analytic(psi, 1.0, {}, [A, e](double t) {
                return t == 0 ? -A * e : A * std::expm1(e * std::log1p(-t)) / t;
            });
        return Profile1D::analytic(psi, kInf, {}, [A, e](double t) {
            return t == 0 ? A * e : A * std::expm1(e * std::log1p(t)) / t;
        });
    }
    if (F.is_log())
        return Profile1D::analytic(psi, kInf, {}, [A](double t) { return t == 0 ? -A : A * std::expm1(-t) / t; });
    if (F.is_ehrhard()) {
        if (!(A < 1)) throw DomainError("Ehrhard reference needs A in (0,1)");
        double a = GaussianCDF::inverse(A);
        return Profile1D::analytic(psi, kInf, {}, [a](double t) {
            return t == 0 ? -GaussianCDF::pdf(a) : ehrhard_quotient(a, t);
        });
    }
    return Profile1D::analytic(psi, F.reference_support());
}

ConstantValue constant_C(double p, const ConcavityDescriptor& F, double muK) {
    if (!(p > -1)) throw DomainError("constant_C needs p > -1");
    Profile1D ref = reference_profile(F, muK);
    ConstantValue out;
    if (p == 0.0) {
        MellinResult r = mellin_log_limit(ref);
        out.value = 1.0 / r.value;
        out.flagged = r.flagged;
        out.note = r.note;
        return out;
    }
    MellinResult r = mellin(ref, p);
    double v = p / muK * r.value;
    if (r.flagged || !(v > 0)) {
        out.value = kInf;
        out.flagged = true;
        out.note = r.note.empty() ? "reference Mellin transform diverges" : r.note;
        return out;
    }
    out.value = std::pow(v, -1.0 / p);
    return out;
}

double closed_form_C(double p, double s) {
    if (!(p > -1)) throw DomainError("closed_form_C needs p > -1");
    if (s > 0) return binom_real(1.0 / s + p, p);
    if (s == 0) return 1.0 / std::tgamma(p + 1);
    if (!(p < -1.0 / s)) return kInf;
    // s (p + 1/s) Gamma(1 - 1/s) / (Gamma(1 + p) Gamma(1 - p - 1/s)).
    return (s * p + 1) * std::exp(std::lgamma(1 - 1.0 / s) - std::lgamma(1 + p) - std::lgamma(1 - p - 1.0 / s));
}

double constant_c_np(int n, double p) {
    if (n < 1 || !(p > -1)) throw DomainError("constant_c_np needs n >= 1 and p > -1");
    if (p == 0.0) {
        double H = 0.0;
        for (int k = 1; k <= n; ++k) H += 1.0 / k;
        return std::exp(H);
    }
    double logB = std::lgamma(p + 1) + std::lgamma(n) - std::lgamma(p + 1 + n);
    return std::exp(-(std::log(n) + logB) / p);
}

MeanValue berwald_mean(const ConcaveFunction& f, const Measure& mu, double p, const LevelProfileOptions& opt) {
    if (!(p > -1)) throw DomainError("berwald_mean needs p > -1");
    MomentSet m = means_with_refinement(f, mu, {p}, opt);
    return {m.means[0], m.errors[0], m.flagged[0]};
}

std::vector<double> default_p_grid() { return {-0.75, -0.5, -0.25, 0.0, 0.5, 1.0, 2.0, 3.0, 5.0}; }

double BerwaldCurve::worst_increase() const {
    double worst = -kInf;
    for (size_t k = 0; k + 1 < T.size(); ++k) {
        if (!std::isfinite(T[k]) || !std::isfinite(T[k + 1])) continue;
        worst = std::max(worst, T[k + 1] / T[k] - 1.0);
    }
    return worst;
}

bool BerwaldCurve::nonincreasing(double rel_tol) const { return worst_increase() <= rel_tol; }

std::string BerwaldCurve::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "p,T,constant,mean,error,flagged\n";
    for (size_t k = 0; k < p.size(); ++k)
        os << p[k] << "," << T[k] << "," << constants[k] << "," << means[k] << "," << errors[k] << ","
           << (flagged[k] ? 1 : 0) << "\n";
    return os.str();
}

std::vector<BerwaldCurve> berwald_curves(const ConcaveFunction& f, const Measure& mu,
                                         const std::vector<ConcavityDescriptor>& Fs, std::vector<double> p_grid,
                                         const LevelProfileOptions& opt) {
    for (const ConcavityDescriptor& F : Fs) require_level_sets(f, mu, F);
    std::sort(p_grid.begin(), p_grid.end());
    for (double p : p_grid)
        if (!(p > -1)) throw DomainError("p-grid entries must exceed -1");
    MomentSet m = means_with_refinement(f, mu, p_grid, opt);
    std::vector<BerwaldCurve> out;
    for (const ConcavityDescriptor& F : Fs) {
        BerwaldCurve c;
        c.p = p_grid;
        c.nodes_used = m.nodes;
        c.sup_norm = f.sup_norm();
        c.mass = m.mass;
        for (size_t k = 0; k < p_grid.size(); ++k) {
            ConstantValue C = constant_C(p_grid[k], F, m.mass);
            bool bad = C.flagged || m.flagged[k] || !std::isfinite(m.means[k]);
            c.constants.push_back(C.value);
            c.means.push_back(m.means[k]);
            c.T.push_back(bad ? kInf : C.value * m.means[k]);
            c.errors.push_back(bad ? kInf : C.value * m.errors[k]);
            c.flagged.push_back(bad);
        }
        out.push_back(std::move(c));
    }
    return out;
}

BerwaldCurve berwald_curve(const ConcaveFunction& f, const Measure& mu, const ConcavityDescriptor& F,
                           std::vector<double> p_grid, const LevelProfileOptions& opt) {
    return berwald_curves(f, mu, {F}, std::move(p_grid), opt).front();
}

EqualityCertificate equality_certificate(const ConcaveFunction& f, const Measure& mu, const ConcavityDescriptor& F,
                                         int grid_points, const MeasureOptions& opt) {
    if (F.kind() != TransformKind::F) throw DomainError("equality certificates apply to zero-anchored F-type descriptors");
    EqualityCertificate out;
    out.grid_points = grid_points;
    out.zero_anchored = F.zero_anchored();
    const double M = f.sup_norm();
    const double A = measure_of_body(mu, f.body(), opt).value;
    for (double t : Profile1D::chebyshev_nodes(M, grid_points)) {
        auto L = f.level_set(t);
        double lhs = L ? measure_of_body(mu, *L, opt).value : 0.0;
        double rhs = F.inverse(F.transform(A) * (1 - t / M));
        out.deviation = std::max(out.deviation, std::abs(lhs - rhs) / A);
    }
    out.certified = out.zero_anchored && out.deviation < 1e-4;
    return out;
}

MomentBound halfspace_moment_ratio(const Measure& mu, const Direction& theta, double p, double q,
                                   const ConcavityDescriptor& F) {
    if (!(p > -1) || p > q || p == 0.0 || q == 0.0) throw DomainError("halfspace moments need -1 < p <= q, p, q != 0");
    if (mu.is_pulled_back() || mu.is_lebesgue() || mu.kind() == MeasureKind::RadialPower)
        throw DomainError("halfspace moments need a finite rotation-invariant measure");
    if (theta.dim() != mu.dim()) throw DomainError("direction dimension differs from measure");
    if (!F.valid_for(mu) || F.validity() != ValidityClass::AllConvex)
        throw DomainError("descriptor " + F.name() + " does not cover subsets of the half-space");
    const int n = mu.dim();
    Vec e1 = Vec::Zero(n);
    e1[0] = 1.0;
    MomentBound out;
    // int <x,theta>_+^r dmu = c_{n,r} int_0^inf u^{r+n-1} phi(u) du, c_{n,r} = pi^{(n-1)/2} G((r+1)/2) / G((r+n)/2).
    auto moment = [&](double r, double& err) {
        double c = std::pow(std::numbers::pi, 0.5 * (n - 1)) * std::tgamma(0.5 * (r + 1)) / std::tgamma(0.5 * (r + n));
        Integral I = integrate_1d(
            [&](double u) {
                double d = u <= 0 ? 0.0 : mu.density(u * e1);
                return d == 0.0 ? 0.0 : std::pow(u, r + n - 1) * d;
            },
                                  0.0, kInf, 1e-12);
        err = c * I.error;
        return c * I.value;
    };
    double e0, ep, eq;
    const double A = moment(0.0, e0);
    const double Mp = moment(p, ep), Mq = moment(q, eq);
    out.half_space_mass = A;
    out.tail_bound = std::max({e0, ep, eq});
    if (!std::isfinite(Mp) || !std::isfinite(Mq) || ep > 1e-3 * Mp || eq > 1e-3 * Mq) {
        out.flagged = true;
        out.note = "moment diverges";
        out.lhs = out.rhs = kInf;
        return out;
    }
    ConstantValue Cp = constant_C(p, F, A), Cq = constant_C(q, F, A);
    out.lhs = std::pow(Mq, 1.0 / q);
    out.rhs = std::pow(A, 1.0 / q - 1.0 / p) * Cp.value / Cq.value * std::pow(Mp, 1.0 / p);
    out.flagged = Cp.flagged || Cq.flagged;
    if (out.flagged) out.note = "reference constant diverges";
    out.margin = out.rhs - out.lhs;
    return out;
}

NormBound lq_l1_bound(const ConcaveFunction& g, const Measure& mu, const ConcavityDescriptor& F, double beta, double q,
                      const LevelProfileOptions& opt) {
    if (!(beta > 0) || !(q >= 1)) throw DomainError("lq_l1_bound needs beta > 0 and q >= 1");
    require_level_sets(g, mu, F);
    MomentSet m = means_with_refinement(g, mu, {1.0 / beta, q / beta}, opt);
    const double A = m.mass;
    NormBound out;
    // int g^r = A M_r^r.
    double int_f = A * std::pow(m.means[0], 1.0 / beta);
    double int_fq = A * std::pow(m.means[1], q / beta);
    ConstantValue C1 = constant_C(1.0 / beta, F, A), Cq = constant_C(q / beta, F, A);
    out.flagged = m.flagged[0] || m.flagged[1] || C1.flagged || Cq.flagged;
    out.lhs = std::pow(int_fq, 1.0 / q);
    out.rhs = std::pow(A, (1 - q) / q) * std::pow(C1.value / Cq.value, 1.0 / beta) * int_f;
    out.margin = out.rhs - out.lhs;
    return out;
}

PerturbationMargin perturbation_check(const ConvexBody& K, const Measure& mu, const ConcaveFunction& psi, double p,
                                      double q) {
    if (!(p > 0) || p > q) throw DomainError("perturbation check needs 0 < p <= q");
    auto alpha = mu.homogeneity();
    auto s = mu.concavity_exponent();
    if (!alpha || !s || std::abs(*s * *alpha - 1) > 1e-12)
        throw DomainError("perturbation check needs an s-concave, 1/s-homogeneous measure");
    const int n = K.dim();
    if (!K.contains(Vec::Zero(n), -K.tol())) throw DomainError("perturbation check needs 0 in the interior of K");
    // Cone over each facet: x = r y, dmu = r^{alpha-1} phi(y) b dA(y) dr and l_K(r y) = 1 - r. Along a ray
    // psi is piecewise linear in r, so the r-integral is a sum of incomplete beta functions.
    const double a = *alpha;
    const ConvexBody& P = psi.body();
    auto ray = [&](const Vec& y, double e) {
        double lo = 0.0, hi = 1.0;
        for (const Facet& G : P.facets()) {
            double u = G.normal.dot(y);
            if (std::abs(u) < 1e-300) {
                if (G.offset < 0) return 0.0;
            } else if (u > 0) {
                hi = std::min(hi, G.offset / u);
            } else {
                lo = std::max(lo, G.offset / u);
            }
        }
        if (!(hi > lo)) return 0.0;
        std::vector<double> slope, icpt, cuts{lo, hi};
        for (const auto& pc : psi.pieces()) {
            slope.push_back(pc.a.dot(y));
            icpt.push_back(pc.c);
        }
        for (size_t i = 0; i < slope.size(); ++i) {
            if (slope[i] != 0) cuts.push_back(-icpt[i] / slope[i]);
            for (size_t j = i + 1; j < slope.size(); ++j)
                if (slope[i] != slope[j]) cuts.push_back((icpt[j] - icpt[i]) / (slope[i] - slope[j]));
        }
        std::sort(cuts.begin(), cuts.end());
        auto B = [&](double b, double r) { return r >= 1 ? boost::math::beta(b, e) : boost::math::beta(b, e, r); };
        double acc = 0.0;
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            double r0 = std::max(lo, cuts[k]), r1 = std::min(hi, cuts[k + 1]);
            if (!(r1 > r0)) continue;
            double mid = 0.5 * (r0 + r1);
            size_t best = 0;
            for (size_t i = 1; i < slope.size(); ++i)
                if (slope[i] * mid + icpt[i] < slope[best] * mid + icpt[best]) best = i;
            if (!(slope[best] * mid + icpt[best] > 0)) continue;
            // int_{r0}^{r1} (1-r)^{e-1} r^{a-1} (m r + c) dr.
            acc += slope[best] * (B(a + 1, r1) - B(a + 1, r0)) + icpt[best] * (B(a, r1) - B(a, r0));
        }
        return acc;
    };
    auto integral = [&](double e) {
        double total = 0.0;
        SimplexQuadOptions so;
        so.rel_tol = 1e-8;
        for (const Facet& F : K.facets()) {
            QuadResult Q = integrate_simplices([&](const Vec& y) { return mu.density(y) * ray(y, e); }, F.pieces, so);
            total += F.offset * Q.value;
        }
        return total;
    };
    const double inv_s = 1.0 / *s;
    PerturbationMargin out;
    out.lhs = binom_real(inv_s + p, inv_s) * integral(p);
    out.rhs = p == q ? out.lhs : binom_real(inv_s + q, inv_s) * integral(q);
    out.margin = out.lhs - out.rhs;
    return out;
}

}  // namespace berwald
