#include "berwald/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace berwald {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void hermite_limit(const std::vector<double>& t, const std::vector<double>& y, std::vector<double>& m) {
    // Fritsch-Carlson: keep each cubic piece monotone.
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        double delta = (y[k + 1] - y[k]) / (t[k + 1] - t[k]);
        if (delta == 0.0) {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        double a = m[k] / delta, b = m[k + 1] / delta;
        if (a < 0) m[k] = 0.0, a = 0.0;
        if (b < 0) m[k + 1] = 0.0, b = 0.0;
        double r = a * a + b * b;
        if (r > 9.0) {
            double tau = 3.0 / std::sqrt(r);
            m[k] = tau * a * delta;
            m[k + 1] = tau * b * delta;
        }
    }
}

std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t m = t.size();
    std::vector<double> h(m - 1), d(m - 1), s(m, 0.0);
    for (size_t k = 0; k + 1 < m; ++k) {
        h[k] = t[k + 1] - t[k];
        d[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (m == 2) {
        s[0] = s[1] = d[0];
        return s;
    }
    for (size_t k = 1; k + 1 < m; ++k) {
        if (d[k - 1] * d[k] <= 0) continue;
        double w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
        s[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double v = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (v * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(v) > 3 * std::abs(d0)) return 3 * d0;
        return v;
    };
    s[0] = end_slope(h[0], h[1], d[0], d[1]);
    s[m - 1] = end_slope(h[m - 2], h[m - 3], d[m - 2], d[m - 3]);
    return s;
}

std::vector<double> centered_slopes(const std::vector<double>& t, const std::vector<double>& y) {
    const size_t m = t.size();
    std::vector<double> s(m);
    for (size_t k = 0; k < m; ++k) {
        if (k == 0) s[k] = (y[1] - y[0]) / (t[1] - t[0]);
        else if (k + 1 == m) s[k] = (y[k] - y[k - 1]) / (t[k] - t[k - 1]);
        else {
            double h0 = t[k] - t[k - 1], h1 = t[k + 1] - t[k];
            double d0 = (y[k] - y[k - 1]) / h0, d1 = (y[k + 1] - y[k]) / h1;
            s[k] = (d0 * h1 + d1 * h0) / (h0 + h1);
        }
    }
    return s;
}

Integral gk(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    Integral out;
    if (!(b > a)) return out;
    double err = 0.0;
    out.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, depth, tol, &err);
    out.error = err;
    return out;
}

Integral tail(const std::function<double(double)>& f, double a, double tol) {
    Integral out;
    boost::math::quadrature::exp_sinh<double> es;
    double err = 0.0, L1 = 0.0;
    try {
        out.value = es.integrate(f, a, kInf, tol, &err, &L1);
        out.error = err;
    } catch (const std::exception&) {
        out.value = kInf;
        out.error = kInf;
    }
    return out;
}

}  // namespace

Integral integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol, int max_depth) {
    if (std::isinf(b)) return tail(f, a, rel_tol);
    return gk(f, a, b, rel_tol, max_depth);
}

Profile1D Profile1D::analytic(Fn psi, double B, std::vector<double> breaks, Fn quotient) {
    if (!(B > 0)) throw DomainError("profile support must be positive");
    Profile1D P;
    P.fn_ = std::move(psi);
    P.quot_ = std::move(quotient);
    P.B_ = B;
    P.psi0_ = P.fn_(0.0);
    std::sort(breaks.begin(), breaks.end());
    for (double b : breaks)
        if (b > 0 && b < B) P.breaks_.push_back(b);
    return P;
}

Profile1D Profile1D::sampled(std::vector<double> t, std::vector<double> y, std::vector<double> slopes, bool monotone) {
    if (t.size() < 3 || t.size() != y.size()) throw DomainError("sampled profile needs >= 3 matching nodes");
    if (t[0] != 0.0) throw DomainError("sampled profile must start at t = 0");
    double ymax = 0.0;
    for (size_t k = 0; k < t.size(); ++k) {
        if (k > 0 && !(t[k] > t[k - 1])) throw DomainError("profile nodes must increase");
        if (!std::isfinite(y[k])) throw DomainError("profile values must be finite");
        ymax = std::max(ymax, std::abs(y[k]));
    }
    for (double& v : y) {
        if (v < -1e-9 * std::max(ymax, 1.0)) throw DomainError("profile values must be nonnegative");
        v = std::max(v, 0.0);
    }
    Profile1D P;
    P.monotone_ = monotone;
    if (slopes.empty()) {
        slopes = monotone ? pchip_slopes(t, y) : centered_slopes(t, y);
    } else if (slopes.size() != t.size()) {
        throw DomainError("slope count must match node count");
    }
    if (monotone) hermite_limit(t, y, slopes);
    P.B_ = t.back();
    P.psi0_ = y[0];
    P.nodes_ = std::move(t);
    P.values_ = std::move(y);
    P.slopes_ = std::move(slopes);
    return P;
}

std::vector<double> Profile1D::chebyshev_nodes(double B, int m) {
    if (m < 3) throw DomainError("need at least 3 nodes");
    std::vector<double> t(m);
    for (int k = 0; k < m; ++k) t[k] = 0.5 * B * (1.0 - std::cos(std::numbers::pi * k / (m - 1)));
    t[0] = 0.0;
    t[m - 1] = B;
    return t;
}

double Profile1D::operator()(double t) const {
    if (t < 0) return psi0_;
    if (t > B_) return 0.0;
    if (!is_sampled()) return fn_(t);
    size_t k = std::upper_bound(nodes_.begin(), nodes_.end(), t) - nodes_.begin();
    if (k == 0) k = 1;
    if (k >= nodes_.size()) k = nodes_.size() - 1;
    --k;
    double h = nodes_[k + 1] - nodes_[k];
    double s = (t - nodes_[k]) / h;
    double s2 = s * s, s3 = s2 * s;
    double v = values_[k] * (2 * s3 - 3 * s2 + 1) + h * slopes_[k] * (s3 - 2 * s2 + s) +
               values_[k + 1] * (3 * s2 - 2 * s3) + h * slopes_[k + 1] * (s3 - s2);
    return std::max(v, 0.0);
}

double Profile1D::quotient(double t) const {
    if (is_sampled()) {
        double h = nodes_[1];
        if (t <= h) {
            double s = t / h;
            double y0 = values_[0], y1 = values_[1], m0 = slopes_[0], m1 = slopes_[1];
            return (y0 * s * (2 * s - 3) + h * m0 * (s - 1) * (s - 1) + y1 * s * (3 - 2 * s) + h * m1 * s * (s - 1)) /
                   h;
        }
        return ((*this)(t) - psi0_) / t;
    }
    if (quot_) return quot_(t);
    double tau = 1e-7 * std::min(B_, 1.0);
    double u = std::max(t, tau);
    return ((*this)(u) - psi0_) / u;
}

double Profile1D::right_limit() const {
    if (infinite_support()) return 0.0;
    if (is_sampled()) return values_.back();
    return fn_(B_);
}

double Profile1D::slope_at_zero() const {
    if (is_sampled()) return slopes_[0];
    return quotient(0.0);
}

Profile1D Profile1D::scaled(double alpha) const {
    if (!(alpha > 0)) throw DomainError("scale must be positive");
    if (is_sampled()) {
        std::vector<double> t = nodes_, s = slopes_;
        for (double& v : t) v *= alpha;
        for (double& v : s) v /= alpha;
        Profile1D P = *this;
        P.nodes_ = std::move(t);
        P.slopes_ = std::move(s);
        P.B_ = B_ * alpha;
        return P;
    }
    Fn f = fn_;
    Fn q = quot_;
    std::vector<double> br;
    for (double b : breaks_) br.push_back(b * alpha);
    return analytic([f, alpha](double t) { return f(t / alpha); }, B_ * alpha, br,
                    q ? Fn([q, alpha](double t) { return q(t / alpha) / alpha; }) : Fn());
}

double Profile1D::first_interval_moment(double q, bool subtract_zero) const {
    if (!is_sampled()) throw DomainError("first_interval_moment needs a sampled profile");
    double h = nodes_[1];
    double y0 = values_[0], y1 = values_[1], m0 = slopes_[0], m1 = slopes_[1];
    double a[4] = {y0, m0, (-3 * y0 - 2 * h * m0 + 3 * y1 - h * m1) / (h * h),
                   (2 * y0 + h * m0 - 2 * y1 + h * m1) / (h * h * h)};
    double acc = 0.0;
    for (int k = subtract_zero ? 1 : 0; k < 4; ++k) {
        double e = q + k + 1;
        if (!(e > 0)) throw DomainError("divergent first-interval moment");
        acc += a[k] * std::pow(h, e) / e;
    }
    return acc;
}

namespace {

// Segment endpoints after the head interval [0, c].
struct Segments {
    double c;
    std::vector<double> pts;  // c = pts[0] < ... ; last is B when finite
};

Segments segments_of(const Profile1D& psi) {
    Segments s;
    const double B = psi.support();
    if (psi.is_sampled()) {
        s.c = psi.nodes()[1];
        s.pts.assign(psi.nodes().begin() + 1, psi.nodes().end());
        return s;
    }
    s.c = 0.5 * std::min(B, 1.0);
    if (!psi.breaks().empty()) s.c = std::min(s.c, 0.5 * psi.breaks().front());
    s.pts.push_back(s.c);
    for (double b : psi.breaks())
        if (b > s.c) s.pts.push_back(b);
    if (std::isfinite(B)) s.pts.push_back(B);
    else if (s.pts.back() < 1.0) s.pts.push_back(1.0);
    return s;
}

// int_{pts[0]}^{B} w(t) psi(t) dt over the smooth pieces, with an exp-sinh tail.
// int w(t) (psi(t) - shift) dt over the segments (and the tail).
Integral body_integral(const Profile1D& psi, const Segments& seg, const std::function<double(double)>& w,
                       const MellinOptions& opt, double shift = 0.0) {
    auto f = [&](double t) {
        double v = psi(t) - shift;
        return v == 0.0 ? 0.0 : w(t) * v;
    };
    Integral acc;
    for (size_t k = 0; k + 1 < seg.pts.size(); ++k) {
        if (psi.is_sampled()) {
            // One cubic times a smooth weight away from 0: fixed Gauss rules, error from the 10/20 gap.
            // Adaptive refinement would only chase roundoff where psi is tiny.
            double a = seg.pts[k], b = seg.pts[k + 1];
            double hi = boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
            double lo = boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
            acc.value += hi;
            acc.error += std::abs(hi - lo);
            continue;
        }
        Integral I = gk(f, seg.pts[k], seg.pts[k + 1], opt.rel_tol, opt.max_depth);
        acc.value += I.value;
        acc.error += I.error;
    }
    if (psi.infinite_support()) {
        Integral I = tail(f, seg.pts.back(), opt.rel_tol);
        acc.value += I.value;
        acc.error += I.error;
    }
    return acc;
}

MellinResult finish(double value, double error, const MellinOptions& opt) {
    MellinResult r{value, error, false, ""};
    if (!std::isfinite(value) || !std::isfinite(error)) {
        r.flagged = true;
        r.note = "non-finite result (divergent integral)";
    } else if (error > opt.flag_rel_tol * std::abs(value)) {
        r.flagged = true;
        r.note = "error estimate above cap (likely divergent)";
    }
    return r;
}

}  // namespace

MellinResult mellin(const Profile1D& psi, double p, const MellinOptions& opt) {
    if (!(p > -1.0) || p == 0.0 || !std::isfinite(p)) throw DomainError("mellin: p must lie in (-1,0) or (0,inf)");
    Segments seg = segments_of(psi);
    const double c = seg.c;
    Integral head;
    if (psi.is_sampled()) {
        head.value = psi.first_interval_moment(p - 1.0, p < 1);
    } else if (p >= 1) {
        auto f = [&](double t) { return std::pow(t, p - 1.0) * psi(t); };
        head = gk(f, 0.0, c, opt.rel_tol, opt.max_depth);
    } else {
        // int_0^c t^p q(t) dt with u = t^{p+1}; q is the difference quotient.
        auto f = [&](double u) { return psi.quotient(std::pow(u, 1.0 / (p + 1.0))) / (p + 1.0); };
        head = gk(f, 0.0, std::pow(c, p + 1.0), opt.rel_tol, opt.max_depth);
    }
    double value = head.value;
    Integral rest;
    if (psi.is_sampled() && p < 1) {
        // Finite support: keep psi - psi(0) all the way to B so nothing large cancels.
        rest = body_integral(psi, seg, [p](double t) { return std::pow(t, p - 1.0); }, opt, psi.at_zero());
        value += rest.value + psi.at_zero() * std::pow(psi.support(), p) / p;
    } else {
        rest = body_integral(psi, seg, [p](double t) { return std::pow(t, p - 1.0); }, opt);
        value += rest.value;
        if (p < 1) value += psi.at_zero() * std::pow(c, p) / p;
    }
    return finish(value, head.error + rest.error, opt);
}

MellinResult mellin_log_limit(const Profile1D& psi, const MellinOptions& opt) {
    if (!(psi.at_zero() > 0)) throw DomainError("mellin_log_limit: psi(0) must be positive");
    if (psi.is_sampled()) {
        const auto& y = psi.values();
        for (size_t k = 1; k < y.size(); ++k)
            if (y[k] > y[k - 1] * (1 + 1e-9) + 1e-300) throw DomainError("mellin_log_limit: profile not nonincreasing");
    } else {
        double B = psi.infinite_support() ? 50.0 : psi.support();
        double prev = psi.at_zero();
        for (int k = 1; k <= 64; ++k) {
            double v = psi(B * k / 64.0);
            if (v > prev * (1 + 1e-9) + 1e-300) throw DomainError("mellin_log_limit: profile not nonincreasing");
            prev = v;
        }
    }
    Segments seg = segments_of(psi);
    const double c = seg.c;
    Integral head;
    if (psi.is_sampled()) head.value = psi.first_interval_moment(-1.0, true);
    else head = gk([&](double t) { return psi.quotient(t); }, 0.0, c, opt.rel_tol, opt.max_depth);
    Integral rest;
    double expo;
    if (psi.is_sampled()) {
        rest = body_integral(psi, seg, [](double t) { return 1.0 / t; }, opt, psi.at_zero());
        expo = std::log(psi.support()) + (head.value + rest.value) / psi.at_zero();
    } else {
        rest = body_integral(psi, seg, [](double t) { return 1.0 / t; }, opt);
        expo = std::log(c) + (head.value + rest.value) / psi.at_zero();
    }
    double err = (head.error + rest.error) / psi.at_zero();
    double L = std::exp(expo);
    return finish(L, L * err, opt);
}

FractionalLimit fractional_limit_check(const Profile1D& psi, const MellinOptions& opt) {
    FractionalLimit out;
    for (int k = 0; k < 3; ++k) {
        double p = 1.0 - out.s[k];
        out.values[k] = p * mellin(psi, p, opt).value;
    }
    // Quadratic through the three samples, evaluated at 1-s = 0.
    double x[3], acc = 0.0;
    for (int k = 0; k < 3; ++k) x[k] = 1.0 - out.s[k];
    for (int k = 0; k < 3; ++k) {
        double l = 1.0;
        for (int j = 0; j < 3; ++j)
            if (j != k) l *= x[j] / (x[j] - x[k]);
        acc += l * out.values[k];
    }
    out.extrapolated = acc;
    out.target = psi.at_zero();
    return out;
}

std::string to_string(DirectionScheme s) {
    switch (s) {
        case DirectionScheme::Uniform: return "uniform";
        case DirectionScheme::Fibonacci: return "fibonacci";
        case DirectionScheme::Seeded: return "seeded";
        case DirectionScheme::Arcs: return "arcs";
        case DirectionScheme::Custom: return "custom";
    }
    return "?";
}

double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

DirectionSet directions(int n, int count, std::uint64_t seed, bool symmetric) {
    DirectionScheme s = n == 2 ? DirectionScheme::Uniform : n == 3 ? DirectionScheme::Fibonacci : DirectionScheme::Seeded;
    return directions(n, count, s, seed, symmetric);
}

DirectionSet directions(int n, int count, DirectionScheme scheme, std::uint64_t seed, bool symmetric) {
    if (count < 1) throw DomainError("direction count must be positive");
    if (n < 2 || n > kMaxDim) throw DomainError("direction dimension out of range");
    DirectionSet D;
    D.dim = n;
    D.scheme = scheme;
    D.seed = seed;
    D.symmetric = symmetric;
    int base = symmetric ? (count + 1) / 2 : count;
    std::vector<Vec> vs;
    switch (scheme) {
        case DirectionScheme::Uniform: {
            if (n != 2) throw DomainError("uniform directions are planar");
            if (symmetric && count % 2 == 0) base = count;
            for (int k = 0; k < base; ++k) {
                double a = 2.0 * std::numbers::pi * k / base;
                Vec v(2);
                v << std::cos(a), std::sin(a);
                vs.push_back(v);
            }
            if (symmetric && count % 2 == 0) symmetric = false;
            break;
        }
        case DirectionScheme::Fibonacci: {
            if (n != 3) throw DomainError("Fibonacci directions are spatial");
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (int k = 0; k < base; ++k) {
                double z = 1.0 - (2.0 * k + 1.0) / base;
                double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                Vec v(3);
                v << r * std::cos(golden * k), r * std::sin(golden * k), z;
                vs.push_back(v);
            }
            break;
        }
        case DirectionScheme::Seeded: {
            std::seed_seq seq{seed, static_cast<std::uint64_t>(n)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> g;
            while (static_cast<int>(vs.size()) < base) {
                Vec v(n);
                for (int j = 0; j < n; ++j) v[j] = g(rng);
                if (v.norm() > 1e-12) vs.push_back(v);
            }
            break;
        }
        default:
            throw DomainError("use arc_directions or custom_directions for this scheme");
    }
    if (symmetric) {
        size_t m = vs.size();
        for (size_t k = 0; k < m; ++k) vs.push_back(-vs[k]);
    }
    for (const Vec& v : vs) D.dirs.emplace_back(v);
    D.weights.assign(D.dirs.size(), sphere_area(n) / D.dirs.size());
    return D;
}

DirectionSet arc_directions(std::vector<double> angles, int per_arc) {
    if (per_arc < 1) throw DomainError("per_arc must be positive");
    const double two_pi = 2.0 * std::numbers::pi;
    for (double& a : angles) a = std::fmod(std::fmod(a, two_pi) + two_pi, two_pi);
    std::sort(angles.begin(), angles.end());
    std::vector<double> uniq;
    for (double a : angles)
        if (uniq.empty() || a - uniq.back() > 1e-12) uniq.push_back(a);
    if (uniq.size() > 1 && uniq.front() + two_pi - uniq.back() < 1e-12) uniq.pop_back();
    if (uniq.empty()) uniq.push_back(0.0);

    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(per_arc);
    std::vector<double> x, w;
    for (double z : zeros) {
        double dp = boost::math::legendre_p_prime(per_arc, z);
        double wt = 2.0 / ((1.0 - z * z) * dp * dp);
        x.push_back(z);
        w.push_back(wt);
        if (z != 0.0) {
            x.push_back(-z);
            w.push_back(wt);
        }
    }
    DirectionSet D;
    D.dim = 2;
    D.scheme = DirectionScheme::Arcs;
    for (size_t k = 0; k < uniq.size(); ++k) {
        double a = uniq[k];
        double b = (k + 1 < uniq.size()) ? uniq[k + 1] : uniq[0] + two_pi;
        double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (size_t j = 0; j < x.size(); ++j) {
            double ang = mid + half * x[j];
            Vec v(2);
            v << std::cos(ang), std::sin(ang);
            D.dirs.emplace_back(v);
            D.weights.push_back(half * w[j]);
        }
    }
    return D;
}

DirectionSet custom_directions(const std::vector<Vec>& vs) {
    if (vs.empty()) throw DomainError("empty direction list");
    DirectionSet D;
    D.dim = static_cast<int>(vs[0].size());
    D.scheme = DirectionScheme::Custom;
    for (const Vec& v : vs) D.dirs.emplace_back(v);
    D.weights.assign(D.dirs.size(), sphere_area(D.dim) / D.dirs.size());
    return D;
}

std::vector<double> critical_angles(const ConvexBody& K) {
    if (K.dim() != 2) throw DomainError("critical angles are planar");
    std::vector<double> out;
    const auto& V = K.vertices();
    for (size_t i = 0; i < V.size(); ++i)
        for (size_t j = i + 1; j < V.size(); ++j) {
            Vec d = V[j] - V[i];
            double a = std::atan2(d[1], d[0]);
            out.push_back(a);
            out.push_back(a + std::numbers::pi);
        }
    return out;
}

}  // namespace berwald
