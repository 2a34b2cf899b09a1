#include "berwald/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace berwald {

double support(const ConvexBody& K, const Vec& theta) {
    double h = -std::numeric_limits<double>::infinity();
    for (const Vec& v : K.vertices()) h = std::max(h, v.dot(theta));
    return h;
}

double radial(const ConvexBody& K, const Vec& x, const Direction& theta) {
    const Vec& u = theta.vec();
    const double tol = K.tol();
    double best = std::numeric_limits<double>::infinity();
    for (const Facet& f : K.facets()) {
        double slack = f.offset - f.normal.dot(x);
        if (slack < -tol) throw DomainError("radial: point lies outside the body");
        double rate = -f.normal.dot(u);
        if (rate > kNormTol) best = std::min(best, std::max(slack, 0.0) / rate);
    }
    return best;
}

double radial_origin(const ConvexBody& K, const Direction& theta) {
    return radial(K, Vec::Zero(K.dim()), -theta);
}

ConvexBody minkowski_sum(const ConvexBody& K, const ConvexBody& L) {
    std::vector<Vec> pts;
    pts.reserve(K.vertices().size() * L.vertices().size());
    for (const Vec& a : K.vertices())
        for (const Vec& b : L.vertices()) pts.push_back(a + b);
    return ConvexBody::from_vertices(pts);
}

ConvexBody difference_body(const ConvexBody& K) { return minkowski_sum(K, reflect(K)); }

std::optional<ConvexBody> intersect_shift(const ConvexBody& K, const Vec& x) {
    // K+x has the same normals; per normal only the tighter offset survives.
    std::vector<Halfspace> hs = K.halfspaces();
    for (Halfspace& h : hs) h.offset += std::min(0.0, h.normal.dot(x));
    return ConvexBody::try_from_bounded_halfspaces(K.dim(), hs);
}

std::optional<ConvexBody> polarized_intersection(const ConvexBody& K, const Vec& x) {
    std::vector<Halfspace> hs = K.halfspaces();
    for (Halfspace& h : hs) h.offset -= 0.5 * std::abs(h.normal.dot(x));
    return ConvexBody::try_from_bounded_halfspaces(K.dim(), hs);
}

std::optional<ConvexBody> intersect(const ConvexBody& K, const std::vector<Halfspace>& extra) {
    std::vector<Halfspace> hs = K.halfspaces();
    hs.insert(hs.end(), extra.begin(), extra.end());
    return ConvexBody::try_from_bounded_halfspaces(K.dim(), hs);
}

double volume(const ConvexBody& K) { return K.volume(); }

ConvexBody linear_image(const ConvexBody& K, const Mat& T) {
    const int n = K.dim();
    if (T.rows() != n || T.cols() != n) throw DomainError("linear_image: matrix shape mismatch");
    if (!(std::abs(T.determinant()) > 1e-12)) throw DomainError("linear_image: singular matrix");
    std::vector<Vec> pts;
    for (const Vec& v : K.vertices()) pts.push_back(T * v);
    return ConvexBody::from_vertices(pts);
}

ConvexBody translate(const ConvexBody& K, const Vec& v) {
    std::vector<Vec> pts;
    for (const Vec& p : K.vertices()) pts.push_back(p + v);
    return ConvexBody::from_vertices(pts);
}

ConvexBody dilate(const ConvexBody& K, double t) {
    if (!(t > 0)) throw DomainError("dilate: factor must be positive");
    std::vector<Vec> pts;
    for (const Vec& p : K.vertices()) pts.push_back(t * p);
    return ConvexBody::from_vertices(pts);
}

ConvexBody reflect(const ConvexBody& K) {
    std::vector<Vec> pts;
    for (const Vec& p : K.vertices()) pts.push_back(-p);
    return ConvexBody::from_vertices(pts);
}

ConvexBody polar(const ConvexBody& K) {
    std::vector<Vec> pts;
    for (const Facet& f : K.facets()) {
        if (!(f.offset > K.tol())) throw DomainError("polar: origin must be interior");
        pts.push_back(f.normal / f.offset);
    }
    return ConvexBody::from_vertices(pts);
}

ConvexBody zonotope(int dim, const std::vector<Vec>& generators) {
    std::vector<Vec> pts{Vec::Zero(dim)};
    for (const Vec& g : generators) {
        if (g.norm() <= kNormTol) continue;
        std::vector<Vec> next = pts;
        for (const Vec& p : pts) next.push_back(p + g);
        if (next.size() > 64) {
            if (auto Z = ConvexBody::try_from_vertices(next)) {
                pts = Z->vertices();
                continue;
            }
        }
        pts = std::move(next);
    }
    return ConvexBody::from_vertices(pts);
}

double projection_volume(const ConvexBody& K, const Direction& theta) {
    const int n = K.dim();
    // Orthonormal basis of theta-perp from a QR of [theta | I].
    Mat A(n, n + 1);
    A.col(0) = theta.vec();
    A.rightCols(n) = Mat::Identity(n, n);
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ() * Mat::Identity(n, n);
    Mat B = Q.rightCols(n - 1);
    if (n == 2) {
        double lo = 1e300, hi = -1e300;
        for (const Vec& v : K.vertices()) {
            double c = B.col(0).dot(v);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        return hi - lo;
    }
    std::vector<Vec> pts;
    for (const Vec& v : K.vertices()) pts.push_back(B.transpose() * v);
    return ConvexBody::from_vertices(pts).volume();
}

ConvexBody simplex_body(int n) {
    std::vector<Vec> pts{Vec::Zero(n)};
    for (int i = 0; i < n; ++i) pts.push_back(Vec::Unit(n, i));
    return ConvexBody::from_vertices(pts);
}

namespace {

ConvexBody box(int n, double lo, double hi) {
    std::vector<Vec> pts;
    for (int mask = 0; mask < (1 << n); ++mask) {
        Vec p(n);
        for (int i = 0; i < n; ++i) p[i] = (mask >> i) & 1 ? hi : lo;
        pts.push_back(p);
    }
    return ConvexBody::from_vertices(pts);
}

}  // namespace

ConvexBody cube_body(int n) { return box(n, 0.0, 1.0); }
ConvexBody symmetric_cube_body(int n) { return box(n, -1.0, 1.0); }

ConvexBody cross_polytope_body(int n) {
    std::vector<Vec> pts;
    for (int i = 0; i < n; ++i) {
        pts.push_back(Vec::Unit(n, i));
        pts.push_back(-Vec::Unit(n, i));
    }
    return ConvexBody::from_vertices(pts);
}

RoofFunction::RoofFunction(ConvexBody K, double M, Vec x0) : K_(std::move(K)), M_(M), x0_(std::move(x0)) {
    if (!(M_ > 0)) throw DomainError("roof height must be positive");
    if (x0_.size() != K_.dim() || !K_.contains(x0_)) throw DomainError("roof apex must lie in the body");
}

double RoofFunction::operator()(const Vec& x) const {
    Vec y = x - x0_;
    const double tol = K_.tol();
    double gauge = 0.0;
    for (const Facet& f : K_.facets()) {
        double den = f.offset - f.normal.dot(x0_);
        double num = f.normal.dot(y);
        if (den > tol) {
            gauge = std::max(gauge, num / den);
        } else if (num > tol) {
            return 0.0;
        }
    }
    return M_ * std::max(0.0, 1.0 - gauge);
}

}  // namespace berwald
