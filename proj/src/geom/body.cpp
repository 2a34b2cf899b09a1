#include "berwald/geometry.hpp"

#include "hull.hpp"

#include <algorithm>
#include <cmath>

namespace berwald {

Direction::Direction(Vec v) : v_(std::move(v)) {
    double len = v_.norm();
    if (!(len > 0) || !std::isfinite(len)) throw DomainError("direction must be a nonzero finite vector");
    v_ /= len;
}

double simplex_measure(const Mat& S) {
    const int k = static_cast<int>(S.cols()) - 1;
    if (k <= 0) return 1.0;
    Mat G(S.rows(), k);
    for (int j = 0; j < k; ++j) G.col(j) = S.col(j + 1) - S.col(0);
    double fact = std::tgamma(k + 1.0);
    if (k == S.rows()) return std::abs(G.determinant()) / fact;
    double gram = (G.transpose() * G).determinant();
    return std::sqrt(std::max(gram, 0.0)) / fact;
}

namespace {

std::vector<Vec> dedupe(const std::vector<Vec>& pts, double eps) {
    std::vector<Vec> sorted = pts;
    std::sort(sorted.begin(), sorted.end(), [](const Vec& a, const Vec& b) { return a[0] < b[0]; });
    std::vector<Vec> out;
    for (const Vec& p : sorted) {
        bool dup = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (p[0] - (*it)[0] > eps) break;
            if ((p - *it).lpNorm<Eigen::Infinity>() <= eps) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(p);
    }
    return out;
}

}  // namespace

std::optional<ConvexBody> ConvexBody::build(const std::vector<Vec>& input) {
    if (input.empty()) return std::nullopt;
    const int n = static_cast<int>(input[0].size());
    if (n < 2 || n > kMaxDim) throw DomainError("dimension must lie in [2, 6]");
    Vec mean = Vec::Zero(n);
    for (const Vec& p : input) {
        if (p.size() != n) throw DomainError("points of mixed dimension");
        if (!p.allFinite()) throw DomainError("non-finite coordinate");
        mean += p;
    }
    mean /= static_cast<double>(input.size());
    double scale = 0.0;
    for (const Vec& p : input) scale = std::max(scale, (p - mean).norm());
    if (!(scale > 0)) return std::nullopt;
    const double unit = std::max(1.0, scale);
    const double eps = 1e-11 * unit;

    std::vector<Vec> pts = dedupe(input, eps);
    auto raw = detail::raw_hull(pts, eps);
    if (!raw) return std::nullopt;
    pts = raw->points;

    // Merge coplanar simplicial facets.
    const double plane_tol = 1e-9 * unit;
    struct Group {
        Vec normal;
        double offset;
        std::vector<int> members;
    };
    std::vector<Group> groups;
    for (size_t s = 0; s < raw->simplices.size(); ++s) {
        const Vec& nrm = raw->normals[s];
        double b = raw->offsets[s];
        bool placed = false;
        for (Group& g : groups) {
            if ((g.normal - nrm).norm() < 1e-7 && std::abs(g.offset - b) < plane_tol) {
                g.members.push_back(static_cast<int>(s));
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({nrm, b, {static_cast<int>(s)}});
    }

    ConvexBody K;
    K.dim_ = n;
    std::vector<Facet> facets;
    for (const Group& g : groups) {
        Facet f;
        Vec acc = Vec::Zero(n);
        for (int s : g.members) {
            Mat piece(n, n);
            for (int k = 0; k < n; ++k) piece.col(k) = pts[raw->simplices[s][k]];
            double a = simplex_measure(piece);
            acc += a * raw->normals[s];
            f.area += a;
            f.pieces.push_back(std::move(piece));
        }
        if (!(f.area > 0)) continue;
        f.normal = acc.normalized();
        double b = -1e300;
        for (const Mat& piece : f.pieces)
            for (int k = 0; k < n; ++k) b = std::max(b, f.normal.dot(piece.col(k)));
        f.offset = b;
        facets.push_back(std::move(f));
    }
    if (static_cast<int>(facets.size()) < n + 1) return std::nullopt;

    // Keep only extreme points: incident facet normals must span R^n.
    std::vector<char> used(pts.size(), 0);
    for (const auto& s : raw->simplices)
        for (int i : s) used[i] = 1;
    const double on_tol = 1e-9 * unit;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (!used[i]) continue;
        std::vector<Vec> incident;
        for (const Facet& f : facets)
            if (std::abs(f.normal.dot(pts[i]) - f.offset) <= on_tol) incident.push_back(f.normal);
        if (static_cast<int>(incident.size()) < n) continue;
        Mat N(static_cast<int>(incident.size()), n);
        for (size_t r = 0; r < incident.size(); ++r) N.row(r) = incident[r].transpose();
        Eigen::JacobiSVD<Mat> svd(N);
        if (svd.singularValues()[n - 1] > 1e-6) K.vertices_.push_back(pts[i]);
    }
    const int nv = static_cast<int>(K.vertices_.size());
    if (nv < n + 1) return std::nullopt;
    for (Facet& f : facets) {
        for (int v = 0; v < nv; ++v)
            if (std::abs(f.normal.dot(K.vertices_[v]) - f.offset) <= on_tol) f.vertices.push_back(v);
    }

    Vec c = Vec::Zero(n);
    for (const Vec& v : K.vertices_) c += v;
    c /= static_cast<double>(nv);
    double vol = 0.0;
    Vec moment = Vec::Zero(n);
    for (const Facet& f : facets) {
        for (const Mat& piece : f.pieces) {
            double h = f.offset - f.normal.dot(c);
            double cone = std::max(h, 0.0) * simplex_measure(piece) / n;
            vol += cone;
            moment += cone * (c + piece.rowwise().sum()) / static_cast<double>(n + 1);
        }
    }
    if (!(vol > 1e-12 * std::pow(unit, n))) return std::nullopt;

    K.facets_ = std::move(facets);
    K.volume_ = vol;
    K.centroid_ = moment / vol;
    K.scale_ = 0.0;
    for (const Vec& v : K.vertices_) K.scale_ = std::max(K.scale_, (v - K.centroid_).norm());
    return K;
}

std::optional<ConvexBody> ConvexBody::try_from_vertices(const std::vector<Vec>& points) {
    return build(points);
}

ConvexBody ConvexBody::from_vertices(const std::vector<Vec>& points) {
    auto K = build(points);
    if (!K) throw DomainError("vertex set is empty or not full-dimensional");
    return *K;
}

namespace {

std::vector<Halfspace> normalized(int dim, const std::vector<Halfspace>& hs) {
    std::vector<Halfspace> out;
    for (const Halfspace& h : hs) {
        if (h.normal.size() != dim) throw DomainError("halfspace of wrong dimension");
        double len = h.normal.norm();
        if (!(len > kNormTol) || !std::isfinite(h.offset)) throw DomainError("degenerate halfspace");
        Halfspace u{h.normal / len, h.offset / len};
        bool merged = false;
        for (Halfspace& o : out) {
            if ((o.normal - u.normal).norm() < kNormTol) {
                o.offset = std::min(o.offset, u.offset);
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(u);
    }
    return out;
}

}  // namespace

std::optional<ConvexBody> ConvexBody::try_from_bounded_halfspaces(int dim, const std::vector<Halfspace>& hs) {
    auto H = normalized(dim, hs);
    double bscale = 1.0;
    for (const Halfspace& h : H) bscale = std::max(bscale, std::abs(h.offset));
    auto verts = detail::enumerate_vertices(dim, H, 1e-10 * bscale);
    if (static_cast<int>(verts.size()) < dim + 1) return std::nullopt;
    return build(verts);
}

ConvexBody ConvexBody::from_halfspaces(const std::vector<Halfspace>& hs) {
    if (hs.empty()) throw DomainError("empty halfspace list");
    const int dim = static_cast<int>(hs[0].normal.size());
    auto H = normalized(dim, hs);
    // Bounded iff the normals positively span R^n, i.e. 0 is interior to their hull.
    std::vector<Vec> normals;
    for (const Halfspace& h : H) normals.push_back(h.normal);
    auto N = build(normals);
    bool bounded = N.has_value();
    if (bounded)
        for (const Facet& f : N->facets())
            if (f.offset <= 1e-9) bounded = false;
    if (!bounded) throw DomainError("halfspace system is unbounded");
    auto K = try_from_bounded_halfspaces(dim, H);
    if (!K) throw DomainError("halfspace system is empty or not full-dimensional");
    return *K;
}

std::vector<Halfspace> ConvexBody::halfspaces() const {
    std::vector<Halfspace> out;
    out.reserve(facets_.size());
    for (const Facet& f : facets_) out.push_back({f.normal, f.offset});
    return out;
}

bool ConvexBody::contains(const Vec& x, double tol) const {
    for (const Facet& f : facets_)
        if (f.normal.dot(x) > f.offset + tol) return false;
    return true;
}

bool ConvexBody::is_symmetric(double tol) const {
    double t = tol * std::max(1.0, scale_);
    for (const Vec& v : vertices_)
        if (!contains(Vec(-v), t)) return false;
    return true;
}

std::vector<Mat> ConvexBody::fan(const Vec& apex) const {
    std::vector<Mat> out;
    const int n = dim_;
    const double t = tol();
    for (const Facet& f : facets_) {
        if (f.offset - f.normal.dot(apex) <= t) continue;
        for (const Mat& piece : f.pieces) {
            Mat S(n, n + 1);
            S.col(0) = apex;
            S.rightCols(n) = piece;
            out.push_back(std::move(S));
        }
    }
    return out;
}

}  // namespace berwald
