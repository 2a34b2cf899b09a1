#include "hull.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace berwald::detail {
namespace {

double cross2(const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::optional<RawHull> hull_2d(const std::vector<Vec>& pts, double eps) {
    std::vector<int> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        return pts[a][1] < pts[b][1];
    });
    // Pop while the middle point lies within eps of the chord (or to its right).
    auto keep_turning = [&](const std::vector<int>& h, int k) {
        const Vec& o = pts[h[h.size() - 2]];
        const Vec& a = pts[h.back()];
        const Vec& b = pts[k];
        double len = (b - o).norm();
        return cross2(o, a, b) <= eps * std::max(len, 1e-300);
    };
    std::vector<int> lower, upper;
    for (int k : idx) {
        while (lower.size() >= 2 && keep_turning(lower, k)) lower.pop_back();
        lower.push_back(k);
    }
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
        while (upper.size() >= 2 && keep_turning(upper, *it)) upper.pop_back();
        upper.push_back(*it);
    }
    lower.pop_back();
    upper.pop_back();
    std::vector<int> ring = lower;
    ring.insert(ring.end(), upper.begin(), upper.end());
    if (ring.size() < 3) return std::nullopt;

    RawHull out;
    out.points = pts;
    for (size_t i = 0; i < ring.size(); ++i) {
        int a = ring[i], b = ring[(i + 1) % ring.size()];
        Vec d = pts[b] - pts[a];
        Vec nrm(2);
        nrm << d[1], -d[0];
        double len = nrm.norm();
        if (len <= 0) continue;
        nrm /= len;
        out.simplices.push_back({a, b});
        out.normals.push_back(nrm);
        out.offsets.push_back(0.5 * (nrm.dot(pts[a]) + nrm.dot(pts[b])));
    }
    return out;
}

struct HullFacet {
    std::vector<int> v;
    Vec normal;
    double offset = 0.0;
    bool alive = true;
};

// Generalized cross product of the n-1 edge vectors of an (n-1)-simplex.
Vec simplex_normal(const std::vector<Vec>& pts, const std::vector<int>& v) {
    const int n = static_cast<int>(pts[v[0]].size());
    Mat D(n - 1, n);
    for (int k = 1; k < n; ++k) D.row(k - 1) = (pts[v[k]] - pts[v[0]]).transpose();
    Vec normal(n);
    Mat minor(n - 1, n - 1);
    for (int j = 0; j < n; ++j) {
        for (int c = 0, cc = 0; c < n; ++c) {
            if (c == j) continue;
            minor.col(cc++) = D.col(c);
        }
        double d = minor.determinant();
        normal[j] = (j % 2 == 0) ? d : -d;
    }
    return normal;
}

std::optional<RawHull> hull_nd(const std::vector<Vec>& pts, double eps) {
    const int n = static_cast<int>(pts[0].size());
    const int N = static_cast<int>(pts.size());
    if (N < n + 1) return std::nullopt;

    // Greedy initial simplex.
    std::vector<int> simplex;
    int i0 = 0;
    for (int i = 1; i < N; ++i)
        if (pts[i][0] < pts[i0][0]) i0 = i;
    simplex.push_back(i0);
    std::vector<Vec> basis;
    for (int k = 0; k < n; ++k) {
        int best = -1;
        double best_d = eps;
        for (int i = 0; i < N; ++i) {
            Vec r = pts[i] - pts[i0];
            for (const Vec& q : basis) r -= q.dot(r) * q;
            double d = r.norm();
            if (d > best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best < 0) return std::nullopt;
        Vec r = pts[best] - pts[i0];
        for (const Vec& q : basis) r -= q.dot(r) * q;
        basis.push_back(r / r.norm());
        simplex.push_back(best);
    }

    Vec center = Vec::Zero(n);
    for (int i : simplex) center += pts[i];
    center /= static_cast<double>(n + 1);

    std::vector<HullFacet> facets;
    auto make_facet = [&](std::vector<int> v) -> bool {
        Vec nrm = simplex_normal(pts, v);
        double len = nrm.norm();
        if (!(len > 0)) return false;
        nrm /= len;
        double b = 0.0;
        for (int i : v) b += nrm.dot(pts[i]);
        b /= static_cast<double>(v.size());
        if (nrm.dot(center) > b) {
            nrm = -nrm;
            b = -b;
        }
        std::sort(v.begin(), v.end());
        facets.push_back({std::move(v), nrm, b, true});
        return true;
    };
    for (int skip = 0; skip <= n; ++skip) {
        std::vector<int> v;
        for (int k = 0; k <= n; ++k)
            if (k != skip) v.push_back(simplex[k]);
        if (!make_facet(v)) return std::nullopt;
    }

    std::vector<char> in_simplex(N, 0);
    for (int i : simplex) in_simplex[i] = 1;
    std::vector<int> order;
    for (int i = 0; i < N; ++i)
        if (!in_simplex[i]) order.push_back(i);
    std::vector<double> dist(N);
    for (int i : order) dist[i] = (pts[i] - center).squaredNorm();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] > dist[b]; });

    std::map<std::vector<int>, int> ridge_count;
    for (int q : order) {
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(facets.size()); ++f) {
            if (!facets[f].alive) continue;
            if (facets[f].normal.dot(pts[q]) - facets[f].offset > eps) visible.push_back(f);
        }
        if (visible.empty()) continue;
        ridge_count.clear();
        for (int f : visible) {
            const auto& v = facets[f].v;
            for (int j = 0; j < n; ++j) {
                std::vector<int> ridge;
                ridge.reserve(n - 1);
                for (int k = 0; k < n; ++k)
                    if (k != j) ridge.push_back(v[k]);
                ++ridge_count[ridge];
            }
            facets[f].alive = false;
        }
        for (const auto& [ridge, count] : ridge_count) {
            if (count != 1) continue;
            std::vector<int> v = ridge;
            v.push_back(q);
            make_facet(std::move(v));
        }
        if (facets.size() > 4096) {
            std::erase_if(facets, [](const HullFacet& f) { return !f.alive; });
        }
    }

    RawHull out;
    out.points = pts;
    for (const HullFacet& f : facets) {
        if (!f.alive) continue;
        out.simplices.push_back(f.v);
        out.normals.push_back(f.normal);
        out.offsets.push_back(f.offset);
    }
    return out;
}

}  // namespace

std::optional<RawHull> raw_hull(const std::vector<Vec>& points, double eps) {
    if (points.empty()) return std::nullopt;
    const int n = static_cast<int>(points[0].size());
    if (n == 2) return hull_2d(points, eps);
    return hull_nd(points, eps);
}

std::vector<Vec> enumerate_vertices(int dim, const std::vector<Halfspace>& hs, double eps) {
    const int m = static_cast<int>(hs.size());
    std::vector<Vec> out;
    if (m < dim) return out;
    std::vector<int> comb(dim);
    std::iota(comb.begin(), comb.end(), 0);
    Mat A(dim, dim);
    Vec b(dim);
    while (true) {
        for (int r = 0; r < dim; ++r) {
            A.row(r) = hs[comb[r]].normal.transpose();
            b[r] = hs[comb[r]].offset;
        }
        Eigen::PartialPivLU<Mat> lu(A);
        if (std::abs(lu.determinant()) > 1e-10) {
            Vec x = lu.solve(b);
            bool feasible = x.allFinite();
            for (int i = 0; i < m && feasible; ++i)
                if (hs[i].normal.dot(x) > hs[i].offset + eps) feasible = false;
            if (feasible) {
                bool dup = false;
                for (const Vec& y : out)
                    if ((y - x).lpNorm<Eigen::Infinity>() <= eps) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(x);
            }
        }
        int k = dim - 1;
        while (k >= 0 && comb[k] == m - dim + k) --k;
        if (k < 0) break;
        ++comb[k];
        for (int j = k + 1; j < dim; ++j) comb[j] = comb[j - 1] + 1;
    }
    return out;
}

}  // namespace berwald::detail
