#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace berwald {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Thrown when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double kGeomTol = 1e-9;
inline constexpr double kNormTol = 1e-12;
inline constexpr int kMaxDim = 6;

class Direction {
public:
    explicit Direction(Vec v);
    const Vec& vec() const { return v_; }
    int dim() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    Direction operator-() const { return Direction(-v_); }

private:
    Vec v_;
};

// a.x <= b with |a| = 1.
struct Halfspace {
    Vec normal;
    double offset = 0.0;
};

struct Facet {
    Vec normal;
    double offset = 0.0;
    std::vector<int> vertices;  // indices into ConvexBody::vertices()
    std::vector<Mat> pieces;    // (n-1)-simplices tiling the facet, columns are points
    double area = 0.0;
};

// Full-dimensional bounded polytope holding both representations.
class ConvexBody {
public:
    static ConvexBody from_vertices(const std::vector<Vec>& points);
    static ConvexBody from_halfspaces(const std::vector<Halfspace>& hs);

    // Nullopt when the hull is lower dimensional or the region is empty or thin.
    static std::optional<ConvexBody> try_from_vertices(const std::vector<Vec>& points);
    // Assumes the region is bounded; use from_halfspaces for untrusted input.
    static std::optional<ConvexBody> try_from_bounded_halfspaces(int dim,
                                                                 const std::vector<Halfspace>& hs);

    int dim() const { return dim_; }
    const std::vector<Vec>& vertices() const { return vertices_; }
    const std::vector<Facet>& facets() const { return facets_; }
    std::vector<Halfspace> halfspaces() const;
    double volume() const { return volume_; }
    const Vec& centroid() const { return centroid_; }
    // Largest vertex distance from the centroid; sets tolerance scales.
    double scale() const { return scale_; }
    double tol() const { return kGeomTol * std::max(1.0, scale_); }

    bool contains(const Vec& x, double tol) const;
    bool contains(const Vec& x) const { return contains(x, tol()); }
    bool is_symmetric(double tol = 1e-9) const;

    // n-simplices covering the body, coned from apex over the facet pieces.
    // Cones over facets containing apex are dropped.
    std::vector<Mat> fan(const Vec& apex) const;
    std::vector<Mat> fan() const { return fan(centroid_); }

private:
    ConvexBody() = default;
    static std::optional<ConvexBody> build(const std::vector<Vec>& points);

    int dim_ = 0;
    std::vector<Vec> vertices_;
    std::vector<Facet> facets_;
    double volume_ = 0.0;
    Vec centroid_;
    double scale_ = 1.0;
};

double support(const ConvexBody& K, const Vec& theta);
inline double support(const ConvexBody& K, const Direction& theta) { return support(K, theta.vec()); }

// sup{lambda >= 0 : x - lambda*theta in K}.
double radial(const ConvexBody& K, const Vec& x, const Direction& theta);
// Radial function about the origin, rho_K(theta) = sup{lambda : lambda*theta in K}; needs 0 in K.
double radial_origin(const ConvexBody& K, const Direction& theta);

ConvexBody difference_body(const ConvexBody& K);
ConvexBody minkowski_sum(const ConvexBody& K, const ConvexBody& L);
std::optional<ConvexBody> intersect_shift(const ConvexBody& K, const Vec& x);
// (K + x/2) cap (K - x/2).
std::optional<ConvexBody> polarized_intersection(const ConvexBody& K, const Vec& x);
std::optional<ConvexBody> intersect(const ConvexBody& K, const std::vector<Halfspace>& extra);

double volume(const ConvexBody& K);
ConvexBody linear_image(const ConvexBody& K, const Mat& T);
ConvexBody translate(const ConvexBody& K, const Vec& v);
ConvexBody dilate(const ConvexBody& K, double t);
ConvexBody reflect(const ConvexBody& K);
// Requires the origin in the interior.
ConvexBody polar(const ConvexBody& K);
// Sum of segments [0, g_i].
ConvexBody zonotope(int dim, const std::vector<Vec>& generators);

// Volume of the orthogonal projection onto theta-perp, from projected vertices.
double projection_volume(const ConvexBody& K, const Direction& theta);

// Named primitives.
ConvexBody simplex_body(int n);          // conv{0, e_1, ..., e_n}
ConvexBody cube_body(int n);             // [0,1]^n
ConvexBody symmetric_cube_body(int n);   // [-1,1]^n
ConvexBody cross_polytope_body(int n);   // conv{+-e_i}

// Concave roof over K with apex height M above x0.
class RoofFunction {
public:
    RoofFunction(ConvexBody K, double M, Vec x0);
    double operator()(const Vec& x) const;
    const ConvexBody& body() const { return K_; }
    double height() const { return M_; }
    const Vec& apex() const { return x0_; }

private:
    ConvexBody K_;
    double M_;
    Vec x0_;
};

// Simplex volume from column points (k+1 columns spanning a k-simplex in R^n).
double simplex_measure(const Mat& S);

}  // namespace berwald
