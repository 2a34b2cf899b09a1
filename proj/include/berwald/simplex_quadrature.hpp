#pragma once

#include "berwald/geometry.hpp"

#include <functional>
#include <vector>

namespace berwald {

// Grundmann-Moeller rule of degree 2s+1 on a d-simplex; weights sum to one.
struct SimplexRule {
    int dim = 0;
    int degree = 0;
    std::vector<Vec> barycentric;
    std::vector<double> weights;
};

const SimplexRule& grundmann_moeller(int dim, int s);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    long evaluations = 0;
};

struct SimplexQuadOptions {
    double rel_tol = 1e-7;
    double abs_tol = 0.0;
    long max_evaluations = 4'000'000;
};

// Integrates f over the union of k-simplices (columns are vertices, any ambient
// dimension) using the degree 7 rule with a degree 5 error estimate, refining the
// worst cell by longest-edge bisection until the global estimate meets tolerance.
QuadResult integrate_simplices(const std::function<double(const Vec&)>& f, const std::vector<Mat>& cells,
                               const SimplexQuadOptions& opt = {});

// Single application of a rule, no refinement.
double apply_rule(const SimplexRule& rule, const std::function<double(const Vec&)>& f, const Mat& cell);

}  // namespace berwald
