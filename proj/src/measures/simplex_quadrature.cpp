#include "berwald/simplex_quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace berwald {
namespace {

void compositions(int parts, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == parts - 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int k = 0; k <= total; ++k) {
        cur.push_back(k);
        compositions(parts, total - k, cur, out);
        cur.pop_back();
    }
}

SimplexRule make_rule(int n, int s) {
    SimplexRule rule;
    rule.dim = n;
    rule.degree = 2 * s + 1;
    const int d = 2 * s + 1;
    const double nfact = std::tgamma(n + 1.0);
    for (int i = 0; i <= s; ++i) {
        const double denom = d + n - 2 * i;
        double coef = (i % 2 == 0 ? 1.0 : -1.0) * std::pow(2.0, -2.0 * s) * std::pow(denom, d) /
                      (std::tgamma(i + 1.0) * std::tgamma(d + n - i + 1.0));
        std::vector<std::vector<int>> betas;
        std::vector<int> cur;
        compositions(n + 1, s - i, cur, betas);
        for (const auto& beta : betas) {
            Vec lam(n + 1);
            for (int j = 0; j <= n; ++j) lam[j] = (2.0 * beta[j] + 1.0) / denom;
            rule.barycentric.push_back(lam);
            rule.weights.push_back(coef * nfact);
        }
    }
    return rule;
}

struct Cell {
    Mat vertices;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

}  // namespace

const SimplexRule& grundmann_moeller(int dim, int s) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, SimplexRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, s);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, make_rule(dim, s)).first;
    return it->second;
}

double apply_rule(const SimplexRule& rule, const std::function<double(const Vec&)>& f, const Mat& cell) {
    double acc = 0.0;
    for (size_t k = 0; k < rule.weights.size(); ++k) acc += rule.weights[k] * f(cell * rule.barycentric[k]);
    return acc * simplex_measure(cell);
}

QuadResult integrate_simplices(const std::function<double(const Vec&)>& f, const std::vector<Mat>& cells,
                               const SimplexQuadOptions& opt) {
    QuadResult res;
    if (cells.empty()) return res;
    const int k = static_cast<int>(cells[0].cols()) - 1;
    const SimplexRule& hi = grundmann_moeller(k, 3);
    const SimplexRule& lo = grundmann_moeller(k, 2);
    const long per_cell = static_cast<long>(hi.weights.size() + lo.weights.size());

    std::priority_queue<Cell, std::vector<Cell>, ByError> heap;
    double total = 0.0, total_err = 0.0;
    auto push = [&](Mat S) {
        double a = apply_rule(hi, f, S);
        double b = apply_rule(lo, f, S);
        res.evaluations += per_cell;
        double e = std::abs(a - b);
        total += a;
        total_err += e;
        heap.push({std::move(S), a, e});
    };
    for (const Mat& S : cells) push(S);

    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (res.evaluations + 2 * per_cell > opt.max_evaluations) {
            res.converged = false;
            break;
        }
        Cell c = heap.top();
        heap.pop();
        total -= c.value;
        total_err -= c.error;
        int bi = 0, bj = 1;
        double best = -1.0;
        for (int i = 0; i <= k; ++i)
            for (int j = i + 1; j <= k; ++j) {
                double len = (c.vertices.col(i) - c.vertices.col(j)).squaredNorm();
                if (len > best) {
                    best = len;
                    bi = i;
                    bj = j;
                }
            }
        Vec mid = 0.5 * (c.vertices.col(bi) + c.vertices.col(bj));
        Mat A = c.vertices, B = c.vertices;
        A.col(bj) = mid;
        B.col(bi) = mid;
        push(std::move(A));
        push(std::move(B));
    }

    // Resum in a fixed order to shed drift from the running updates.
    std::vector<Cell> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    double v = 0.0, e = 0.0;
    for (const Cell& c : all) {
        v += c.value;
        e += c.error;
    }
    res.value = v;
    res.error = e;
    return res;
}

}  // namespace berwald
