#include "berwald/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace berwald {

namespace {

using Clock = std::chrono::steady_clock;

double binom_real(double x, double k) {
    return std::exp(std::lgamma(x + 1) - std::lgamma(k + 1) - std::lgamma(x - k + 1));
}

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::vector<double> sorted_desc(std::vector<double> grid) {
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double p : grid)
        if (!(p > -1) || std::isinf(p)) throw DomainError("chain grids need finite p > -1");
    return grid;
}

std::vector<double> difference_radials(const ConvexBody& K, const DirectionSet& dirs) {
    const ConvexBody DK = difference_body(K);
    std::vector<double> out;
    for (const Direction& th : dirs.dirs) out.push_back(radial_origin(DK, th));
    return out;
}

std::vector<double> scaled_polar(const ProjectionBody& B, double c) {
    std::vector<double> out;
    for (size_t i = 0; i < B.h.size(); ++i) out.push_back(c * polar_radial(B.h, i));
    return out;
}

void start(InequalityReport& R, const std::string& claim, const std::string& statement, const DirectionSet& dirs,
           const CertifyOptions& opt) {
    R.claim = claim;
    R.statement = statement;
    R.dirs = dirs;
    R.tolerance = opt.tolerance;
    R.equality_tolerance = opt.equality_tolerance;
}

void note_validity(InequalityReport& R, const ConcavityDescriptor& F, const Measure& mu) {
    if (!F.valid_for(mu)) throw DomainError("descriptor " + F.name() + " does not apply to measure " + mu.name());
    if (F.validity() != ValidityClass::AllConvex)
        R.params["hypothesis"] = "descriptor class " + to_string(F.validity()) +
                                 " does not cover every section of K; links are checked numerically";
}

DirectionSet scalar_set() {
    DirectionSet D;
    D.dim = 0;
    D.dirs.clear();
    return D;
}

}  // namespace

void InequalityReport::finalize() {
    links.clear();
    pass = true;
    equality = true;
    for (size_t k = 0; k + 1 < terms.size(); ++k) {
        LinkMargin L;
        L.lower = terms[k];
        L.upper = terms[k + 1];
        L.min_margin = HUGE_VAL;
        for (size_t i = 0; i < values[k].size(); ++i) {
            double a = values[k][i], b = values[k + 1][i];
            double m = (b - a) / std::abs(b);
            L.margins.push_back(m);
            if (m < L.min_margin) {
                L.min_margin = m;
                L.argmin = i;
            }
            L.max_abs = std::max(L.max_abs, std::abs(m));
        }
        if (!(L.min_margin >= -tolerance)) pass = false;
        if (!(L.max_abs <= equality_tolerance)) equality = false;
        links.push_back(std::move(L));
    }
    if (links.empty()) equality = false;
}

const LinkMargin& InequalityReport::link(const std::string& lower, const std::string& upper) const {
    for (const LinkMargin& L : links)
        if (L.lower == lower && L.upper == upper) return L;
    throw DomainError("no link " + lower + " <= " + upper);
}

nlohmann::json InequalityReport::to_json() const {
    nlohmann::json j;
    j["claim"] = claim;
    j["statement"] = statement;
    j["params"] = params;
    j["terms"] = terms;
    nlohmann::json m = nlohmann::json::object();
    for (const LinkMargin& L : links) {
        nlohmann::json e;
        e["min"] = L.min_margin;
        e["max_abs"] = L.max_abs;
        if (dirs.dim > 0 && L.argmin < dirs.size()) {
            const Vec& v = dirs.dirs[L.argmin].vec();
            e["argmin_direction"] = std::vector<double>(v.data(), v.data() + v.size());
        }
        m[L.lower + " <= " + L.upper] = e;
    }
    j["margins"] = m;
    j["pass"] = pass;
    j["equality"] = equality;
    j["tolerances"] = {{"pass", tolerance}, {"equality", equality_tolerance}};
    j["directions"] = dirs.size();
    j["direction_scheme"] = to_string(dirs.scheme);
    j["runtime_ms"] = runtime_ms;
    return j;
}

std::string InequalityReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "# claim=" << claim << "\n";
    for (int k = 0; k < dirs.dim; ++k) os << "theta_" << k + 1 << ",";
    for (size_t t = 0; t < terms.size(); ++t) os << terms[t] << (t + 1 < terms.size() ? "," : "\n");
    const size_t rows = values.empty() ? 0 : values.front().size();
    for (size_t i = 0; i < rows; ++i) {
        for (int k = 0; k < dirs.dim; ++k) os << dirs.dirs[i][k] << ",";
        for (size_t t = 0; t < terms.size(); ++t) os << values[t][i] << (t + 1 < terms.size() ? "," : "\n");
    }
    return os.str();
}

InequalityReport chain_F(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F,
                         std::vector<double> p_grid, const DirectionSet& dirs, const CertifyOptions& opt) {
    auto t0 = Clock::now();
    if (F.kind() != TransformKind::F) throw DomainError("chain_F needs an F-type descriptor, got " + F.name());
    InequalityReport R;
    start(R, "reverse_chain_F", "rho_DK <= C(q) rho_R_q <= C(p) rho_R_p <= (F/F')(mu K) rho_polar_projection", dirs, opt);
    note_validity(R, F, mu);
    const double A = measure_of_body(mu, K, opt.measure).value;
    std::vector<double> grid = sorted_desc(p_grid);
    R.params.update(nlohmann::json{{"measure", mu.name()}, {"descriptor", F.name()}, {"mass", A}, {"p_grid", grid}});
    R.terms.push_back("rho_DK");
    R.values.push_back(difference_radials(K, dirs));
    for (double p : grid) {
        ConstantValue C = constant_C(p, F, A);
        StarBodySamples S = radial_mean_body(K, mu, p, dirs, opt.covariogram);
        std::vector<double> v;
        for (double r : S.rho) v.push_back(C.value * r);
        R.terms.push_back("C(" + fmt(p) + ")rho_R_" + fmt(p));
        R.values.push_back(v);
    }
    const double coef = F.transform(A) / F.derivative(A);
    R.params["last_link_coefficient"] = coef;
    R.terms.push_back("(F/F')rho_polar_projection");
    R.values.push_back(scaled_polar(weighted_projection_body(K, mu, dirs, opt.measure), coef));
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

InequalityReport chain_log(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& Q,
                           std::vector<double> p_grid, const DirectionSet& dirs, const CertifyOptions& opt) {
    auto t0 = Clock::now();
    if (Q.kind() != TransformKind::Q) throw DomainError("chain_log needs a Q-type descriptor, got " + Q.name());
    InequalityReport R;
    start(R, "reverse_chain_log", "C(q) rho_R_q <= C(p) rho_R_p <= (1/Q')(mu K) rho_polar_projection", dirs, opt);
    note_validity(R, Q, mu);
    const double A = measure_of_body(mu, K, opt.measure).value;
    std::vector<double> grid = sorted_desc(p_grid);
    R.params.update(nlohmann::json{{"measure", mu.name()}, {"descriptor", Q.name()}, {"mass", A}, {"p_grid", grid}});
    for (double p : grid) {
        ConstantValue C = constant_C(p, Q, A);
        StarBodySamples S = radial_mean_body(K, mu, p, dirs, opt.covariogram);
        std::vector<double> v;
        for (double r : S.rho) v.push_back(C.value * r);
        R.terms.push_back("C(" + fmt(p) + ")rho_R_" + fmt(p));
        R.values.push_back(v);
    }
    const double coef = 1.0 / Q.derivative(A);
    R.params["last_link_coefficient"] = coef;
    R.terms.push_back("(1/Q')rho_polar_projection");
    R.values.push_back(scaled_polar(weighted_projection_body(K, mu, dirs, opt.measure), coef));
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

InequalityReport chain_symmetric(const ConvexBody& K, const Measure& mu, std::vector<double> p_grid,
                                 const DirectionSet& dirs, const CertifyOptions& opt) {
    auto t0 = Clock::now();
    if (!K.is_symmetric()) throw DomainError("chain_symmetric needs an origin-symmetric body");
    if (!mu.in_class_Mn()) throw DomainError("chain_symmetric needs a measure in the class M_n, got " + mu.name());
    const int n = K.dim();
    InequalityReport R;
    start(R, "symmetric_chain", "rho_DK <= c(n,q) rho_P_q <= c(n,p) rho_P_p <= n mu(K) rho_polar_projection", dirs, opt);
    const double A = measure_of_body(mu, K, opt.measure).value;
    std::vector<double> grid = sorted_desc(p_grid);
    R.params.update(nlohmann::json{{"measure", mu.name()}, {"mass", A}, {"p_grid", grid}});
    R.terms.push_back("rho_DK");
    R.values.push_back(difference_radials(K, dirs));
    for (double p : grid) {
        const double c = constant_c_np(n, p);
        StarBodySamples S = polarized_mean_body(K, mu, p, dirs, opt.covariogram);
        std::vector<double> v;
        for (double r : S.rho) v.push_back(c * r);
        R.terms.push_back("c(" + fmt(p) + ")rho_P_" + fmt(p));
        R.values.push_back(v);
    }
    R.terms.push_back("n mu(K) rho_polar_projection");
    R.values.push_back(scaled_polar(weighted_projection_body(K, mu, dirs, opt.measure), n * A));
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

namespace {

struct HomogeneousSetup {
    double s = 0.0;
    double alpha = 0.0;
};

HomogeneousSetup homogeneous_setup(InequalityReport& R, const ConvexBody& K, const Measure& nu, const Measure& mu,
                                   const ConcavityDescriptor& F) {
    auto alpha = nu.homogeneity();
    if (!alpha) throw DomainError("nu must be homogeneous, got " + nu.name());
    if (F.kind() != TransformKind::F || !F.exponent() || !(*F.exponent() > 0))
        throw DomainError("needs a power descriptor with s > 0, got " + F.name());
    note_validity(R, F, mu);
    if (!F.admits(K)) throw DomainError("body outside the descriptor's class " + to_string(F.validity()));
    return {*F.exponent(), *alpha};
}

}  // namespace

InequalityReport rogers_shephard_check(const ConvexBody& K, const Measure& nu, const Measure& mu,
                                       const ConcavityDescriptor& F, const CertifyOptions& opt) {
    auto t0 = Clock::now();
    InequalityReport R;
    start(R, "rogers_shephard", "nu(DK) <= binom(1/s+alpha, alpha) min(nu_mu(K), nu_mu(-K))", scalar_set(), opt);
    HomogeneousSetup H = homogeneous_setup(R, K, nu, mu, F);
    const double lhs = measure_of_body(nu, difference_body(K), opt.measure).value;
    const double a = translated_average(nu, mu, K, opt.measure).value;
    const double b = translated_average(nu, mu, reflect(K), opt.measure).value;
    const double c = binom_real(1 / H.s + H.alpha, H.alpha);
    R.params.update(nlohmann::json{{"nu", nu.name()}, {"mu", mu.name()},     {"descriptor", F.name()},   {"s", H.s},
                {"alpha", H.alpha}, {"coefficient", c}, {"nu_mu_K", a}, {"nu_mu_minus_K", b}});
    R.terms = {"nu(DK)", "binom min nu_mu"};
    R.values = {{lhs}, {c * std::min(a, b)}};
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

InequalityReport zhang_check(const ConvexBody& K, const Measure& nu, const Measure& mu, const ConcavityDescriptor& F,
                             const CertifyOptions& opt) {
    auto t0 = Clock::now();
    InequalityReport R;
    start(R, "zhang", "s^alpha binom(1/s+alpha, alpha) <= (mu(K)^alpha / nu_mu(K)) nu(polar projection body)",
          scalar_set(), opt);
    HomogeneousSetup H = homogeneous_setup(R, K, nu, mu, F);
    const double A = measure_of_body(mu, K, opt.measure).value;
    const double avg = translated_average(nu, mu, K, opt.measure).value;
    const double polar = polar_projection_measure(K, mu, nu, opt.measure).value;
    const double lhs = std::pow(H.s, H.alpha) * binom_real(1 / H.s + H.alpha, H.alpha);
    const double rhs = std::pow(A, H.alpha) / avg * polar;
    R.params.update(nlohmann::json{{"nu", nu.name()}, {"mu", mu.name()},  {"descriptor", F.name()}, {"s", H.s},
                {"alpha", H.alpha}, {"mass", A}, {"nu_mu_K", avg},         {"nu_polar_projection", polar}});
    R.terms = {"s^alpha binom", "mu(K)^alpha nu(polar) / nu_mu(K)"};
    R.values = {{lhs}, {rhs}};
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

InequalityReport good_set_inclusion(const ConvexBody& K, const Measure& mu, const ConcavityDescriptor& F,
                                    const DirectionSet& dirs, const CertifyOptions& opt) {
    auto t0 = Clock::now();
    if (F.kind() != TransformKind::F) throw DomainError("good_set_inclusion needs an F-type descriptor, got " + F.name());
    InequalityReport R;
    start(R, "good_set_inclusion", "rho_DK <= (F/F')(mu K) rho_polar_projection", dirs, opt);
    note_validity(R, F, mu);
    const double A = measure_of_body(mu, K, opt.measure).value;
    const double coef = F.transform(A) / F.derivative(A);
    R.params.update(nlohmann::json{{"measure", mu.name()}, {"descriptor", F.name()}, {"mass", A}, {"coefficient", coef}});
    R.terms = {"rho_DK", "(F/F')rho_polar_projection"};
    R.values = {difference_radials(K, dirs), scaled_polar(weighted_projection_body(K, mu, dirs, opt.measure), coef)};
    R.finalize();
    R.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return R;
}

}  // namespace berwald
