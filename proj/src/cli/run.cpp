#include "berwald/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace berwald::cli {

namespace fs = std::filesystem;

DirectionSet DirectionSpec::build(int n, std::uint64_t seed, const ConvexBody* K) const {
    if (scheme == "vectors") {
        std::vector<Vec> vs;
        for (const Vec& v : vectors) vs.push_back(v.normalized());
        return custom_directions(vs);
    }
    if (scheme == "arcs") {
        if (n != 2 || !K) throw DomainError("arc directions need a planar body");
        return arc_directions(critical_angles(*K), count > 0 ? count : 8);
    }
    if (scheme == "default" && count == 0) return default_directions(n, symmetric, seed);
    const int m = count > 0 ? count : static_cast<int>(default_directions(n, false, seed).size());
    if (scheme == "fibonacci") return directions(n, m, DirectionScheme::Fibonacci, seed, symmetric);
    if (scheme == "seeded") return directions(n, m, DirectionScheme::Seeded, seed, symmetric);
    return directions(n, m, seed, symmetric);
}

namespace {

using Clock = std::chrono::steady_clock;

struct Artifact {
    std::string csv;
    std::optional<nlohmann::json> json;
};

// Tables without their own JSON form become {meta, columns, rows}.
nlohmann::json csv_to_json(const std::string& csv) {
    nlohmann::json j;
    j["meta"] = nlohmann::json::array();
    j["rows"] = nlohmann::json::array();
    std::stringstream ss(csv);
    std::string line;
    bool header = false;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            j["meta"].push_back(line.substr(line.find_first_not_of("# ")));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (!header) {
            j["columns"] = cells;
            header = true;
            continue;
        }
        nlohmann::json row = nlohmann::json::array();
        for (const auto& cell : cells) {
            try {
                size_t used = 0;
                double v = std::stod(cell, &used);
                if (used == cell.size() && std::isfinite(v))
                    row.push_back(v);
                else
                    row.push_back(cell);
            } catch (const std::exception&) {
                row.push_back(cell);
            }
        }
        j["rows"].push_back(row);
    }
    return j;
}

std::string with_claim(const std::string& claim, const std::string& csv) {
    if (csv.rfind("# claim=", 0) == 0) return csv;
    return "# claim=" + claim + "\n" + csv;
}

void write_atomic(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string direction_header(int n) {
    std::string s;
    for (int k = 1; k <= n; ++k) s += "theta_" + std::to_string(k) + ",";
    return s;
}

class Runner {
public:
    Runner(const SceneConfig& cfg, const Overrides& ov) : cfg_(cfg), ov_(ov), g_(cfg.global) {
        if (ov.seed) g_.seed = *ov.seed;
        if (ov.tol) g_.tolerance = *ov.tol;
        if (ov.p_grid) g_.p_grid = *ov.p_grid;
        if (ov.dirs && g_.directions.scheme != "vectors") g_.directions.count = *ov.dirs;
        copt_.nodes = g_.profile_nodes;
        lopt_.refine_tol = std::max(1e-9, g_.mellin_rel_tol * 10);
        certify_.tolerance = g_.tolerance;
        certify_.equality_tolerance = g_.equality_tolerance;
        certify_.covariogram = copt_;
    }

    ExperimentResult run(const Experiment& e) {
        ExperimentResult r;
        r.name = e.output;
        r.op = e.op;
        r.claim = e.op;
        auto t0 = Clock::now();
        Artifact a = dispatch(e, r);
        r.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        emit(e, r, a);
        return r;
    }

private:
    const SceneConfig& cfg_;
    const Overrides& ov_;
    GlobalSettings g_;
    CovariogramOptions copt_;
    LevelProfileOptions lopt_;
    CertifyOptions certify_;

    ConvexBody body(const std::string& name) const {
        auto it = cfg_.bodies.find(name);
        return it != cfg_.bodies.end() ? it->second : parse_body(name);
    }
    Measure measure(const std::string& name, int n) const {
        auto it = cfg_.measures.find(name);
        return parse_measure(it != cfg_.measures.end() ? it->second : name, n);
    }
    ConcavityDescriptor descriptor(const Experiment& e, const Measure& mu) const {
        if (e.descriptor.empty()) return default_descriptor(mu);
        auto it = cfg_.descriptors.find(e.descriptor);
        return parse_descriptor(it != cfg_.descriptors.end() ? it->second : e.descriptor, mu.dim());
    }
    std::vector<double> grid(const Experiment& e) const {
        if (ov_.p_grid) return *ov_.p_grid;
        return e.p_grid ? *e.p_grid : g_.p_grid;
    }
    DirectionSet dirs(const Experiment& e, int n, const ConvexBody* K, bool symmetric = false) const {
        DirectionSpec d = e.directions ? *e.directions : g_.directions;
        if (ov_.dirs && d.scheme != "vectors") d.count = *ov_.dirs;
        if (symmetric && d.scheme != "vectors") d.symmetric = true;
        return d.build(n, g_.seed, K);
    }

    void emit(const Experiment& e, ExperimentResult& r, const Artifact& a) {
        const bool json = ov_.format == "json";
        std::string text = json ? (a.json ? *a.json : csv_to_json(with_claim(r.claim, a.csv))).dump(2) + "\n"
                                : with_claim(r.claim, a.csv);
        if (ov_.sink) {
            *ov_.sink << text;
            r.artifact = "-";
            return;
        }
        fs::path path = fs::path(ov_.out_dir) / (e.output + (json ? ".json" : ".csv"));
        write_atomic(path, text);
        r.artifact = path.string();
    }

    Artifact report(ExperimentResult& r, const InequalityReport& R) {
        r.claim = R.claim;
        r.certifies = true;
        r.pass = R.pass;
        r.equality = R.equality;
        r.min_margin = std::numeric_limits<double>::infinity();
        for (const LinkMargin& L : R.links) r.min_margin = std::min(r.min_margin, L.min_margin);
        return {R.to_csv(), R.to_json()};
    }

    Artifact dispatch(const Experiment& e, ExperimentResult& r) {
        const std::string& op = e.op;
        if (op == "moments") return moments(e, r);
        if (op == "berwald_curve") return curve(e, r);
        const ConvexBody K = body(e.body);
        const int n = K.dim();
        std::optional<Measure> mu;
        if (!e.measure.empty()) mu = measure(e.measure, n);
        if (op == "body_info") return body_info(K, mu);
        if (op == "covariogram") return covariogram(e, r, K, *mu);
        if (op == "radial_mean") return radial_mean(e, r, K, *mu);
        if (op == "projection_body") return projection(e, K, *mu);
        if (op == "chain_F") return report(r, chain_F(K, *mu, descriptor(e, *mu), grid(e), dirs(e, n, &K), certify_));
        if (op == "chain_log") {
            ConcavityDescriptor Q = e.descriptor.empty() ? ConcavityDescriptor::log() : descriptor(e, *mu);
            return report(r, chain_log(K, *mu, Q, grid(e), dirs(e, n, &K), certify_));
        }
        if (op == "chain_symmetric")
            return report(r, chain_symmetric(K, *mu, grid(e), dirs(e, n, &K, true), certify_));
        if (op == "good_set_inclusion")
            return report(r, good_set_inclusion(K, *mu, descriptor(e, *mu), dirs(e, n, &K), certify_));
        const Measure nu = e.nu.empty() ? Measure::lebesgue(n) : measure(e.nu, n);
        if (op == "rogers_shephard") return report(r, rogers_shephard_check(K, nu, *mu, descriptor(e, *mu), certify_));
        if (op == "zhang") return report(r, zhang_check(K, nu, *mu, descriptor(e, *mu), certify_));
        throw DomainError("unhandled op " + op);
    }

    Artifact body_info(const ConvexBody& K, const std::optional<Measure>& mu) {
        std::ostringstream os;
        os.precision(17);
        const ConvexBody DK = difference_body(K);
        os << "quantity,value\n";
        os << "dim," << K.dim() << "\n";
        os << "vertices," << K.vertices().size() << "\n";
        os << "facets," << K.facets().size() << "\n";
        os << "volume," << K.volume() << "\n";
        os << "symmetric," << (K.is_symmetric() ? 1 : 0) << "\n";
        for (int k = 0; k < K.dim(); ++k) os << "centroid_" << k + 1 << "," << K.centroid()[k] << "\n";
        os << "volume_DK," << DK.volume() << "\n";
        os << "volume_ratio_DK," << DK.volume() / K.volume() << "\n";
        if (mu) os << "mu_K," << measure_of_body(*mu, K).value << "\n";
        return {os.str(), std::nullopt};
    }

    Artifact covariogram(const Experiment& e, ExperimentResult& r, const ConvexBody& K, const Measure& mu) {
        CovariogramOptions opt = copt_;
        if (e.numbers.contains("nodes")) opt.nodes = static_cast<int>(e.numbers.at("nodes"));
        const CovariogramKind kind = e.family == "polarized" ? CovariogramKind::Polarized : CovariogramKind::Standard;
        const DirectionSet D = dirs(e, K.dim(), &K);
        std::ostringstream os;
        os.precision(17);
        os << direction_header(K.dim()) << "r,g\n";
        for (const Direction& th : D.dirs) {
            CovariogramProfile P = profile(K, mu, th, kind, opt);
            r.flagged = r.flagged || P.flagged;
            const auto& t = P.profile.nodes();
            const auto& v = P.profile.values();
            for (size_t k = 0; k < t.size(); ++k) {
                for (int j = 0; j < K.dim(); ++j) os << th[j] << ",";
                os << t[k] << "," << v[k] << "\n";
            }
        }
        return {os.str(), std::nullopt};
    }

    Artifact radial_mean(const Experiment& e, ExperimentResult& r, const ConvexBody& K, const Measure& mu) {
        std::vector<double> ps = e.numbers.contains("p") ? std::vector<double>{e.numbers.at("p")} : grid(e);
        const DirectionSet D = dirs(e, K.dim(), &K);
        r.claim = e.family + "_mean_body";
        std::ostringstream os;
        os.precision(17);
        os << direction_header(K.dim()) << "p,rho,error\n";
        for (double p : ps) {
            StarBodySamples S = e.family == "spectral"    ? spectral_mean_body(K, p, D, copt_)
                                : e.family == "polarized" ? polarized_mean_body(K, mu, p, D, copt_)
                                                          : radial_mean_body(K, mu, p, D, copt_);
            r.flagged = r.flagged || S.any_flagged();
            for (size_t i = 0; i < S.size(); ++i) {
                for (int j = 0; j < K.dim(); ++j) os << D.dirs[i][j] << ",";
                os << p << "," << S.rho[i] << "," << S.error[i] << "\n";
            }
        }
        return {os.str(), std::nullopt};
    }

    Artifact projection(const Experiment& e, const ConvexBody& K, const Measure& mu) {
        const DirectionSet D = dirs(e, K.dim(), &K);
        ProjectionBody B = weighted_projection_body(K, mu, D, copt_.measure);
        std::ostringstream os;
        os.precision(17);
        os << direction_header(K.dim()) << "h,h_tilde,rho_polar\n";
        for (size_t i = 0; i < D.size(); ++i) {
            for (int j = 0; j < K.dim(); ++j) os << D.dirs[i][j] << ",";
            os << B.h.h[i] << "," << B.h_tilde.h[i] << "," << polar_radial(B.h, i) << "\n";
        }
        return {os.str(), std::nullopt};
    }

    ConcaveFunction function(const Experiment& e) const {
        FunctionSpec f = cfg_.functions.contains(e.function) ? cfg_.functions.at(e.function) : parse_function(e.function);
        const ConvexBody K = body(f.body);
        if (f.kind == "roof") return ConcaveFunction::roof(K, f.height, f.apex ? *f.apex : K.centroid());
        if (f.kind == "constant") return ConcaveFunction::constant(K, f.height);
        if (f.kind == "min_affine") return ConcaveFunction::min_affine(K, f.pieces);
        std::mt19937_64 rng(g_.seed);
        return ConcaveFunction::random_min_affine(K, f.random_pieces, rng);
    }

    Artifact curve(const Experiment& e, ExperimentResult& r) {
        const ConcaveFunction f = function(e);
        const Measure mu = measure(e.measure, f.body().dim());
        std::vector<std::string> names = e.descriptors;
        if (!e.descriptor.empty()) names.insert(names.begin(), e.descriptor);
        std::vector<ConcavityDescriptor> Fs;
        for (const auto& d : names) {
            auto it = cfg_.descriptors.find(d);
            Fs.push_back(parse_descriptor(it != cfg_.descriptors.end() ? it->second : d, mu.dim()));
        }
        if (Fs.empty()) Fs.push_back(default_descriptor(mu));
        std::vector<BerwaldCurve> curves = berwald_curves(f, mu, Fs, grid(e), lopt_);

        r.claim = "berwald_monotonicity";
        r.certifies = true;
        r.min_margin = std::numeric_limits<double>::infinity();
        r.equality = true;
        std::ostringstream os;
        os.precision(17);
        os << "descriptor,p,T,constant,mean,error,flagged\n";
        for (size_t c = 0; c < curves.size(); ++c) {
            const BerwaldCurve& C = curves[c];
            r.pass = r.pass && C.nonincreasing(g_.tolerance);
            r.min_margin = std::min(r.min_margin, -C.worst_increase());
            double T0 = std::numeric_limits<double>::quiet_NaN();
            for (size_t k = 0; k < C.p.size(); ++k) {
                r.flagged = r.flagged || C.flagged[k];
                if (std::isfinite(C.T[k])) {
                    if (std::isnan(T0)) T0 = C.T[k];
                    if (std::abs(C.T[k] - T0) > g_.equality_tolerance * std::abs(T0)) r.equality = false;
                }
                os << Fs[c].name() << "," << C.p[k] << "," << C.T[k] << "," << C.constants[k] << "," << C.means[k]
                   << "," << C.errors[k] << "," << (C.flagged[k] ? 1 : 0) << "\n";
            }
        }
        return {os.str(), std::nullopt};
    }

    Artifact moments(const Experiment& e, ExperimentResult& r) {
        const Vec theta = e.directions->vectors[0].normalized();
        const Measure mu = measure(e.measure, static_cast<int>(theta.size()));
        const ConcavityDescriptor F = descriptor(e, mu);
        MomentBound M = halfspace_moment_ratio(mu, Direction(theta), e.numbers.at("p"), e.numbers.at("q"), F);
        r.claim = "halfspace_moment_ratio";
        r.certifies = true;
        r.flagged = M.flagged;
        r.min_margin = M.margin / std::abs(M.rhs);
        r.pass = r.min_margin >= -g_.tolerance;
        r.equality = std::abs(r.min_margin) <= g_.equality_tolerance;
        std::ostringstream os;
        os.precision(17);
        os << "quantity,value\n";
        os << "p," << e.numbers.at("p") << "\nq," << e.numbers.at("q") << "\n";
        os << "lhs," << M.lhs << "\nrhs," << M.rhs << "\nmargin," << M.margin << "\n";
        os << "half_space_mass," << M.half_space_mass << "\n";
        return {os.str(), std::nullopt};
    }
};

}  // namespace

RunSummary run(const SceneConfig& cfg, const Overrides& ov) {
    if (ov.format != "csv" && ov.format != "json") throw ConfigError("format must be csv or json");
    RunSummary s;
    Runner runner(cfg, ov);
    for (const Experiment& e : cfg.experiments) {
        ExperimentResult r;
        try {
            r = runner.run(e);
        } catch (const std::exception& ex) {
            r.name = e.output;
            r.op = e.op;
            r.claim = e.op;
            r.pass = false;
            r.flagged = true;
            r.artifact = std::string("error: ") + ex.what();
        }
        if (!r.pass || r.flagged) s.exit_code = 1;
        s.results.push_back(r);
    }
    return s;
}

void print_summary(const RunSummary& s, std::ostream& out) {
    out << std::left << std::setw(30) << "experiment" << std::setw(26) << "claim" << std::setw(10) << "status"
        << std::setw(14) << "min_margin" << std::setw(12) << "ms" << "artifact\n";
    for (const ExperimentResult& r : s.results) {
        std::string status = !r.certifies ? "done" : r.pass ? "PASS" : "FAIL";
        if (r.flagged) status = r.certifies && !r.pass ? "FAIL" : "FLAGGED";
        if (r.certifies && r.pass && r.equality && !r.flagged) status = "EQUALITY";
        std::ostringstream m;
        if (r.certifies) m << std::setprecision(4) << std::scientific << r.min_margin;
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(1) << r.runtime_ms;
        out << std::setw(30) << r.name << std::setw(26) << r.claim << std::setw(10) << status << std::setw(14)
            << m.str() << std::setw(12) << ms.str() << r.artifact << "\n";
    }
}

int run_file(const std::string& path, const Overrides& ov, std::ostream& out, std::ostream& err) {
    SceneConfig cfg;
    try {
        cfg = load_config(path);
    } catch (const ConfigError& e) {
        err << path;
        if (e.line() > 0) err << ":" << e.line();
        err << ": " << e.what() << "\n";
        return 2;
    }
    RunSummary s;
    try {
        s = run(cfg, ov);
    } catch (const ConfigError& e) {
        err << path << ": " << e.what() << "\n";
        return 2;
    }
    print_summary(s, out);
    return s.exit_code;
}

}  // namespace berwald::cli
