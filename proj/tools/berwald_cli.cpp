#include "berwald/cli.hpp"

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <iostream>

using namespace berwald;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> dirs;
    std::string p_grid;
    std::optional<double> tol;
    std::string out_dir;
    std::string format = "csv";

    std::string body, measure, nu, f, family, kind = "F";
    std::vector<std::string> desc, dir;
    std::optional<double> p, q;
    std::optional<int> nodes;
};

cli::Overrides overrides(const Flags& fl) {
    cli::Overrides ov;
    ov.seed = fl.seed;
    ov.dirs = fl.dirs;
    ov.tol = fl.tol;
    ov.format = fl.format;
    if (!fl.p_grid.empty()) ov.p_grid = cli::parse_list(fl.p_grid);
    if (!fl.out_dir.empty()) ov.out_dir = fl.out_dir;
    return ov;
}

// One-experiment scene in the config schema, so flags go through the same validation as files.
std::string scene(const std::string& op, const Flags& fl) {
    YAML::Emitter y;
    y << YAML::BeginMap << YAML::Key << "schema_version" << YAML::Value << cli::kSchemaVersion;
    y << YAML::Key << "experiments" << YAML::Value << YAML::BeginSeq << YAML::BeginMap;
    y << YAML::Key << "op" << YAML::Value << op;
    y << YAML::Key << "output" << YAML::Value << op;
    auto put = [&](const char* k, const std::string& v) {
        if (!v.empty()) y << YAML::Key << k << YAML::Value << v;
    };
    put("body", fl.body);
    put("measure", fl.measure);
    put("nu", fl.nu);
    put("function", fl.f);
    if (!fl.family.empty()) put("family", fl.family);
    if (fl.desc.size() == 1) put("descriptor", fl.desc[0]);
    if (fl.desc.size() > 1) y << YAML::Key << "descriptors" << YAML::Value << YAML::Flow << fl.desc;
    if (fl.p) y << YAML::Key << "p" << YAML::Value << *fl.p;
    if (fl.q) y << YAML::Key << "q" << YAML::Value << *fl.q;
    if (fl.nodes) y << YAML::Key << "nodes" << YAML::Value << *fl.nodes;
    if (!fl.dir.empty()) {
        y << YAML::Key << "directions" << YAML::Value << YAML::BeginSeq;
        for (const auto& d : fl.dir) y << YAML::Flow << cli::parse_list(d);
        y << YAML::EndSeq;
    }
    y << YAML::EndMap << YAML::EndSeq << YAML::EndMap;
    return y.c_str();
}

int run_scene(const std::string& op, const Flags& fl) {
    cli::Overrides ov = overrides(fl);
    if (fl.out_dir.empty()) ov.sink = &std::cout;
    try {
        cli::SceneConfig cfg = cli::parse_config(scene(op, fl), op);
        cli::RunSummary s = cli::run(cfg, ov);
        cli::print_summary(s, std::cerr);
        return s.exit_code;
    } catch (const cli::ConfigError& e) {
        std::cerr << op << ": " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Berwald-type inequalities for measures: covariograms, radial mean bodies and certified chains"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags fl;

    app.add_option("--seed", fl.seed, "RNG seed for direction sets and random functions");
    app.add_option("--dirs", fl.dirs, "number of sampled directions")->check(CLI::PositiveNumber);
    app.add_option("--p-grid", fl.p_grid, "comma-separated p values");
    app.add_option("--tol", fl.tol, "certification tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", fl.out_dir, "artifact directory (subcommands print to stdout without it)");
    app.add_option("--format", fl.format, "artifact format")->check(CLI::IsMember({"csv", "json"}));

    auto* run = app.add_subcommand("run", "run every experiment of a scene config");
    run->add_option("config", fl.config, "scene config file");
    app.add_option("--config", fl.config, "scene config file (same as run <config>)");

    auto common = [&](CLI::App* sc, bool body = true) {
        if (body) sc->add_option("--body", fl.body, "square, triangle, simplex:n, cube:n, symcube:n, cross:n")->required();
        sc->add_option("--measure", fl.measure, "lebesgue, gaussian[:sigma], radial_power:a, cauchy:b, exponential[:c]");
        sc->add_option("--dir", fl.dir, "direction as comma-separated coordinates (repeatable)");
    };
    auto* info = app.add_subcommand("body-info", "volume, symmetry and difference-body data");
    common(info);
    auto* cov = app.add_subcommand("covariogram", "covariogram profiles along directions");
    common(cov);
    cov->add_option("--family", fl.family, "standard or polarized");
    cov->add_option("--nodes", fl.nodes, "profile nodes");
    auto* rm = app.add_subcommand("radial-mean", "radial mean body radial function");
    common(rm);
    rm->add_option("--p", fl.p, "order p (or use --p-grid)");
    rm->add_option("--family", fl.family, "radial, polarized or spectral");
    auto* pb = app.add_subcommand("projection-body", "weighted projection body support function");
    common(pb);
    auto* bc = app.add_subcommand("berwald-curve", "T_f(p) over the p-grid");
    bc->add_option("--f", fl.f, "roof:<body>[@height], constant:<body>[@c], random:<body>[@pieces]")->required();
    bc->add_option("--measure", fl.measure, "measure spec");
    bc->add_option("--desc", fl.desc, "concavity descriptor (repeatable)");
    auto* ch = app.add_subcommand("chain", "certified chain of radial inclusions");
    common(ch);
    ch->add_option("--kind", fl.kind, "F, log or symmetric")->check(CLI::IsMember({"F", "log", "symmetric"}));
    ch->add_option("--desc", fl.desc, "concavity descriptor");
    auto* rz = app.add_subcommand("rs-zhang", "Rogers-Shephard and Zhang type inequalities");
    common(rz);
    rz->add_option("--nu", fl.nu, "homogeneous measure nu (default lebesgue)");
    rz->add_option("--desc", fl.desc, "concavity descriptor of the measure");
    auto* mo = app.add_subcommand("moments", "half-space moment comparison");
    mo->add_option("--measure", fl.measure, "measure spec");
    mo->add_option("--dir", fl.dir, "direction")->required();
    mo->add_option("--p", fl.p, "larger moment order")->required();
    mo->add_option("--q", fl.q, "smaller moment order")->required();
    mo->add_option("--desc", fl.desc, "concavity descriptor");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            if (fl.config.empty()) {
                std::cerr << "run: missing config file\n";
                return 2;
            }
            return cli::run_file(fl.config, overrides(fl), std::cout, std::cerr);
        }
        if (info->parsed()) return run_scene("body_info", fl);
        if (cov->parsed()) return run_scene("covariogram", fl);
        if (rm->parsed()) return run_scene("radial_mean", fl);
        if (pb->parsed()) return run_scene("projection_body", fl);
        if (bc->parsed()) return run_scene("berwald_curve", fl);
        if (ch->parsed()) return run_scene(fl.kind == "F" ? "chain_F" : "chain_" + fl.kind, fl);
        if (rz->parsed()) return run_scene("rs_zhang", fl);
        if (mo->parsed()) return run_scene("moments", fl);
    } catch (const cli::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    return 2;
}
