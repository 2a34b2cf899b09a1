#include "berwald/cli.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace berwald::cli {

ConfigError::ConfigError(const std::string& msg, int line) : std::runtime_error(msg), line_(line) {}

namespace {

std::pair<std::string, std::string> split_head(const std::string& spec, char sep = ':') {
    auto pos = spec.find(sep);
    if (pos == std::string::npos) return {spec, ""};
    return {spec.substr(0, pos), spec.substr(pos + 1)};
}

double to_number(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": '" + s + "' is not a number");
    }
}

int to_dim(const std::string& s, const std::string& what) {
    double v = to_number(s, what);
    if (v != std::floor(v) || v < 1 || v > 8) throw ConfigError(what + ": dimension must be an integer in [1, 8]");
    return static_cast<int>(v);
}

}  // namespace

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf" || item == "+inf") {
            out.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        out.push_back(to_number(item, "list entry"));
    }
    if (out.empty()) throw ConfigError("empty list '" + csv + "'");
    return out;
}

ConvexBody parse_body(const std::string& spec) {
    if (spec == "square") return cube_body(2);
    if (spec == "triangle") return simplex_body(2);
    auto [kind, arg] = split_head(spec);
    if (arg.empty()) throw ConfigError("unknown body '" + spec + "'");
    int n = to_dim(arg, "body " + spec);
    if (kind == "simplex") return simplex_body(n);
    if (kind == "cube") return cube_body(n);
    if (kind == "symcube") return symmetric_cube_body(n);
    if (kind == "cross") return cross_polytope_body(n);
    throw ConfigError("unknown body '" + spec + "'");
}

Measure parse_measure(const std::string& spec, int n) {
    auto [kind, arg] = split_head(spec);
    auto param = [&, &arg = arg](std::optional<double> fallback) {
        if (arg.empty()) {
            if (!fallback) throw ConfigError("measure " + spec + " needs a parameter");
            return *fallback;
        }
        return to_number(arg, "measure " + spec);
    };
    try {
        if (kind == "lebesgue") return Measure::lebesgue(n);
        if (kind == "gaussian") return Measure::gaussian(n, param(1.0));
        if (kind == "radial_power") return Measure::radial_power(n, param(std::nullopt));
        if (kind == "cauchy") return Measure::cauchy(n, param(std::nullopt));
        if (kind == "exponential") return Measure::exponential(n, param(1.0));
    } catch (const DomainError& e) {
        throw ConfigError("measure " + spec + ": " + e.what());
    }
    throw ConfigError("unknown measure '" + spec + "'");
}

ConcavityDescriptor parse_descriptor(const std::string& spec, int n) {
    auto [kind, arg] = split_head(spec);
    try {
        if (kind == "power") {
            if (arg.empty()) throw ConfigError("descriptor power needs an exponent, e.g. power:0.5");
            return ConcavityDescriptor::power(to_number(arg, "descriptor " + spec));
        }
        if (!arg.empty()) throw ConfigError("descriptor " + kind + " takes no parameter");
        if (kind == "gaussian_half_power" || kind == "symmetric_power") return ConcavityDescriptor::catalog(kind, n);
        return ConcavityDescriptor::catalog(kind);
    } catch (const DomainError& e) {
        throw ConfigError("descriptor " + spec + ": " + e.what());
    }
}

FunctionSpec parse_function(const std::string& spec) {
    auto [head, value] = split_head(spec, '@');
    auto [kind, body] = split_head(head);
    if (kind != "roof" && kind != "constant" && kind != "random")
        throw ConfigError("unknown function '" + spec + "'; expected roof, constant or random");
    if (body.empty()) throw ConfigError("function " + spec + " needs a body, e.g. roof:triangle");
    FunctionSpec f;
    f.kind = kind;
    f.body = body;
    if (!value.empty()) {
        double v = to_number(value, "function " + spec);
        if (kind == "random")
            f.random_pieces = static_cast<int>(v);
        else
            f.height = v;
    }
    return f;
}

ConcavityDescriptor default_descriptor(const Measure& mu) {
    if (auto s = mu.concavity_exponent(); s && *s > 0) return ConcavityDescriptor::power(*s);
    if (mu.is_log_concave()) return ConcavityDescriptor::log();
    throw DomainError("measure " + mu.name() + " has no default concavity descriptor; set one explicitly");
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

double num(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    const std::string s = n.Scalar();
    if (s == "inf" || s == ".inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        fail(n, what + " must be a number, got '" + s + "'");
    }
}

int integer(const YAML::Node& n, const std::string& what, int lo) {
    double v = num(n, what);
    if (v != std::floor(v) || v < lo || v > 1e7) fail(n, what + " must be an integer >= " + std::to_string(lo));
    return static_cast<int>(v);
}

std::string str(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
}

bool boolean(const YAML::Node& n, const std::string& what) {
    try {
        return n.as<bool>();
    } catch (const YAML::Exception&) {
        fail(n, what + " must be true or false");
    }
}

Vec vec(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a list of numbers");
    Vec v(static_cast<Eigen::Index>(n.size()));
    for (size_t i = 0; i < n.size(); ++i) v[static_cast<Eigen::Index>(i)] = num(n[i], what);
    return v;
}

std::vector<double> list(const YAML::Node& n, const std::string& what) {
    if (n.IsScalar()) {
        try {
            return parse_list(n.Scalar());
        } catch (const ConfigError& e) {
            fail(n, what + ": " + e.what());
        }
    }
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a non-empty list");
    std::vector<double> out;
    for (const auto& x : n) out.push_back(num(x, what));
    return out;
}

void allow_keys(const YAML::Node& n, const std::string& where, const std::set<std::string>& keys) {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
    for (const auto& kv : n) {
        const std::string k = kv.first.Scalar();
        if (!keys.contains(k)) fail(kv.first, "unknown key '" + k + "' in " + where);
    }
}

// Rethrows spec errors at the node's line.
template <class Fn>
auto anchored(const YAML::Node& n, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        fail(n, e.what());
    } catch (const DomainError& e) {
        fail(n, e.what());
    }
}

DirectionSpec directions(const YAML::Node& n) {
    DirectionSpec d;
    if (n.IsScalar()) {
        d.count = integer(n, "directions", 1);
        return d;
    }
    if (n.IsSequence()) {
        d.scheme = "vectors";
        for (const auto& v : n) d.vectors.push_back(vec(v, "direction"));
        return d;
    }
    allow_keys(n, "directions", {"scheme", "count", "symmetric", "vectors"});
    if (n["scheme"]) d.scheme = str(n["scheme"], "directions.scheme");
    static const std::set<std::string> schemes = {"default", "uniform", "fibonacci", "seeded", "arcs", "vectors"};
    if (!schemes.contains(d.scheme)) fail(n["scheme"], "unknown direction scheme '" + d.scheme + "'");
    if (n["count"]) d.count = integer(n["count"], "directions.count", 1);
    if (n["symmetric"]) d.symmetric = boolean(n["symmetric"], "directions.symmetric");
    if (n["vectors"]) {
        d.scheme = "vectors";
        for (const auto& v : n["vectors"]) d.vectors.push_back(vec(v, "direction"));
    }
    if (d.scheme == "vectors" && d.vectors.empty()) fail(n, "directions scheme 'vectors' needs a vectors list");
    return d;
}

ConvexBody body(const YAML::Node& n) {
    if (n.IsScalar()) return anchored(n, [&] { return parse_body(n.Scalar()); });
    allow_keys(n, "body", {"kind", "dim", "vertices", "halfspaces"});
    if (n["vertices"]) {
        std::vector<Vec> pts;
        for (const auto& v : n["vertices"]) pts.push_back(vec(v, "vertex"));
        auto K = anchored(n, [&] { return ConvexBody::try_from_vertices(pts); });
        if (!K) fail(n, "vertices do not span a full-dimensional body");
        return *K;
    }
    if (n["halfspaces"]) {
        std::vector<Halfspace> hs;
        for (const auto& h : n["halfspaces"]) {
            allow_keys(h, "halfspace", {"normal", "offset"});
            if (!h["normal"] || !h["offset"]) fail(h, "halfspace needs normal and offset");
            hs.push_back(Halfspace{vec(h["normal"], "normal"), num(h["offset"], "offset")});
        }
        return anchored(n, [&] { return ConvexBody::from_halfspaces(hs); });
    }
    if (!n["kind"] || !n["dim"]) fail(n, "body needs kind and dim, vertices, or halfspaces");
    const std::string spec = str(n["kind"], "body.kind") + ":" + std::to_string(integer(n["dim"], "body.dim", 1));
    return anchored(n, [&] { return parse_body(spec); });
}

std::string measure_spec(const YAML::Node& n) {
    if (n.IsScalar()) return n.Scalar();
    allow_keys(n, "measure", {"kind", "sigma", "alpha", "beta", "c"});
    if (!n["kind"]) fail(n, "measure needs a kind");
    std::string spec = str(n["kind"], "measure.kind");
    for (const char* k : {"sigma", "alpha", "beta", "c"})
        if (n[k]) {
            std::ostringstream os;
            os.precision(17);
            os << spec << ":" << num(n[k], std::string("measure.") + k);
            return os.str();
        }
    return spec;
}

std::string descriptor_spec(const YAML::Node& n) {
    if (n.IsScalar()) return n.Scalar();
    allow_keys(n, "descriptor", {"kind", "s"});
    if (!n["kind"]) fail(n, "descriptor needs a kind");
    std::string spec = str(n["kind"], "descriptor.kind");
    if (n["s"]) {
        std::ostringstream os;
        os.precision(17);
        os << spec << ":" << num(n["s"], "descriptor.s");
        return os.str();
    }
    return spec;
}

FunctionSpec function(const YAML::Node& n) {
    if (n.IsScalar()) return anchored(n, [&] { return parse_function(n.Scalar()); });
    allow_keys(n, "function", {"kind", "body", "height", "apex", "pieces", "count"});
    FunctionSpec f;
    if (n["kind"]) f.kind = str(n["kind"], "function.kind");
    if (!n["body"]) fail(n, "function needs a body");
    f.body = str(n["body"], "function.body");
    if (n["height"]) f.height = num(n["height"], "function.height");
    if (n["apex"]) f.apex = vec(n["apex"], "function.apex");
    if (n["count"]) f.random_pieces = integer(n["count"], "function.count", 1);
    if (n["pieces"]) {
        f.kind = "min_affine";
        for (const auto& p : n["pieces"]) {
            allow_keys(p, "piece", {"a", "c"});
            if (!p["a"] || !p["c"]) fail(p, "piece needs a and c");
            f.pieces.push_back({vec(p["a"], "piece.a"), num(p["c"], "piece.c")});
        }
    }
    static const std::set<std::string> kinds = {"roof", "constant", "min_affine", "random"};
    if (!kinds.contains(f.kind)) fail(n, "unknown function kind '" + f.kind + "'");
    if (f.kind == "min_affine" && f.pieces.empty()) fail(n, "min_affine function needs pieces");
    return f;
}

const std::set<std::string> kOps = {"body_info",      "covariogram", "radial_mean",       "projection_body",
                                    "berwald_curve",  "chain_F",     "chain_log",         "chain_symmetric",
                                    "rogers_shephard", "zhang",      "good_set_inclusion", "rs_zhang",
                                    "moments"};

Experiment experiment(const YAML::Node& n, SceneConfig& cfg) {
    allow_keys(n, "experiment",
               {"op", "output", "body", "measure", "nu", "descriptor", "descriptors", "function", "p_grid", "p", "q",
                "directions", "direction", "family", "nodes"});
    Experiment e;
    e.line = line_of(n);
    if (!n["op"]) fail(n, "experiment needs an op");
    e.op = str(n["op"], "op");
    if (!kOps.contains(e.op)) fail(n["op"], "unknown op '" + e.op + "'");
    if (n["output"]) e.output = str(n["output"], "output");
    // Inline mappings are registered under a name derived from the line.
    const std::string anon = "@" + std::to_string(e.line) + ":";
    if (n["body"]) {
        if (n["body"].IsScalar()) {
            e.body = n["body"].Scalar();
        } else {
            e.body = anon + "body";
            cfg.bodies.insert_or_assign(e.body, body(n["body"]));
        }
    }
    if (n["measure"]) e.measure = measure_spec(n["measure"]);
    if (n["nu"]) e.nu = measure_spec(n["nu"]);
    if (n["descriptor"]) e.descriptor = descriptor_spec(n["descriptor"]);
    if (n["descriptors"]) {
        if (!n["descriptors"].IsSequence()) fail(n["descriptors"], "descriptors must be a list");
        for (const auto& d : n["descriptors"]) e.descriptors.push_back(descriptor_spec(d));
    }
    if (n["function"]) {
        if (n["function"].IsScalar()) {
            e.function = n["function"].Scalar();
        } else {
            e.function = anon + "function";
            cfg.functions.insert_or_assign(e.function, function(n["function"]));
        }
    }
    if (n["p_grid"]) e.p_grid = list(n["p_grid"], "p_grid");
    if (n["p"]) e.numbers["p"] = num(n["p"], "p");
    if (n["q"]) e.numbers["q"] = num(n["q"], "q");
    if (n["nodes"]) e.numbers["nodes"] = integer(n["nodes"], "nodes", 5);
    if (n["directions"]) e.directions = directions(n["directions"]);
    if (n["direction"]) {
        DirectionSpec d;
        d.scheme = "vectors";
        d.vectors.push_back(vec(n["direction"], "direction"));
        e.directions = d;
    }
    if (n["family"]) e.family = str(n["family"], "family");
    return e;
}

void global(const YAML::Node& n, GlobalSettings& g) {
    allow_keys(n, "global",
               {"seed", "tolerance", "equality_tolerance", "directions", "p_grid", "profile_nodes", "mellin_rel_tol"});
    if (n["seed"]) g.seed = static_cast<std::uint64_t>(integer(n["seed"], "seed", 0));
    if (n["tolerance"]) g.tolerance = num(n["tolerance"], "tolerance");
    if (n["equality_tolerance"]) g.equality_tolerance = num(n["equality_tolerance"], "equality_tolerance");
    if (n["directions"]) g.directions = directions(n["directions"]);
    if (n["p_grid"]) g.p_grid = list(n["p_grid"], "p_grid");
    if (n["profile_nodes"]) g.profile_nodes = integer(n["profile_nodes"], "profile_nodes", 5);
    if (n["mellin_rel_tol"]) g.mellin_rel_tol = num(n["mellin_rel_tol"], "mellin_rel_tol");
    if (!(g.tolerance > 0) || !(g.equality_tolerance > 0)) fail(n, "tolerances must be positive");
    if (!(g.mellin_rel_tol > 0 && g.mellin_rel_tol < 1)) fail(n["mellin_rel_tol"], "mellin_rel_tol must be in (0,1)");
}

// Checks that every name resolves and every parameter is in its domain, before anything runs.
void validate(SceneConfig& cfg, const YAML::Node& exps) {
    auto body_of = [&](const std::string& name, const YAML::Node& at) -> ConvexBody {
        if (auto it = cfg.bodies.find(name); it != cfg.bodies.end()) return it->second;
        return anchored(at, [&] { return parse_body(name); });
    };
    auto measure_of = [&](const std::string& name, int n, const YAML::Node& at) -> Measure {
        auto it = cfg.measures.find(name);
        return anchored(at, [&] { return parse_measure(it != cfg.measures.end() ? it->second : name, n); });
    };
    auto descriptor_of = [&](const std::string& name, int n, const YAML::Node& at) -> ConcavityDescriptor {
        auto it = cfg.descriptors.find(name);
        return anchored(at, [&] { return parse_descriptor(it != cfg.descriptors.end() ? it->second : name, n); });
    };

    std::vector<Experiment> expanded;
    std::set<std::string> outputs;
    for (size_t i = 0; i < cfg.experiments.size(); ++i) {
        Experiment& e = cfg.experiments[i];
        const YAML::Node at = exps[i];
        if (e.output.empty()) e.output = e.op + "_" + std::to_string(i + 1);

        std::optional<ConvexBody> K;
        if (e.op == "berwald_curve") {
            if (e.function.empty()) fail(at, "berwald_curve needs a function");
            FunctionSpec f = cfg.functions.contains(e.function)
                                 ? cfg.functions.at(e.function)
                                 : anchored(at["function"], [&] { return parse_function(e.function); });
            K = body_of(f.body, at["function"]);
            for (const auto& p : f.pieces)
                if (p.a.size() != K->dim()) fail(at, "function piece dimension does not match its body");
            if (f.apex && f.apex->size() != K->dim()) fail(at, "function apex dimension does not match its body");
        } else if (e.op != "moments") {
            if (e.body.empty()) fail(at, e.op + " needs a body");
            K = body_of(e.body, at["body"]);
        }

        int n = K ? K->dim() : 0;
        if (e.op == "moments") {
            if (!e.directions || e.directions->vectors.empty()) fail(at, "moments needs a direction");
            n = static_cast<int>(e.directions->vectors[0].size());
            if (!at["p"] || !at["q"]) fail(at, "moments needs p and q");
        }
        if (e.directions)
            for (const Vec& v : e.directions->vectors)
                if (v.size() != n || v.norm() == 0) fail(at, "direction must be a nonzero vector of dimension " +
                                                                 std::to_string(n));

        std::optional<Measure> mu;
        const bool needs_measure = e.op != "body_info" || !e.measure.empty();
        if (needs_measure && e.op != "chain_symmetric" && e.measure.empty()) e.measure = "lebesgue";
        if (e.op == "chain_symmetric" && e.measure.empty()) fail(at, "chain_symmetric needs a measure");
        if (!e.measure.empty()) mu = measure_of(e.measure, n, at["measure"] ? at["measure"] : at);
        if (!e.nu.empty()) {
            Measure nu = measure_of(e.nu, n, at["nu"]);
            if (!nu.homogeneity()) fail(at["nu"], "nu must be a homogeneous measure");
        }

        std::vector<std::string> descs = e.descriptors;
        if (!e.descriptor.empty()) descs.insert(descs.begin(), e.descriptor);
        for (const auto& d : descs) {
            ConcavityDescriptor F = descriptor_of(d, n, at["descriptor"] ? at["descriptor"] : at["descriptors"]);
            if (mu && !F.valid_for(*mu)) fail(at, "descriptor " + d + " does not apply to measure " + mu->name());
            const bool q_op = e.op == "chain_log";
            const bool f_op = e.op == "chain_F" || e.op == "good_set_inclusion" || e.op == "rogers_shephard" ||
                              e.op == "zhang" || e.op == "rs_zhang";
            if (f_op && F.kind() != TransformKind::F) fail(at, e.op + " needs an F-type descriptor, got " + d);
            if (q_op && F.kind() != TransformKind::Q) fail(at, "chain_log needs a Q-type descriptor, got " + d);
        }
        if (descs.empty() && mu && e.op != "body_info" && e.op != "covariogram" && e.op != "radial_mean" &&
            e.op != "projection_body" && e.op != "chain_symmetric") {
            if (e.op == "chain_log") {
                e.descriptor = "log";
                if (!mu->is_log_concave()) fail(at, "chain_log needs a log-concave measure");
            } else {
                anchored(at, [&] { return default_descriptor(*mu); });
            }
        }
        if (e.op == "chain_symmetric") {
            if (!K->is_symmetric()) fail(at, "chain_symmetric needs an origin-symmetric body");
            if (!mu->in_class_Mn()) fail(at, "chain_symmetric needs a measure in the class M_n");
        }
        if (e.op == "radial_mean") {
            static const std::set<std::string> fam = {"radial", "polarized", "spectral"};
            if (!fam.contains(e.family)) fail(at["family"], "radial_mean family must be radial, polarized or spectral");
            if (e.family == "spectral" && !mu->is_lebesgue()) fail(at, "spectral means are Lebesgue only");
        }
        if (e.op == "covariogram") {
            if (e.family == "radial") e.family = "standard";
            if (e.family != "standard" && e.family != "polarized")
                fail(at["family"], "covariogram family must be standard or polarized");
        }
        const std::vector<double>& grid = e.p_grid ? *e.p_grid : cfg.global.p_grid;
        for (double p : grid)
            if (!(p > -1) && e.op != "radial_mean") fail(at["p_grid"] ? at["p_grid"] : at, "p must exceed -1");

        if (e.op == "rs_zhang") {
            Experiment rs = e, z = e;
            rs.op = "rogers_shephard";
            rs.output = e.output + "_rs";
            z.op = "zhang";
            z.output = e.output + "_zhang";
            expanded.push_back(rs);
            expanded.push_back(z);
        } else {
            expanded.push_back(e);
        }
    }
    for (const Experiment& e : expanded)
        if (!outputs.insert(e.output).second)
            throw ConfigError("duplicate output name '" + e.output + "'", e.line);
    cfg.experiments = std::move(expanded);
}

}  // namespace

SceneConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping", 1);
    allow_keys(root, "config", {"schema_version", "global", "bodies", "measures", "descriptors", "functions",
                                "experiments"});
    SceneConfig cfg;
    cfg.source = source;
    if (!root["schema_version"]) throw ConfigError("missing schema_version", 1);
    cfg.schema_version = integer(root["schema_version"], "schema_version", 1);
    if (cfg.schema_version != kSchemaVersion)
        fail(root["schema_version"], "unsupported schema_version " + std::to_string(cfg.schema_version));
    if (root["global"]) global(root["global"], cfg.global);

    auto section = [&](const char* key, auto&& each) {
        const YAML::Node s = root[key];
        if (!s) return;
        if (!s.IsMap()) fail(s, std::string(key) + " must be a mapping of names");
        for (const auto& kv : s) each(kv.first.Scalar(), kv.second);
    };
    section("bodies", [&](const std::string& name, const YAML::Node& n) { cfg.bodies.emplace(name, body(n)); });
    section("measures", [&](const std::string& name, const YAML::Node& n) {
        std::string spec = measure_spec(n);
        anchored(n, [&] { return parse_measure(spec, 2); });
        cfg.measures.emplace(name, spec);
    });
    section("descriptors", [&](const std::string& name, const YAML::Node& n) {
        std::string spec = descriptor_spec(n);
        anchored(n, [&] { return parse_descriptor(spec, 2); });
        cfg.descriptors.emplace(name, spec);
    });
    section("functions", [&](const std::string& name, const YAML::Node& n) { cfg.functions.emplace(name, function(n)); });

    const YAML::Node exps = root["experiments"];
    if (!exps || !exps.IsSequence() || exps.size() == 0) fail(root, "experiments must be a non-empty list");
    for (const auto& e : exps) cfg.experiments.push_back(experiment(e, cfg));
    validate(cfg, exps);
    return cfg;
}

SceneConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace berwald::cli
