#pragma once

#include "berwald/berwald_core.hpp"
#include "berwald/certify.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace berwald::cli {

inline constexpr int kSchemaVersion = 1;

// Schema violation; line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

struct DirectionSpec {
    std::string scheme = "default";  // default, uniform, fibonacci, seeded, arcs, vectors
    int count = 0;                   // 0 picks the dimension default
    bool symmetric = false;
    std::vector<Vec> vectors;

    DirectionSet build(int n, std::uint64_t seed, const ConvexBody* K = nullptr) const;
};

struct FunctionSpec {
    std::string kind = "roof";  // roof, constant, min_affine, random
    std::string body;
    double height = 1.0;
    std::optional<Vec> apex;
    std::vector<ConcaveFunction::Piece> pieces;
    int random_pieces = 4;
};

struct GlobalSettings {
    std::uint64_t seed = 42;
    double tolerance = 1e-6;
    double equality_tolerance = 1e-4;
    DirectionSpec directions;
    std::vector<double> p_grid = default_p_grid();
    int profile_nodes = 129;
    double mellin_rel_tol = 1e-8;
};

// op is one of: body_info, covariogram, radial_mean, projection_body, berwald_curve, chain_F, chain_log,
// chain_symmetric, rogers_shephard, zhang, good_set_inclusion, rs_zhang, moments.
struct Experiment {
    std::string op;
    std::string output;
    std::string body, measure, nu, descriptor, function;
    std::vector<std::string> descriptors;
    std::optional<std::vector<double>> p_grid;
    std::optional<DirectionSpec> directions;
    std::map<std::string, double> numbers;
    std::string family = "radial";  // radial_mean: radial, polarized, spectral; covariogram: standard, polarized
    int line = 0;
};

struct SceneConfig {
    int schema_version = kSchemaVersion;
    std::string source;
    GlobalSettings global;
    std::map<std::string, ConvexBody> bodies;
    // Measures and descriptors are stored as short specs and built at the dimension of the body they meet.
    std::map<std::string, std::string> measures;
    std::map<std::string, std::string> descriptors;
    std::map<std::string, FunctionSpec> functions;
    std::vector<Experiment> experiments;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> dirs;
    std::optional<std::vector<double>> p_grid;
    std::optional<double> tol;
    std::string out_dir = "out";
    std::string format = "csv";
    // Write artifacts to this stream instead of out_dir.
    std::ostream* sink = nullptr;
};

// Short specs shared by config files and subcommand flags.
// Bodies: square, triangle, simplex:n, cube:n, symcube:n, cross:n.
ConvexBody parse_body(const std::string& spec);
// Measures: lebesgue, gaussian[:sigma], radial_power:alpha, cauchy:beta, exponential[:c].
Measure parse_measure(const std::string& spec, int n);
// Descriptors: power:s, log, ehrhard, gaussian_half_power, symmetric_power (n from the scene).
ConcavityDescriptor parse_descriptor(const std::string& spec, int n);
// Function specs: roof:<body>[@height], constant:<body>[@c], random:<body>[@pieces].
FunctionSpec parse_function(const std::string& spec);
std::vector<double> parse_list(const std::string& csv);
// power(s) for s-concave mu, log for log-concave mu.
ConcavityDescriptor default_descriptor(const Measure& mu);

SceneConfig load_config(const std::string& path);
SceneConfig parse_config(const std::string& text, const std::string& source = "<string>");

struct ExperimentResult {
    std::string name;
    std::string op;
    std::string claim;
    bool certifies = false;
    bool pass = true;
    bool equality = false;
    bool flagged = false;
    double min_margin = 0.0;
    double runtime_ms = 0.0;
    std::string artifact;
};

struct RunSummary {
    std::vector<ExperimentResult> results;
    int exit_code = 0;
};

RunSummary run(const SceneConfig& cfg, const Overrides& ov);
// Loads and runs; schema errors print "path:line: message" to err and give exit code 2.
int run_file(const std::string& path, const Overrides& ov, std::ostream& out, std::ostream& err);
void print_summary(const RunSummary& s, std::ostream& out);

}  // namespace berwald::cli
