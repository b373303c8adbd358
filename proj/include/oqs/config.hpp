// Sectioned key = value experiment configs: file reading, schema validation
// with line-anchored errors, and canonical re-rendering for the metadata
// sidecar (which must itself be a runnable config).
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "oqs/dynamics.hpp"
#include "oqs/trajectories.hpp"

namespace oqs {

// Schema violation, anchored to "path:line" when the line is known.
struct SchemaError : Error {
    SchemaError(const std::string& path, int line_no, const std::string& msg)
        : Error(line_no > 0 ? path + ":" + std::to_string(line_no) + ": " + msg
                            : path + ": " + msg),
          line(line_no) {}
    int line;
};

struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
};

// Raw section/key/value triples in file order; repeated keys are kept.
struct ConfigFile {
    std::string path;
    std::vector<ConfigEntry> entries;
};

ConfigFile read_config(const std::string& path);
ConfigFile parse_config_text(const std::string& text, const std::string& path);

// "section.key=value" assignments; the first assignment to a key drops the
// existing values, further assignments to the same key append.
void apply_overrides(ConfigFile& cf, const std::vector<std::string>& assignments);

enum class ExperimentKind { spectrum, evolve, trajectories, qec, envbench, zeno };

const char* kind_name(ExperimentKind kind);

struct ModelSpec {
    std::vector<int> dims;
    std::string hamiltonian;  // expression; empty = zero operator
    std::vector<std::pair<double, std::string>> jumps;
    std::vector<int> initial;  // basis indices: one flat, or one per factor
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::spectrum;
    std::string output;
    ModelSpec model;
    TimeGrid grid;
    UnravelingScheme scheme = UnravelingScheme::counting;
    int n_traj = 1;
    std::uint64_t seed = 0;
    double beta = 0.0;
    bool conditional_no_jump = false;
    std::vector<std::string> observables;
    double qec_gamma = 1.0;
    std::vector<double> qec_tau_list;
    EnvBenchParams envbench;
    double zeno_g = 1.0;
    int zeno_cutoff = 1;
    std::vector<double> zeno_tau_list;
    int zeno_n_cycles = 1000;
};

// Full schema check: known sections/keys only, the sections a kind needs,
// well-typed values, expressions parsed against the declared space.
ExperimentConfig parse_experiment(const ConfigFile& cf);

// Canonical text of the resolved config; parse_experiment on it reproduces
// the same run (the byte-identical-rerun guarantee of the sidecar).
std::string render_config(const ExperimentConfig& cfg);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double x);

}  // namespace oqs
