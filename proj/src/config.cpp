#include "oqs/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "oqs/expr.hpp"

namespace oqs {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

const std::map<std::string, std::set<std::string>>& section_keys() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"experiment", {"kind", "output"}},
        {"model", {"dims", "hamiltonian", "jump", "initial"}},
        {"grid", {"t0", "t1", "dt", "sample_every"}},
        {"scheme", {"scheme", "n", "seed", "beta", "conditional_no_jump"}},
        {"observables", {"obs"}},
        {"qec", {"gamma", "tau_list"}},
        {"envbench", {"m", "omega", "gbar1", "rel_sigma", "seed", "rwa"}},
        {"zeno", {"g", "cutoff", "tau_list", "n_cycles"}},
    };
    return table;
}

bool repeatable(const std::string& section, const std::string& key) {
    return (section == "model" && key == "jump") || (section == "observables" && key == "obs");
}

const std::set<std::string>& sections_for(ExperimentKind kind) {
    static const std::set<std::string> spectrum = {"experiment", "model"};
    static const std::set<std::string> evolve = {"experiment", "model", "grid", "observables"};
    static const std::set<std::string> trajectories = {"experiment", "model", "grid", "scheme",
                                                       "observables"};
    static const std::set<std::string> qec = {"experiment", "qec"};
    static const std::set<std::string> envbench = {"experiment", "envbench", "grid"};
    static const std::set<std::string> zeno = {"experiment", "zeno"};
    switch (kind) {
        case ExperimentKind::spectrum: return spectrum;
        case ExperimentKind::evolve: return evolve;
        case ExperimentKind::trajectories: return trajectories;
        case ExperimentKind::qec: return qec;
        case ExperimentKind::envbench: return envbench;
        case ExperimentKind::zeno: return zeno;
    }
    return spectrum;
}

// Validated access to the raw entries.
class View {
  public:
    explicit View(const ConfigFile& cf) : cf_(cf) {
        for (const auto& e : cf.entries) {
            auto sec = section_keys().find(e.section);
            if (sec == section_keys().end())
                fail(e.line, "unknown section [" + e.section + "]");
            if (!sec->second.count(e.key))
                fail(e.line, "unknown key '" + e.key + "' in [" + e.section + "]");
            if (!repeatable(e.section, e.key)) {
                auto id = e.section + "." + e.key;
                if (!seen_.insert(id).second) fail(e.line, "duplicate key '" + e.key + "'");
            }
        }
    }

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw SchemaError(cf_.path, line, msg);
    }

    const ConfigEntry* find(const std::string& section, const std::string& key) const {
        for (const auto& e : cf_.entries)
            if (e.section == section && e.key == key) return &e;
        return nullptr;
    }

    const ConfigEntry& require(const std::string& section, const std::string& key) const {
        const ConfigEntry* e = find(section, key);
        if (!e) fail(0, "missing key '" + key + "' in [" + section + "]");
        return *e;
    }

    std::vector<const ConfigEntry*> all(const std::string& section, const std::string& key) const {
        std::vector<const ConfigEntry*> out;
        for (const auto& e : cf_.entries)
            if (e.section == section && e.key == key) out.push_back(&e);
        return out;
    }

    void restrict_sections(const std::set<std::string>& allowed, const std::string& kind) const {
        for (const auto& e : cf_.entries)
            if (!allowed.count(e.section))
                fail(e.line, "section [" + e.section + "] does not apply to kind '" + kind + "'");
    }

    double to_double(const ConfigEntry& e) const { return double_token(e.line, e.key, e.value); }

    double double_token(int line, const std::string& key, const std::string& tok) const {
        errno = 0;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE)
            fail(line, "key '" + key + "': expected a number, got '" + tok + "'");
        return v;
    }

    long to_int(const ConfigEntry& e) const { return int_token(e.line, e.key, e.value); }

    long int_token(int line, const std::string& key, const std::string& tok) const {
        errno = 0;
        char* end = nullptr;
        long v = std::strtol(tok.c_str(), &end, 10);
        if (tok.empty() || end != tok.c_str() + tok.size() || errno == ERANGE)
            fail(line, "key '" + key + "': expected an integer, got '" + tok + "'");
        return v;
    }

    std::uint64_t to_u64(const ConfigEntry& e) const {
        errno = 0;
        char* end = nullptr;
        unsigned long long v = std::strtoull(e.value.c_str(), &end, 10);
        if (e.value.empty() || end != e.value.c_str() + e.value.size() || errno == ERANGE ||
            e.value[0] == '-')
            fail(e.line, "key '" + e.key + "': expected an unsigned integer, got '" + e.value +
                             "'");
        return v;
    }

    bool to_bool(const ConfigEntry& e) const {
        if (e.value == "true" || e.value == "1") return true;
        if (e.value == "false" || e.value == "0") return false;
        fail(e.line, "key '" + e.key + "': expected true or false, got '" + e.value + "'");
    }

    std::vector<double> to_double_list(const ConfigEntry& e) const {
        std::vector<double> out;
        for (const auto& tok : split_ws(e.value)) out.push_back(double_token(e.line, e.key, tok));
        if (out.empty()) fail(e.line, "key '" + e.key + "': expected at least one number");
        return out;
    }

    std::vector<int> to_int_list(const ConfigEntry& e) const {
        std::vector<int> out;
        for (const auto& tok : split_ws(e.value))
            out.push_back(static_cast<int>(int_token(e.line, e.key, tok)));
        if (out.empty()) fail(e.line, "key '" + e.key + "': expected at least one integer");
        return out;
    }

  private:
    const ConfigFile& cf_;
    std::set<std::string> seen_;
};

ExperimentKind kind_from(const View& v, const ConfigEntry& e) {
    if (e.value == "spectrum") return ExperimentKind::spectrum;
    if (e.value == "evolve") return ExperimentKind::evolve;
    if (e.value == "trajectories") return ExperimentKind::trajectories;
    if (e.value == "qec") return ExperimentKind::qec;
    if (e.value == "envbench") return ExperimentKind::envbench;
    if (e.value == "zeno") return ExperimentKind::zeno;
    v.fail(e.line, "unknown experiment kind '" + e.value + "'");
}

UnravelingScheme scheme_from(const View& v, const ConfigEntry& e) {
    if (e.value == "counting") return UnravelingScheme::counting;
    if (e.value == "counting_with_offset") return UnravelingScheme::counting_with_offset;
    if (e.value == "homodyne_ideal") return UnravelingScheme::homodyne_ideal;
    v.fail(e.line, "unknown scheme '" + e.value + "'");
}

Operator checked_expression(const View& v, const ConfigEntry& e, const std::string& what,
                            const std::string& text, const HilbertSpace& space) {
    try {
        return parse_operator_expression(text, space);
    } catch (const ParseError& err) {
        v.fail(e.line, what + ": " + err.what());
    }
}

void parse_model(const View& v, ModelSpec& model, HilbertSpace& space) {
    const ConfigEntry& dims_entry = v.require("model", "dims");
    model.dims = v.to_int_list(dims_entry);
    for (int d : model.dims)
        if (d < 1) v.fail(dims_entry.line, "dims entries must be >= 1");
    space = HilbertSpace{model.dims};

    if (const ConfigEntry* h = v.find("model", "hamiltonian")) {
        model.hamiltonian = h->value;
        Operator op = checked_expression(v, *h, "hamiltonian", h->value, space);
        if (!op.is_hermitian()) v.fail(h->line, "hamiltonian is not Hermitian");
    }
    for (const ConfigEntry* j : v.all("model", "jump")) {
        auto toks = split_ws(j->value);
        if (toks.size() < 2) v.fail(j->line, "jump needs '<rate> <expression>'");
        double rate = v.double_token(j->line, "jump", toks[0]);
        if (rate < 0) v.fail(j->line, "jump rate must be >= 0");
        std::string expr = trim(j->value.substr(j->value.find(toks[0]) + toks[0].size()));
        checked_expression(v, *j, "jump", expr, space);
        model.jumps.emplace_back(rate, expr);
    }
    if (const ConfigEntry* init = v.find("model", "initial")) {
        auto toks = split_ws(init->value);
        if (toks.empty() || toks[0] != "basis")
            v.fail(init->line, "initial: expected 'basis <index...>'");
        for (std::size_t k = 1; k < toks.size(); ++k)
            model.initial.push_back(static_cast<int>(v.int_token(init->line, "initial", toks[k])));
        if (model.initial.size() == 1) {
            if (model.initial[0] < 0 || model.initial[0] >= space.total_dim())
                v.fail(init->line, "initial: flat index out of range");
        } else if (model.initial.size() == model.dims.size()) {
            for (std::size_t k = 0; k < model.initial.size(); ++k)
                if (model.initial[k] < 0 || model.initial[k] >= model.dims[k])
                    v.fail(init->line, "initial: factor index out of range");
        } else {
            v.fail(init->line, "initial: give one flat index or one index per factor");
        }
    } else {
        model.initial = {0};
    }
}

void parse_grid(const View& v, TimeGrid& grid, bool force_zero_start) {
    grid.t0 = 0.0;
    if (const ConfigEntry* t0 = v.find("grid", "t0")) {
        grid.t0 = v.to_double(*t0);
        if (force_zero_start && grid.t0 != 0.0) v.fail(t0->line, "this kind starts at t0 = 0");
    }
    const ConfigEntry& t1 = v.require("grid", "t1");
    grid.t1 = v.to_double(t1);
    if (grid.t1 < grid.t0) v.fail(t1.line, "t1 must be >= t0");
    const ConfigEntry& dt = v.require("grid", "dt");
    grid.dt = v.to_double(dt);
    if (!(grid.dt > 0)) v.fail(dt.line, "dt must be > 0");
    grid.sample_every = 1;
    if (const ConfigEntry* se = v.find("grid", "sample_every")) {
        grid.sample_every = static_cast<int>(v.to_int(*se));
        if (grid.sample_every < 1) v.fail(se->line, "sample_every must be >= 1");
    }
}

void parse_observables(const View& v, std::vector<std::string>& out, const HilbertSpace& space) {
    for (const ConfigEntry* o : v.all("observables", "obs")) {
        checked_expression(v, *o, "obs", o->value, space);
        out.push_back(o->value);
    }
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::spectrum: return "spectrum";
        case ExperimentKind::evolve: return "evolve";
        case ExperimentKind::trajectories: return "trajectories";
        case ExperimentKind::qec: return "qec";
        case ExperimentKind::envbench: return "envbench";
        case ExperimentKind::zeno: return "zeno";
    }
    return "spectrum";
}

ConfigFile parse_config_text(const std::string& text, const std::string& path) {
    ConfigFile cf;
    cf.path = path;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw SchemaError(path, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw SchemaError(path, lineno, "empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw SchemaError(path, lineno, "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw SchemaError(path, lineno, "empty key");
        if (section.empty()) throw SchemaError(path, lineno, "key outside any [section]");
        cf.entries.push_back({section, key, value, lineno});
    }
    return cf;
}

ConfigFile read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path, 0, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_overrides(ConfigFile& cf, const std::vector<std::string>& assignments) {
    std::set<std::string> replaced;
    for (const auto& a : assignments) {
        auto eq = a.find('=');
        auto dot = a.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw SchemaError(cf.path, 0, "override '" + a + "': expected section.key=value");
        std::string section = trim(a.substr(0, dot));
        std::string key = trim(a.substr(dot + 1, eq - dot - 1));
        std::string value = trim(a.substr(eq + 1));
        if (section.empty() || key.empty())
            throw SchemaError(cf.path, 0, "override '" + a + "': expected section.key=value");
        std::string id = section + "." + key;
        if (replaced.insert(id).second) {
            auto& es = cf.entries;
            for (auto it = es.begin(); it != es.end();)
                it = (it->section == section && it->key == key) ? es.erase(it) : it + 1;
        }
        cf.entries.push_back({section, key, value, 0});
    }
}

ExperimentConfig parse_experiment(const ConfigFile& cf) {
    View v(cf);
    ExperimentConfig out;
    out.kind = kind_from(v, v.require("experiment", "kind"));
    out.output = v.require("experiment", "output").value;
    if (out.output.empty()) v.fail(v.require("experiment", "output").line, "output must be a path");
    v.restrict_sections(sections_for(out.kind), kind_name(out.kind));

    HilbertSpace space;
    switch (out.kind) {
        case ExperimentKind::spectrum:
            parse_model(v, out.model, space);
            break;
        case ExperimentKind::evolve:
            parse_model(v, out.model, space);
            parse_grid(v, out.grid, false);
            parse_observables(v, out.observables, space);
            break;
        case ExperimentKind::trajectories: {
            parse_model(v, out.model, space);
            parse_grid(v, out.grid, true);
            parse_observables(v, out.observables, space);
            if (const ConfigEntry* e = v.find("scheme", "scheme")) out.scheme = scheme_from(v, *e);
            if (const ConfigEntry* e = v.find("scheme", "n")) {
                out.n_traj = static_cast<int>(v.to_int(*e));
                if (out.n_traj < 1) v.fail(e->line, "n must be >= 1");
            }
            if (const ConfigEntry* e = v.find("scheme", "seed")) out.seed = v.to_u64(*e);
            if (const ConfigEntry* e = v.find("scheme", "beta")) out.beta = v.to_double(*e);
            if (const ConfigEntry* e = v.find("scheme", "conditional_no_jump"))
                out.conditional_no_jump = v.to_bool(*e);
            break;
        }
        case ExperimentKind::qec: {
            if (const ConfigEntry* e = v.find("qec", "gamma")) {
                out.qec_gamma = v.to_double(*e);
                if (out.qec_gamma < 0) v.fail(e->line, "gamma must be >= 0");
            }
            const ConfigEntry& taus = v.require("qec", "tau_list");
            out.qec_tau_list = v.to_double_list(taus);
            for (double tau : out.qec_tau_list)
                if (!(tau > 0)) v.fail(taus.line, "tau_list entries must be > 0");
            break;
        }
        case ExperimentKind::envbench: {
            const ConfigEntry& m = v.require("envbench", "m");
            out.envbench.M = static_cast<int>(v.to_int(m));
            if (out.envbench.M < 0) v.fail(m.line, "m must be >= 0");
            if (const ConfigEntry* e = v.find("envbench", "omega"))
                out.envbench.omega = v.to_double(*e);
            if (const ConfigEntry* e = v.find("envbench", "gbar1")) {
                out.envbench.gbar1 = v.to_double(*e);
                if (!(out.envbench.gbar1 > 0)) v.fail(e->line, "gbar1 must be > 0");
            }
            if (const ConfigEntry* e = v.find("envbench", "rel_sigma")) {
                out.envbench.rel_sigma = v.to_double(*e);
                if (out.envbench.rel_sigma < 0 || out.envbench.rel_sigma >= 1)
                    v.fail(e->line, "rel_sigma must be in [0, 1)");
            }
            if (const ConfigEntry* e = v.find("envbench", "seed"))
                out.envbench.seed = v.to_u64(*e);
            if (const ConfigEntry* e = v.find("envbench", "rwa"))
                out.envbench.rwa = v.to_bool(*e);
            parse_grid(v, out.grid, true);
            break;
        }
        case ExperimentKind::zeno: {
            if (const ConfigEntry* e = v.find("zeno", "g")) {
                out.zeno_g = v.to_double(*e);
                if (!(out.zeno_g > 0)) v.fail(e->line, "g must be > 0");
            }
            if (const ConfigEntry* e = v.find("zeno", "cutoff")) {
                out.zeno_cutoff = static_cast<int>(v.to_int(*e));
                if (out.zeno_cutoff < 1) v.fail(e->line, "cutoff must be >= 1");
            }
            const ConfigEntry& taus = v.require("zeno", "tau_list");
            out.zeno_tau_list = v.to_double_list(taus);
            for (double tau : out.zeno_tau_list)
                if (!(tau > 0)) v.fail(taus.line, "tau_list entries must be > 0");
            if (const ConfigEntry* e = v.find("zeno", "n_cycles")) {
                out.zeno_n_cycles = static_cast<int>(v.to_int(*e));
                if (out.zeno_n_cycles < 2) v.fail(e->line, "n_cycles must be >= 2");
            }
            break;
        }
    }
    return out;
}

std::string format_double(double x) {
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

namespace {

std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (int x : xs) {
        if (!out.empty()) out += ' ';
        out += std::to_string(x);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (double x : xs) {
        if (!out.empty()) out += ' ';
        out += format_double(x);
    }
    return out;
}

}  // namespace

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "kind = " << kind_name(cfg.kind) << "\n";
    out << "output = " << cfg.output << "\n";

    bool has_model = cfg.kind == ExperimentKind::spectrum || cfg.kind == ExperimentKind::evolve ||
                     cfg.kind == ExperimentKind::trajectories;
    bool has_grid = cfg.kind == ExperimentKind::evolve ||
                    cfg.kind == ExperimentKind::trajectories ||
                    cfg.kind == ExperimentKind::envbench;

    if (has_model) {
        out << "\n[model]\n";
        out << "dims = " << join_ints(cfg.model.dims) << "\n";
        if (!cfg.model.hamiltonian.empty())
            out << "hamiltonian = " << cfg.model.hamiltonian << "\n";
        for (const auto& [rate, expr] : cfg.model.jumps)
            out << "jump = " << format_double(rate) << " " << expr << "\n";
        out << "initial = basis " << join_ints(cfg.model.initial) << "\n";
    }
    if (has_grid) {
        out << "\n[grid]\n";
        out << "t0 = " << format_double(cfg.grid.t0) << "\n";
        out << "t1 = " << format_double(cfg.grid.t1) << "\n";
        out << "dt = " << format_double(cfg.grid.dt) << "\n";
        out << "sample_every = " << cfg.grid.sample_every << "\n";
    }
    if (cfg.kind == ExperimentKind::trajectories) {
        out << "\n[scheme]\n";
        const char* scheme = cfg.scheme == UnravelingScheme::counting ? "counting"
                             : cfg.scheme == UnravelingScheme::counting_with_offset
                                 ? "counting_with_offset"
                                 : "homodyne_ideal";
        out << "scheme = " << scheme << "\n";
        out << "n = " << cfg.n_traj << "\n";
        out << "seed = " << cfg.seed << "\n";
        out << "beta = " << format_double(cfg.beta) << "\n";
        out << "conditional_no_jump = " << (cfg.conditional_no_jump ? "true" : "false") << "\n";
    }
    if ((cfg.kind == ExperimentKind::evolve || cfg.kind == ExperimentKind::trajectories) &&
        !cfg.observables.empty()) {
        out << "\n[observables]\n";
        for (const auto& o : cfg.observables) out << "obs = " << o << "\n";
    }
    if (cfg.kind == ExperimentKind::qec) {
        out << "\n[qec]\n";
        out << "gamma = " << format_double(cfg.qec_gamma) << "\n";
        out << "tau_list = " << join_doubles(cfg.qec_tau_list) << "\n";
    }
    if (cfg.kind == ExperimentKind::envbench) {
        out << "\n[envbench]\n";
        out << "m = " << cfg.envbench.M << "\n";
        out << "omega = " << format_double(cfg.envbench.omega) << "\n";
        out << "gbar1 = " << format_double(cfg.envbench.gbar1) << "\n";
        out << "rel_sigma = " << format_double(cfg.envbench.rel_sigma) << "\n";
        out << "seed = " << cfg.envbench.seed << "\n";
        out << "rwa = " << (cfg.envbench.rwa ? "true" : "false") << "\n";
    }
    if (cfg.kind == ExperimentKind::zeno) {
        out << "\n[zeno]\n";
        out << "g = " << format_double(cfg.zeno_g) << "\n";
        out << "cutoff = " << cfg.zeno_cutoff << "\n";
        out << "tau_list = " << join_doubles(cfg.zeno_tau_list) << "\n";
        out << "n_cycles = " << cfg.zeno_n_cycles << "\n";
    }
    return out.str();
}

}  // namespace oqs
