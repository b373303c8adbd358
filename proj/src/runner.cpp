#include "oqs/runner.hpp"

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>

#include "oqs/expr.hpp"
#include "oqs/qec.hpp"

namespace oqs {

namespace {

std::string column_label(const std::string& expr) {
    std::string s;
    for (char c : expr)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    return s;
}

std::string avg_path(const std::string& path) {
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return path + "_avg";
    return path.substr(0, dot) + "_avg" + path.substr(dot);
}

class CsvFile {
  public:
    explicit CsvFile(const std::string& path) : out_(path) {
        if (!out_) throw Error("cannot open output file " + path);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

LindbladModel build_model(const ModelSpec& spec, const HilbertSpace& space) {
    Operator h = spec.hamiltonian.empty() ? zero_operator(space)
                                          : parse_operator_expression(spec.hamiltonian, space);
    std::vector<JumpChannel> jumps;
    for (const auto& [rate, expr] : spec.jumps)
        jumps.push_back({rate, parse_operator_expression(expr, space)});
    return LindbladModel::make(std::move(h), std::move(jumps));
}

Ket build_initial(const ModelSpec& spec, const HilbertSpace& space) {
    if (spec.initial.size() == 1) return basis_ket(space, spec.initial[0]);
    return basis_ket(space, spec.initial);
}

std::vector<Operator> build_observables(const ExperimentConfig& cfg,
                                        const HilbertSpace& space) {
    std::vector<Operator> obs;
    for (const auto& o : cfg.observables) obs.push_back(parse_operator_expression(o, space));
    return obs;
}

void run_spectrum(const ExperimentConfig& cfg, RunArtifacts& art) {
    HilbertSpace space{cfg.model.dims};
    Spectrum s = spectrum(build_liouvillian(build_model(cfg.model, space)));
    CsvFile csv(cfg.output);
    csv.row({"index", "re_lambda", "im_lambda"});
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
        csv.row({std::to_string(k), format_double(s.eigenvalues[k].real()),
                 format_double(s.eigenvalues[k].imag())});
    art.outputs.push_back(cfg.output);
}

void run_evolve(const ExperimentConfig& cfg, RunArtifacts& art) {
    HilbertSpace space{cfg.model.dims};
    LindbladModel model = build_model(cfg.model, space);
    DensityMatrix rho0 = DensityMatrix::from_ket(build_initial(cfg.model, space));
    MasterEvolution evo = evolve_master(model, rho0, cfg.grid);
    std::vector<Operator> obs = build_observables(cfg, space);

    CsvFile csv(cfg.output);
    std::vector<std::string> header = {"time"};
    for (const auto& o : cfg.observables) {
        header.push_back(column_label(o) + "_re");
        header.push_back(column_label(o) + "_im");
    }
    csv.row(header);
    for (std::size_t t = 0; t < evo.times.size(); ++t) {
        std::vector<std::string> cells = {format_double(evo.times[t])};
        for (const auto& op : obs) {
            cd val = expectation(op, evo.states[t]);
            cells.push_back(format_double(val.real()));
            cells.push_back(format_double(val.imag()));
        }
        csv.row(cells);
    }
    art.outputs.push_back(cfg.output);
}

void run_trajectories(const ExperimentConfig& cfg, RunArtifacts& art) {
    HilbertSpace space{cfg.model.dims};
    LindbladModel model = build_model(cfg.model, space);
    Ket psi0 = build_initial(cfg.model, space);

    TrajectoryConfig tc;
    tc.dt = cfg.grid.dt;
    tc.t_max = cfg.grid.t1;
    tc.seed = cfg.seed;
    tc.scheme = cfg.scheme;
    tc.beta = cfg.beta;
    tc.sample_every = cfg.grid.sample_every;
    tc.conditional_no_jump = cfg.conditional_no_jump;
    tc.observables = build_observables(cfg, space);

    std::vector<TrajectoryResult> results = run_ensemble(model, psi0, tc, cfg.n_traj);

    CsvFile csv(cfg.output);
    std::vector<std::string> header = {"time", "traj_id"};
    for (const auto& o : cfg.observables) {
        header.push_back(column_label(o) + "_re");
        header.push_back(column_label(o) + "_im");
    }
    csv.row(header);
    for (std::size_t k = 0; k < results.size(); ++k) {
        const auto& r = results[k];
        for (std::size_t t = 0; t < r.times.size(); ++t) {
            std::vector<std::string> cells = {format_double(r.times[t]), std::to_string(k)};
            for (const auto& rec : r.records) {
                cells.push_back(format_double(rec[t].real()));
                cells.push_back(format_double(rec[t].imag()));
            }
            csv.row(cells);
        }
    }
    art.outputs.push_back(cfg.output);

    EnsembleStats stats = ensemble_average(results);
    std::string avg = avg_path(cfg.output);
    CsvFile avg_csv(avg);
    std::vector<std::string> avg_header = {"time"};
    for (const auto& o : cfg.observables) {
        avg_header.push_back(column_label(o) + "_mean_re");
        avg_header.push_back(column_label(o) + "_mean_im");
        avg_header.push_back(column_label(o) + "_stderr_re");
        avg_header.push_back(column_label(o) + "_stderr_im");
    }
    avg_csv.row(avg_header);
    for (std::size_t t = 0; t < stats.times.size(); ++t) {
        std::vector<std::string> cells = {format_double(stats.times[t])};
        for (std::size_t k = 0; k < stats.mean.size(); ++k) {
            cells.push_back(format_double(stats.mean[k][t].real()));
            cells.push_back(format_double(stats.mean[k][t].imag()));
            cells.push_back(format_double(stats.stderr_[k][t].real()));
            cells.push_back(format_double(stats.stderr_[k][t].imag()));
        }
        avg_csv.row(cells);
    }
    art.outputs.push_back(avg);
}

void run_qec(const ExperimentConfig& cfg, RunArtifacts& art) {
    std::vector<RatioRow> rows = logical_error_ratio(cfg.qec_gamma, cfg.qec_tau_list);
    CsvFile csv(cfg.output);
    csv.row({"tau", "lambda_eff_logical", "bare_rate", "ratio"});
    for (const auto& r : rows)
        csv.row({format_double(r.tau), format_double(r.lambda_eff_logical),
                 format_double(r.bare_rate), format_double(r.ratio)});
    art.outputs.push_back(cfg.output);
}

void run_envbench(const ExperimentConfig& cfg, RunArtifacts& art) {
    EnvBenchResult res = random_environment_benchmark(cfg.envbench, cfg.grid);
    CsvFile csv(cfg.output);
    csv.row({"time", "excitation"});
    for (std::size_t t = 0; t < res.times.size(); ++t)
        csv.row({format_double(res.times[t]), format_double(res.excitation[t])});
    art.outputs.push_back(cfg.output);
}

void run_zeno(const ExperimentConfig& cfg, RunArtifacts& art) {
    CsvFile csv(cfg.output);
    csv.row({"tau", "gamma_eff", "g_squared_tau"});
    for (double tau : cfg.zeno_tau_list) {
        RepeatedInteractionParams p{cfg.zeno_g, tau, cfg.zeno_n_cycles, cfg.zeno_cutoff};
        RepeatedInteractionResult r = repeated_interaction_map(p);
        csv.row({format_double(tau), format_double(r.gamma_eff),
                 format_double(cfg.zeno_g * cfg.zeno_g * tau)});
    }
    art.outputs.push_back(cfg.output);
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& cfg) {
    auto t_start = std::chrono::steady_clock::now();
    RunArtifacts art;
    switch (cfg.kind) {
        case ExperimentKind::spectrum: run_spectrum(cfg, art); break;
        case ExperimentKind::evolve: run_evolve(cfg, art); break;
        case ExperimentKind::trajectories: run_trajectories(cfg, art); break;
        case ExperimentKind::qec: run_qec(cfg, art); break;
        case ExperimentKind::envbench: run_envbench(cfg, art); break;
        case ExperimentKind::zeno: run_zeno(cfg, art); break;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    std::string meta = cfg.output + ".meta";
    std::ofstream out(meta);
    if (!out) throw Error("cannot open output file " + meta);
    char wall_buf[32];
    std::snprintf(wall_buf, sizeof wall_buf, "%.3f", wall);
    out << "# oqs " << kToolVersion << "\n";
    out << "# wall time: " << wall_buf << " s\n";
    out << render_config(cfg);
    art.outputs.push_back(meta);
    return art;
}

}  // namespace oqs
