#include "oqs/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>

namespace oqs {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

bool sampled(long step, long n_steps, int every) {
    return step % every == 0 || step == n_steps;
}

void require_inputs(const LindbladModel& model, const Ket& psi0, const TrajectoryConfig& cfg) {
    cfg.validate();
    if (psi0.space != model.space)
        throw InvalidArgument("trajectory: initial ket lives on a different space");
    for (const auto& o : cfg.observables)
        if (o.space != model.space)
            throw InvalidArgument("trajectory: observable lives on a different space");
}

long step_count(const TrajectoryConfig& cfg) {
    long n = std::lround(cfg.t_max / cfg.dt);
    return n < 0 ? 0 : n;
}

void record(TrajectoryResult& out, const TrajectoryConfig& cfg, const HilbertSpace& space,
            const Vec& psi, double t) {
    out.times.push_back(t);
    for (std::size_t k = 0; k < cfg.observables.size(); ++k)
        out.records[k].push_back(psi.dot(cfg.observables[k].matrix * psi));
    if (cfg.store_states) out.states.push_back(Ket{space, psi});
}

TrajectoryResult make_result(const TrajectoryConfig& cfg, std::uint64_t stream) {
    TrajectoryResult out;
    out.seed = cfg.seed;
    out.stream = stream;
    out.records.resize(cfg.observables.size());
    return out;
}

Vec normalized_initial(const Ket& psi0) {
    double n = psi0.amplitudes.norm();
    if (n <= 0) throw InvalidArgument("trajectory: initial ket has zero norm");
    return psi0.amplitudes / n;
}

}  // namespace

void TrajectoryConfig::validate() const {
    if (!(dt > 0)) throw InvalidArgument("TrajectoryConfig: dt must be > 0");
    if (!(t_max >= 0)) throw InvalidArgument("TrajectoryConfig: t_max must be >= 0");
    if (sample_every < 1) throw InvalidArgument("TrajectoryConfig: sample_every must be >= 1");
}

Operator effective_hamiltonian(const LindbladModel& model) {
    Mat h = model.hamiltonian.matrix;
    for (const auto& j : model.jumps)
        h -= cd(0, 0.5 * j.rate) * (j.op.matrix.adjoint() * j.op.matrix);
    return {model.space, std::move(h)};
}

TrajectoryResult run_counting(const LindbladModel& model, const Ket& psi0,
                              const TrajectoryConfig& cfg, std::uint64_t stream) {
    require_inputs(model, psi0, cfg);
    const int d = model.space.total_dim();
    const long n_steps = step_count(cfg);

    std::vector<double> rates;
    std::vector<Mat> ops;
    for (const auto& j : model.jumps) {
        rates.push_back(j.rate);
        ops.push_back(j.op.matrix);
    }
    Mat decay = Mat::Zero(d, d);
    for (std::size_t k = 0; k < ops.size(); ++k)
        decay.noalias() += (0.5 * rates[k]) * (ops[k].adjoint() * ops[k]);
    // first-order no-jump propagator; renormalization restores the norm lost
    // to the anti-Hermitian part
    Mat euler = Mat::Identity(d, d) - cfg.dt * (cd(0, 1) * model.hamiltonian.matrix + decay);

    RandomStream rng(cfg.seed, stream);
    TrajectoryResult out = make_result(cfg, stream);
    Vec psi = normalized_initial(psi0);

    std::vector<double> probs(ops.size());
    std::vector<Vec> gpsi(ops.size());
    bool warned = false;
    record(out, cfg, model.space, psi, 0.0);
    for (long step = 0; step < n_steps; ++step) {
        double ptot = 0;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            gpsi[k].noalias() = ops[k] * psi;
            probs[k] = cfg.dt * rates[k] * gpsi[k].squaredNorm();
            ptot += probs[k];
        }
        if (ptot > 0.5)
            throw NumericError("counting trajectory: step jump probability " + fmt(ptot) +
                               " at step " + std::to_string(step) + " (t = " +
                               fmt(step * cfg.dt) + "); decrease dt");
        if (ptot > 0.1 && !warned) {
            std::cerr << "oqs: counting trajectory: step jump probability " << ptot
                      << " exceeds 0.1; the first-order scheme is inaccurate\n";
            warned = true;
        }
        bool jump = false;
        if (!cfg.conditional_no_jump) jump = rng.uniform() < ptot;
        const double t_next = (step + 1) * cfg.dt;
        if (jump) {
            double u = rng.uniform() * ptot;
            std::size_t mu = ops.size() - 1;
            double cum = 0;
            for (std::size_t k = 0; k < ops.size(); ++k) {
                cum += probs[k];
                if (u < cum) {
                    mu = k;
                    break;
                }
            }
            double jn = gpsi[mu].norm();
            if (jn <= 0) throw NumericError("counting trajectory: jump into a zero state");
            psi = gpsi[mu] / jn;
            out.jump_events.emplace_back(t_next, static_cast<int>(mu));
        } else {
            psi = euler * psi;
            double en = psi.norm();
            if (en <= 0) throw NumericError("counting trajectory: state vanished at step " +
                                            std::to_string(step));
            psi /= en;
        }
        if (sampled(step + 1, n_steps, cfg.sample_every))
            record(out, cfg, model.space, psi, t_next);
    }
    return out;
}

TrajectoryResult run_counting_with_offset(const LindbladModel& model, double beta,
                                          const Ket& psi0, const TrajectoryConfig& cfg,
                                          std::uint64_t stream) {
    if (model.jumps.size() != 1)
        throw CapabilityError("counting_with_offset is implemented for a single jump channel");
    if (beta == 0.0) return run_counting(model, psi0, cfg, stream);

    const int d = model.space.total_dim();
    Mat g = std::sqrt(model.jumps[0].rate) * model.jumps[0].op.matrix;
    Mat shifted = g + beta * Mat::Identity(d, d);
    Mat h = model.hamiltonian.matrix - cd(0, 0.5 * beta) * (g - g.adjoint());
    LindbladModel folded = LindbladModel::make(Operator{model.space, std::move(h)},
                                               {{1.0, Operator{model.space, std::move(shifted)}}});
    return run_counting(folded, psi0, cfg, stream);
}

TrajectoryResult run_homodyne(const LindbladModel& model, const Ket& psi0,
                              const TrajectoryConfig& cfg, std::uint64_t stream) {
    require_inputs(model, psi0, cfg);
    if (model.jumps.size() != 1)
        throw CapabilityError("homodyne unraveling is implemented for a single jump channel");
    const long n_steps = step_count(cfg);

    Mat g = std::sqrt(model.jumps[0].rate) * model.jumps[0].op.matrix;
    Mat drift = cfg.dt * (cd(0, -1) * model.hamiltonian.matrix - 0.5 * (g.adjoint() * g));
    const double sqrt_dt = std::sqrt(cfg.dt);

    RandomStream rng(cfg.seed, stream);
    TrajectoryResult out = make_result(cfg, stream);
    Vec psi = normalized_initial(psi0);

    record(out, cfg, model.space, psi, 0.0);
    for (long step = 0; step < n_steps; ++step) {
        Vec gpsi = g * psi;
        // homodyne current dY = <G + G'> dt + dW drives the diffusive term
        double e = 2.0 * psi.dot(gpsi).real();
        double dw = rng.normal() * sqrt_dt;
        psi = psi + drift * psi + (e * cfg.dt + dw) * gpsi;
        double nn = psi.norm();
        if (nn <= 0) throw NumericError("homodyne trajectory: state vanished at step " +
                                        std::to_string(step));
        psi /= nn;
        if (sampled(step + 1, n_steps, cfg.sample_every))
            record(out, cfg, model.space, psi, (step + 1) * cfg.dt);
    }
    return out;
}

namespace {

TrajectoryResult run_single(const LindbladModel& model, const Ket& psi0,
                            const TrajectoryConfig& cfg, std::uint64_t stream) {
    switch (cfg.scheme) {
        case UnravelingScheme::counting:
            return run_counting(model, psi0, cfg, stream);
        case UnravelingScheme::counting_with_offset:
            return run_counting_with_offset(model, cfg.beta, psi0, cfg, stream);
        case UnravelingScheme::homodyne_ideal:
            return run_homodyne(model, psi0, cfg, stream);
    }
    throw InvalidArgument("unknown unraveling scheme");
}

int thread_count(int n_traj) {
    int n = 0;
    if (const char* env = std::getenv("OQS_THREADS")) n = std::atoi(env);
    if (n < 1) n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    return std::min(n, n_traj);
}

std::vector<TrajectoryResult> run_indexed(const LindbladModel& model,
                                          const std::vector<Ket>& initials,
                                          const TrajectoryConfig& cfg) {
    const int n_traj = static_cast<int>(initials.size());
    std::vector<TrajectoryResult> results(n_traj);
    const int n_threads = thread_count(n_traj);
    if (n_threads == 1) {
        for (int k = 0; k < n_traj; ++k)
            results[k] = run_single(model, initials[k], cfg, static_cast<std::uint64_t>(k));
        return results;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(n_threads);
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (int k = t; k < n_traj; k += n_threads)
                    results[k] =
                        run_single(model, initials[k], cfg, static_cast<std::uint64_t>(k));
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace

std::vector<TrajectoryResult> run_ensemble(const LindbladModel& model, const Ket& psi0,
                                           const TrajectoryConfig& cfg, int n_traj) {
    if (n_traj < 1) throw InvalidArgument("run_ensemble: n_traj must be >= 1");
    return run_indexed(model, std::vector<Ket>(n_traj, psi0), cfg);
}

std::vector<TrajectoryResult> run_ensemble(const LindbladModel& model, const DensityMatrix& rho0,
                                           const TrajectoryConfig& cfg, int n_traj) {
    if (n_traj < 1) throw InvalidArgument("run_ensemble: n_traj must be >= 1");
    if (rho0.space() != model.space)
        throw InvalidArgument("run_ensemble: initial state lives on a different space");
    Eigen::SelfAdjointEigenSolver<Mat> es(rho0.matrix());
    if (es.info() != Eigen::Success)
        throw NumericError("run_ensemble: eigendecomposition of the initial state failed");
    std::vector<double> probs;
    std::vector<Ket> pures;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double p = es.eigenvalues()(i);
        if (p > 1e-12) {
            probs.push_back(p);
            pures.push_back(Ket{model.space, es.eigenvectors().col(i)});
        }
    }
    if (pures.empty()) throw NumericError("run_ensemble: initial state has no support");
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);

    // a dedicated stream draws the initial pure states up front, so the
    // assignment does not depend on the thread schedule
    RandomStream pick(cfg.seed, 0x696e6974ULL);
    std::vector<Ket> initials;
    initials.reserve(n_traj);
    for (int k = 0; k < n_traj; ++k) {
        double u = pick.uniform() * total;
        double cum = 0;
        std::size_t idx = pures.size() - 1;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) {
                idx = i;
                break;
            }
        }
        initials.push_back(pures[idx]);
    }
    return run_indexed(model, initials, cfg);
}

EnsembleStats ensemble_average(const std::vector<TrajectoryResult>& results) {
    if (results.empty()) throw InvalidArgument("ensemble_average: no trajectories");
    const auto& base = results.front();
    for (const auto& r : results) {
        if (r.times != base.times)
            throw InvalidArgument("ensemble_average: trajectories sampled on different grids");
        if (r.records.size() != base.records.size())
            throw InvalidArgument("ensemble_average: trajectories record different observables");
    }
    const std::size_t n_obs = base.records.size();
    const std::size_t n_samples = base.times.size();
    const double n = static_cast<double>(results.size());

    EnsembleStats out;
    out.times = base.times;
    out.mean.assign(n_obs, std::vector<cd>(n_samples, 0.0));
    out.stderr_.assign(n_obs, std::vector<cd>(n_samples, 0.0));
    out.has_stderr = results.size() > 1;
    for (std::size_t k = 0; k < n_obs; ++k) {
        for (std::size_t s = 0; s < n_samples; ++s) {
            cd sum = 0;
            for (const auto& r : results) sum += r.records[k][s];
            cd mean = sum / n;
            out.mean[k][s] = mean;
            if (!out.has_stderr) continue;
            double vr = 0, vi = 0;
            for (const auto& r : results) {
                cd dev = r.records[k][s] - mean;
                vr += dev.real() * dev.real();
                vi += dev.imag() * dev.imag();
            }
            vr /= (n - 1) * n;
            vi /= (n - 1) * n;
            out.stderr_[k][s] = cd(std::sqrt(vr), std::sqrt(vi));
        }
    }
    return out;
}

LindbladModel state_transfer_model(double gamma1, double gamma2, double gamma_c) {
    HilbertSpace space{2, 2};
    Operator sm1 = embed(pauli(PauliAxis::minus), 0, space);
    Operator sm2 = embed(pauli(PauliAxis::minus), 1, space);
    Operator collective = cd(1.0 / std::sqrt(2.0), 0.0) * (sm1 + sm2);
    return LindbladModel::make(zero_operator(space),
                               {{gamma1, sm1}, {gamma2, sm2}, {gamma_c, collective}});
}

Ket state_transfer_initial() { return basis_ket(HilbertSpace{2, 2}, {0, 1}); }

std::vector<Operator> state_transfer_observables() {
    HilbertSpace space{2, 2};
    Operator excited = pauli(PauliAxis::plus) * pauli(PauliAxis::minus);
    Operator n1 = embed(excited, 0, space);
    Operator n2 = embed(excited, 1, space);
    Vec singlet = Vec::Zero(4);
    singlet(1) = 1.0 / std::sqrt(2.0);
    singlet(2) = -1.0 / std::sqrt(2.0);
    Operator projector{space, singlet * singlet.adjoint()};
    return {n1, n2, projector};
}

TrajectoryResult state_transfer_scenario(double gamma1, double gamma2, double gamma_c,
                                         const TrajectoryConfig& cfg, std::uint64_t stream) {
    TrajectoryConfig local = cfg;
    local.observables = state_transfer_observables();
    return run_single(state_transfer_model(gamma1, gamma2, gamma_c), state_transfer_initial(),
                      local, stream);
}

}  // namespace oqs
