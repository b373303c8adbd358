// Stochastic unravelings of the master equation: counting (quantum jump)
// trajectories, the finite-offset counting scheme, and ideal homodyne
// detection, plus ensemble statistics and the dissipative state-transfer
// scenario.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "oqs/random.hpp"
#include "oqs/superop.hpp"

namespace oqs {

enum class UnravelingScheme { counting, counting_with_offset, homodyne_ideal };

struct TrajectoryConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    std::uint64_t seed = 0;
    UnravelingScheme scheme = UnravelingScheme::counting;
    double beta = 0.0;  // counting_with_offset only
    int sample_every = 1;
    bool conditional_no_jump = false;  // suppress jumps, follow the no-jump branch
    bool store_states = false;
    std::vector<Operator> observables;

    void validate() const;
};

struct TrajectoryResult {
    std::vector<double> times;
    // One record per configured observable, indexed [observable][sample].
    std::vector<std::vector<cd>> records;
    std::vector<Ket> states;  // filled when store_states
    std::vector<std::pair<double, int>> jump_events;  // (time, channel index)
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// H - (i/2) sum_mu gamma_mu G_mu' G_mu; the state-dependent mean term is
// handled by per-step renormalization instead.
Operator effective_hamiltonian(const LindbladModel& model);

// One counting trajectory: per step at most one jump fires, channel mu with
// probability dt * gamma_mu <G'G>; otherwise a first-order step under the
// effective Hamiltonian followed by renormalization. Warns when the total
// step probability passes 0.1 and throws NumericError above 0.5.
TrajectoryResult run_counting(const LindbladModel& model, const Ket& psi0,
                              const TrajectoryConfig& cfg, std::uint64_t stream = 0);

// Counting with the jump operator displaced by a real offset beta
// (rate-folded G -> G + beta, H -> H - (i beta/2)(G - G')). beta = 0
// reproduces run_counting bit for bit. Single-channel models only.
TrajectoryResult run_counting_with_offset(const LindbladModel& model, double beta,
                                          const Ket& psi0, const TrajectoryConfig& cfg,
                                          std::uint64_t stream = 0);

// Euler-Maruyama step of the diffusive (ideal homodyne) unraveling with
// per-step renormalization; dW ~ Normal(0, dt). Single-channel models only.
TrajectoryResult run_homodyne(const LindbladModel& model, const Ket& psi0,
                              const TrajectoryConfig& cfg, std::uint64_t stream = 0);

// n_traj trajectories on per-trajectory RNG streams (seed, index), run
// concurrently (OQS_THREADS overrides the thread count) and merged by
// index, so the result is independent of the execution schedule.
std::vector<TrajectoryResult> run_ensemble(const LindbladModel& model, const Ket& psi0,
                                           const TrajectoryConfig& cfg, int n_traj);

// Mixed initial state: each trajectory samples a pure state from the
// eigendecomposition of rho0 before running.
std::vector<TrajectoryResult> run_ensemble(const LindbladModel& model, const DensityMatrix& rho0,
                                           const TrajectoryConfig& cfg, int n_traj);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<std::vector<cd>> mean;     // [observable][sample]
    std::vector<std::vector<cd>> stderr_;  // std error of re/im parts, packed
    bool has_stderr;                       // false for a single trajectory
};

EnsembleStats ensemble_average(const std::vector<TrajectoryResult>& results);

// Two qubits with local decay (gamma1, gamma2) and the collective channel
// (sigma-_1 + sigma-_2)/sqrt(2) at rate gamma_c, starting from |e,g>.
// Records <sigma+sigma-> of each qubit and the |Psi-> projector.
TrajectoryResult state_transfer_scenario(double gamma1, double gamma2, double gamma_c,
                                         const TrajectoryConfig& cfg, std::uint64_t stream = 0);

// The model and initial state used by state_transfer_scenario, exposed for
// ensemble runs.
LindbladModel state_transfer_model(double gamma1, double gamma2, double gamma_c);
Ket state_transfer_initial();
std::vector<Operator> state_transfer_observables();

}  // namespace oqs
