// Deterministic time evolution: fixed-step RK4 master-equation and closed
// (pure-state) integrators, plus two scripted experiments built on them
// (random-environment qubit benchmark, repeated-interaction damping).
#pragma once

#include <cstdint>
#include <vector>

#include "oqs/superop.hpp"

namespace oqs {

struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 1e-3;
    int sample_every = 1;

    void validate() const;
    long n_steps() const;  // llround((t1 - t0) / dt)
};

struct MasterEvolution {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

struct ClosedEvolution {
    std::vector<double> times;
    std::vector<Ket> states;
};

// RK4 on the density matrix with Hermitization each step. Samples are taken
// at step 0, every sample_every steps, and at the final step; each sample is
// re-validated (trace drift at most 1e-8 per unit time, eigenvalue floor
// -1e-6) and a violation raises NumericError naming the step. Warns once
// when dt exceeds 0.1 / (max rate + ||H||).
MasterEvolution evolve_master(const LindbladModel& model, const DensityMatrix& rho0,
                              const TimeGrid& grid);

// Norm-preserving RK4 (renormalized each step) for a Hermitian Hamiltonian.
ClosedEvolution evolve_closed(const Operator& h, const Ket& psi0, const TimeGrid& grid);

// Qubit of frequency omega coupled to M randomly drawn environment modes,
// each truncated to a single excitation. Frequencies omega_i and couplings
// g_i are drawn i.i.d. normal (relative spread rel_sigma, mean coupling
// gbar1/M), omega_i first, then g_i, from RandomStream(seed).
struct EnvBenchParams {
    int M = 0;
    double omega = 1.0;
    double gbar1 = 1e-3;
    double rel_sigma = 0.05;
    std::uint64_t seed = 1;
    // Rotating-wave mode works in the single-excitation sector (dimension
    // M+1, interaction-picture detunings); the full sigma_x coupling on
    // 2^(M+1) dimensions is kept for validating the approximation at small M.
    bool rwa = true;
};

struct EnvBenchResult {
    std::vector<double> times;
    std::vector<double> excitation;  // qubit <sigma+ sigma->
};

EnvBenchResult random_environment_benchmark(const EnvBenchParams& p, const TimeGrid& grid);

// Time of the first excitation revival after the initial decay: with
// normalized depth dn(t) = (1 - x(t)) / max(1 - x), the decay is considered
// complete at the first dn >= 0.8 and the revival is the first later sample
// with dn <= 0.25 * median of the post-decay tail. Returns +inf when the
// horizon contains no revival and NaN when nothing decays at all.
double revival_time(const std::vector<double>& ts, const std::vector<double>& xs);

// Cavity repeatedly coupled to a fresh ancilla qubit for time tau under the
// resonant exchange g(a' sigma- + a sigma+), followed by an unread
// measurement that also resets the ancilla. Starts from Fock |cutoff> and
// fits the exponential decay of <a'a> over the first 5 e-foldings (or
// n_cycles, whichever is smaller).
struct RepeatedInteractionParams {
    double g = 1.0;
    double tau = 0.05;
    int n_cycles = 1000;
    int cutoff = 1;
};

struct RepeatedInteractionResult {
    double gamma_eff;
    SuperOp cycle;                       // single-cycle map on the cavity
    std::vector<double> photon_numbers;  // <a'a> after each cycle, index 0 = initial
};

RepeatedInteractionResult repeated_interaction_map(const RepeatedInteractionParams& p);

}  // namespace oqs
