// Liouvillian-based error-correction analysis: coherence times from the
// single-qubit spectrum, the two-qubit logical-subsystem check, and the
// three-qubit repetition code with its detect-and-recover cycle map.
#pragma once

#include <cstdint>
#include <vector>

#include "oqs/superop.hpp"

namespace oqs {

struct CoherenceReport {
    double t1;  // population relaxation time
    double t2;  // coherence time
    bool infinite;  // every rate zero
    Spectrum spec;
};

// Spectrum of gamma1 D[sigma-] (+ gammaphi D[sigma_z]); T1 and T2 are read
// off the modes with the largest overlap with sigma_z and sigma+.
CoherenceReport single_qubit_coherence(double gamma1, double gamma_phi = 0.0);

struct TwoQubitReport {
    std::vector<cd> joint_eigenvalues;  // 16 values, sorted
    double minkowski_mismatch;   // multiset distance to the sum of single-qubit spectra
    double max_reduced_deviation;  // reduced qubit-1 evolution vs the single-qubit formula
};

// Two non-interacting decaying qubits: the joint spectrum is the Minkowski
// sum of the single-qubit spectra, and tracing out qubit 2 reproduces the
// single-qubit evolution regardless of gamma2.
TwoQubitReport two_qubit_logical_demo(double gamma1, double gamma2, int n_random = 20,
                                      std::uint64_t seed = 7);

struct RepetitionCode {
    HilbertSpace space;  // three qubits
    // Sector order: syndromes (1,1), (-1,1), (-1,-1), (1,-1).
    std::vector<std::pair<int, int>> syndromes;
    std::vector<Operator> projectors;
    std::vector<Operator> recoveries;  // identity, X1, X2, X3
    Ket zero_logical;                  // |000>
    Ket one_logical;                   // |111>
};

RepetitionCode build_repetition_code();

// Unread syndrome measurement followed by the conditioned recovery gate:
// Kraus operators O_j P_j.
SuperOp recovery_superop(const RepetitionCode& code);

struct CycleMap {
    double tau;
    SuperOp map;                     // R exp(L tau)
    std::vector<cd> eigenvalues;     // eps_j of the map
    std::vector<double> lambda_eff;  // ln|eps_j| / tau
    std::vector<double> phases;      // arg eps_j, reported separately
    std::vector<int> logical_modes;  // 4 eigenmode indices spanning the logical algebra
    double lambda_eff_logical;       // worst |lambda_eff| among the logical modes
};

// Free evolution under gamma (D[sx1]+D[sx2]+D[sx3]) for time tau followed by
// one perfect detect-and-recover step. Logical modes are the four
// eigenmatrices with the largest HS projection onto span{I_L, X_L, Y_L, Z_L}.
CycleMap cycle_map(double gamma, double tau);

struct RatioRow {
    double tau;
    double lambda_eff_logical;
    double bare_rate;  // unencoded coherence decay 2*gamma
    double ratio;      // NaN when gamma = 0
};

std::vector<RatioRow> logical_error_ratio(double gamma, const std::vector<double>& tau_list);

}  // namespace oqs
