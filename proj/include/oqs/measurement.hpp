// Projective and generalized (POVM) measurements: validation, read
// (outcome-conditioned) and unread (averaged) application, Born-rule
// sampling.
#pragma once

#include <string>
#include <vector>

#include "oqs/random.hpp"
#include "oqs/superop.hpp"

namespace oqs {

struct PovmOutcome {
    std::string label;
    Operator op;
};

struct PovmSet {
    HilbertSpace space;
    std::vector<PovmOutcome> outcomes;
};

struct PovmReport {
    bool valid;                 // completeness sum M'M = 1 within 1e-10
    double completeness_error;  // max-abs deviation of the completeness sum
    bool projective;            // Hermitian, idempotent, pairwise orthogonal
    double projective_error;    // max violation of those three conditions
};

PovmReport validate_povm(const PovmSet& set);

// (M_r rho M_r' / p_r, p_r). Throws ImpossibleOutcome when p_r <= 1e-14 and
// InvalidArgument for an unknown label.
std::pair<DensityMatrix, double> apply_read(const DensityMatrix& rho, const PovmSet& set,
                                            const std::string& label);

// sum_r M_r rho M_r'.
DensityMatrix apply_unread(const DensityMatrix& rho, const PovmSet& set);

// Draws a label with the Born probability Tr[M_r rho M_r'].
std::string sample_outcome(const DensityMatrix& rho, const PovmSet& set, RandomStream& rng);

// Superoperator of the unread measurement.
SuperOp povm_superop(const PovmSet& set);

}  // namespace oqs
