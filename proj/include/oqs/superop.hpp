// Superoperators on vectorized density matrices.
//
// Vectorization is row-major: vec(X)[i*d + j] = X(i, j), so a 2x2 matrix
// [[a, b], [c, d]] becomes (a, b, c, d).  With that convention
//   vec(A X B) = (A kron B^T) vec(X),
// left multiplication is O kron Id and right multiplication is Id kron O^T.
#pragma once

#include <vector>

#include "oqs/algebra.hpp"

namespace oqs {

// A jump channel: rate gamma >= 0 together with the (unscaled) jump
// operator. Rates are kept separate from the operators so rate sweeps never
// rebuild operators; folding sqrt(gamma) into the operator and setting the
// rate to 1 describes the same dissipator.
struct JumpChannel {
    double rate;
    Operator op;
};

struct LindbladModel {
    HilbertSpace space;
    Operator hamiltonian;
    std::vector<JumpChannel> jumps;

    // Validates Hermiticity of H, non-negative rates and matching spaces.
    static LindbladModel make(Operator h, std::vector<JumpChannel> jumps = {});
};

// Linear map acting on vectorized operators of a d-dimensional space; the
// matrix is d^2 x d^2.
struct SuperOp {
    HilbertSpace space;
    Mat matrix;

    SuperOp operator+(const SuperOp& other) const;
    SuperOp operator-(const SuperOp& other) const;
    SuperOp operator*(const SuperOp& other) const;
    friend SuperOp operator*(cd scalar, const SuperOp& s);

    // devectorize(matrix * vectorize(x)).
    Operator apply(const Operator& x) const;
};

Vec vectorize(const Mat& x);
Mat devectorize(const Vec& v, Eigen::Index d);
Vec vectorize(const Operator& x);
Operator devectorize(const Vec& v, const HilbertSpace& space);

SuperOp left_action(const Operator& op);
SuperOp right_action(const Operator& op);
SuperOp identity_superop(const HilbertSpace& space);

// gamma * (G . G'  -  1/2 {G'G, .}) as a matrix on vectorized operators.
SuperOp dissipator(double rate, const Operator& op);

// -i [H, .] + sum of dissipators.
SuperOp build_liouvillian(const LindbladModel& model);

// Right-hand side of the master equation evaluated directly on the matrix
// rho, without forming the d^2 x d^2 superoperator.
Mat lindblad_rhs(const LindbladModel& model, const Mat& rho);

// Superoperator of the channel rho -> sum_k M_k rho M_k'.
SuperOp kraus_to_superop(const HilbertSpace& space, const std::vector<Mat>& kraus);

// Choi matrix: C[(i,k),(j,l)] = S[(i,j),(k,l)]. The map is completely
// positive iff C is positive semidefinite.
Mat choi_matrix(const SuperOp& s);

bool is_completely_positive(const SuperOp& s, double tol = 1e-8);
bool is_trace_preserving(const SuperOp& s, double tol = 1e-10);

// Full eigensystem of a superoperator. Eigenvalues are sorted by ascending
// (|Re|, |Im|, Im) so a stationary eigenvalue comes first and conjugate
// pairs sit together; remaining ties break lexicographically on the
// canonical eigenmatrix entries. Right eigenmatrices are devectorized
// eigenvectors with a canonical phase (largest-magnitude entry real
// positive) and scale (unit trace when the trace is resolvable, else unit
// HS norm). Left eigenmatrices come from the rows of the inverse of the
// right-eigenvector matrix, so Tr[sigma_j' rho_k] = delta_jk up to the
// inversion error.
struct Spectrum {
    HilbertSpace space;
    std::vector<cd> eigenvalues;
    std::vector<Operator> right;
    std::vector<Operator> left;
    std::vector<double> residuals;  // ||L rho_k - lambda_k rho_k|| / ||rho_k||
    bool diagonalizable;            // false when the eigenbasis is ill-conditioned
    double condition_estimate;      // ||R||_1 ||R^-1||_1 of the eigenvector matrix
};

Spectrum spectrum(const SuperOp& liouvillian, int dense_limit = 32);

struct SteadyStates {
    // Hermitian basis of the kernel; elements with a resolvable trace are
    // normalized to unit trace, the others to unit HS norm and flagged.
    std::vector<Operator> states;
    std::vector<bool> traceless;
};

// Kernel of the superoperator. Dense eigendecomposition up to the dense
// limit; beyond it only a single state is found, by shifted inverse
// iteration.
SteadyStates steady_states(const SuperOp& liouvillian, double tol = 1e-8,
                           int dense_limit = 32);

struct GapReport {
    double gap;             // smallest |Re lambda| among nonzero eigenvalues
    int zero_multiplicity;  // eigenvalues with |lambda| <= tol
};

// Asymptotic decay rate; warns on a degenerate kernel and throws
// NumericError when every eigenvalue is zero.
GapReport liouvillian_gap(const Spectrum& s, double tol = 1e-8);

// Coefficients of rho0 in the eigenbasis: c_k = Tr[sigma_k' rho0], so that
// rho0 = sum_k c_k rho_k.
struct DecompositionCoefficients {
    std::vector<cd> c;
    double reconstruction_error;  // HS norm of rho0 - sum_k c_k rho_k
};

DecompositionCoefficients decompose(const Operator& rho0, const Spectrum& s);
DecompositionCoefficients decompose(const DensityMatrix& rho0, const Spectrum& s);

// rho(t) = sum_k c_k e^{lambda_k t} rho_k.
DensityMatrix spectral_evolve(const DensityMatrix& rho0, const Spectrum& s, double t);
Operator spectral_evolve(const Operator& rho0, const Spectrum& s, double t);

// exp(t L): spectral form when diagonalizable, scaling-and-squaring
// fallback otherwise.
SuperOp superop_exp(const SuperOp& s, double t);

// A unitary V is a strong symmetry when it commutes with H and with every
// jump operator individually.
struct StrongSymmetryReport {
    bool symmetric;
    double hamiltonian_commutator;          // Frobenius norm of [H, V]
    std::vector<double> jump_commutators;   // per channel
};

StrongSymmetryReport check_strong_symmetry(const LindbladModel& model, const Operator& v,
                                           double tol = 1e-10);

// Block structure of a superoperator under the weak symmetry
// U = V . V'. V must be unitary and diagonal in the working basis (rotate
// the model first otherwise); basis element |m><n| then carries eigenphase
// arg(V_mm conj(V_nn)) and the superoperator cannot couple distinct
// phases. Throws when [S, U] fails to vanish.
struct WeakSymmetryBlocks {
    std::vector<int> sector_labels;                  // per vectorized basis index
    std::vector<double> phases;                      // representative per sector
    std::vector<std::vector<Eigen::Index>> sectors;  // basis indices per sector
    std::vector<Mat> blocks;                         // restriction per sector
    bool verified;                                   // no cross-sector coupling above 1e-10
    double max_cross_sector;                         // largest off-block entry
};

WeakSymmetryBlocks weak_symmetry_blocks(const SuperOp& s, const Operator& v);

}  // namespace oqs
