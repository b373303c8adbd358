// Operators, states and tensor-product plumbing on finite Hilbert spaces.
//
// Conventions used throughout:
//   - Fock basis ascending |0>,|1>,...  on bosonic factors.
//   - Qubit basis |up> (= excited |e>, logical |1|) first, so
//     sigma_z = diag(+1,-1) and sigma_minus |up> = |down>.
#pragma once

#include <complex>
#include <initializer_list>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "oqs/errors.hpp"

namespace oqs {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Kronecker product, usable on any dense Eigen expressions.
template <typename DA, typename DB>
Mat kron(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

struct HilbertSpace {
    std::vector<int> dims;

    HilbertSpace() = default;
    HilbertSpace(std::initializer_list<int> d) : dims(d) { check(); }
    explicit HilbertSpace(std::vector<int> d) : dims(std::move(d)) { check(); }

    int total_dim() const {
        int n = 1;
        for (int d : dims) n *= d;
        return n;
    }
    int n_factors() const { return static_cast<int>(dims.size()); }
    bool operator==(const HilbertSpace& o) const { return dims == o.dims; }
    bool operator!=(const HilbertSpace& o) const { return !(*this == o); }

  private:
    void check() const {
        if (dims.empty()) throw InvalidArgument("HilbertSpace needs at least one factor");
        for (int d : dims)
            if (d < 1) throw InvalidArgument("HilbertSpace factor dimension must be >= 1");
    }
};

struct Operator {
    HilbertSpace space;
    Mat matrix;

    Operator() = default;
    Operator(HilbertSpace s, Mat m) : space(std::move(s)), matrix(std::move(m)) {
        if (matrix.rows() != matrix.cols() || matrix.rows() != space.total_dim())
            throw InvalidArgument("Operator matrix side must equal the space dimension");
    }

    int dim() const { return space.total_dim(); }
    Operator adjoint() const { return {space, matrix.adjoint()}; }
    cd trace() const { return matrix.trace(); }
    double hs_norm() const { return matrix.norm(); }
    bool is_hermitian(double tol = 1e-10) const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

    Operator operator+(const Operator& o) const {
        require_same_space(o);
        return {space, matrix + o.matrix};
    }
    Operator operator-(const Operator& o) const {
        require_same_space(o);
        return {space, matrix - o.matrix};
    }
    Operator operator*(const Operator& o) const {
        require_same_space(o);
        return {space, matrix * o.matrix};
    }
    Operator operator*(cd c) const { return {space, c * matrix}; }
    Operator operator-() const { return {space, -matrix}; }
    friend Operator operator*(cd c, const Operator& o) { return o * c; }

    void require_same_space(const Operator& o) const {
        if (space != o.space) throw InvalidArgument("operators live on different spaces");
    }
};

struct Ket {
    HilbertSpace space;
    Vec amplitudes;

    Ket() = default;
    Ket(HilbertSpace s, Vec v) : space(std::move(s)), amplitudes(std::move(v)) {
        if (amplitudes.size() != space.total_dim())
            throw InvalidArgument("Ket length must equal the space dimension");
    }

    double norm() const { return amplitudes.norm(); }
    Ket normalized() const {
        double n = norm();
        if (n <= 0) throw NumericError("cannot normalize a zero ket");
        return {space, amplitudes / n};
    }
};

class DensityMatrix {
  public:
    // Validates the three state properties (unit trace, Hermiticity, PSD up
    // to the floor). Integrator output may legitimately carry larger
    // negativity transients, hence the adjustable floor.
    static DensityMatrix validated(const Operator& op, double trace_tol = 1e-10,
                                   double herm_tol = 1e-10, double psd_floor = -1e-8);
    static DensityMatrix from_ket(const Ket& psi);

    const Operator& op() const { return op_; }
    const HilbertSpace& space() const { return op_.space; }
    const Mat& matrix() const { return op_.matrix; }
    int dim() const { return op_.dim(); }

  private:
    explicit DensityMatrix(Operator op) : op_(std::move(op)) {}
    Operator op_;
};

enum class PauliAxis { x, y, z, plus, minus };

Operator annihilation(int cutoff);
Operator number_operator(int cutoff);
Operator pauli(PauliAxis axis);
Operator identity(const HilbertSpace& space);
Operator zero_operator(const HilbertSpace& space);

Operator tensor(const std::vector<Operator>& ops);
Operator embed(const Operator& op, int site, const HilbertSpace& space);
Operator partial_trace(const Operator& op, const std::set<int>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep);

cd expectation(const Operator& op, const Ket& psi);
cd expectation(const Operator& op, const DensityMatrix& rho);

// Basis vector |index> of the full space, or one index per factor.
Ket basis_ket(const HilbertSpace& space, int index);
Ket basis_ket(const HilbertSpace& space, const std::vector<int>& indices);
Ket fock(int cutoff, int n);

}  // namespace oqs
