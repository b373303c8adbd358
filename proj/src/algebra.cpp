#include "oqs/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace oqs {

DensityMatrix DensityMatrix::validated(const Operator& op, double trace_tol, double herm_tol,
                                       double psd_floor) {
    if (std::abs(op.trace() - cd(1.0, 0.0)) > trace_tol)
        throw InvalidArgument("density matrix trace differs from 1 beyond tolerance");
    if (!op.is_hermitian(herm_tol))
        throw InvalidArgument("density matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (op.matrix + op.matrix.adjoint()),
                                          Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < psd_floor)
        throw InvalidArgument("density matrix has an eigenvalue below the PSD floor");
    return DensityMatrix(op);
}

DensityMatrix DensityMatrix::from_ket(const Ket& psi) {
    Ket n = psi.normalized();
    return DensityMatrix(Operator{n.space, n.amplitudes * n.amplitudes.adjoint()});
}

Operator annihilation(int cutoff) {
    if (cutoff < 1) throw InvalidArgument("annihilation needs cutoff >= 1");
    Mat a = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {HilbertSpace{cutoff + 1}, a};
}

Operator number_operator(int cutoff) {
    Operator a = annihilation(cutoff);
    return a.adjoint() * a;
}

Operator pauli(PauliAxis axis) {
    Mat m(2, 2);
    switch (axis) {
        case PauliAxis::x: m << 0, 1, 1, 0; break;
        case PauliAxis::y: m << 0, cd(0, -1), cd(0, 1), 0; break;
        case PauliAxis::z: m << 1, 0, 0, -1; break;
        case PauliAxis::plus: m << 0, 1, 0, 0; break;
        case PauliAxis::minus: m << 0, 0, 1, 0; break;
    }
    return {HilbertSpace{2}, m};
}

Operator identity(const HilbertSpace& space) {
    return {space, Mat::Identity(space.total_dim(), space.total_dim())};
}

Operator zero_operator(const HilbertSpace& space) {
    return {space, Mat::Zero(space.total_dim(), space.total_dim())};
}

Operator tensor(const std::vector<Operator>& ops) {
    if (ops.empty()) throw InvalidArgument("tensor of an empty operator list");
    Mat m = ops.front().matrix;
    std::vector<int> dims = ops.front().space.dims;
    for (std::size_t k = 1; k < ops.size(); ++k) {
        m = kron(m, ops[k].matrix);
        dims.insert(dims.end(), ops[k].space.dims.begin(), ops[k].space.dims.end());
    }
    return {HilbertSpace(dims), std::move(m)};
}

Operator embed(const Operator& op, int site, const HilbertSpace& space) {
    if (site < 0 || site >= space.n_factors())
        throw InvalidArgument("embed: site index out of range");
    if (op.space.n_factors() != 1 || op.space.dims[0] != space.dims[site])
        throw InvalidArgument("embed: operator dimension does not match the target factor");
    Mat m = Mat::Identity(1, 1);
    for (int f = 0; f < space.n_factors(); ++f) {
        if (f == site)
            m = kron(m, op.matrix);
        else
            m = kron(m, Mat::Identity(space.dims[f], space.dims[f]));
    }
    return {space, std::move(m)};
}

namespace {

// Multi-index <-> flat index in the row-major tensor order used by kron.
int flat_index(const std::vector<int>& idx, const std::vector<int>& dims) {
    int f = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) f = f * dims[k] + idx[k];
    return f;
}

}  // namespace

Operator partial_trace(const Operator& op, const std::set<int>& keep) {
    if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
    const auto& dims = op.space.dims;
    const int nf = op.space.n_factors();
    std::vector<int> kept, traced;
    for (int f = 0; f < nf; ++f) {
        if (keep.count(f))
            kept.push_back(f);
        else
            traced.push_back(f);
    }
    if (static_cast<int>(keep.size()) != static_cast<int>(kept.size()) ||
        *keep.rbegin() >= nf || *keep.begin() < 0)
        throw InvalidArgument("partial_trace: keep set contains invalid factor indices");

    std::vector<int> kept_dims, traced_dims;
    for (int f : kept) kept_dims.push_back(dims[f]);
    for (int f : traced) traced_dims.push_back(dims[f]);
    int dk = 1, dt = 1;
    for (int d : kept_dims) dk *= d;
    for (int d : traced_dims) dt *= d;

    Mat out = Mat::Zero(dk, dk);
    std::vector<int> row(nf), col(nf);
    std::vector<int> ik(kept.size()), jk(kept.size()), it(traced.size());
    for (int i = 0; i < dk; ++i) {
        int rem = i;
        for (int k = static_cast<int>(kept.size()) - 1; k >= 0; --k) {
            ik[k] = rem % kept_dims[k];
            rem /= kept_dims[k];
        }
        for (int j = 0; j < dk; ++j) {
            rem = j;
            for (int k = static_cast<int>(kept.size()) - 1; k >= 0; --k) {
                jk[k] = rem % kept_dims[k];
                rem /= kept_dims[k];
            }
            cd sum = 0.0;
            for (int t = 0; t < dt; ++t) {
                rem = t;
                for (int k = static_cast<int>(traced.size()) - 1; k >= 0; --k) {
                    it[k] = rem % traced_dims[k];
                    rem /= traced_dims[k];
                }
                for (std::size_t k = 0; k < kept.size(); ++k) row[kept[k]] = ik[k];
                for (std::size_t k = 0; k < traced.size(); ++k) row[traced[k]] = it[k];
                col = row;
                for (std::size_t k = 0; k < kept.size(); ++k) col[kept[k]] = jk[k];
                sum += op.matrix(flat_index(row, dims), flat_index(col, dims));
            }
            out(i, j) = sum;
        }
    }
    return {HilbertSpace(kept_dims), std::move(out)};
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::set<int>& keep) {
    return DensityMatrix::validated(partial_trace(rho.op(), keep), 1e-10, 1e-10, -1e-6);
}

cd expectation(const Operator& op, const Ket& psi) {
    if (op.space != psi.space) throw InvalidArgument("expectation: space mismatch");
    return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

cd expectation(const Operator& op, const DensityMatrix& rho) {
    if (op.space != rho.space()) throw InvalidArgument("expectation: space mismatch");
    return (op.matrix * rho.matrix()).trace();
}

Ket basis_ket(const HilbertSpace& space, int index) {
    if (index < 0 || index >= space.total_dim())
        throw InvalidArgument("basis_ket: index out of range");
    Vec v = Vec::Zero(space.total_dim());
    v(index) = 1.0;
    return {space, std::move(v)};
}

Ket basis_ket(const HilbertSpace& space, const std::vector<int>& indices) {
    if (static_cast<int>(indices.size()) != space.n_factors())
        throw InvalidArgument("basis_ket: one index per tensor factor required");
    int f = 0;
    for (int k = 0; k < space.n_factors(); ++k) {
        if (indices[k] < 0 || indices[k] >= space.dims[k])
            throw InvalidArgument("basis_ket: factor index out of range");
        f = f * space.dims[k] + indices[k];
    }
    return basis_ket(space, f);
}

Ket fock(int cutoff, int n) {
    if (cutoff < 0 || n < 0 || n > cutoff) throw InvalidArgument("fock: need 0 <= n <= cutoff");
    return basis_ket(HilbertSpace{cutoff + 1}, n);
}

}  // namespace oqs
