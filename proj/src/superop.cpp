#include "oqs/superop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "oqs/random.hpp"

namespace oqs {

namespace {

double one_norm(const Mat& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

void require_same_space(const SuperOp& a, const SuperOp& b) {
    if (a.space != b.space) throw InvalidArgument("superoperators live on different spaces");
}

}  // namespace

LindbladModel LindbladModel::make(Operator h, std::vector<JumpChannel> jumps) {
    if (!h.is_hermitian()) throw InvalidArgument("LindbladModel: Hamiltonian must be Hermitian");
    for (const auto& j : jumps) {
        if (j.rate < 0) throw InvalidArgument("LindbladModel: jump rates must be non-negative");
        if (j.op.space != h.space)
            throw InvalidArgument("LindbladModel: jump operator on a different space");
    }
    HilbertSpace space = h.space;
    return LindbladModel{std::move(space), std::move(h), std::move(jumps)};
}

SuperOp SuperOp::operator+(const SuperOp& other) const {
    require_same_space(*this, other);
    return {space, matrix + other.matrix};
}

SuperOp SuperOp::operator-(const SuperOp& other) const {
    require_same_space(*this, other);
    return {space, matrix - other.matrix};
}

SuperOp SuperOp::operator*(const SuperOp& other) const {
    require_same_space(*this, other);
    return {space, matrix * other.matrix};
}

SuperOp operator*(cd scalar, const SuperOp& s) { return {s.space, scalar * s.matrix}; }

Operator SuperOp::apply(const Operator& x) const {
    if (x.space != space) throw InvalidArgument("SuperOp::apply: operator on a different space");
    return devectorize(Vec(matrix * vectorize(x.matrix)), space);
}

Vec vectorize(const Mat& x) {
    if (x.rows() != x.cols()) throw InvalidArgument("vectorize: matrix must be square");
    const Eigen::Index d = x.rows();
    Vec v(d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = x(i, j);
    return v;
}

Mat devectorize(const Vec& v, Eigen::Index d) {
    if (v.size() != d * d)
        throw InvalidArgument("devectorize: vector length is not the squared dimension");
    Mat x(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = v(i * d + j);
    return x;
}

Vec vectorize(const Operator& x) { return vectorize(x.matrix); }

Operator devectorize(const Vec& v, const HilbertSpace& space) {
    return {space, devectorize(v, space.total_dim())};
}

SuperOp left_action(const Operator& op) {
    const Eigen::Index d = op.matrix.rows();
    return {op.space, kron(op.matrix, Mat::Identity(d, d))};
}

SuperOp right_action(const Operator& op) {
    const Eigen::Index d = op.matrix.rows();
    return {op.space, kron(Mat::Identity(d, d), op.matrix.transpose())};
}

SuperOp identity_superop(const HilbertSpace& space) {
    const Eigen::Index n = space.total_dim();
    return {space, Mat::Identity(n * n, n * n)};
}

SuperOp dissipator(double rate, const Operator& op) {
    if (rate < 0) throw InvalidArgument("dissipator: rate must be non-negative");
    const Mat& g = op.matrix;
    const Eigen::Index d = g.rows();
    Mat gdg = g.adjoint() * g;
    Mat m = kron(g, g.conjugate());
    m.noalias() -= 0.5 * kron(gdg, Mat::Identity(d, d));
    m.noalias() -= 0.5 * kron(Mat::Identity(d, d), gdg.transpose());
    return {op.space, rate * m};
}

SuperOp build_liouvillian(const LindbladModel& model) {
    if (!model.hamiltonian.is_hermitian())
        throw InvalidArgument("build_liouvillian: Hamiltonian must be Hermitian");
    const Mat& h = model.hamiltonian.matrix;
    const Eigen::Index d = h.rows();
    Mat m = cd(0, -1) * (kron(h, Mat::Identity(d, d)) - kron(Mat::Identity(d, d), h.transpose()));
    for (const auto& j : model.jumps) m += dissipator(j.rate, j.op).matrix;
    return {model.space, std::move(m)};
}

Mat lindblad_rhs(const LindbladModel& model, const Mat& rho) {
    const Mat& h = model.hamiltonian.matrix;
    Mat out = cd(0, -1) * (h * rho - rho * h);
    for (const auto& j : model.jumps) {
        const Mat& g = j.op.matrix;
        Mat grho = g * rho;
        Mat gdg = g.adjoint() * g;
        out.noalias() += j.rate * (grho * g.adjoint());
        out.noalias() -= (0.5 * j.rate) * (gdg * rho);
        out.noalias() -= (0.5 * j.rate) * (rho * gdg);
    }
    return out;
}

SuperOp kraus_to_superop(const HilbertSpace& space, const std::vector<Mat>& kraus) {
    const Eigen::Index d = space.total_dim();
    if (kraus.empty()) throw InvalidArgument("kraus_to_superop: empty operator list");
    Mat m = Mat::Zero(d * d, d * d);
    for (const Mat& k : kraus) {
        if (k.rows() != d || k.cols() != d)
            throw InvalidArgument("kraus_to_superop: operator dimension mismatch");
        m.noalias() += kron(k, k.conjugate());
    }
    return {space, std::move(m)};
}

Mat choi_matrix(const SuperOp& s) {
    const Eigen::Index d = s.space.total_dim();
    Mat c(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index k = 0; k < d; ++k)
                for (Eigen::Index l = 0; l < d; ++l)
                    c(i * d + k, j * d + l) = s.matrix(i * d + j, k * d + l);
    return c;
}

bool is_completely_positive(const SuperOp& s, double tol) {
    Mat c = choi_matrix(s);
    if ((c - c.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    Eigen::SelfAdjointEigenSolver<Mat> es((c + c.adjoint()) / 2.0);
    if (es.info() != Eigen::Success) throw NumericError("is_completely_positive: eigensolver failed");
    return es.eigenvalues().minCoeff() >= -tol;
}

bool is_trace_preserving(const SuperOp& s, double tol) {
    const Eigen::Index d = s.space.total_dim();
    Vec vid = vectorize(Mat::Identity(d, d));
    Eigen::RowVectorXcd lhs = vid.transpose() * s.matrix;
    return (lhs - vid.transpose()).cwiseAbs().maxCoeff() <= tol;
}

namespace {

struct Mode {
    cd lambda;
    Vec v;  // canonicalized eigenvector
};

// Canonical representative of an eigenvector: unit trace when the trace is
// resolvable against the HS norm, otherwise the largest-magnitude entry
// (first in row-major on ties) made real positive at unit HS norm.
void canonicalize(Vec& v, Eigen::Index d) {
    cd tr = 0;
    for (Eigen::Index i = 0; i < d; ++i) tr += v(i * d + i);
    double hs = v.norm();
    if (std::abs(tr) > 1e-8 * hs) {
        v /= tr;
        return;
    }
    Eigen::Index best = 0;
    double best_abs = std::abs(v(0));
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        double a = std::abs(v(i));
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0) v *= std::conj(v(best)) / best_abs;
    v /= hs;
}

bool mode_less(const Mode& a, const Mode& b) {
    double ra = std::abs(a.lambda.real()), rb = std::abs(b.lambda.real());
    if (ra != rb) return ra < rb;
    double ia = std::abs(a.lambda.imag()), ib = std::abs(b.lambda.imag());
    if (ia != ib) return ia < ib;
    if (a.lambda.imag() != b.lambda.imag()) return a.lambda.imag() < b.lambda.imag();
    for (Eigen::Index i = 0; i < a.v.size(); ++i) {
        if (a.v(i).real() != b.v(i).real()) return a.v(i).real() < b.v(i).real();
        if (a.v(i).imag() != b.v(i).imag()) return a.v(i).imag() < b.v(i).imag();
    }
    return false;
}

}  // namespace

Spectrum spectrum(const SuperOp& liouvillian, int dense_limit) {
    const int d = liouvillian.space.total_dim();
    if (d > dense_limit)
        throw CapabilityError("spectrum: dimension " + std::to_string(d) +
                              " exceeds the dense eigensolver limit " +
                              std::to_string(dense_limit));
    const Eigen::Index n = liouvillian.matrix.rows();
    Eigen::ComplexEigenSolver<Mat> es(liouvillian.matrix);
    Vec values;
    Mat vectors;
    if (es.info() == Eigen::Success) {
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    } else {
        // The QR iteration can stall on heavily structured matrices (e.g.
        // low-rank channel compositions with exact eigenvalue clusters).
        // A similarity transform by a fixed random unitary breaks the
        // structure without touching the eigenvalues.
        RandomStream rng(0xd1ce5eedULL);
        Mat g(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = cd(rng.normal(), rng.normal());
        Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
        Eigen::ComplexEigenSolver<Mat> es2(Mat(q.adjoint() * liouvillian.matrix * q));
        if (es2.info() != Eigen::Success)
            throw NumericError("spectrum: eigensolver did not converge");
        values = es2.eigenvalues();
        vectors = q * es2.eigenvectors();
    }

    std::vector<Mode> modes(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        modes[k].lambda = values(k);
        modes[k].v = vectors.col(k);
        canonicalize(modes[k].v, d);
    }
    std::sort(modes.begin(), modes.end(), mode_less);

    Mat r(n, n);
    for (Eigen::Index k = 0; k < n; ++k) r.col(k) = modes[k].v;
    Eigen::PartialPivLU<Mat> lu(r);
    Mat rinv = lu.inverse();
    double cond = std::numeric_limits<double>::infinity();
    if (rinv.allFinite()) cond = one_norm(r) * one_norm(rinv);

    Spectrum out;
    out.space = liouvillian.space;
    out.condition_estimate = cond;
    out.diagonalizable = std::isfinite(cond) && cond <= 1e10;
    Mat lr = liouvillian.matrix * r;
    out.eigenvalues.resize(n);
    out.right.reserve(n);
    out.residuals.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues[k] = modes[k].lambda;
        out.right.push_back(devectorize(Vec(r.col(k)), liouvillian.space));
        out.residuals[k] = (lr.col(k) - modes[k].lambda * r.col(k)).norm() / r.col(k).norm();
    }
    if (rinv.allFinite()) {
        out.left.reserve(n);
        for (Eigen::Index j = 0; j < n; ++j)
            out.left.push_back(devectorize(Vec(rinv.row(j).adjoint()), liouvillian.space));
    }
    return out;
}

namespace {

// Hermitian orthonormal basis (HS inner product) spanning the same space as
// the kernel vectors; relies on the kernel being closed under conjugation.
std::vector<Mat> hermitian_kernel_basis(const std::vector<Vec>& kernel, Eigen::Index d) {
    std::vector<Mat> basis;
    auto try_add = [&](Mat x) {
        for (const Mat& b : basis) x -= (b.conjugate().cwiseProduct(x)).sum() * b;
        double nn = x.norm();
        if (nn > 1e-7) basis.push_back(x / nn);
    };
    for (const Vec& v : kernel) {
        Mat x = devectorize(v, d);
        try_add((x + x.adjoint()) / 2.0);
        try_add((x - x.adjoint()) / cd(0, 2));
    }
    return basis;
}

}  // namespace

SteadyStates steady_states(const SuperOp& liouvillian, double tol, int dense_limit) {
    const Eigen::Index d = liouvillian.space.total_dim();
    std::vector<Vec> kernel;
    if (d <= dense_limit) {
        Eigen::ComplexEigenSolver<Mat> es(liouvillian.matrix);
        if (es.info() != Eigen::Success)
            throw NumericError("steady_states: eigensolver did not converge");
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            if (std::abs(es.eigenvalues()(k)) <= tol * scale)
                kernel.push_back(es.eigenvectors().col(k));
    } else {
        // Shifted inverse iteration; finds a single kernel element.
        Mat shifted = liouvillian.matrix;
        shifted.diagonal().array() -= cd(1e-8, 0);
        Eigen::PartialPivLU<Mat> lu(shifted);
        Vec x = vectorize(Mat::Identity(d, d));
        x /= x.norm();
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            x = lu.solve(x);
            x /= x.norm();
            if ((liouvillian.matrix * x).norm() <= tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericError("steady_states: inverse iteration did not converge");
        kernel.push_back(x);
    }
    if (kernel.empty())
        throw NumericError("steady_states: empty kernel; a Lindbladian always has one");

    std::vector<Mat> herm = hermitian_kernel_basis(kernel, d);

    // Prefer positive semidefinite representatives: split each basis element
    // into positive and negative parts and keep the parts that are
    // themselves steady, then greedily re-orthogonalize.
    std::vector<Mat> cands;
    for (const Mat& h : herm) {
        Eigen::SelfAdjointEigenSolver<Mat> ev(h);
        Mat pos = Mat::Zero(d, d), neg = Mat::Zero(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            double e = ev.eigenvalues()(i);
            Mat proj = ev.eigenvectors().col(i) * ev.eigenvectors().col(i).adjoint();
            if (e > 0)
                pos += e * proj;
            else
                neg -= e * proj;
        }
        for (const Mat* part : {&pos, &neg}) {
            double nn = part->norm();
            if (nn < 1e-10) continue;
            if ((liouvillian.matrix * vectorize(*part)).norm() <= 100 * tol * nn)
                cands.push_back(*part / nn);
        }
    }
    for (const Mat& h : herm) cands.push_back(h);

    std::vector<Mat> picked;
    std::vector<Mat> picked_orth;  // orthonormalized shadows for span tests
    for (const Mat& c : cands) {
        if (picked.size() == herm.size()) break;
        Mat r = c;
        for (const Mat& b : picked_orth) r -= (b.conjugate().cwiseProduct(r)).sum() * b;
        double nn = r.norm();
        if (nn > 1e-7) {
            // keep the candidate itself (PSD when it came from a part); the
            // orthonormal shadows only serve the independence test
            picked.push_back(c);
            picked_orth.push_back(r / nn);
        }
    }

    SteadyStates out;
    for (Mat b : picked) {
        b = (b + b.adjoint().eval()) / 2.0;
        double tr = b.trace().real();
        if (std::abs(tr) > 1e-8 * b.norm()) {
            out.states.emplace_back(liouvillian.space, b / tr);
            out.traceless.push_back(false);
        } else {
            out.states.emplace_back(liouvillian.space, b / b.norm());
            out.traceless.push_back(true);
        }
    }
    return out;
}

GapReport liouvillian_gap(const Spectrum& s, double tol) {
    GapReport report{std::numeric_limits<double>::infinity(), 0};
    bool found = false;
    for (cd lambda : s.eigenvalues) {
        if (std::abs(lambda) <= tol) {
            ++report.zero_multiplicity;
            continue;
        }
        double re = std::abs(lambda.real());
        if (re > tol) {
            report.gap = std::min(report.gap, re);
            found = true;
        }
    }
    if (!found) throw NumericError("liouvillian_gap: no decaying eigenvalue found");
    if (report.zero_multiplicity > 1)
        std::fprintf(stderr,
                     "warning: steady manifold is degenerate (multiplicity %d); "
                     "gap refers to the decaying sector\n",
                     report.zero_multiplicity);
    return report;
}

DecompositionCoefficients decompose(const Operator& rho0, const Spectrum& s) {
    if (rho0.space != s.space) throw InvalidArgument("decompose: operator on a different space");
    if (!s.diagonalizable || s.left.empty())
        throw CapabilityError(
            "decompose: spectrum is not diagonalizable (exceptional point suspected)");
    const std::size_t n = s.eigenvalues.size();
    DecompositionCoefficients out;
    out.c.resize(n);
    Mat recon = Mat::Zero(rho0.matrix.rows(), rho0.matrix.cols());
    for (std::size_t k = 0; k < n; ++k) {
        out.c[k] = (s.left[k].matrix.adjoint() * rho0.matrix).trace();
        recon += out.c[k] * s.right[k].matrix;
    }
    out.reconstruction_error = (recon - rho0.matrix).norm();
    return out;
}

DecompositionCoefficients decompose(const DensityMatrix& rho0, const Spectrum& s) {
    return decompose(rho0.op(), s);
}

Operator spectral_evolve(const Operator& rho0, const Spectrum& s, double t) {
    DecompositionCoefficients dc = decompose(rho0, s);
    const Eigen::Index d = s.space.total_dim();
    Mat acc = Mat::Zero(d, d);
    for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
        acc += dc.c[k] * std::exp(s.eigenvalues[k] * t) * s.right[k].matrix;
    return {s.space, std::move(acc)};
}

DensityMatrix spectral_evolve(const DensityMatrix& rho0, const Spectrum& s, double t) {
    Operator evolved = spectral_evolve(rho0.op(), s, t);
    evolved.matrix = (evolved.matrix + evolved.matrix.adjoint().eval()) / 2.0;
    return DensityMatrix::validated(evolved, 1e-8, 1e-8, -1e-6);
}

SuperOp superop_exp(const SuperOp& s, double t) {
    Eigen::ComplexEigenSolver<Mat> es(s.matrix);
    if (es.info() == Eigen::Success) {
        Mat r = es.eigenvectors();
        Eigen::PartialPivLU<Mat> lu(r);
        Mat rinv = lu.inverse();
        if (rinv.allFinite() && one_norm(r) * one_norm(rinv) <= 1e10) {
            Vec w = (t * es.eigenvalues()).array().exp();
            return {s.space, Mat(r * w.asDiagonal() * rinv)};
        }
    }
    return {s.space, Mat((t * s.matrix).exp())};
}

StrongSymmetryReport check_strong_symmetry(const LindbladModel& model, const Operator& v,
                                           double tol) {
    if (v.space != model.space)
        throw InvalidArgument("check_strong_symmetry: symmetry on a different space");
    const Eigen::Index d = v.matrix.rows();
    if ((v.matrix.adjoint() * v.matrix - Mat::Identity(d, d)).norm() > 1e-10)
        throw InvalidArgument("check_strong_symmetry: V is not unitary");
    StrongSymmetryReport report;
    report.hamiltonian_commutator =
        (model.hamiltonian.matrix * v.matrix - v.matrix * model.hamiltonian.matrix).norm();
    report.symmetric = report.hamiltonian_commutator < tol;
    for (const auto& j : model.jumps) {
        double c = (j.op.matrix * v.matrix - v.matrix * j.op.matrix).norm();
        report.jump_commutators.push_back(c);
        if (c >= tol) report.symmetric = false;
    }
    return report;
}

WeakSymmetryBlocks weak_symmetry_blocks(const SuperOp& s, const Operator& v) {
    if (v.space != s.space)
        throw InvalidArgument("weak_symmetry_blocks: symmetry on a different space");
    const Eigen::Index d = v.matrix.rows();
    if ((v.matrix.adjoint() * v.matrix - Mat::Identity(d, d)).norm() > 1e-10)
        throw InvalidArgument("weak_symmetry_blocks: V is not unitary");
    Mat offdiag = v.matrix;
    offdiag.diagonal().setZero();
    if (offdiag.cwiseAbs().maxCoeff() > 1e-12)
        throw InvalidArgument(
            "weak_symmetry_blocks: V must be diagonal in the working basis; "
            "rotate the model into the eigenbasis of V first");

    Mat u = kron(v.matrix, v.matrix.conjugate());
    if ((s.matrix * u - u * s.matrix).norm() > 1e-8)
        throw InvalidArgument("weak_symmetry_blocks: [L, V . V'] does not vanish, not a symmetry");

    const double pi = std::acos(-1.0);
    WeakSymmetryBlocks out;
    out.sector_labels.assign(d * d, -1);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            double phase = std::arg(v.matrix(i, i) * std::conj(v.matrix(j, j)));
            int label = -1;
            for (std::size_t k = 0; k < out.phases.size(); ++k) {
                if (std::abs(std::remainder(phase - out.phases[k], 2 * pi)) < 1e-8) {
                    label = static_cast<int>(k);
                    break;
                }
            }
            if (label < 0) {
                label = static_cast<int>(out.phases.size());
                out.phases.push_back(phase);
                out.sectors.emplace_back();
            }
            out.sector_labels[i * d + j] = label;
            out.sectors[label].push_back(i * d + j);
        }
    }

    out.max_cross_sector = 0;
    for (Eigen::Index r = 0; r < d * d; ++r)
        for (Eigen::Index c = 0; c < d * d; ++c)
            if (out.sector_labels[r] != out.sector_labels[c])
                out.max_cross_sector = std::max(out.max_cross_sector, std::abs(s.matrix(r, c)));
    out.verified = out.max_cross_sector <= 1e-10;

    for (const auto& idx : out.sectors) {
        Mat block(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = s.matrix(idx[a], idx[b]);
        out.blocks.push_back(std::move(block));
    }
    return out;
}

}  // namespace oqs
