#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "oqs/superop.hpp"
#include "test_util.hpp"

using namespace oqs;
using namespace oqs::testutil;

namespace {

LindbladModel damped_qubit(double gamma) {
    HilbertSpace space{2};
    return LindbladModel::make(zero_operator(space), {{gamma, pauli(PauliAxis::minus)}});
}

std::vector<cd> sorted_re_im(std::vector<cd> v) {
    std::sort(v.begin(), v.end(), [](cd a, cd b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST_CASE("vectorization is row-major and invertible") {
    Mat x(2, 2);
    x << cd(1, 0), cd(2, 0), cd(3, 0), cd(4, 0);
    Vec v = vectorize(x);
    CHECK(v(0) == cd(1, 0));
    CHECK(v(1) == cd(2, 0));
    CHECK(v(2) == cd(3, 0));
    CHECK(v(3) == cd(4, 0));

    RandomStream rng(11);
    Mat y = rand_matrix(rng, 5);
    CHECK(max_abs_diff(devectorize(vectorize(y), 5), y) < 1e-15);

    HilbertSpace space{2, 3};
    Operator op{space, rand_matrix(rng, 6)};
    Operator back = devectorize(vectorize(op), space);
    CHECK(back.space == space);
    CHECK(max_abs_diff(back.matrix, op.matrix) < 1e-15);

    CHECK_THROWS_AS(vectorize(rand_matrix(rng, 2, 3)), InvalidArgument);
    CHECK_THROWS_AS(devectorize(Vec::Zero(5), 2), InvalidArgument);
}

TEST_CASE("left and right action implement operator multiplication") {
    RandomStream rng(12);
    HilbertSpace space{3};
    Operator a{space, rand_matrix(rng, 3)};
    Operator b{space, rand_matrix(rng, 3)};
    Operator x{space, rand_matrix(rng, 3)};

    CHECK(max_abs_diff(left_action(a).apply(x).matrix, a.matrix * x.matrix) < 1e-13);
    CHECK(max_abs_diff(right_action(b).apply(x).matrix, x.matrix * b.matrix) < 1e-13);

    // vec(A X B) = (A kron B^T) vec(X)
    Mat axb = a.matrix * x.matrix * b.matrix;
    Vec via_kron = kron(a.matrix, b.matrix.transpose()) * vectorize(x.matrix);
    CHECK((via_kron - vectorize(axb)).cwiseAbs().maxCoeff() < 1e-13);

    SuperOp composed = left_action(a) * right_action(b);
    CHECK(max_abs_diff(composed.apply(x).matrix, axb) < 1e-13);

    SuperOp sum = left_action(a) + right_action(b);
    CHECK(max_abs_diff(sum.apply(x).matrix, a.matrix * x.matrix + x.matrix * b.matrix) < 1e-13);
    SuperOp diff = left_action(a) - right_action(b);
    CHECK(max_abs_diff(diff.apply(x).matrix, a.matrix * x.matrix - x.matrix * b.matrix) < 1e-13);
    SuperOp scaled = cd(0, 2) * left_action(a);
    CHECK(max_abs_diff(scaled.apply(x).matrix, cd(0, 2) * a.matrix * x.matrix) < 1e-13);

    CHECK(max_abs_diff(identity_superop(space).apply(x).matrix, x.matrix) < 1e-15);
}

TEST_CASE("decaying qubit liouvillian matches the hand-computed action") {
    const double gamma = 0.7;
    SuperOp l = build_liouvillian(damped_qubit(gamma));
    HilbertSpace space{2};

    Mat ee = Mat::Zero(2, 2);
    ee(0, 0) = 1;  // |e><e|
    Mat gg = Mat::Zero(2, 2);
    gg(1, 1) = 1;
    Operator out = l.apply(Operator{space, ee});
    CHECK(max_abs_diff(out.matrix, gamma * (gg - ee)) < 1e-14);

    Mat eg = Mat::Zero(2, 2);
    eg(0, 1) = 1;  // coherence decays at gamma/2
    out = l.apply(Operator{space, eg});
    CHECK(max_abs_diff(out.matrix, -0.5 * gamma * eg) < 1e-14);

    CHECK(max_abs_diff(l.apply(Operator{space, gg}).matrix, Mat::Zero(2, 2)) < 1e-14);
}

TEST_CASE("hamiltonian-only liouvillian is the commutator") {
    RandomStream rng(13);
    HilbertSpace space{4};
    Operator h{space, rand_hermitian(rng, 4)};
    SuperOp l = build_liouvillian(LindbladModel::make(h));
    Mat x = rand_matrix(rng, 4);
    Mat expected = cd(0, -1) * (h.matrix * x - x * h.matrix);
    CHECK(max_abs_diff(l.apply(Operator{space, x}).matrix, expected) < 1e-13);
}

TEST_CASE("superoperator matrix agrees with the direct rhs on random models") {
    RandomStream rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        int d = 2 + trial % 5;
        HilbertSpace space{d};
        std::vector<JumpChannel> jumps;
        int n_jumps = 1 + trial % 3;
        for (int k = 0; k < n_jumps; ++k)
            jumps.push_back({0.1 + rng.uniform(), Operator{space, rand_matrix(rng, d)}});
        LindbladModel model = LindbladModel::make(Operator{space, rand_hermitian(rng, d)}, jumps);

        Mat x = rand_matrix(rng, d);
        Mat via_matrix = build_liouvillian(model).apply(Operator{space, x}).matrix;
        Mat direct = lindblad_rhs(model, x);
        CHECK(max_abs_diff(via_matrix, direct) < 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("dissipator output is traceless and preserves hermiticity") {
    RandomStream rng(15);
    HilbertSpace space{5};
    SuperOp d = dissipator(1.3, Operator{space, rand_matrix(rng, 5)});

    Mat x = rand_matrix(rng, 5);
    CHECK(std::abs(d.apply(Operator{space, x}).matrix.trace()) < 1e-12);

    Mat h = rand_hermitian(rng, 5);
    Mat dh = d.apply(Operator{space, h}).matrix;
    CHECK(max_abs_diff(dh, dh.adjoint()) < 1e-12);

    // vec(I) is a left null vector of any liouvillian: trace preservation.
    LindbladModel model = LindbladModel::make(Operator{space, rand_hermitian(rng, 5)},
                                              {{0.8, Operator{space, rand_matrix(rng, 5)}}});
    SuperOp l = build_liouvillian(model);
    Vec tr_functional = vectorize(Mat(Mat::Identity(5, 5)));
    CHECK((tr_functional.adjoint() * l.matrix).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(dissipator(-1.0, Operator{space, h}), InvalidArgument);
}

TEST_CASE("model validation rejects bad input") {
    HilbertSpace space{2};
    RandomStream rng(16);
    Mat nh = rand_matrix(rng, 2);
    CHECK_THROWS_AS(LindbladModel::make(Operator{space, nh + Mat::Identity(2, 2)}),
                    InvalidArgument);
    Operator h{space, rand_hermitian(rng, 2)};
    CHECK_THROWS_AS(LindbladModel::make(h, {{-0.1, pauli(PauliAxis::minus)}}), InvalidArgument);
    Operator wrong{HilbertSpace{3}, Mat::Identity(3, 3)};
    CHECK_THROWS_AS(LindbladModel::make(h, {{1.0, wrong}}), InvalidArgument);
}

TEST_CASE("kraus channels: superoperator, choi matrix, CP and TP") {
    HilbertSpace space{2};
    const double p = 0.3;
    Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
    k0(0, 0) = std::sqrt(1 - p);
    k0(1, 1) = 1;
    k1(1, 0) = std::sqrt(p);  // amplitude damping |e> -> |g|
    SuperOp ch = kraus_to_superop(space, {k0, k1});

    CHECK(is_trace_preserving(ch));
    CHECK(is_completely_positive(ch));

    RandomStream rng(17);
    Mat rho = rand_density_mat(rng, 2);
    Mat expected = k0 * rho * k0.adjoint() + k1 * rho * k1.adjoint();
    CHECK(max_abs_diff(ch.apply(Operator{space, rho}).matrix, expected) < 1e-13);

    // Single-Kraus channel: choi matrix is the rank-one projector on vec(M).
    Mat m = rand_matrix(rng, 3);
    SuperOp single = kraus_to_superop(HilbertSpace{3}, {m});
    Vec vm = vectorize(m);
    CHECK(max_abs_diff(choi_matrix(single), vm * vm.adjoint()) < 1e-12);

    // The transpose map is positive and trace preserving but not CP.
    Mat t = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) t(i * 2 + j, j * 2 + i) = 1;
    SuperOp transpose_map{space, t};
    CHECK(is_trace_preserving(transpose_map));
    CHECK(!is_completely_positive(transpose_map));

    CHECK(is_completely_positive(identity_superop(space)));
    CHECK(is_trace_preserving(identity_superop(space)));
    CHECK_THROWS_AS(kraus_to_superop(space, {}), InvalidArgument);
}

TEST_CASE("spectrum of the damped qubit") {
    const double gamma = 0.8;
    SuperOp l = build_liouvillian(damped_qubit(gamma));
    Spectrum s = spectrum(l);

    REQUIRE(s.eigenvalues.size() == 4);
    CHECK(s.diagonalizable);
    CHECK(std::abs(s.eigenvalues[0]) < 1e-12);
    CHECK(std::abs(s.eigenvalues[1] - cd(-gamma / 2, 0)) < 1e-12);
    CHECK(std::abs(s.eigenvalues[2] - cd(-gamma / 2, 0)) < 1e-12);
    CHECK(std::abs(s.eigenvalues[3] - cd(-gamma, 0)) < 1e-12);
    for (double r : s.residuals) CHECK(r < 1e-12);

    // Stationary mode has a resolvable trace, so it comes out as the ground
    // state projector with unit trace.
    Mat gg = Mat::Zero(2, 2);
    gg(1, 1) = 1;
    CHECK(max_abs_diff(s.right[0].matrix, gg) < 1e-12);

    // The two gamma/2 modes are the coherences, HS-normalized with the
    // largest entry real positive: exactly the off-diagonal matrix units.
    bool saw01 = false, saw10 = false;
    for (int k = 1; k <= 2; ++k) {
        const Mat& r = s.right[k].matrix;
        if (std::abs(r(0, 1) - 1.0) < 1e-12 && r.cwiseAbs().sum() == doctest::Approx(1.0))
            saw01 = true;
        if (std::abs(r(1, 0) - 1.0) < 1e-12 && r.cwiseAbs().sum() == doctest::Approx(1.0))
            saw10 = true;
    }
    CHECK(saw01);
    CHECK(saw10);

    // Population relaxation mode: traceless diagonal with unit HS norm.
    const Mat& pop = s.right[3].matrix;
    CHECK(std::abs(pop.trace()) < 1e-12);
    CHECK(std::abs(pop(0, 0) - 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(pop(1, 1) + 1 / std::sqrt(2.0)) < 1e-12);
    CHECK(s.right[3].hs_norm() == doctest::Approx(1.0));

    // Left and right eigenmatrices are biorthonormal.
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            cd overlap = (s.left[j].adjoint() * s.right[k]).trace();
            CHECK(std::abs(overlap - (j == k ? cd(1, 0) : cd(0, 0))) < 1e-10);
        }
}

TEST_CASE("folding the rate into the jump operator leaves the spectrum unchanged") {
    const double gamma = 1.7;
    Spectrum a = spectrum(build_liouvillian(damped_qubit(gamma)));
    HilbertSpace space{2};
    LindbladModel folded = LindbladModel::make(
        zero_operator(space), {{1.0, std::sqrt(gamma) * pauli(PauliAxis::minus)}});
    Spectrum b = spectrum(build_liouvillian(folded));
    for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(a.eigenvalues[k] - b.eigenvalues[k]) < 1e-12);
        CHECK(max_abs_diff(a.right[k].matrix, b.right[k].matrix) < 1e-10);
    }
}

TEST_CASE("random model spectrum: conjugate pairing, traceless decaying modes") {
    RandomStream rng(18);
    HilbertSpace space{3};
    LindbladModel model = LindbladModel::make(Operator{space, rand_hermitian(rng, 3)},
                                              {{0.4, Operator{space, rand_matrix(rng, 3)}},
                                               {0.9, Operator{space, rand_matrix(rng, 3)}}});
    Spectrum s = spectrum(build_liouvillian(model));
    REQUIRE(s.eigenvalues.size() == 9);
    CHECK(s.diagonalizable);

    for (cd lambda : s.eigenvalues) {
        CHECK(lambda.real() < 1e-10);  // dissipative spectrum sits in Re <= 0
        if (std::abs(lambda.imag()) > 1e-10) {
            bool paired = false;
            for (cd other : s.eigenvalues)
                if (std::abs(other - std::conj(lambda)) < 1e-8) paired = true;
            CHECK(paired);
        }
    }

    for (size_t k = 0; k < s.eigenvalues.size(); ++k) {
        if (std::abs(s.eigenvalues[k]) > 1e-8) {
            CHECK(std::abs(s.right[k].trace()) < 1e-8);
            CHECK(s.right[k].hs_norm() == doctest::Approx(1.0));
        }
        CHECK(s.residuals[k] < 1e-10);
    }

    for (size_t j = 0; j < s.eigenvalues.size(); ++j)
        for (size_t k = 0; k < s.eigenvalues.size(); ++k) {
            cd overlap = (s.left[j].adjoint() * s.right[k]).trace();
            CHECK(std::abs(overlap - (j == k ? cd(1, 0) : cd(0, 0))) < 1e-9);
        }
}

TEST_CASE("spectral decomposition reproduces the analytic damped-qubit evolution") {
    const double gamma = 0.8;
    SuperOp l = build_liouvillian(damped_qubit(gamma));
    Spectrum s = spectrum(l);

    RandomStream rng(19);
    Mat r0 = rand_density_mat(rng, 2);
    HilbertSpace space{2};
    DensityMatrix rho0 = DensityMatrix::validated(Operator{space, r0});

    DecompositionCoefficients coeffs = decompose(rho0, s);
    CHECK(coeffs.reconstruction_error < 1e-12);
    Mat rebuilt = Mat::Zero(2, 2);
    for (int k = 0; k < 4; ++k) rebuilt += coeffs.c[k] * s.right[k].matrix;
    CHECK(max_abs_diff(rebuilt, r0) < 1e-12);

    for (double t : {0.0, 0.3, 1.0, 5.0}) {
        Mat expect(2, 2);
        expect(0, 0) = r0(0, 0) * std::exp(-gamma * t);
        expect(0, 1) = r0(0, 1) * std::exp(-gamma * t / 2);
        expect(1, 0) = r0(1, 0) * std::exp(-gamma * t / 2);
        expect(1, 1) = r0(1, 1) + r0(0, 0) * (1 - std::exp(-gamma * t));
        CHECK(max_abs_diff(spectral_evolve(rho0, s, t).matrix(), expect) < 1e-10);
        CHECK(max_abs_diff(superop_exp(l, t).apply(rho0.op()).matrix, expect) < 1e-10);
    }
}

TEST_CASE("superop_exp matches the direct matrix exponential") {
    RandomStream rng(20);
    HilbertSpace space{3};
    LindbladModel model = LindbladModel::make(Operator{space, rand_hermitian(rng, 3)},
                                              {{0.6, Operator{space, rand_matrix(rng, 3)}}});
    SuperOp l = build_liouvillian(model);

    for (double t : {0.0, 0.2, 0.7}) {
        Mat direct = (t * l.matrix).exp();
        CHECK(max_abs_diff(superop_exp(l, t).matrix, direct) < 1e-9);
    }

    SuperOp e = superop_exp(l, 0.7);
    CHECK(is_trace_preserving(e));
    CHECK(is_completely_positive(e));
}

TEST_CASE("two-photon loss with detuning keeps a two-dimensional kernel") {
    const int cutoff = 3;
    HilbertSpace space{cutoff + 1};
    Operator a = annihilation(cutoff);
    LindbladModel model =
        LindbladModel::make(0.7 * number_operator(cutoff), {{1.0, a * a}});
    SuperOp l = build_liouvillian(model);

    // Oracle: kernel dimension from the singular values of L.
    Eigen::JacobiSVD<Mat> svd(l.matrix);
    int null_dim = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
        if (svd.singularValues()(k) < 1e-10) ++null_dim;
    CHECK(null_dim == 2);

    Spectrum s = spectrum(l);
    GapReport gap = liouvillian_gap(s);
    CHECK(gap.zero_multiplicity == 2);
    // |0><1| only oscillates under the detuning; it is not part of the
    // decaying sector, whose slowest rate is the pair-loss rate of |2>.
    CHECK(gap.gap == doctest::Approx(1.0));

    SteadyStates ss = steady_states(l);
    REQUIRE(ss.states.size() == 2);
    for (size_t k = 0; k < ss.states.size(); ++k) {
        const Operator& st = ss.states[k];
        CHECK(st.is_hermitian());
        CHECK(l.apply(st).matrix.cwiseAbs().maxCoeff() < 1e-8);
        if (!ss.traceless[k]) CHECK(std::abs(st.trace() - cd(1, 0)) < 1e-10);
    }
}

TEST_CASE("hamiltonian-only model keeps every population frozen") {
    HilbertSpace space{3};
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = 0;
    h(1, 1) = 1;
    h(2, 2) = 2.5;
    SuperOp l = build_liouvillian(LindbladModel::make(Operator{space, h}));

    SteadyStates ss = steady_states(l);
    CHECK(ss.states.size() == 3);
    for (const Operator& st : ss.states) {
        CHECK(st.is_hermitian());
        CHECK(l.apply(st).matrix.cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("liouvillian gap of the damped qubit") {
    Spectrum s = spectrum(build_liouvillian(damped_qubit(0.8)));
    GapReport gap = liouvillian_gap(s);
    CHECK(gap.gap == doctest::Approx(0.4));
    CHECK(gap.zero_multiplicity == 1);

    // The zero model has no decaying eigenvalue at all.
    HilbertSpace space{2};
    Spectrum zero = spectrum(build_liouvillian(LindbladModel::make(zero_operator(space))));
    CHECK_THROWS_AS(liouvillian_gap(zero), NumericError);
}

TEST_CASE("defective superoperator is flagged and decompose refuses") {
    HilbertSpace space{2};
    Mat j = Mat::Zero(4, 4);
    j(0, 1) = 1;  // one Jordan chain, nothing diagonalizable about it
    Spectrum s = spectrum(SuperOp{space, j});
    CHECK(!s.diagonalizable);

    RandomStream rng(21);
    DensityMatrix rho = DensityMatrix::validated(Operator{space, rand_density_mat(rng, 2)});
    CHECK_THROWS_AS(decompose(rho, s), CapabilityError);
}

TEST_CASE("strong symmetry: photon parity for pair loss, broken by single loss") {
    const int cutoff = 3;
    Operator a = annihilation(cutoff);
    Operator n = number_operator(cutoff);
    Mat parity = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int k = 0; k <= cutoff; ++k) parity(k, k) = (k % 2 == 0) ? 1 : -1;
    Operator v{n.space, parity};

    LindbladModel pair_loss = LindbladModel::make(0.7 * n, {{1.0, a * a}});
    StrongSymmetryReport yes = check_strong_symmetry(pair_loss, v);
    CHECK(yes.symmetric);
    CHECK(yes.hamiltonian_commutator < 1e-12);
    REQUIRE(yes.jump_commutators.size() == 1);
    CHECK(yes.jump_commutators[0] < 1e-12);

    LindbladModel single_loss = LindbladModel::make(0.7 * n, {{1.0, a}});
    StrongSymmetryReport no = check_strong_symmetry(single_loss, v);
    CHECK(!no.symmetric);
    CHECK(no.jump_commutators[0] > 0.1);

    CHECK_THROWS_AS(check_strong_symmetry(pair_loss, 2.0 * v), InvalidArgument);
}

TEST_CASE("weak symmetry blocks of the damped cavity") {
    const int cutoff = 3;
    Operator a = annihilation(cutoff);
    Operator n = number_operator(cutoff);
    LindbladModel model = LindbladModel::make(1.0 * n, {{0.5, a}});
    SuperOp l = build_liouvillian(model);

    const double theta = 0.9;
    Mat vm = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int k = 0; k <= cutoff; ++k) vm(k, k) = std::exp(cd(0, theta * k));
    Operator v{n.space, vm};

    WeakSymmetryBlocks blocks = weak_symmetry_blocks(l, v);
    CHECK(blocks.verified);
    CHECK(blocks.max_cross_sector <= 1e-10);
    CHECK(blocks.sector_labels.size() == 16);

    std::vector<size_t> sizes;
    size_t total = 0;
    for (const auto& sector : blocks.sectors) {
        sizes.push_back(sector.size());
        total += sector.size();
    }
    CHECK(total == 16);
    std::sort(sizes.begin(), sizes.end(), std::greater<size_t>());
    CHECK(sizes == std::vector<size_t>({4, 3, 3, 2, 2, 1, 1}));

    // The union of the block spectra is the full spectrum.
    std::vector<cd> from_blocks;
    for (const Mat& b : blocks.blocks) {
        Eigen::ComplexEigenSolver<Mat> es(b);
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            from_blocks.push_back(es.eigenvalues()(k));
    }
    Eigen::ComplexEigenSolver<Mat> full(l.matrix);
    std::vector<cd> whole;
    for (Eigen::Index k = 0; k < full.eigenvalues().size(); ++k)
        whole.push_back(full.eigenvalues()(k));
    std::vector<cd> lhs = sorted_re_im(from_blocks), rhs = sorted_re_im(whole);
    REQUIRE(lhs.size() == rhs.size());
    for (size_t k = 0; k < lhs.size(); ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-8);

    // A diagonal unitary that fails to commute with L is rejected.
    Mat bad = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int k = 0; k <= cutoff; ++k) bad(k, k) = std::exp(cd(0, 0.4 * k * k));
    CHECK_THROWS_AS(weak_symmetry_blocks(l, Operator{n.space, bad}), InvalidArgument);
}

TEST_CASE("large damped cavity: single steady state by inverse iteration") {
    const int cutoff = 39;
    Operator a = annihilation(cutoff);
    LindbladModel model = LindbladModel::make(zero_operator(a.space), {{1.0, a}});
    SuperOp l = build_liouvillian(model);

    CHECK_THROWS_AS(spectrum(l), CapabilityError);

    SteadyStates ss = steady_states(l);
    REQUIRE(ss.states.size() == 1);
    CHECK(!ss.traceless[0]);
    const Mat& st = ss.states[0].matrix;
    CHECK(std::abs(st(0, 0) - 1.0) < 1e-6);
    CHECK(st.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK((l.matrix * vectorize(st)).cwiseAbs().maxCoeff() < 1e-7);
}
