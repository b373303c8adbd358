#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oqs/qec.hpp"
#include "test_util.hpp"

using namespace oqs;
using namespace oqs::testutil;

namespace {

// 0.6|000> + 0.8i|111>, a logical superposition with visible coherence.
DensityMatrix logical_probe(const RepetitionCode& code) {
    Vec amp = 0.6 * code.zero_logical.amplitudes +
              cd(0, 0.8) * code.one_logical.amplitudes;
    return DensityMatrix::from_ket(Ket{code.space, amp});
}

}  // namespace

TEST_CASE("repetition code structure") {
    RepetitionCode code = build_repetition_code();
    CHECK(code.space.total_dim() == 8);

    REQUIRE(code.syndromes.size() == 4);
    CHECK(code.syndromes[0] == std::make_pair(1, 1));
    CHECK(code.syndromes[1] == std::make_pair(-1, 1));
    CHECK(code.syndromes[2] == std::make_pair(-1, -1));
    CHECK(code.syndromes[3] == std::make_pair(1, -1));

    // |000> and |111> with the excited state first in each factor.
    CHECK(std::abs(code.zero_logical.amplitudes(7) - 1.0) < 1e-15);
    CHECK(std::abs(code.one_logical.amplitudes(0) - 1.0) < 1e-15);

    Mat sum = Mat::Zero(8, 8);
    Operator z12 = embed(pauli(PauliAxis::z), 0, code.space) *
                   embed(pauli(PauliAxis::z), 1, code.space);
    Operator z23 = embed(pauli(PauliAxis::z), 1, code.space) *
                   embed(pauli(PauliAxis::z), 2, code.space);
    REQUIRE(code.projectors.size() == 4);
    for (size_t j = 0; j < 4; ++j) {
        const Mat& p = code.projectors[j].matrix;
        CHECK(max_abs_diff(p * p, p) < 1e-14);
        CHECK(max_abs_diff(p, p.adjoint()) < 1e-14);
        CHECK(std::abs(p.trace() - cd(2, 0)) < 1e-14);  // each sector is two dimensional
        // The projector lives in the advertised stabilizer sector.
        CHECK(max_abs_diff(z12.matrix * p, double(code.syndromes[j].first) * p) < 1e-14);
        CHECK(max_abs_diff(z23.matrix * p, double(code.syndromes[j].second) * p) < 1e-14);
        sum += p;
    }
    CHECK(max_abs_diff(sum, Mat::Identity(8, 8)) < 1e-14);

    REQUIRE(code.recoveries.size() == 4);
    CHECK(max_abs_diff(code.recoveries[0].matrix, Mat::Identity(8, 8)) < 1e-15);
    for (int k = 1; k < 4; ++k) {
        Operator xk = embed(pauli(PauliAxis::x), k - 1, code.space);
        CHECK(max_abs_diff(code.recoveries[k].matrix, xk.matrix) < 1e-15);
    }
}

TEST_CASE("recovery fixes any single bit flip and is a projection channel") {
    RepetitionCode code = build_repetition_code();
    SuperOp r = recovery_superop(code);
    DensityMatrix rho = logical_probe(code);

    CHECK(is_trace_preserving(r));
    CHECK(is_completely_positive(r));
    CHECK(max_abs_diff((r * r).matrix, r.matrix) < 1e-12);

    CHECK(max_abs_diff(r.apply(rho.op()).matrix, rho.matrix()) < 1e-12);
    for (int k = 0; k < 3; ++k) {
        Operator x = embed(pauli(PauliAxis::x), k, code.space);
        Operator flipped = x * rho.op() * x;
        CHECK(max_abs_diff(r.apply(flipped).matrix, rho.matrix()) < 1e-12);
    }

    // A phase flip is invisible to the bit-flip syndrome: the coherence comes
    // back wrong.
    Operator z = embed(pauli(PauliAxis::z), 0, code.space);
    Operator phased = z * rho.op() * z;
    CHECK(max_abs_diff(r.apply(phased).matrix, rho.matrix()) > 0.9);
}

TEST_CASE("cycle map: spectrum structure at gamma tau = 0.1") {
    CycleMap cycle = cycle_map(1.0, 0.1);
    CHECK(cycle.tau == doctest::Approx(0.1));
    REQUIRE(cycle.eigenvalues.size() == 64);
    REQUIRE(cycle.lambda_eff.size() == 64);
    REQUIRE(cycle.logical_modes.size() == 4);

    bool has_unit = false;
    for (cd eps : cycle.eigenvalues) {
        CHECK(std::abs(eps) <= 1.0 + 1e-10);
        if (std::abs(eps - cd(1, 0)) < 1e-10) has_unit = true;
    }
    CHECK(has_unit);

    CHECK(is_trace_preserving(cycle.map));
    CHECK(is_completely_positive(cycle.map));

    CHECK(cycle.lambda_eff_logical == doctest::Approx(0.47416281230500334).epsilon(1e-9));
}

TEST_CASE("logical error rate sweep against the frozen table") {
    std::vector<double> taus{0.01, 0.02, 0.04, 0.1, 0.2};
    std::vector<RatioRow> rows = logical_error_ratio(1.0, taus);
    REQUIRE(rows.size() == taus.size());

    std::vector<double> expected{0.058442757652191306, 0.1139326895435191,
                                 0.21692367533670953, 0.47416281230500334,
                                 0.7839535234063355};
    for (size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].tau == doctest::Approx(taus[k]));
        CHECK(rows[k].lambda_eff_logical == doctest::Approx(expected[k]).epsilon(1e-9));
        CHECK(rows[k].bare_rate == doctest::Approx(2.0));
        CHECK(rows[k].ratio == doctest::Approx(expected[k] / 2.0).epsilon(1e-9));
    }

    // Shorter cycles win, and every ratio here beats the unencoded qubit.
    for (size_t k = 1; k < rows.size(); ++k) CHECK(rows[k - 1].ratio < rows[k].ratio);
    CHECK(rows.back().ratio < 1.0);

    // In the frequent-correction regime the rate is linear in tau.
    double mt = (taus[0] + taus[1] + taus[2]) / 3;
    double ml = (rows[0].lambda_eff_logical + rows[1].lambda_eff_logical +
                 rows[2].lambda_eff_logical) / 3;
    double num = 0, den = 0;
    for (int k = 0; k < 3; ++k) {
        num += (taus[k] - mt) * (rows[k].lambda_eff_logical - ml);
        den += (taus[k] - mt) * (taus[k] - mt);
    }
    double slope = num / den, intercept = ml - slope * mt;
    double ss_res = 0, ss_tot = 0;
    for (int k = 0; k < 3; ++k) {
        double fit = slope * taus[k] + intercept;
        ss_res += std::pow(rows[k].lambda_eff_logical - fit, 2);
        ss_tot += std::pow(rows[k].lambda_eff_logical - ml, 2);
    }
    CHECK(slope == doctest::Approx(5.26367612).epsilon(1e-6));
    CHECK(intercept == doctest::Approx(0.00694726).epsilon(1e-4));
    CHECK(1.0 - ss_res / ss_tot == doctest::Approx(0.9996475436).epsilon(1e-6));
}

TEST_CASE("zero noise: the cycle is pure recovery and the ratio is undefined") {
    std::vector<RatioRow> rows = logical_error_ratio(0.0, {0.1});
    REQUIRE(rows.size() == 1);
    CHECK(std::abs(rows[0].lambda_eff_logical) < 1e-10);
    CHECK(rows[0].bare_rate == doctest::Approx(0.0));
    CHECK(std::isnan(rows[0].ratio));
}

TEST_CASE("single qubit coherence times from the spectrum") {
    CoherenceReport both = single_qubit_coherence(0.8, 0.3);
    CHECK(!both.infinite);
    CHECK(both.t1 == doctest::Approx(1.0 / 0.8).epsilon(1e-10));
    CHECK(both.t2 == doctest::Approx(1.0 / (0.4 + 0.6)).epsilon(1e-10));

    CoherenceReport relax_only = single_qubit_coherence(0.8);
    CHECK(relax_only.t1 == doctest::Approx(1.25).epsilon(1e-10));
    CHECK(relax_only.t2 == doctest::Approx(2.5).epsilon(1e-10));  // T2 = 2 T1

    // Pure dephasing never relaxes the populations.
    CoherenceReport dephase_only = single_qubit_coherence(0.0, 0.5);
    CHECK(!dephase_only.infinite);
    CHECK(std::isinf(dephase_only.t1));
    CHECK(dephase_only.t2 == doctest::Approx(1.0).epsilon(1e-10));

    CoherenceReport silent = single_qubit_coherence(0.0, 0.0);
    CHECK(silent.infinite);
    CHECK(std::isinf(silent.t1));
    CHECK(std::isinf(silent.t2));

    CHECK(single_qubit_coherence(1.6).t1 == doctest::Approx(relax_only.t1 / 2).epsilon(1e-10));
}

TEST_CASE("two decaying qubits: additive spectrum and untouched reduced dynamics") {
    TwoQubitReport report = two_qubit_logical_demo(0.8, 0.3);
    REQUIRE(report.joint_eigenvalues.size() == 16);
    CHECK(report.minkowski_mismatch < 1e-9);
    CHECK(report.max_reduced_deviation < 1e-9);
    for (cd lambda : report.joint_eigenvalues) CHECK(lambda.real() < 1e-10);

    // The slowest and fastest decays are the sums of the edge rates.
    CHECK(std::abs(report.joint_eigenvalues.front() - cd(-1.1, 0)) < 1e-9);
    CHECK(std::abs(report.joint_eigenvalues.back()) < 1e-10);
}
