#include "oqs/qec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oqs/random.hpp"

namespace oqs {

namespace {

// Qubit basis order puts |1> (= excited) first, so bit '1' -> index 0.
Ket ket_from_bits(const HilbertSpace& space, const char* bits) {
    int idx = 0;
    for (const char* b = bits; *b; ++b) idx = idx * 2 + (*b == '1' ? 0 : 1);
    return basis_ket(space, idx);
}

Mat random_density(RandomStream& rng, int d) {
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cd(rng.normal(), rng.normal());
    Mat rho = a * a.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

CoherenceReport single_qubit_coherence(double gamma1, double gamma_phi) {
    if (gamma1 < 0 || gamma_phi < 0)
        throw InvalidArgument("single_qubit_coherence: rates must be >= 0");
    HilbertSpace space{2};
    LindbladModel model = LindbladModel::make(
        zero_operator(space),
        {{gamma1, pauli(PauliAxis::minus)}, {gamma_phi, pauli(PauliAxis::z)}});
    Spectrum s = spectrum(build_liouvillian(model));

    double scale = 0;
    for (cd ev : s.eigenvalues) scale = std::max(scale, std::abs(ev));

    // decay time of the eigenmode that looks most like the probe operator
    auto decay_time = [&](const Operator& probe) {
        double best = 0;
        int best_idx = -1;
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
            if (std::abs(s.eigenvalues[k]) <= 1e-8 * std::max(1.0, scale)) continue;
            double o = std::abs((probe.adjoint() * s.right[k]).trace()) /
                       (probe.hs_norm() * s.right[k].hs_norm());
            if (o > best) {
                best = o;
                best_idx = static_cast<int>(k);
            }
        }
        if (best_idx < 0 || best <= 1e-6) return std::numeric_limits<double>::infinity();
        return -1.0 / s.eigenvalues[best_idx].real();
    };

    CoherenceReport rep;
    rep.infinite = gamma1 == 0 && gamma_phi == 0;
    rep.t1 = decay_time(pauli(PauliAxis::z));
    rep.t2 = decay_time(pauli(PauliAxis::plus));
    rep.spec = std::move(s);
    return rep;
}

TwoQubitReport two_qubit_logical_demo(double gamma1, double gamma2, int n_random,
                                      std::uint64_t seed) {
    if (gamma1 < 0 || gamma2 < 0)
        throw InvalidArgument("two_qubit_logical_demo: rates must be >= 0");
    HilbertSpace one{2};
    Operator sm = pauli(PauliAxis::minus);
    Spectrum s1 =
        spectrum(build_liouvillian(LindbladModel::make(zero_operator(one), {{gamma1, sm}})));
    Spectrum s2 =
        spectrum(build_liouvillian(LindbladModel::make(zero_operator(one), {{gamma2, sm}})));

    HilbertSpace two{2, 2};
    LindbladModel joint = LindbladModel::make(
        zero_operator(two), {{gamma1, embed(sm, 0, two)}, {gamma2, embed(sm, 1, two)}});
    SuperOp lj = build_liouvillian(joint);
    Spectrum sj = spectrum(lj);

    auto by_re_im = [](cd a, cd b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::vector<cd> minkowski;
    for (cd a : s1.eigenvalues)
        for (cd b : s2.eigenvalues) minkowski.push_back(a + b);
    std::sort(minkowski.begin(), minkowski.end(), by_re_im);
    std::vector<cd> joint_sorted = sj.eigenvalues;
    std::sort(joint_sorted.begin(), joint_sorted.end(), by_re_im);

    TwoQubitReport rep;
    rep.minkowski_mismatch = 0;
    for (std::size_t k = 0; k < minkowski.size(); ++k)
        rep.minkowski_mismatch =
            std::max(rep.minkowski_mismatch, std::abs(minkowski[k] - joint_sorted[k]));
    rep.joint_eigenvalues = std::move(joint_sorted);

    const double times[] = {0.25, 0.8, 1.7};
    std::vector<SuperOp> props;
    for (double t : times) props.push_back(superop_exp(lj, t));

    RandomStream rng(seed, 0);
    double worst = 0;
    for (int r = 0; r < n_random; ++r) {
        Mat r1 = random_density(rng, 2);
        Mat r2 = random_density(rng, 2);
        Operator rho0{two, kron(r1, r2)};
        for (std::size_t ti = 0; ti < props.size(); ++ti) {
            double t = times[ti];
            Operator reduced = partial_trace(props[ti].apply(rho0), {0});
            double e1 = std::exp(-gamma1 * t);
            double eh = std::exp(-gamma1 * t / 2);
            Mat expect(2, 2);
            expect(0, 0) = r1(0, 0) * e1;
            expect(0, 1) = r1(0, 1) * eh;
            expect(1, 0) = r1(1, 0) * eh;
            expect(1, 1) = r1(1, 1) + r1(0, 0) * (1 - e1);
            worst = std::max(worst, (reduced.matrix - expect).cwiseAbs().maxCoeff());
        }
    }
    rep.max_reduced_deviation = worst;
    return rep;
}

RepetitionCode build_repetition_code() {
    RepetitionCode code;
    code.space = HilbertSpace{2, 2, 2};
    code.syndromes = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    auto proj = [&](const char* a, const char* b) {
        Vec va = ket_from_bits(code.space, a).amplitudes;
        Vec vb = ket_from_bits(code.space, b).amplitudes;
        return Operator{code.space, va * va.adjoint() + vb * vb.adjoint()};
    };
    // syndrome sectors of (Z1 Z2, Z2 Z3), matched index by index with the
    // recovery that returns the sector to the code space
    code.projectors = {proj("111", "000"), proj("011", "100"), proj("101", "010"),
                       proj("110", "001")};
    Operator sx = pauli(PauliAxis::x);
    code.recoveries = {identity(code.space), embed(sx, 0, code.space), embed(sx, 1, code.space),
                       embed(sx, 2, code.space)};
    code.zero_logical = ket_from_bits(code.space, "000");
    code.one_logical = ket_from_bits(code.space, "111");
    return code;
}

SuperOp recovery_superop(const RepetitionCode& code) {
    std::vector<Mat> kraus;
    for (std::size_t j = 0; j < code.projectors.size(); ++j)
        kraus.push_back(code.recoveries[j].matrix * code.projectors[j].matrix);
    return kraus_to_superop(code.space, kraus);
}

CycleMap cycle_map(double gamma, double tau) {
    if (gamma < 0) throw InvalidArgument("cycle_map: gamma must be >= 0");
    if (!(tau > 0)) throw InvalidArgument("cycle_map: tau must be > 0");
    RepetitionCode code = build_repetition_code();
    const HilbertSpace& space = code.space;
    Operator sx = pauli(PauliAxis::x);
    LindbladModel noise = LindbladModel::make(zero_operator(space),
                                              {{gamma, embed(sx, 0, space)},
                                               {gamma, embed(sx, 1, space)},
                                               {gamma, embed(sx, 2, space)}});
    SuperOp cycle = recovery_superop(code) * superop_exp(build_liouvillian(noise), tau);
    Spectrum s = spectrum(cycle);

    CycleMap out;
    out.tau = tau;
    out.map = cycle;
    out.eigenvalues = s.eigenvalues;
    out.lambda_eff.resize(s.eigenvalues.size());
    out.phases.resize(s.eigenvalues.size());
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
        double m = std::abs(s.eigenvalues[j]);
        out.lambda_eff[j] =
            m > 0 ? std::log(m) / tau : -std::numeric_limits<double>::infinity();
        out.phases[j] = std::arg(s.eigenvalues[j]);
    }

    // HS-normalized logical algebra I_L, X_L, Y_L, Z_L
    Vec v0 = code.zero_logical.amplitudes;
    Vec v1 = code.one_logical.amplitudes;
    Mat p00 = v0 * v0.adjoint(), p11 = v1 * v1.adjoint();
    Mat p01 = v0 * v1.adjoint(), p10 = v1 * v0.adjoint();
    std::vector<Mat> logical = {p00 + p11, p01 + p10, cd(0, 1) * (p10 - p01), p00 - p11};
    std::vector<Vec> basis;
    for (const Mat& b : logical) basis.push_back(Vec(vectorize(b).normalized()));

    std::vector<double> overlap(s.eigenvalues.size());
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
        Vec v = vectorize(s.right[j].matrix);
        v.normalize();
        double o2 = 0;
        for (const Vec& b : basis) o2 += std::norm(b.dot(v));
        overlap[j] = std::sqrt(o2);
    }
    std::vector<int> order(s.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return overlap[a] > overlap[b]; });
    out.logical_modes.assign(order.begin(), order.begin() + 4);
    std::sort(out.logical_modes.begin(), out.logical_modes.end());

    double worst = 0;
    for (int m : out.logical_modes) worst = std::max(worst, std::abs(out.lambda_eff[m]));
    out.lambda_eff_logical = worst;
    return out;
}

std::vector<RatioRow> logical_error_ratio(double gamma, const std::vector<double>& tau_list) {
    std::vector<RatioRow> rows;
    rows.reserve(tau_list.size());
    for (double tau : tau_list) {
        CycleMap cm = cycle_map(gamma, tau);
        RatioRow row;
        row.tau = tau;
        row.lambda_eff_logical = cm.lambda_eff_logical;
        row.bare_rate = 2 * gamma;
        row.ratio = gamma > 0 ? cm.lambda_eff_logical / (2 * gamma)
                              : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace oqs
