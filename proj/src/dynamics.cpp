#include "oqs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "oqs/random.hpp"

namespace oqs {

void TimeGrid::validate() const {
    if (!(t1 > t0)) throw InvalidArgument("TimeGrid: t1 must exceed t0");
    if (!(dt > 0)) throw InvalidArgument("TimeGrid: dt must be positive");
    if (n_steps() < 1) throw InvalidArgument("TimeGrid: fewer than one step");
    if (sample_every < 1) throw InvalidArgument("TimeGrid: sample_every must be >= 1");
}

long TimeGrid::n_steps() const { return std::lround((t1 - t0) / dt); }

namespace {

double spectral_norm(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool sample_step(long step, long n, int every) {
    return step % every == 0 || step == n;
}

}  // namespace

MasterEvolution evolve_master(const LindbladModel& model, const DensityMatrix& rho0,
                              const TimeGrid& grid) {
    grid.validate();
    if (rho0.space() != model.space)
        throw InvalidArgument("evolve_master: state and model on different spaces");
    const Mat& h = model.hamiltonian.matrix;

    double max_rate = 0;
    for (const auto& j : model.jumps) max_rate = std::max(max_rate, j.rate);
    double scale = max_rate + spectral_norm(h);
    if (scale > 0 && grid.dt > 0.1 / scale)
        std::fprintf(stderr,
                     "warning: evolve_master dt=%g exceeds the recommended 0.1/(rate+|H|)=%g\n",
                     grid.dt, 0.1 / scale);

    std::vector<Mat> gdg;
    gdg.reserve(model.jumps.size());
    for (const auto& j : model.jumps) gdg.push_back(j.op.matrix.adjoint() * j.op.matrix);

    auto rhs = [&](const Mat& rho) {
        Mat out = cd(0, -1) * (h * rho - rho * h);
        for (std::size_t k = 0; k < model.jumps.size(); ++k) {
            const double rate = model.jumps[k].rate;
            const Mat& g = model.jumps[k].op.matrix;
            out.noalias() += rate * (g * rho * g.adjoint());
            out.noalias() -= (0.5 * rate) * (gdg[k] * rho);
            out.noalias() -= (0.5 * rate) * (rho * gdg[k]);
        }
        return out;
    };

    const long n = grid.n_steps();
    Mat rho = rho0.matrix();
    MasterEvolution out;

    auto take_sample = [&](long step) {
        double t = grid.t0 + step * grid.dt;
        double trace_tol = 1e-10 + 1e-8 * (t - grid.t0);
        try {
            out.states.push_back(
                DensityMatrix::validated({model.space, rho}, trace_tol, 1e-8, -1e-6));
        } catch (const InvalidArgument& e) {
            throw NumericError("evolve_master: state validation failed at step " +
                               std::to_string(step) + " (t=" + std::to_string(t) +
                               "): " + e.what());
        }
        out.times.push_back(t);
    };

    take_sample(0);
    for (long step = 1; step <= n; ++step) {
        Mat k1 = rhs(rho);
        Mat k2 = rhs(rho + (0.5 * grid.dt) * k1);
        Mat k3 = rhs(rho + (0.5 * grid.dt) * k2);
        Mat k4 = rhs(rho + grid.dt * k3);
        rho += (grid.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint().eval());
        if (sample_step(step, n, grid.sample_every)) take_sample(step);
    }
    return out;
}

ClosedEvolution evolve_closed(const Operator& h, const Ket& psi0, const TimeGrid& grid) {
    grid.validate();
    if (!h.is_hermitian()) throw InvalidArgument("evolve_closed: Hamiltonian must be Hermitian");
    if (h.space != psi0.space)
        throw InvalidArgument("evolve_closed: state and Hamiltonian on different spaces");

    const Mat& hm = h.matrix;
    auto rhs = [&](const Vec& psi) { return Vec(cd(0, -1) * (hm * psi)); };

    const long n = grid.n_steps();
    Vec psi = psi0.normalized().amplitudes;
    const double e0 = psi.dot(hm * psi).real();
    // Frobenius norm as the energy scale: a cheap upper bound on |H|, good
    // enough for a drift warning and it avoids an eigensolve on large spaces.
    const double e_scale = std::max(std::abs(e0), hm.norm());
    bool warned = false;

    ClosedEvolution out;
    auto take_sample = [&](long step) {
        out.times.push_back(grid.t0 + step * grid.dt);
        out.states.push_back(Ket{h.space, psi});
        if (!warned && e_scale > 0) {
            double e = psi.dot(hm * psi).real();
            if (std::abs(e - e0) > 1e-8 * e_scale) {
                std::fprintf(stderr,
                             "warning: evolve_closed energy drift %g at t=%g; reduce dt\n",
                             std::abs(e - e0), out.times.back());
                warned = true;
            }
        }
    };

    take_sample(0);
    for (long step = 1; step <= n; ++step) {
        Vec k1 = rhs(psi);
        Vec k2 = rhs(psi + (0.5 * grid.dt) * k1);
        Vec k3 = rhs(psi + (0.5 * grid.dt) * k2);
        Vec k4 = rhs(psi + grid.dt * k3);
        psi += (grid.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        psi /= psi.norm();
        if (sample_step(step, n, grid.sample_every)) take_sample(step);
    }
    return out;
}

EnvBenchResult random_environment_benchmark(const EnvBenchParams& p, const TimeGrid& grid) {
    if (p.M < 0) throw InvalidArgument("random_environment_benchmark: M must be >= 0");
    if (!(p.gbar1 > 0)) throw InvalidArgument("random_environment_benchmark: gbar1 must be > 0");
    if (p.rel_sigma < 0 || p.rel_sigma >= 1)
        throw InvalidArgument("random_environment_benchmark: rel_sigma must be in [0, 1)");
    if (!p.rwa && p.M > 10)
        throw CapabilityError("random_environment_benchmark: full coupling limited to M <= 10");
    if (p.rwa && p.M > 1023)
        throw CapabilityError("random_environment_benchmark: M too large");

    RandomStream rng(p.seed);
    const double gbar = p.M > 0 ? p.gbar1 / p.M : 0.0;
    std::vector<double> om(p.M), g(p.M);
    for (int i = 0; i < p.M; ++i) om[i] = rng.normal(p.omega, p.rel_sigma * p.omega);
    for (int i = 0; i < p.M; ++i) g[i] = rng.normal(gbar, p.rel_sigma * gbar);

    EnvBenchResult out;
    if (p.rwa) {
        // Single-excitation sector in the frame rotating at omega: component
        // 0 is |up; vacuum>, component i+1 has the excitation in mode i.
        HilbertSpace sector{p.M + 1};
        Mat h = Mat::Zero(p.M + 1, p.M + 1);
        for (int i = 0; i < p.M; ++i) {
            h(i + 1, i + 1) = om[i] - p.omega;
            h(0, i + 1) = h(i + 1, 0) = g[i];
        }
        ClosedEvolution ev = evolve_closed(Operator{sector, h}, basis_ket(sector, 0), grid);
        out.times = ev.times;
        out.excitation.reserve(ev.states.size());
        for (const Ket& psi : ev.states) out.excitation.push_back(std::norm(psi.amplitudes(0)));
    } else {
        // Qubit plus M single-excitation modes, sigma_x coupling.
        std::vector<int> dims(p.M + 1, 2);
        HilbertSpace space{dims};
        Operator num = pauli(PauliAxis::plus) * pauli(PauliAxis::minus);
        Operator h = p.omega * embed(num, 0, space);
        for (int i = 0; i < p.M; ++i) {
            h = h + om[i] * embed(num, i + 1, space);
            h = h + g[i] * (embed(pauli(PauliAxis::x), 0, space) *
                            embed(pauli(PauliAxis::x), i + 1, space));
        }
        std::vector<int> init(p.M + 1, 1);
        init[0] = 0;  // qubit excited, modes empty
        ClosedEvolution ev = evolve_closed(h, basis_ket(space, init), grid);
        Operator nq = embed(num, 0, space);
        out.times = ev.times;
        out.excitation.reserve(ev.states.size());
        for (const Ket& psi : ev.states)
            out.excitation.push_back(expectation(nq, psi).real());
    }
    return out;
}

double revival_time(const std::vector<double>& ts, const std::vector<double>& xs) {
    if (ts.size() != xs.size() || ts.empty())
        throw InvalidArgument("revival_time: mismatched or empty series");
    const std::size_t n = xs.size();
    std::vector<double> dn(n);
    double dmax = 0;
    for (std::size_t k = 0; k < n; ++k) {
        dn[k] = 1.0 - xs[k];
        dmax = std::max(dmax, dn[k]);
    }
    if (dmax <= 1e-12) return std::numeric_limits<double>::quiet_NaN();
    for (double& d : dn) d /= dmax;

    std::size_t i1 = n;
    for (std::size_t k = 0; k < n; ++k) {
        if (dn[k] >= 0.8) {
            i1 = k;
            break;
        }
    }
    if (i1 == n) return std::numeric_limits<double>::infinity();

    std::vector<double> tail(dn.begin() + i1, dn.end());
    std::nth_element(tail.begin(), tail.begin() + tail.size() / 2, tail.end());
    double median = tail[tail.size() / 2];
    if (tail.size() % 2 == 0) {
        double lower = *std::max_element(tail.begin(), tail.begin() + tail.size() / 2);
        median = 0.5 * (median + lower);
    }
    const double theta = 0.25 * median;
    for (std::size_t k = i1; k < n; ++k)
        if (dn[k] <= theta) return ts[k];
    return std::numeric_limits<double>::infinity();
}

RepeatedInteractionResult repeated_interaction_map(const RepeatedInteractionParams& p) {
    if (p.g < 0) throw InvalidArgument("repeated_interaction_map: g must be >= 0");
    if (!(p.tau > 0)) throw InvalidArgument("repeated_interaction_map: tau must be > 0");
    if (p.n_cycles < 1) throw InvalidArgument("repeated_interaction_map: n_cycles must be >= 1");
    if (p.cutoff < 1) throw InvalidArgument("repeated_interaction_map: cutoff must be >= 1");
    if (p.g * p.tau > 0.2)
        std::fprintf(stderr,
                     "warning: repeated_interaction_map g*tau=%g > 0.2; the rate fit assumes "
                     "weak coupling\n",
                     p.g * p.tau);

    const int dc = p.cutoff + 1;
    HilbertSpace cavity{dc};
    HilbertSpace joint{dc, 2};

    // Resonant exchange coupling, exact propagator for one interaction window.
    Operator a = annihilation(p.cutoff);
    Operator cpl = embed(a, 0, joint).adjoint() * embed(pauli(PauliAxis::minus), 1, joint) +
                   embed(a, 0, joint) * embed(pauli(PauliAxis::plus), 1, joint);
    Eigen::SelfAdjointEigenSolver<Mat> es(p.g * cpl.matrix);
    if (es.info() != Eigen::Success)
        throw NumericError("repeated_interaction_map: propagator eigensolve failed");
    Vec phases = (cd(0, -p.tau) * es.eigenvalues().cast<cd>()).array().exp();
    Mat u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    // Ancilla starts in the ground state (index 1); the unread measurement
    // {1 x |g><g|, 1 x |g><e|} leaves it there, so the cavity map has Kraus
    // blocks <g|U|g> and <e|U|g>.
    Mat k_stay(dc, dc), k_flip(dc, dc);
    for (int m = 0; m < dc; ++m)
        for (int n = 0; n < dc; ++n) {
            k_stay(m, n) = u(2 * m + 1, 2 * n + 1);
            k_flip(m, n) = u(2 * m + 0, 2 * n + 1);
        }
    RepeatedInteractionResult out{0.0, kraus_to_superop(cavity, {k_stay, k_flip}), {}};

    Mat rho = Mat::Zero(dc, dc);
    rho(p.cutoff, p.cutoff) = 1.0;
    Mat num = Mat::Zero(dc, dc);
    for (int n = 0; n < dc; ++n) num(n, n) = n;

    out.photon_numbers.reserve(p.n_cycles + 1);
    out.photon_numbers.push_back((num * rho).trace().real());
    for (int c = 0; c < p.n_cycles; ++c) {
        rho = devectorize(Vec(out.cycle.matrix * vectorize(rho)), static_cast<Eigen::Index>(dc));
        out.photon_numbers.push_back((num * rho).trace().real());
    }

    // Least-squares exponential fit over the first 5 e-foldings.
    const std::vector<double>& nk = out.photon_numbers;
    const double n0 = nk.front();
    if (n0 <= 0) {
        out.gamma_eff = 0.0;
        return out;
    }
    std::size_t last = nk.size() - 1;
    for (std::size_t k = 1; k < nk.size(); ++k) {
        if (nk[k] > nk[k - 1] * (1.0 + 1e-12) + 1e-15)
            throw NumericError("repeated_interaction_map: photon number is not monotone, "
                               "cannot fit a decay rate");
        if (nk[k] <= 0 || std::log(n0 / nk[k]) >= 5.0) {
            last = k;
            break;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k <= last; ++k) {
        if (nk[k] <= 0) break;
        double x = k * p.tau, y = std::log(nk[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    double denom = cnt * sxx - sx * sx;
    out.gamma_eff = denom > 0 ? -(cnt * sxy - sx * sy) / denom : 0.0;
    return out;
}

}  // namespace oqs
