// Shared helpers for the test binaries.
#pragma once

#include "oqs/algebra.hpp"
#include "oqs/random.hpp"

namespace oqs::testutil {

inline Mat rand_matrix(RandomStream& rng, int n, int m = -1) {
    if (m < 0) m = n;
    Mat a(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) a(i, j) = cd(rng.normal(), rng.normal());
    return a;
}

inline Mat rand_hermitian(RandomStream& rng, int n) {
    Mat a = rand_matrix(rng, n);
    return 0.5 * (a + a.adjoint());
}

inline Mat rand_density_mat(RandomStream& rng, int n) {
    Mat a = rand_matrix(rng, n);
    Mat rho = a * a.adjoint();
    return rho / rho.trace();
}

inline Vec rand_ket_vec(RandomStream& rng, int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v(i) = cd(rng.normal(), rng.normal());
    return v / v.norm();
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace oqs::testutil
