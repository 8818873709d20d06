#pragma once

#include <algorithm>
#include <array>

#include "bdsid/bell_protocol.hpp"
#include "bdsid/linalg.hpp"
#include "bdsid/shot_sampler.hpp"

namespace bdsid::testing {

template <typename A, typename B>
double max_abs_diff(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

/// Uniform point on the 3-simplex (sorted-uniform spacings).
inline BellCoefficients random_simplex(SplitMix64& rng) {
    std::array<double, 3> u{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    std::sort(u.begin(), u.end());
    return BellCoefficients(u[0], u[1] - u[0], u[2] - u[1], 1.0 - u[2]);
}

inline ComplexMatrix random_hermitian(SplitMix64& rng, int n, double scale) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = cxd(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0);
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    double norm = h.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm > 0) h *= scale / norm;
    return h;
}

/// Random density matrix as a mixture of random pure states.
inline ComplexMatrix random_density(SplitMix64& rng, int n) {
    ComplexMatrix rho = ComplexMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        ComplexVector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = cxd(2.0 * rng.uniform01() - 1.0, 2.0 * rng.uniform01() - 1.0);
        v.normalize();
        rho += rng.uniform01() * (v * v.adjoint());
    }
    rho /= rho.trace().real();
    // symmetrize away rounding
    return 0.5 * (rho + ComplexMatrix(rho.adjoint()));
}

}  // namespace bdsid::testing
