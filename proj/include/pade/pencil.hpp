#ifndef PADE_PENCIL_HPP
#define PADE_PENCIL_HPP

#include "pade/core.hpp"
#include "pade/signal.hpp"

#include <Eigen/Dense>

namespace pade {

/// Hankel pair with U0[i,j] = s_{i+j+1+offset}, U1[i,j] = s_{i+j+offset},
/// i, j = 0 .. n-1; det(U0 - z U1) vanishes at the poles. offset = 1 is the
/// diagonal-approximant pencil built from s_1 .. s_{2n}.
struct HankelPencil {
    Eigen::MatrixXcd u0;
    Eigen::MatrixXcd u1;
};

inline HankelPencil hankel_pencil(const Signal& signal, std::size_t n, Variant variant = Variant::SubDiagonal) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    const std::size_t offset = variant == Variant::SubDiagonal ? 0 : 1;
    if (signal.size() < 2 * n + offset)
        throw Error(ErrorKind::InvalidLength, "pencil of order " + std::to_string(n) + " needs " +
                                                  std::to_string(2 * n + offset) + " samples");
    const auto m = static_cast<Eigen::Index>(n);
    HankelPencil p{Eigen::MatrixXcd(m, m), Eigen::MatrixXcd(m, m)};
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
            auto k = static_cast<std::size_t>(i + j) + offset;
            p.u0(i, j) = signal[k + 1];
            p.u1(i, j) = signal[k];
        }
    return p;
}

/// U1 is inverted only when its condition estimate stays below this.
inline constexpr double pencil_condition_limit = 1e8;

/// Generalized eigenvalues of (U0, U1), canonical order. Solved as the
/// standard problem U1^{-1} U0 with a dense eigensolver.
inline ComplexVector poles_via_pencil(const Signal& signal, std::size_t n, Variant variant = Variant::SubDiagonal) {
    HankelPencil p = hankel_pencil(signal, n, variant);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(p.u1);
    double rcond = lu.rcond();
    if (!(rcond * pencil_condition_limit > 1.0))
        throw Error(ErrorKind::NearSingularPencil,
                    "Hankel pencil is too close to singular (condition estimate " +
                        std::to_string(rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity()) + ")");
    Eigen::MatrixXcd m = lu.solve(p.u0);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::Convergence, "dense eigensolver did not converge");
    ComplexVector out(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    canonical_sort(out);
    return out;
}

} // namespace pade

#endif // PADE_PENCIL_HPP
