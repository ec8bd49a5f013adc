#ifndef PADE_RESIDUES_HPP
#define PADE_RESIDUES_HPP

#include "pade/cfrac.hpp"
#include "pade/core.hpp"
#include "pade/signal.hpp"
#include "pade/spectral.hpp"
#include "pade/tridiagonal.hpp"

#include <Eigen/Dense>

namespace pade {

enum class ResidueMethod { Product, Derivative, Eigenvector, VandermondeFull, VandermondeSquare, Perturbation };

inline constexpr ResidueMethod all_residue_methods[] = {
    ResidueMethod::Product,         ResidueMethod::Derivative,        ResidueMethod::Eigenvector,
    ResidueMethod::VandermondeFull, ResidueMethod::VandermondeSquare, ResidueMethod::Perturbation,
};

inline std::string_view to_string(ResidueMethod m) {
    switch (m) {
    case ResidueMethod::Product: return "product";
    case ResidueMethod::Derivative: return "derivative";
    case ResidueMethod::Eigenvector: return "eigenvector";
    case ResidueMethod::VandermondeFull: return "vandermonde-full";
    case ResidueMethod::VandermondeSquare: return "vandermonde-square";
    case ResidueMethod::Perturbation: return "perturbation";
    }
    return "unknown";
}

inline ResidueMethod parse_residue_method(std::string_view text) {
    for (auto m : all_residue_methods)
        if (to_string(m) == text) return m;
    throw Error(ErrorKind::InvalidArgument, "unknown residue method '" + std::string(text) + "'");
}

/// Column-scaled Vandermonde block. With V[k,j] = z_j^{first_exponent + k}
/// the relation is V[k,j] = matrix(k,j) * z_j^{exponents[j]}: columns with
/// |z_j| <= 1 are built forward from z_j^{first_exponent} (exponent 0);
/// columns with |z_j| > 1 end in 1 on the last row and are built backward
/// by division (exponent = last row's power).
struct ScaledVandermonde {
    Eigen::MatrixXcd matrix;
    std::vector<long> exponents;
};

inline ScaledVandermonde scaled_vandermonde(std::span<const Complex> poles, long first_exponent, std::size_t rows) {
    const auto r = static_cast<Eigen::Index>(rows);
    const auto c = static_cast<Eigen::Index>(poles.size());
    ScaledVandermonde out{Eigen::MatrixXcd(r, c), std::vector<long>(poles.size(), 0)};
    const long last_exponent = first_exponent + static_cast<long>(rows) - 1;
    for (Eigen::Index j = 0; j < c; ++j) {
        const Complex z = poles[static_cast<std::size_t>(j)];
        if (z == Complex(0.0) && first_exponent < 0)
            throw Error(ErrorKind::ZeroPole, "pole " + std::to_string(j) + " is zero", static_cast<long>(j));
        if (!is_finite(z)) throw Error(ErrorKind::Numeric, "non-finite pole", static_cast<long>(j));
        if (std::abs(z) <= 1.0) {
            Complex v = first_exponent < 0 ? 1.0 / z : Complex(1.0);
            for (long e = 0; e < first_exponent; ++e) v *= z;
            for (Eigen::Index k = 0; k < r; ++k) {
                out.matrix(k, j) = v;
                v *= z;
            }
        } else {
            out.exponents[static_cast<std::size_t>(j)] = last_exponent;
            Complex v(1.0);
            for (Eigen::Index k = r; k-- > 0;) {
                out.matrix(k, j) = v;
                v /= z;
            }
        }
    }
    return out;
}

/// value * z^{-exponent}, evaluated in the log domain so that the result
/// underflows cleanly to a hard zero instead of through intermediate steps.
inline Complex unscale(Complex value, Complex z, long exponent) {
    if (exponent == 0 || value == Complex(0.0)) return value;
    double log_mag = std::log(std::abs(value)) - static_cast<double>(exponent) * std::log(std::abs(z));
    double phase = std::arg(value) - static_cast<double>(exponent) * std::arg(z);
    if (log_mag > std::log(std::numeric_limits<double>::max()))
        throw Error(ErrorKind::Overflow, "rescaled value overflows");
    return std::polar(std::exp(log_mag), phase);
}

/// value * z^{exponent}; throws Overflow when the result is not representable.
inline Complex rescale(Complex value, Complex z, long exponent) {
    return unscale(value, z, -exponent);
}

/// Residues plus the solver's native scaled unknowns for the Vandermonde
/// methods: residues[j] = scaled[j] * z_j^{-exponents[j]}.
struct VandermondeSolution {
    ComplexVector residues;
    ComplexVector scaled;
    std::vector<long> exponents;
    long first_exponent = -1;
    std::size_t rows = 0;
    /// ||V~ rho~ - s|| / ||s|| over the window that was solved.
    double residual = 0.0;
    std::size_t hard_zeros = 0;
};

namespace detail {

inline Eigen::VectorXcd to_eigen(std::span<const Complex> v) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

inline VandermondeSolution vandermonde_solve(std::span<const Complex> rhs, std::span<const Complex> poles,
                                             long first_exponent, bool square, bool normal_equations) {
    ScaledVandermonde sv = scaled_vandermonde(poles, first_exponent, rhs.size());
    Eigen::VectorXcd b = to_eigen(rhs);
    Eigen::VectorXcd x;
    if (square) {
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sv.matrix);
        x = lu.solve(b);
    } else if (normal_equations) {
        Eigen::MatrixXcd gram = sv.matrix.adjoint() * sv.matrix;
        x = gram.ldlt().solve(sv.matrix.adjoint() * b);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sv.matrix);
        x = qr.solve(b);
    }
    if (!x.allFinite()) throw Error(ErrorKind::Numeric, "Vandermonde solve produced non-finite residues");
    VandermondeSolution out;
    out.first_exponent = first_exponent;
    out.rows = rhs.size();
    out.exponents = sv.exponents;
    double bnorm = b.norm();
    out.residual = bnorm > 0.0 ? (sv.matrix * x - b).norm() / bnorm : (sv.matrix * x - b).norm();
    out.scaled.assign(x.data(), x.data() + x.size());
    out.residues.resize(poles.size());
    for (std::size_t j = 0; j < poles.size(); ++j) {
        out.residues[j] = unscale(out.scaled[j], poles[j], out.exponents[j]);
        if (out.residues[j] == Complex(0.0) && out.scaled[j] != Complex(0.0)) ++out.hard_zeros;
    }
    return out;
}

} // namespace detail

/// rho_j = s0 z_j prod_i (z_j - lambda_i) / prod_{i != j} (z_j - z_i) for the
/// [n-1/n] form (no z_j factor for [n/n]); accumulated as a sum of logs so the
/// magnitude may span the whole double range.
inline ComplexVector residues_product(Complex s0, std::span<const Complex> poles, std::span<const Complex> zeros,
                                      Variant variant = Variant::SubDiagonal, double tol = default_simplicity_tol) {
    const std::size_t n = poles.size();
    const std::size_t expected_zeros = variant == Variant::SubDiagonal ? n - 1 : n;
    if (n == 0 || zeros.size() != expected_zeros)
        throw Error(ErrorKind::InvalidArgument, "zero count does not match the pole count");
    require_simple(poles, tol);
    ComplexVector out(n);
    const double log_max = std::log(std::numeric_limits<double>::max());
    for (std::size_t j = 0; j < n; ++j) {
        const Complex z = poles[j];
        double log_mag = std::log(std::abs(s0));
        double phase = std::arg(s0);
        if (variant == Variant::SubDiagonal) {
            if (z == Complex(0.0)) throw Error(ErrorKind::ZeroPole, "pole is zero", static_cast<long>(j));
            log_mag += std::log(std::abs(z));
            phase += std::arg(z);
        }
        for (auto lambda : zeros) {
            Complex f = z - lambda;
            log_mag += std::log(std::abs(f));
            phase += std::arg(f);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            Complex f = z - poles[i];
            log_mag -= std::log(std::abs(f));
            phase -= std::arg(f);
        }
        if (log_mag > log_max) throw Error(ErrorKind::Overflow, "residue overflows", static_cast<long>(j));
        out[j] = std::polar(std::exp(log_mag), phase);
    }
    return out;
}

/// rho_j = s0 z_j P_n(z_j) / Q_n'(z_j)   ([n-1/n])
/// rho_j = s0 P~_n(z_j) / Q~_n'(z_j)     ([n/n])
inline ComplexVector residues_derivative(Complex s0, std::span<const Complex> poles, const JacobiCoefficients& coeffs,
                                         double tol = default_simplicity_tol) {
    if (poles.size() != coeffs.order()) throw Error(ErrorKind::InvalidArgument, "need exactly n poles");
    require_simple(poles, tol);
    ComplexVector out(poles.size());
    for (std::size_t j = 0; j < poles.size(); ++j) {
        const Complex z = poles[j];
        PQValues v = eval_pq_scaled(coeffs, z);
        double scale = std::max(std::abs(v.p), std::abs(v.dq));
        if (!(std::abs(v.dq) > machine_epsilon * machine_epsilon * scale))
            throw Error(ErrorKind::DegenerateSpectrum, "Q_n' vanishes at a pole", static_cast<long>(j));
        Complex ratio = v.p / v.dq;
        out[j] = coeffs.variant == Variant::SubDiagonal ? s0 * z * ratio : s0 * ratio;
    }
    return out;
}

/// rho_j = s0 z_j (T_n^{-1} e_0)_j with one linear solve.
inline ComplexVector residues_eigvec(Complex s0, std::span<const Complex> poles, const Eigen::MatrixXcd& t,
                                     double tol = default_simplicity_tol) {
    const auto n = static_cast<Eigen::Index>(poles.size());
    if (t.rows() != n || t.cols() != n) throw Error(ErrorKind::InvalidArgument, "T must be n x n");
    require_simple(poles, tol);
    for (Eigen::Index j = 0; j < n; ++j)
        if (t(0, j) != Complex(1.0))
            throw Error(ErrorKind::InvalidArgument, "first row of T must be Q_0 = 1", static_cast<long>(j));
    if (!t.allFinite()) throw Error(ErrorKind::Overflow, "T has non-finite entries");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(t);
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(n);
    e0(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(e0);
    if (!x.allFinite() || lu.rcond() == 0.0) throw Error(ErrorKind::DegenerateSpectrum, "T is singular");
    ComplexVector out(poles.size());
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = s0 * poles[static_cast<std::size_t>(j)] * x(j);
    return out;
}

/// Least-squares solution of V~ rho~ = [s_0 .. s_{2n-1}] with V[k,j] = z_j^{k-1}.
inline VandermondeSolution residues_vandermonde_full(const Signal& signal, std::span<const Complex> poles,
                                                     bool normal_equations = false,
                                                     double tol = default_simplicity_tol) {
    const std::size_t n = poles.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "no poles");
    if (signal.size() < 2 * n) throw Error(ErrorKind::InvalidLength, "need 2n samples");
    require_simple(poles, tol);
    return detail::vandermonde_solve(signal.samples().subspan(0, 2 * n), poles, -1, false, normal_equations);
}

/// Square system on the first n samples.
inline VandermondeSolution residues_vandermonde_square(const Signal& signal, std::span<const Complex> poles,
                                                       double tol = default_simplicity_tol) {
    const std::size_t n = poles.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "no poles");
    if (signal.size() < 2 * n) throw Error(ErrorKind::InvalidLength, "need 2n samples");
    require_simple(poles, tol);
    return detail::vandermonde_solve(signal.samples().subspan(0, n), poles, -1, true, false);
}

/// [n/n] residues: s_k = sum_j rho_j z_j^{k-1} for k = 1 .. 2n (least squares),
/// or k = 1 .. n when `square` is set.
inline VandermondeSolution residues_nn_variant(const Signal& signal, std::span<const Complex> poles,
                                               bool square = false, bool normal_equations = false,
                                               double tol = default_simplicity_tol) {
    const std::size_t n = poles.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "no poles");
    if (signal.size() < 2 * n + 1) throw Error(ErrorKind::InvalidLength, "need 2n + 1 samples");
    require_simple(poles, tol);
    return detail::vandermonde_solve(signal.samples().subspan(1, square ? n : 2 * n), poles, 0, square,
                                     normal_equations);
}

/// tau = 1e-7 (1 + spectral radius).
inline double default_tau(std::span<const Complex> poles) {
    double radius = 0.0;
    for (auto z : poles) radius = std::max(radius, std::abs(z));
    return 1e-7 * (1.0 + radius);
}

/// Residues from the first-order motion of the spectrum of J + tau e_0 e_0^*:
/// lambda_j'(0) = rho_j / (s0 z_j), by a forward difference.
inline ComplexVector residues_perturbation(Complex s0, std::span<const Complex> poles, const TridiagonalOperator& j,
                                           double tau, double tol = default_simplicity_tol) {
    if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
    if (poles.size() != j.size()) throw Error(ErrorKind::InvalidArgument, "need exactly n poles");
    require_simple(poles, tol);
    for (std::size_t i = 0; i < poles.size(); ++i)
        if (poles[i] == Complex(0.0)) throw Error(ErrorKind::ZeroPole, "pole is zero", static_cast<long>(i));
    ComplexVector moved = eigenvalues(perturbed_j(j, tau));
    auto match = greedy_match(poles, moved);
    ComplexVector out(poles.size());
    for (std::size_t i = 0; i < poles.size(); ++i) {
        const std::size_t partner = *match[i];
        const double nearest = std::abs(moved[partner] - poles[i]);
        for (std::size_t k = 0; k < moved.size(); ++k) {
            if (k == partner) continue;
            double other = std::abs(moved[k] - poles[i]);
            if (other <= nearest * (1.0 + 1e-9) && other > 0.0)
                throw Error(ErrorKind::Matching, "two perturbed eigenvalues are equally near pole " + std::to_string(i),
                            static_cast<long>(i));
        }
        Complex derivative = (moved[partner] - poles[i]) / tau;
        out[i] = s0 * poles[i] * derivative;
    }
    return out;
}

} // namespace pade

#endif // PADE_RESIDUES_HPP
