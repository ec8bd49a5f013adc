#ifndef PADE_SPECTRAL_HPP
#define PADE_SPECTRAL_HPP

#include "pade/cfrac.hpp"
#include "pade/core.hpp"
#include "pade/tridiagonal.hpp"

#include <Eigen/Dense>

namespace pade {

/// P_n(w), Q_n(w) and Q_n'(w) from the three-term recurrences
///   X_{l+1} = (w - c_l) X_l - d_l X_{l-1}
///   Q'_{l+1} = (w - c_l) Q'_l + Q_l - d_l Q'_{l-1}
/// The true values are (p, q, dq) * 2^log2_scale; the scaled triple never
/// overflows, so ratios such as P/Q' are always usable.
struct PQValues {
    Complex p;
    Complex q;
    Complex dq;
    int log2_scale = 0;

    Complex p_unscaled() const { return std::ldexp(1.0, log2_scale) * p; }
    Complex q_unscaled() const { return std::ldexp(1.0, log2_scale) * q; }
    Complex dq_unscaled() const { return std::ldexp(1.0, log2_scale) * dq; }
};

inline PQValues eval_pq_scaled(const JacobiCoefficients& coeffs, Complex w) {
    const std::size_t n = coeffs.order();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "empty coefficient set");
    // level 0 and level 1 values
    Complex p_prev, p_cur, q_prev(1.0), q_cur, dq_prev(0.0), dq_cur(1.0);
    if (coeffs.variant == Variant::SubDiagonal) {
        p_prev = 0.0;
        p_cur = 1.0;
    } else {
        p_prev = 1.0;
        p_cur = w - coeffs.c0_prime;
    }
    q_cur = w - coeffs.c[0];
    int log2_scale = 0;
    for (std::size_t l = 1; l < n; ++l) {
        const Complex shift = w - coeffs.c[l];
        const Complex dl = coeffs.d_at(l);
        Complex p_next = shift * p_cur - dl * p_prev;
        Complex q_next = shift * q_cur - dl * q_prev;
        Complex dq_next = shift * dq_cur + q_cur - dl * dq_prev;
        p_prev = p_cur;
        p_cur = p_next;
        q_prev = q_cur;
        q_cur = q_next;
        dq_prev = dq_cur;
        dq_cur = dq_next;
        double mag = std::max({std::abs(p_cur), std::abs(q_cur), std::abs(dq_cur), std::abs(p_prev),
                               std::abs(q_prev), std::abs(dq_prev)});
        if (mag > 0x1.0p+400 || (mag < 0x1.0p-400 && mag > 0.0)) {
            int e = std::ilogb(mag);
            for (Complex* v : {&p_prev, &p_cur, &q_prev, &q_cur, &dq_prev, &dq_cur}) *v = std::ldexp(1.0, -e) * *v;
            log2_scale += e;
        }
    }
    return {p_cur, q_cur, dq_cur, log2_scale};
}

struct PQ {
    Complex p;
    Complex q;
    Complex dq;
};

/// Unscaled (P_n(w), Q_n(w), Q_n'(w)); may overflow for large n and |w| > 1.
inline PQ eval_pq(const JacobiCoefficients& coeffs, Complex w) {
    PQValues v = eval_pq_scaled(coeffs, w);
    return {v.p_unscaled(), v.q_unscaled(), v.dq_unscaled()};
}

struct SimplicityReport {
    bool simple = true;
    double min_gap = std::numeric_limits<double>::infinity();
};

/// Default relative tolerance for declaring two poles coincident.
inline constexpr double default_simplicity_tol = 1e-8;

/// Minimum pairwise distance; degenerate when it falls below tol * max|z|.
inline SimplicityReport simplicity_check(std::span<const Complex> poles, double tol = default_simplicity_tol) {
    SimplicityReport out;
    double radius = 0.0;
    for (auto z : poles) radius = std::max(radius, std::abs(z));
    for (std::size_t i = 0; i < poles.size(); ++i)
        for (std::size_t j = i + 1; j < poles.size(); ++j) out.min_gap = std::min(out.min_gap, std::abs(poles[i] - poles[j]));
    out.simple = !(out.min_gap <= tol * radius) && std::isfinite(radius);
    if (poles.size() > 1 && radius == 0.0) out.simple = false;
    return out;
}

inline void require_simple(std::span<const Complex> poles, double tol = default_simplicity_tol) {
    auto report = simplicity_check(poles, tol);
    if (!report.simple)
        throw Error(ErrorKind::DegenerateSpectrum,
                    "poles are not simple (minimum gap " + std::to_string(report.min_gap) + ")");
}

/// T_n[i, j] = Q_i(z_j); column j is the eigenvector of J_n for z_j.
inline Eigen::MatrixXcd diagonalization_t(const JacobiCoefficients& coeffs, std::span<const Complex> poles,
                                          double tol = default_simplicity_tol) {
    const std::size_t n = coeffs.order();
    if (poles.size() != n) throw Error(ErrorKind::InvalidArgument, "need exactly n poles");
    require_simple(poles, tol);
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXcd t(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Complex z = poles[static_cast<std::size_t>(j)];
        Complex prev(1.0);
        t(0, j) = prev;
        if (m == 1) continue;
        Complex cur = z - coeffs.c[0];
        t(1, j) = cur;
        for (Eigen::Index i = 1; i + 1 < m; ++i) {
            Complex next = (z - coeffs.c[static_cast<std::size_t>(i)]) * cur - coeffs.d_at(static_cast<std::size_t>(i)) * prev;
            prev = cur;
            cur = next;
            t(i + 1, j) = cur;
        }
    }
    return t;
}

struct Doublet {
    std::size_t pole_index;
    std::size_t zero_index;
    Complex pole;
    Complex zero;
    double elongation;
};

struct FroissartPairs {
    std::vector<Doublet> doublets;
    std::vector<std::size_t> unmatched_poles;
};

/// Pairs each zero with a distinct pole, closest pairs first.
inline FroissartPairs froissart_pairs(std::span<const Complex> poles, std::span<const Complex> zeros) {
    FroissartPairs out;
    auto match = greedy_match(zeros, poles);
    std::vector<bool> used(poles.size(), false);
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        if (!match[i]) continue;
        std::size_t j = *match[i];
        used[j] = true;
        out.doublets.push_back({j, i, poles[j], zeros[i], std::abs(poles[j] - zeros[i])});
    }
    for (std::size_t j = 0; j < poles.size(); ++j)
        if (!used[j]) out.unmatched_poles.push_back(j);
    return out;
}

} // namespace pade

#endif // PADE_SPECTRAL_HPP
