#ifndef PADE_ANALYSIS_HPP
#define PADE_ANALYSIS_HPP

#include "pade/cfrac.hpp"
#include "pade/core.hpp"
#include "pade/pencil.hpp"
#include "pade/residues.hpp"
#include "pade/signal.hpp"
#include "pade/spectral.hpp"
#include "pade/tridiagonal.hpp"

#include <optional>
#include <string>

namespace pade {

/// Scaled unknowns of a full-window Vandermonde solve, kept so that the
/// reconstruction can reuse them without a rescaling round trip.
struct ScaledResidues {
    ComplexVector values;
    std::vector<long> exponents;
    long first_exponent = -1;
    std::size_t rows = 0;
};

struct PadeModel {
    Variant variant = Variant::SubDiagonal;
    std::size_t order = 0;
    Complex s0;
    ComplexVector poles;
    std::optional<ComplexVector> zeros;
    std::optional<ComplexVector> residues;
    std::optional<ScaledResidues> scaled_residues;
    double min_pole_gap = std::numeric_limits<double>::infinity();
    PoleMethod pole_method = PoleMethod::JMatrix;
    std::optional<ResidueMethod> residue_method;
    std::vector<std::string> flags;

    bool degenerate() const {
        for (const auto& f : flags)
            if (f == "degenerate_spectrum") return true;
        return false;
    }
    bool has_flag(std::string_view prefix) const {
        for (const auto& f : flags)
            if (std::string_view(f).substr(0, prefix.size()) == prefix) return true;
        return false;
    }
};

struct AnalysisOptions {
    Variant variant = Variant::SubDiagonal;
    PoleMethod pole_method = PoleMethod::JMatrix;
    std::optional<ResidueMethod> residue_method = ResidueMethod::VandermondeFull;
    double simplicity_tol = default_simplicity_tol;
    /// 0 selects default_tau.
    double tau = 0.0;
    bool normal_equations = false;
    double breakdown_factor = default_breakdown_factor;
};

/// Continued-fraction side of an analysis: coefficients and matrices.
struct Companion {
    JacobiCoefficients coeffs;
    MatrixPair matrices;
};

inline Companion companion(const Signal& signal, std::size_t n, Variant variant,
                           double breakdown_factor = default_breakdown_factor) {
    JacobiCoefficients coeffs = jacobi_coefficients(h_table(signal, n, variant, breakdown_factor), n, variant);
    MatrixPair m = build_matrices(coeffs);
    return {std::move(coeffs), std::move(m)};
}

inline std::size_t required_length(std::size_t n, Variant variant) {
    return variant == Variant::SubDiagonal ? 2 * n : 2 * n + 1;
}

/// n = floor(N/2) for [n-1/n], floor((N-1)/2) for [n/n].
inline std::size_t auto_order(std::size_t length, Variant variant) {
    return variant == Variant::SubDiagonal ? length / 2 : (length - 1) / 2;
}

inline ComplexVector compute_poles(const Signal& signal, std::size_t n, Variant variant, PoleMethod method,
                                   double breakdown_factor = default_breakdown_factor) {
    if (method == PoleMethod::Pencil) return poles_via_pencil(signal, n, variant);
    return eigenvalues(companion(signal, n, variant, breakdown_factor).matrices.denominator);
}

namespace detail {

inline const Companion& need_companion(const std::optional<Companion>& c, ResidueMethod m) {
    if (!c)
        throw Error(ErrorKind::Unsupported,
                    std::string("residue method '") + std::string(to_string(m)) + "' needs the continued fraction");
    return *c;
}

} // namespace detail

/// Fills model.residues (and scaled_residues for full-window solves).
inline void attach_residues(PadeModel& model, const Signal& signal, const std::optional<Companion>& comp,
                            ResidueMethod method, const AnalysisOptions& opt) {
    const bool sub = model.variant == Variant::SubDiagonal;
    auto take = [&](const VandermondeSolution& sol, bool full) {
        model.residues = sol.residues;
        if (full) model.scaled_residues = ScaledResidues{sol.scaled, sol.exponents, sol.first_exponent, sol.rows};
        if (sol.hard_zeros > 0) model.flags.push_back("hard_zero_residues:" + std::to_string(sol.hard_zeros));
    };
    switch (method) {
    case ResidueMethod::Product:
        if (!model.zeros) throw Error(ErrorKind::Unsupported, "product formula needs the zeros");
        model.residues = residues_product(model.s0, model.poles, *model.zeros, model.variant, opt.simplicity_tol);
        break;
    case ResidueMethod::Derivative:
        model.residues =
            residues_derivative(model.s0, model.poles, detail::need_companion(comp, method).coeffs, opt.simplicity_tol);
        break;
    case ResidueMethod::Eigenvector: {
        if (!sub) throw Error(ErrorKind::Unsupported, "eigenvector residues are defined for [n-1/n] only");
        const auto& c = detail::need_companion(comp, method);
        model.residues = residues_eigvec(model.s0, model.poles, diagonalization_t(c.coeffs, model.poles, opt.simplicity_tol),
                                         opt.simplicity_tol);
        break;
    }
    case ResidueMethod::VandermondeFull:
        take(sub ? residues_vandermonde_full(signal, model.poles, opt.normal_equations, opt.simplicity_tol)
                 : residues_nn_variant(signal, model.poles, false, opt.normal_equations, opt.simplicity_tol),
             true);
        break;
    case ResidueMethod::VandermondeSquare:
        take(sub ? residues_vandermonde_square(signal, model.poles, opt.simplicity_tol)
                 : residues_nn_variant(signal, model.poles, true, false, opt.simplicity_tol),
             false);
        break;
    case ResidueMethod::Perturbation: {
        if (!sub) throw Error(ErrorKind::Unsupported, "perturbation residues are defined for [n-1/n] only");
        const auto& c = detail::need_companion(comp, method);
        double tau = opt.tau > 0.0 ? opt.tau : default_tau(model.poles);
        model.residues = residues_perturbation(model.s0, model.poles, c.matrices.denominator, tau, opt.simplicity_tol);
        model.flags.push_back("perturbation_nearest_neighbour_matching");
        break;
    }
    }
    model.residue_method = method;
}

/// Full pipeline for one signal and order. A degenerate spectrum is reported
/// through the "degenerate_spectrum" flag (no residues); other failures throw.
inline PadeModel analyze(const Signal& signal, std::size_t n, const AnalysisOptions& opt = {}) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    if (signal.size() < required_length(n, opt.variant))
        throw Error(ErrorKind::InvalidLength, "order " + std::to_string(n) + " needs " +
                                                  std::to_string(required_length(n, opt.variant)) + " samples");
    PadeModel model;
    model.variant = opt.variant;
    model.order = n;
    model.s0 = signal[0];
    model.pole_method = opt.pole_method;

    std::optional<Companion> comp;
    try {
        comp = companion(signal, n, opt.variant, opt.breakdown_factor);
    } catch (const Error& e) {
        if (opt.pole_method == PoleMethod::JMatrix) throw;
        model.flags.push_back("continued_fraction_unavailable:" + std::string(to_string(e.kind())));
    }

    model.poles = opt.pole_method == PoleMethod::JMatrix ? eigenvalues(comp->matrices.denominator)
                                                          : poles_via_pencil(signal, n, opt.variant);
    if (comp) model.zeros = eigenvalues(comp->matrices.numerator);

    SimplicityReport simple = simplicity_check(model.poles, opt.simplicity_tol);
    model.min_pole_gap = simple.min_gap;
    if (!simple.simple) {
        model.flags.push_back("degenerate_spectrum");
        return model;
    }
    if (opt.residue_method) attach_residues(model, signal, comp, *opt.residue_method, opt);
    return model;
}

} // namespace pade

#endif // PADE_ANALYSIS_HPP
