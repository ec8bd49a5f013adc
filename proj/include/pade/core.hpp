#ifndef PADE_CORE_HPP
#define PADE_CORE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pade {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double machine_epsilon = std::numeric_limits<double>::epsilon();

/// Which Pade approximant of the Z-transform is being built.
///   SubDiagonal: [n-1/n], uses s_0 .. s_{2n-1}
///   Diagonal:    [n/n],   uses s_0 .. s_{2n}
enum class Variant { SubDiagonal, Diagonal };

enum class PoleMethod { JMatrix, Pencil };

enum class ErrorKind {
    InvalidLength,
    InvalidDamping,
    InvalidArgument,
    Parse,
    Validation,
    Io,
    LeadingSampleZero,
    OrderBreakdown,
    OrderTooLarge,
    ExactBreakdown,
    Convergence,
    NearSingularPencil,
    DegenerateSpectrum,
    ZeroPole,
    Matching,
    Numeric,
    Overflow,
    Unsupported,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidLength: return "invalid_length";
    case ErrorKind::InvalidDamping: return "invalid_damping";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Validation: return "validation_error";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::LeadingSampleZero: return "leading_sample_zero";
    case ErrorKind::OrderBreakdown: return "order_breakdown";
    case ErrorKind::OrderTooLarge: return "order_too_large";
    case ErrorKind::ExactBreakdown: return "exact_breakdown";
    case ErrorKind::Convergence: return "convergence";
    case ErrorKind::NearSingularPencil: return "near_singular_pencil";
    case ErrorKind::DegenerateSpectrum: return "degenerate_spectrum";
    case ErrorKind::ZeroPole: return "zero_pole";
    case ErrorKind::Matching: return "matching";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Unsupported: return "unsupported";
    }
    return "unknown";
}

/// Library error. `index()` carries the breakdown level, line number, pole
/// index or first row of a stuck block, depending on the kind; `index_end()`
/// is only set for block-valued sites.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<long> index = std::nullopt,
          std::optional<long> index_end = std::nullopt)
        : std::runtime_error(message), kind_(kind), index_(index), index_end_(index_end) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<long> index() const noexcept { return index_; }
    std::optional<long> index_end() const noexcept { return index_end_; }

  private:
    ErrorKind kind_;
    std::optional<long> index_;
    std::optional<long> index_end_;
};

inline std::string_view to_string(Variant v) {
    return v == Variant::SubDiagonal ? "sub" : "diag";
}

inline std::string_view to_string(PoleMethod m) {
    return m == PoleMethod::JMatrix ? "jmatrix" : "pencil";
}

inline Variant parse_variant(std::string_view text) {
    if (text == "sub" || text == "subdiagonal") return Variant::SubDiagonal;
    if (text == "diag" || text == "diagonal") return Variant::Diagonal;
    throw Error(ErrorKind::InvalidArgument, "unknown variant '" + std::string(text) + "'");
}

inline PoleMethod parse_pole_method(std::string_view text) {
    if (text == "jmatrix") return PoleMethod::JMatrix;
    if (text == "pencil") return PoleMethod::Pencil;
    throw Error(ErrorKind::InvalidArgument, "unknown pole method '" + std::string(text) + "'");
}

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Lexicographic (Re, Im) order used for every reported spectrum.
inline bool canonical_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline void canonical_sort(ComplexVector& values) {
    std::sort(values.begin(), values.end(), canonical_less);
}

/// Permutation that puts `values` in canonical order.
inline std::vector<std::size_t> canonical_order(std::span<const Complex> values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        return canonical_less(values[i], values[j]);
    });
    return idx;
}

/// Greedy bipartite matching by distance. Returns, for every element of
/// `reference`, the index of its partner in `candidates` (or nullopt when
/// `candidates` is shorter). Pairs are taken in increasing distance; ties
/// are broken by (reference index, candidate index).
inline std::vector<std::optional<std::size_t>> greedy_match(std::span<const Complex> reference,
                                                            std::span<const Complex> candidates) {
    struct Pair {
        double dist;
        std::size_t ref;
        std::size_t cand;
    };
    std::vector<Pair> pairs;
    pairs.reserve(reference.size() * candidates.size());
    for (std::size_t i = 0; i < reference.size(); ++i)
        for (std::size_t j = 0; j < candidates.size(); ++j)
            pairs.push_back({std::abs(reference[i] - candidates[j]), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.ref != b.ref) return a.ref < b.ref;
        return a.cand < b.cand;
    });
    std::vector<std::optional<std::size_t>> match(reference.size());
    std::vector<bool> used(candidates.size(), false);
    std::size_t remaining = std::min(reference.size(), candidates.size());
    for (const auto& p : pairs) {
        if (remaining == 0) break;
        if (match[p.ref] || used[p.cand]) continue;
        match[p.ref] = p.cand;
        used[p.cand] = true;
        --remaining;
    }
    return match;
}

/// Reorders `candidates` so that candidates[i] is the greedy partner of
/// reference[i]. Both spans must have the same length.
inline ComplexVector matched(std::span<const Complex> reference, std::span<const Complex> candidates) {
    if (reference.size() != candidates.size())
        throw Error(ErrorKind::Matching, "cannot match spectra of different sizes");
    auto m = greedy_match(reference, candidates);
    ComplexVector out(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) out[i] = candidates[*m[i]];
    return out;
}

inline double norm2(std::span<const Complex> v) {
    double scale = 0.0;
    for (auto z : v) scale = std::max(scale, std::abs(z));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double sum = 0.0;
    for (auto z : v) sum += std::norm(z / scale);
    return scale * std::sqrt(sum);
}

/// ||a - b|| / ||b|| for equally long vectors (no matching applied).
inline double relative_difference(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "length mismatch");
    ComplexVector diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    double denom = norm2(b);
    double num = norm2(diff);
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

/// Relative distance between two spectra after greedy matching.
inline double matched_relative_error(std::span<const Complex> computed, std::span<const Complex> reference) {
    auto m = matched(reference, computed);
    return relative_difference(m, reference);
}

} // namespace pade

#endif // PADE_CORE_HPP
