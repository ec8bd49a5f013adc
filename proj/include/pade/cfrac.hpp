#ifndef PADE_CFRAC_HPP
#define PADE_CFRAC_HPP

#include "pade/core.hpp"
#include "pade/signal.hpp"

namespace pade {

/// Continued-fraction coefficients r_1 .. r_m of the normalised S-fraction
/// of sum s_k z^k (r_0 = 0 is implicit). When the h recurrence broke down at
/// level L, only r_1 .. r_{L+2} are stored.
class CfracTable {
  public:
    CfracTable() = default;
    CfracTable(ComplexVector r, std::optional<long> breakdown_level)
        : r_(std::move(r)), breakdown_(breakdown_level) {}

    /// r_l for 0 <= l <= max_index().
    Complex r(std::size_t l) const {
        if (l == 0) return Complex(0.0);
        if (l > r_.size()) throw Error(ErrorKind::OrderTooLarge, "r_" + std::to_string(l) + " is not available");
        return r_[l - 1];
    }
    std::size_t max_index() const noexcept { return r_.size(); }
    std::span<const Complex> coefficients() const noexcept { return r_; }
    std::optional<long> breakdown_level() const noexcept { return breakdown_; }

  private:
    ComplexVector r_;
    std::optional<long> breakdown_;
};

/// |h_l^1| below breakdown_factor * max(1, max_{i<=l} |r_i|) counts as a
/// structural zero.
inline const double default_breakdown_factor = std::pow(machine_epsilon, 0.75);

/// Number of r coefficients the variant needs at order n.
inline std::size_t required_r_count(std::size_t n, Variant variant) {
    return variant == Variant::SubDiagonal ? 2 * n - 1 : 2 * n;
}

/// First two rows of the h table, indexed by k - 1:
///   h_{-1}^k = -s_k / s_0           k = 1 .. m
///   h_0^k    = s_k / s_0 - s_{k+1} / s_1   k = 1 .. m-1
inline std::pair<ComplexVector, ComplexVector> h_initial_rows(std::span<const Complex> s, std::size_t m) {
    if (m == 0 || s.size() < m + 1) throw Error(ErrorKind::InvalidLength, "not enough samples for the h table");
    ComplexVector first(m), second(m - 1);
    for (std::size_t k = 1; k <= m; ++k) first[k - 1] = -s[k] / s[0];
    for (std::size_t k = 1; k + 1 <= m; ++k) second[k - 1] = s[k] / s[0] - s[k + 1] / s[1];
    return {std::move(first), std::move(second)};
}

/// Runs the h-table recurrence
///   h_{-1}^k = -s_k / s_0
///   h_0^k    = s_k / s_0 - s_{k+1} / s_1
///   h_l^k    = h_{l-2}^{k+1} / h_{l-2}^1 - h_{l-1}^{k+1} / h_{l-1}^1
/// and returns r_l = h_{l-2}^1 for l = 1 .. max_index. Only two rows are kept.
/// Breakdown stops the recurrence and is recorded in the table, not thrown.
inline CfracTable continued_fraction(std::span<const Complex> s, std::size_t max_index,
                                     double breakdown_factor = default_breakdown_factor) {
    const std::size_t m = max_index;
    if (m == 0) throw Error(ErrorKind::InvalidArgument, "at least one coefficient must be requested");
    if (s.size() < m + 1)
        throw Error(ErrorKind::InvalidLength, "r_" + std::to_string(m) + " needs " + std::to_string(m + 1) +
                                                  " samples, got " + std::to_string(s.size()));
    const double hard_zero = std::numeric_limits<double>::min();
    if (std::abs(s[0]) < hard_zero) throw Error(ErrorKind::LeadingSampleZero, "s_0 is zero", 0);
    if (std::abs(s[1]) < hard_zero) throw Error(ErrorKind::LeadingSampleZero, "s_1 is zero", 1);

    ComplexVector r;
    r.reserve(m);
    double running_max = 1.0;
    // true when r_l is used as a divisor later and is numerically zero
    auto breaks_down = [&](Complex value, std::size_t l) {
        running_max = std::max(running_max, std::abs(value));
        return l < m && std::abs(value) < breakdown_factor * running_max;
    };

    // rows are indexed by k - 1, k = 1 .. row length
    auto [older, newer] = h_initial_rows(s, m);
    r.push_back(older[0]);
    if (breaks_down(r.back(), 1)) return CfracTable(std::move(r), -1);
    if (m == 1) return CfracTable(std::move(r), std::nullopt);

    r.push_back(newer[0]);
    if (breaks_down(r.back(), 2)) return CfracTable(std::move(r), 0);

    ComplexVector next;
    for (std::size_t l = 1; l + 2 <= m; ++l) {
        const Complex a = older[0];
        const Complex b = newer[0];
        const std::size_t len = m - l - 1;
        next.resize(len);
        for (std::size_t k = 1; k <= len; ++k) next[k - 1] = older[k] / a - newer[k] / b;
        r.push_back(next[0]);
        if (!is_finite(next[0]))
            throw Error(ErrorKind::Numeric, "h recurrence overflowed at level " + std::to_string(l),
                        static_cast<long>(l));
        if (breaks_down(next[0], l + 2)) return CfracTable(std::move(r), static_cast<long>(l));
        std::swap(older, newer);
        std::swap(newer, next);
    }
    return CfracTable(std::move(r), std::nullopt);
}

/// r coefficients for order n; breakdown below the required depth is an error
/// carrying the level at which h_l^1 vanished.
inline CfracTable h_table(const Signal& signal, std::size_t n, Variant variant = Variant::SubDiagonal,
                          double breakdown_factor = default_breakdown_factor) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    const std::size_t m = required_r_count(n, variant);
    if (signal.size() < m + 1)
        throw Error(ErrorKind::InvalidLength, "order " + std::to_string(n) + " needs " + std::to_string(m + 1) +
                                                  " samples, got " + std::to_string(signal.size()));
    CfracTable table = continued_fraction(signal.samples(), m, breakdown_factor);
    if (auto level = table.breakdown_level())
        throw Error(ErrorKind::OrderBreakdown,
                    "order breakdown at level " + std::to_string(*level) +
                        ": the signal is representable at lower order",
                    *level);
    return table;
}

/// Diagonal and sub-diagonal entries of J_n (variant SubDiagonal) or of
/// J~_n (variant Diagonal). `c0_prime` is the [0,0] entry of J~'_n.
struct JacobiCoefficients {
    ComplexVector c; // c_0 .. c_{n-1}
    ComplexVector d; // d_1 .. d_{n-1}, stored at d[0] .. d[n-2]
    Variant variant = Variant::SubDiagonal;
    Complex c0_prime{0.0};

    std::size_t order() const noexcept { return c.size(); }
    /// d_l with the 1-based index used by the recurrences.
    Complex d_at(std::size_t l) const { return d[l - 1]; }
};

inline JacobiCoefficients jacobi_coefficients(const CfracTable& table, std::size_t n,
                                              Variant variant = Variant::SubDiagonal) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    const std::size_t needed = required_r_count(n, variant);
    if (table.max_index() < needed)
        throw Error(ErrorKind::OrderTooLarge, "order " + std::to_string(n) + " needs r_1..r_" +
                                                  std::to_string(needed) + ", table holds " +
                                                  std::to_string(table.max_index()));
    JacobiCoefficients out;
    out.variant = variant;
    out.c.resize(n);
    out.d.resize(n - 1);
    if (variant == Variant::SubDiagonal) {
        out.c[0] = -table.r(1);
        for (std::size_t l = 1; l < n; ++l) {
            out.c[l] = -(table.r(2 * l) + table.r(2 * l + 1));
            out.d[l - 1] = table.r(2 * l - 1) * table.r(2 * l);
        }
        out.c0_prime = out.c[0];
    } else {
        out.c[0] = -table.r(1) - table.r(2);
        out.c0_prime = -table.r(2);
        for (std::size_t l = 1; l < n; ++l) {
            out.c[l] = -(table.r(2 * l + 2) + table.r(2 * l + 1));
            out.d[l - 1] = table.r(2 * l + 1) * table.r(2 * l);
        }
    }
    return out;
}

} // namespace pade

#endif // PADE_CFRAC_HPP
