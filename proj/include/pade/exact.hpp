#ifndef PADE_EXACT_HPP
#define PADE_EXACT_HPP

// Exact Gaussian-rational arithmetic for the fraction-less f table and the
// bordered Hankel determinant. Used as a small-order oracle for the
// floating-point pipeline; cost grows quickly with the order.

#include "pade/core.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace pade::exact {

using Rational = boost::multiprecision::cpp_rational;

template <class R>
struct GaussianRational {
    R re{0};
    R im{0};

    GaussianRational() = default;
    GaussianRational(R real, R imag = R(0)) : re(std::move(real)), im(std::move(imag)) {}
    GaussianRational(long real) : re(real), im(0) {}

    bool is_zero() const { return re == 0 && im == 0; }
    GaussianRational conj() const { return {re, -im}; }
    R norm() const { return re * re + im * im; }

    GaussianRational operator-() const { return {-re, -im}; }
    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        if (b.is_zero()) throw Error(ErrorKind::ExactBreakdown, "exact division by zero");
        R n = b.norm();
        GaussianRational p = a * b.conj();
        return {p.re / n, p.im / n};
    }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }

    /// True when both parts have denominator 1.
    bool is_gaussian_integer() const {
        using boost::multiprecision::denominator;
        return denominator(re) == 1 && denominator(im) == 1;
    }

    Complex to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

using Gaussian = GaussianRational<Rational>;

/// f_l^k for l = -2 .. L and k = 0 .. (N - 1 - max(l, 0)), built with the
/// fraction-less recurrence
///   f_{l+1}^k = (-1)^l / f_{l-2}^0 [f_l^0 f_{l-1}^{k+1} - f_{l-1}^0 f_l^{k+1}].
template <class R>
class ExactFTable {
  public:
    using Value = GaussianRational<R>;

    /// Largest order served by the oracle.
    static constexpr std::size_t max_order = 32;

    ExactFTable(std::span<const Value> s, std::size_t levels) : levels_(levels) {
        const std::size_t count = s.size();
        if (count < 1) throw Error(ErrorKind::InvalidLength, "empty signal");
        if (levels + 1 > count)
            throw Error(ErrorKind::InvalidLength, "f_" + std::to_string(levels) + " needs " +
                                                      std::to_string(levels + 1) + " samples");
        if (levels > 2 * max_order)
            throw Error(ErrorKind::InvalidArgument, "exact oracle is capped at order " + std::to_string(max_order));
        rows_.resize(levels + 3);
        // rows_[l + 2] holds f_l^k
        for (int l : {-2, -1}) {
            auto& row = rows_[l + 2];
            row.assign(count + 1, Value(0));
            row[0] = Value(1);
        }
        rows_[2].assign(s.begin(), s.end());
        for (std::size_t l = 0; l < levels; ++l) {
            const auto& fl = rows_[l + 2];
            const auto& fl1 = rows_[l + 1];
            const Value& divisor = rows_[l][0];
            if (divisor.is_zero())
                throw Error(ErrorKind::ExactBreakdown,
                            "f_" + std::to_string(static_cast<long>(l) - 2) + "^0 vanishes",
                            static_cast<long>(l) - 2);
            const std::size_t len = count - l - 1;
            std::vector<Value> next(len);
            const bool negate = (l % 2) == 1;
            for (std::size_t k = 0; k < len; ++k) {
                Value v = (fl[0] * fl1[k + 1] - fl1[0] * fl[k + 1]) / divisor;
                next[k] = negate ? -v : v;
            }
            rows_[l + 3] = std::move(next);
        }
    }

    std::size_t levels() const noexcept { return levels_; }

    const Value& f(long l, std::size_t k) const {
        if (l < -2 || l > static_cast<long>(levels_)) throw Error(ErrorKind::InvalidArgument, "level out of range");
        const auto& row = rows_[static_cast<std::size_t>(l + 2)];
        if (k >= row.size()) throw Error(ErrorKind::InvalidArgument, "column out of range");
        return row[k];
    }

    /// r_l = (-1)^{l-1} f_l^0 f_{l-3}^0 / (f_{l-2}^0 f_{l-1}^0), 1 <= l <= levels.
    Value r(std::size_t l) const {
        if (l == 0) return Value(0);
        const long li = static_cast<long>(l);
        check_nonzero(li - 2);
        check_nonzero(li - 1);
        Value f_lm3 = li - 3 >= -2 ? f(li - 3, 0) : Value(1);
        Value v = f(li, 0) * f_lm3 / (f(li - 2, 0) * f(li - 1, 0));
        return (l % 2 == 1) ? v : -v;
    }

    /// a_l = (-1)^l f_l^0 / f_{l-2}^0
    Value a(std::size_t l) const {
        const long li = static_cast<long>(l);
        check_nonzero(li - 2);
        Value v = f(li, 0) / f(li - 2, 0);
        return (l % 2 == 0) ? v : -v;
    }

    /// b_{l+1} = (-1)^l f_{l-1}^0 / f_{l-2}^0, indexed here by l + 1.
    Value b(std::size_t index) const {
        if (index == 0) throw Error(ErrorKind::InvalidArgument, "b is indexed from 1");
        const long li = static_cast<long>(index) - 1;
        check_nonzero(li - 2);
        Value v = f(li - 1, 0) / f(li - 2, 0);
        return (li % 2 == 0) ? v : -v;
    }

  private:
    void check_nonzero(long l) const {
        if (f(l, 0).is_zero())
            throw Error(ErrorKind::ExactBreakdown, "f_" + std::to_string(l) + "^0 vanishes", l);
    }

    std::size_t levels_;
    std::vector<std::vector<Value>> rows_;
};

template <class R>
ExactFTable<R> exact_f_table(std::span<const GaussianRational<R>> s, std::size_t levels) {
    return ExactFTable<R>(s, levels);
}

/// Exact conversion of a double (every finite double is a dyadic rational).
inline Rational to_rational(double x) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Validation, "non-finite value has no exact rational");
    int exponent = 0;
    double mantissa = std::frexp(x, &exponent);
    // 53 bits of mantissa as an integer
    auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
    Rational value(scaled);
    int shift = exponent - 53;
    boost::multiprecision::cpp_int two_pow = 1;
    two_pow <<= std::abs(shift);
    return shift >= 0 ? value * Rational(two_pow) : value / Rational(two_pow);
}

inline std::vector<Gaussian> to_gaussian(std::span<const Complex> s) {
    std::vector<Gaussian> out;
    out.reserve(s.size());
    for (auto z : s) out.emplace_back(to_rational(z.real()), to_rational(z.imag()));
    return out;
}

template <class R>
GaussianRational<R> determinant(std::vector<std::vector<GaussianRational<R>>> m) {
    const std::size_t n = m.size();
    GaussianRational<R> det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && m[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return GaussianRational<R>(0);
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            det = -det;
        }
        det = det * m[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (m[row][col].is_zero()) continue;
            auto factor = m[row][col] / m[col][col];
            for (std::size_t j = col; j < n; ++j) m[row][j] = m[row][j] - factor * m[col][j];
        }
    }
    return det;
}

/// Monic coefficients q_0 .. q_n of Q_n from the bordered Hankel determinant
///   det [ s_0     s_1  ... s_n      ]
///       [ ...                       ]
///       [ s_{n-1} s_n  ... s_{2n-1} ]
///       [ 1       w    ... w^n      ]
/// expanded by cofactors along the last row, normalised by the w^n cofactor.
/// `offset` = 1 gives Q~_n, built from s_1 .. s_{2n}.
template <class R>
std::vector<GaussianRational<R>> jacobi_q_coefficients(std::span<const GaussianRational<R>> s, std::size_t n,
                                                       std::size_t offset = 0) {
    if (s.size() < 2 * n + offset) throw Error(ErrorKind::InvalidLength, "not enough samples for the determinant");
    std::vector<GaussianRational<R>> minors(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        std::vector<std::vector<GaussianRational<R>>> minor(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t col = 0; col <= n; ++col)
                if (col != j) minor[i].push_back(s[offset + i + col]);
        minors[j] = determinant(std::move(minor));
    }
    const auto& lead = minors[n];
    if (lead.is_zero()) throw Error(ErrorKind::ExactBreakdown, "leading Hankel minor vanishes", static_cast<long>(n));
    std::vector<GaussianRational<R>> coeffs(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        // cofactor sign (-1)^{n + j}
        auto c = minors[j] / lead;
        coeffs[j] = ((n + j) % 2 == 0) ? c : -c;
    }
    return coeffs;
}

template <class R>
GaussianRational<R> horner(std::span<const GaussianRational<R>> coeffs, const GaussianRational<R>& w) {
    GaussianRational<R> acc(0);
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * w + coeffs[i];
    return acc;
}

} // namespace pade::exact

#endif // PADE_EXACT_HPP
