#ifndef PADE_TRIDIAGONAL_HPP
#define PADE_TRIDIAGONAL_HPP

#include "pade/cfrac.hpp"
#include "pade/core.hpp"

#include <Eigen/Dense>

namespace pade {

/// Complex tridiagonal matrix with unit superdiagonal:
///   [ c_0  1            ]
///   [ d_1  c_1  1       ]
///   [      d_2  ...  1  ]
///   [           d  c    ]
/// Size 0 is allowed (J'_0 for n = 1).
class TridiagonalOperator {
  public:
    TridiagonalOperator() = default;

    TridiagonalOperator(ComplexVector diag, ComplexVector sub) : diag_(std::move(diag)), sub_(std::move(sub)) {
        std::size_t expected = diag_.empty() ? 0 : diag_.size() - 1;
        if (sub_.size() != expected)
            throw Error(ErrorKind::InvalidArgument, "sub-diagonal must have one entry fewer than the diagonal");
        for (auto z : diag_)
            if (!is_finite(z)) throw Error(ErrorKind::Validation, "non-finite diagonal entry");
        for (auto z : sub_)
            if (!is_finite(z)) throw Error(ErrorKind::Validation, "non-finite sub-diagonal entry");
    }

    std::size_t size() const noexcept { return diag_.size(); }
    std::span<const Complex> diag() const noexcept { return diag_; }
    std::span<const Complex> sub() const noexcept { return sub_; }

    Eigen::MatrixXcd dense() const {
        const auto m = static_cast<Eigen::Index>(size());
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            out(i, i) = diag_[i];
            if (i + 1 < m) {
                out(i, i + 1) = 1.0;
                out(i + 1, i) = sub_[i];
            }
        }
        return out;
    }

    /// Drops the first row and column.
    TridiagonalOperator trailing() const {
        if (diag_.empty()) throw Error(ErrorKind::InvalidArgument, "empty operator has no trailing block");
        return TridiagonalOperator(ComplexVector(diag_.begin() + 1, diag_.end()),
                                   sub_.empty() ? ComplexVector{} : ComplexVector(sub_.begin() + 1, sub_.end()));
    }

    /// Same matrix with the [0,0] entry replaced.
    TridiagonalOperator with_corner(Complex value) const {
        TridiagonalOperator out(*this);
        out.diag_.at(0) = value;
        return out;
    }

    double frobenius_norm() const {
        double sum = static_cast<double>(sub_.size());
        for (auto z : diag_) sum += std::norm(z);
        for (auto z : sub_) sum += std::norm(z);
        return std::sqrt(sum);
    }

  private:
    ComplexVector diag_;
    ComplexVector sub_;
};

/// Denominator matrix (J_n or J~_n) and numerator matrix (J'_{n-1} or J~'_n).
struct MatrixPair {
    TridiagonalOperator denominator;
    TridiagonalOperator numerator;
};

inline MatrixPair build_matrices(const JacobiCoefficients& coeffs) {
    TridiagonalOperator j(coeffs.c, coeffs.d);
    if (coeffs.variant == Variant::SubDiagonal) return {j, j.trailing()};
    return {j, j.with_corner(coeffs.c0_prime)};
}

/// J + tau e_0 e_0^*.
inline TridiagonalOperator perturbed_j(const TridiagonalOperator& j, double tau) {
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be >= 0");
    if (j.size() == 0) return j;
    return j.with_corner(j.diag()[0] + tau);
}

namespace detail {

inline double abs1(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

/// Eigenvalues of the 2x2 block [[a, b], [c, d]].
inline std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
    Complex mean = 0.5 * (a + d);
    Complex half = 0.5 * (a - d);
    Complex disc = std::sqrt(half * half + b * c);
    return {mean + disc, mean - disc};
}

/// Shifted QR iteration (implicit single shift, Givens rotations) on an upper
/// Hessenberg matrix stored row-major. Only the active window is updated since
/// Schur vectors are not needed. Throws Convergence with the stuck block.
inline ComplexVector hessenberg_qr_eigenvalues(std::vector<Complex>& h, std::size_t n, int max_sweeps_per_eig = 60) {
    auto at = [&h, n](std::size_t i, std::size_t j) -> Complex& { return h[i * n + j]; };
    ComplexVector eig(n);
    if (n == 0) return eig;
    const double ulp = machine_epsilon;
    const double safe_min = std::numeric_limits<double>::min();
    const double small_num = safe_min * (static_cast<double>(n) / ulp);

    long hi = static_cast<long>(n) - 1;
    int sweeps = 0;
    while (hi >= 0) {
        // look for a negligible sub-diagonal entry inside [0, hi]
        long lo = hi;
        for (; lo > 0; --lo) {
            Complex sub = at(lo, lo - 1);
            if (abs1(sub) <= small_num) break;
            double tst = abs1(at(lo - 1, lo - 1)) + abs1(at(lo, lo));
            if (tst == 0.0) {
                if (lo - 2 >= 0) tst += std::abs(at(lo - 1, lo - 2).real());
                if (lo + 1 <= hi) tst += std::abs(at(lo + 1, lo).real());
            }
            if (abs1(sub) <= ulp * tst) {
                // conservative test of Ahues and Tisseur
                double ab = std::max(abs1(sub), abs1(at(lo - 1, lo)));
                double ba = std::min(abs1(sub), abs1(at(lo - 1, lo)));
                double aa = std::max(abs1(at(lo, lo)), abs1(at(lo - 1, lo - 1) - at(lo, lo)));
                double bb = std::min(abs1(at(lo, lo)), abs1(at(lo - 1, lo - 1) - at(lo, lo)));
                double s = aa + ab;
                if (ba * (ab / s) <= std::max(small_num, ulp * (bb * (aa / s)))) break;
            }
        }
        if (lo > 0) at(lo, lo - 1) = 0.0;

        if (lo == hi) {
            eig[hi] = at(hi, hi);
            --hi;
            sweeps = 0;
            continue;
        }
        if (lo == hi - 1) {
            auto [e1, e2] = eig2(at(lo, lo), at(lo, hi), at(hi, lo), at(hi, hi));
            eig[lo] = e1;
            eig[hi] = e2;
            hi -= 2;
            sweeps = 0;
            continue;
        }
        if (++sweeps > max_sweeps_per_eig)
            throw Error(ErrorKind::Convergence,
                        "QR iteration did not converge on rows " + std::to_string(lo) + ".." + std::to_string(hi), lo,
                        hi);

        Complex shift;
        if (sweeps % 10 == 0) {
            // exceptional shift
            shift = at(hi, hi) + 0.75 * std::abs(at(hi, hi - 1).real()) + 0.75 * std::abs(at(hi, hi - 1).imag());
        } else {
            // Wilkinson shift: eigenvalue of the trailing 2x2 closer to h[hi][hi]
            Complex t = at(hi, hi);
            Complex u = std::sqrt(at(hi - 1, hi)) * std::sqrt(at(hi, hi - 1));
            double s = abs1(u);
            if (s != 0.0) {
                Complex x = 0.5 * (at(hi - 1, hi - 1) - t);
                double sx = abs1(x);
                s = std::max(s, sx);
                Complex y = s * std::sqrt((x / s) * (x / s) + (u / s) * (u / s));
                if (sx > 0.0) {
                    Complex xs = x / sx;
                    if (xs.real() * y.real() + xs.imag() * y.imag() < 0.0) y = -y;
                }
                Complex denom = x + y;
                if (denom != Complex(0.0)) t -= u * (u / denom);
            }
            shift = t;
        }

        // bulge chase over [lo, hi]
        for (long k = lo; k < hi; ++k) {
            Complex a, b;
            if (k == lo) {
                a = at(lo, lo) - shift;
                b = at(lo + 1, lo);
            } else {
                a = at(k, k - 1);
                b = at(k + 1, k - 1);
            }
            double c;
            Complex s;
            Complex r;
            double na = std::abs(a);
            double nb = std::abs(b);
            if (nb == 0.0) {
                c = 1.0;
                s = 0.0;
                r = a;
            } else if (na == 0.0) {
                c = 0.0;
                s = std::conj(b) / nb;
                r = nb;
            } else {
                double norm = std::hypot(na, nb);
                Complex phase = a / na;
                c = na / norm;
                s = phase * std::conj(b) / norm;
                r = phase * norm;
            }
            if (k > lo) {
                at(k, k - 1) = r;
                at(k + 1, k - 1) = 0.0;
            }
            // rows k, k+1 (columns k .. hi; column k-1 handled above)
            Complex* row_k = &at(k, 0);
            Complex* row_k1 = &at(k + 1, 0);
            for (long j = k; j <= hi; ++j) {
                Complex x = row_k[j];
                Complex y = row_k1[j];
                row_k[j] = c * x + s * y;
                row_k1[j] = -std::conj(s) * x + c * y;
            }
            // columns k, k+1 (rows lo .. min(k+2, hi))
            long last_row = std::min(k + 2, hi);
            Complex sc = std::conj(s);
            for (long i = lo; i <= last_row; ++i) {
                Complex x = at(i, k);
                Complex y = at(i, k + 1);
                at(i, k) = c * x + sc * y;
                at(i, k + 1) = -s * x + c * y;
            }
        }
    }
    return eig;
}

} // namespace detail

/// All eigenvalues of a unit-superdiagonal tridiagonal matrix, with
/// multiplicity, in canonical order. The matrix is balanced (symmetric
/// off-diagonal magnitudes) and then reduced by shifted Hessenberg QR.
inline ComplexVector eigenvalues(const TridiagonalOperator& t) {
    const std::size_t m = t.size();
    if (m == 0) return {};
    if (m == 1) return {t.diag()[0]};
    std::vector<Complex> h(m * m, Complex(0.0));
    auto diag = t.diag();
    auto sub = t.sub();
    for (std::size_t i = 0; i < m; ++i) h[i * m + i] = diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i) {
        double mag = std::abs(sub[i]);
        if (mag == 0.0) {
            h[i * m + i + 1] = 1.0;
            continue;
        }
        // diagonal similarity: |super| = |sub| = sqrt|d|
        double root = std::sqrt(mag);
        h[i * m + i + 1] = root;
        h[(i + 1) * m + i] = sub[i] / root;
    }
    ComplexVector eig = detail::hessenberg_qr_eigenvalues(h, m);
    canonical_sort(eig);
    return eig;
}

} // namespace pade

#endif // PADE_TRIDIAGONAL_HPP
