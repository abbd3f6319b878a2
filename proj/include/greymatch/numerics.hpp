#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace greymatch::numerics {

/**
 * @brief Solve A X = B by LU decomposition with partial pivoting.
 *
 * Throws SingularMatrixError when a pivot falls below 1e-14 times the largest
 * entry of A.
 */
inline Matrix lu_solve(Matrix a, Matrix b) {
    if (!a.is_square()) throw ShapeError("lu_solve: matrix must be square, got " + a.shape());
    if (b.rows() != a.rows()) throw ShapeError("lu_solve: right-hand side has wrong row count");
    const std::size_t n = a.rows();
    const double scale = std::max(a.max_abs(), std::numeric_limits<double>::min());
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= 1e-14 * scale) {
            throw SingularMatrixError("matrix is singular to working precision (pivot " + std::to_string(k) + ")");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(k, j), b(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = b(kk, j);
            for (std::size_t i = kk + 1; i < n; ++i) s -= a(kk, i) * b(i, j);
            b(kk, j) = s / a(kk, kk);
        }
    }
    return b;
}

inline Vector lu_solve(const Matrix& a, const Vector& b) {
    return lu_solve(a, Matrix::column(b)).col_vector(0);
}

inline Matrix inverse(const Matrix& a) { return lu_solve(a, Matrix::identity(a.rows())); }

struct LeastSquaresSolution {
    Matrix coefficients;
    double residual_norm = 0.0;
    /// Ratio of the extreme diagonal entries of the pivoted R factor (a lower bound on cond_2).
    double condition_estimate = 0.0;
};

/**
 * @brief Minimise ||targets - design * C||_F by Householder QR with column pivoting.
 *
 * The numerical rank is the number of diagonal entries of R above
 * 1e-10 * ||design||_F; anything short of full column rank raises
 * SingularDesignError with the deficient column count.
 */
inline LeastSquaresSolution solve_least_squares(const Matrix& design, const Matrix& targets) {
    const std::size_t m = design.rows();
    const std::size_t n = design.cols();
    if (n == 0) throw ShapeError("solve_least_squares: design has no columns");
    if (m < n) {
        throw InsufficientDataError("solve_least_squares: design has " + std::to_string(m) + " rows but " +
                                    std::to_string(n) + " columns");
    }
    if (targets.rows() != m) throw ShapeError("solve_least_squares: targets row count differs from design");
    if (!design.all_finite() || !targets.all_finite()) {
        throw ShapeError("solve_least_squares: non-finite entries in inputs");
    }

    Matrix r = design;
    Matrix qtb = targets;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> colnorm2(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i) colnorm2[j] += r(i, j) * r(i, j);

    const double tol = 1e-10 * design.frobenius();
    Vector v(m);
    for (std::size_t k = 0; k < n; ++k) {
        // pivot on the largest remaining column norm
        std::size_t best = k;
        for (std::size_t j = k + 1; j < n; ++j)
            if (colnorm2[j] > colnorm2[best]) best = j;
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, best));
            std::swap(colnorm2[k], colnorm2[best]);
            std::swap(perm[k], perm[best]);
        }

        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha += r(i, k) * r(i, k);
        alpha = std::sqrt(alpha);
        if (alpha <= tol) {
            const std::size_t deficient = n - k;
            throw SingularDesignError("singular design: numerical rank " + std::to_string(k) + " < " +
                                          std::to_string(n) + " columns (" + std::to_string(deficient) +
                                          " deficient column" + (deficient == 1 ? "" : "s") + ")",
                                      deficient);
        }
        if (r(k, k) > 0) alpha = -alpha;
        for (std::size_t i = 0; i < m; ++i) v[i] = 0.0;
        v[k] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i] = r(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];

        if (vnorm2 > 0.0) {
            for (std::size_t j = k; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += v[i] * r(i, j);
                s = 2.0 * s / vnorm2;
                for (std::size_t i = k; i < m; ++i) r(i, j) -= s * v[i];
            }
            for (std::size_t j = 0; j < qtb.cols(); ++j) {
                double s = 0.0;
                for (std::size_t i = k; i < m; ++i) s += v[i] * qtb(i, j);
                s = 2.0 * s / vnorm2;
                for (std::size_t i = k; i < m; ++i) qtb(i, j) -= s * v[i];
            }
        }
        // downdate remaining column norms from the rows below k
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < m; ++i) s += r(i, j) * r(i, j);
            colnorm2[j] = s;
        }
    }

    Matrix permuted(n, qtb.cols());
    for (std::size_t j = 0; j < qtb.cols(); ++j) {
        for (std::size_t kk = n; kk-- > 0;) {
            double s = qtb(kk, j);
            for (std::size_t i = kk + 1; i < n; ++i) s -= r(kk, i) * permuted(i, j);
            permuted(kk, j) = s / r(kk, kk);
        }
    }
    Matrix coef(n, qtb.cols());
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < qtb.cols(); ++j) coef(perm[k], j) = permuted(k, j);

    LeastSquaresSolution out;
    out.residual_norm = (targets - design * coef).frobenius();
    out.condition_estimate = std::abs(r(0, 0)) / std::abs(r(n - 1, n - 1));
    out.coefficients = std::move(coef);
    return out;
}

/**
 * @brief exp(scale * M) by scaling and squaring with the degree-13 Pade approximant.
 *
 * Coefficients and the theta_13 threshold follow Higham (2005).
 */
inline Matrix matrix_exponential(const Matrix& m, double scale = 1.0) {
    if (!m.is_square()) throw ShapeError("matrix_exponential: matrix must be square, got " + m.shape());
    const std::size_t n = m.rows();
    if (n == 0) return {};
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;

    Matrix a = m * scale;
    if (!a.all_finite()) throw OverflowError("matrix_exponential: non-finite argument");
    const double norm = a.norm1();
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
        a *= std::ldexp(1.0, -squarings);
    }
    const Matrix ident = Matrix::identity(n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;

    Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident;
    Matrix u = a * u_inner;
    Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;

    Matrix r = lu_solve(v - u, v + u);
    for (int s = 0; s < squarings; ++s) r = r * r;
    if (!r.all_finite()) throw OverflowError("matrix_exponential: result overflowed");
    return r;
}

using VectorFunction = std::function<Vector(double)>;

/**
 * @brief Composite Simpson approximation of  int_{t_from}^{t_to} exp(A (t_from - s)) f(s) ds.
 *
 * Uses 2 * steps panels of equal width; the error is O(ds^4) for smooth f.
 */
inline Vector convolution_integral(const Matrix& a, const VectorFunction& f, double t_from, double t_to,
                                   std::size_t steps) {
    if (!a.is_square()) throw ShapeError("convolution_integral: A must be square");
    if (t_to < t_from) throw PreconditionError("convolution_integral: t_to < t_from");
    if (steps < 1) throw PreconditionError("convolution_integral: steps must be >= 1");
    const std::size_t d = a.rows();
    const std::size_t panels = 2 * steps;
    const double ds = (t_to - t_from) / static_cast<double>(panels);
    const Matrix step = matrix_exponential(a, -ds);

    Vector acc(d, 0.0);
    Matrix kernel = Matrix::identity(d);  // exp(A (t_from - s_j))
    for (std::size_t j = 0; j <= panels; ++j) {
        const double s = t_from + ds * static_cast<double>(j);
        const Vector fs = f(s);
        if (fs.size() != d) throw ShapeError("convolution_integral: integrand has wrong dimension");
        const double w = (j == 0 || j == panels) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        const Vector term = kernel * fs;
        for (std::size_t i = 0; i < d; ++i) acc[i] += w * term[i];
        kernel = kernel * step;
    }
    for (double& v : acc) v *= ds / 3.0;
    return acc;
}

}  // namespace greymatch::numerics
