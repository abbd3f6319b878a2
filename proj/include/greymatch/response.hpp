#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "basis.hpp"
#include "error.hpp"
#include "numerics.hpp"
#include "series.hpp"

namespace greymatch::response {

/// Refuse to propagate when ||A||_1 * span exceeds this.
inline constexpr double overflow_limit = 50.0;

inline void guard_overflow(const Matrix& a, double t1, const std::vector<double>& times) {
    double span = 0.0;
    for (double t : times) span = std::max(span, std::abs(t - t1));
    const double growth = a.norm1() * span;
    if (!(growth <= overflow_limit)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "overflow guard: ||A||_1 * span = %.6g exceeds %.6g", growth, overflow_limit);
        throw OverflowError(buf);
    }
}

/**
 * @brief Solve dx/dt = A x + G z(t), x(t1) = eta, where dz/dt = N z.
 *
 * Uses exp of the block matrix [[A, G], [0, N]] applied to [eta; z(t1)], which is
 * exact up to the matrix exponential itself.
 */
inline Matrix propagate_augmented(const Matrix& a, const Matrix& g, const basis::Generator& gen, const Vector& eta,
                                  double t1, const std::vector<double>& times) {
    const std::size_t d = a.rows();
    const std::size_t m = gen.N.rows();
    guard_overflow(a, t1, times);
    Matrix big(d + m, d + m);
    big.set_block(0, 0, a);
    big.set_block(0, d, g);
    big.set_block(d, d, gen.N);
    Vector state0(d + m);
    for (std::size_t i = 0; i < d; ++i) state0[i] = eta[i];
    const Vector z1 = gen.z(t1);
    for (std::size_t i = 0; i < m; ++i) state0[d + i] = z1[i];

    Matrix out(times.size(), d);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t1 - 1e-12 * std::max(1.0, std::abs(t1)))
            throw PreconditionError("time response requested before t1");
        const Vector s = numerics::matrix_exponential(big, times[k] - t1) * state0;
        for (std::size_t i = 0; i < d; ++i) out(k, i) = s[i];
    }
    if (!out.all_finite()) throw OverflowError("time response overflowed");
    return out;
}

/**
 * @brief Solve dx/dt = A x + f(t), x(t1) = eta, by variation of parameters.
 *
 * x(t) = exp(A (t - t1)) { eta + int_{t1}^{t} exp(A (t1 - s)) f(s) ds }, with the
 * integral taken by composite Simpson at `steps_per_unit` panels pairs per unit time
 * (at least one per requested interval).
 */
inline Matrix propagate_quadrature(const Matrix& a, const numerics::VectorFunction& f, const Vector& eta, double t1,
                                   const std::vector<double>& times, double steps_per_unit) {
    const std::size_t d = a.rows();
    guard_overflow(a, t1, times);
    Matrix out(times.size(), d);
    // accumulate the integral interval by interval: I(t) = int_{t1}^{t} exp(A (t1 - s)) f(s) ds
    Vector integral(d, 0.0);
    double t_prev = t1;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        if (t < t_prev - 1e-12 * std::max(1.0, std::abs(t_prev)))
            throw PreconditionError("quadrature time response needs nondecreasing times >= t1");
        if (t > t_prev) {
            const auto steps =
                static_cast<std::size_t>(std::max(1.0, std::ceil((t - t_prev) * std::max(steps_per_unit, 1.0))));
            // int_{t_prev}^{t} exp(A(t1 - s)) f ds = exp(A(t1 - t_prev)) int exp(A(t_prev - s)) f ds
            const Vector piece = numerics::convolution_integral(a, f, t_prev, t, steps);
            const Vector shifted = numerics::matrix_exponential(a, t1 - t_prev) * piece;
            for (std::size_t i = 0; i < d; ++i) integral[i] += shifted[i];
            t_prev = t;
        }
        const Vector x = numerics::matrix_exponential(a, t - t1) * (eta + integral);
        for (std::size_t i = 0; i < d; ++i) out(k, i) = x[i];
    }
    if (!out.all_finite()) throw OverflowError("time response overflowed");
    return out;
}

/**
 * @brief dx/dt = A x + B u(t) + c, x(t1) = eta, for a forcing spec.
 *
 * Analytic forcing goes through the exact block-exponential path; exogenous
 * forcing falls back to quadrature.
 */
inline Matrix linear_response(const Matrix& a, const Matrix& b, const Vector& c, const basis::ForcingSpec& spec,
                              const Vector& eta, double t1, const std::vector<double>& times,
                              double steps_per_unit = 50.0) {
    const std::size_t d = a.rows();
    if (eta.size() != d || c.size() != d || b.rows() != d || b.cols() != spec.dimension())
        throw ShapeError("linear_response: parameter shapes do not match the forcing spec");
    if (spec.analytic()) {
        const basis::Generator gen = basis::generator(spec);
        Matrix g = b * gen.C;
        for (std::size_t i = 0; i < d; ++i) g(i, 0) += c[i];
        return propagate_augmented(a, g, gen, eta, t1, times);
    }
    numerics::VectorFunction f = [&](double s) {
        Vector v = b * basis::u_at(spec, s);
        for (std::size_t i = 0; i < d; ++i) v[i] += c[i];
        return v;
    };
    return propagate_quadrature(a, f, eta, t1, times, steps_per_unit);
}

}  // namespace greymatch::response
