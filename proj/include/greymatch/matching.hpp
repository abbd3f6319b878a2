#pragma once

#include <string>
#include <vector>

#include "basis.hpp"
#include "error.hpp"
#include "numerics.hpp"
#include "response.hpp"
#include "series.hpp"

namespace greymatch::matching {

/**
 * @brief dx/dt = A x + B g(t) [+ c], x(t1) = eta, estimated jointly from the raw series.
 *
 * g is the forcing spec. With constant_term the last column of B is the
 * coefficient of a constant input (antiderivative t - t1); it is not a
 * separate parameter block.
 */
struct MatchingOptions {
    bool constant_term = false;
    double quadrature_steps_per_unit = 50.0;
};

struct MatchedParameterSet {
    Matrix A;
    Matrix B;     // d x (p + constant_term)
    Vector eta;   // x(t1)
    double residual_norm = 0.0;
    double condition_estimate = 0.0;
    basis::ForcingSpec forcing;
    bool constant_term = false;
    double t1 = 0.0;

    std::size_t dimension() const { return A.rows(); }
    /// The basis part of B (excluding the constant column).
    Matrix B_basis() const { return B.block(0, 0, B.rows(), forcing.dimension()); }
    /// The constant input coefficient, zero when absent.
    Vector constant() const { return constant_term ? B.col_vector(B.cols() - 1) : Vector(A.rows(), 0.0); }
};

struct Regression {
    Matrix design;
    Matrix targets;
};

/**
 * @brief Rows k = 2..n: [y_lnt(t_k) - x(t_1), U(t_k) - U(t_1), (t_k - t_1), 1] with target x(t_k).
 *
 * y_lnt is the trapezoid integral; U is the antiderivative of the forcing.
 */
inline Regression build_matching_regression(const VectorSeries& x, const basis::ForcingSample& forcing,
                                            bool constant_term = false) {
    const std::size_t n = x.size();
    const std::size_t d = x.dimension();
    const std::size_t p = forcing.values.cols();
    const std::size_t q = p + (constant_term ? 1 : 0);
    if (forcing.antiderivative_values.rows() != n) throw ShapeError("forcing sample length differs from the series");
    if (n < d + q + 2) {
        throw InsufficientDataError("integral matching needs n >= d + p + 2 = " + std::to_string(d + q + 2) +
                                    " points, got " + std::to_string(n));
    }
    const VectorSeries ylnt = integrate_piecewise_linear(x);
    const double t1 = x.grid().front();
    Regression r{Matrix(n - 1, d + q + 1), Matrix(n - 1, d)};
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t row = k - 1;
        for (std::size_t j = 0; j < d; ++j) {
            r.design(row, j) = ylnt.values()(k, j) - x.values()(0, j);
            r.targets(row, j) = x.values()(k, j);
        }
        for (std::size_t j = 0; j < p; ++j)
            r.design(row, d + j) = forcing.antiderivative_values(k, j) - forcing.antiderivative_values(0, j);
        if (constant_term) r.design(row, d + p) = x.grid()[k] - t1;
        r.design(row, d + q) = 1.0;
    }
    return r;
}

inline MatchedParameterSet fit_matching(const VectorSeries& x, const basis::ForcingSpec& spec,
                                        const MatchingOptions& options = {}) {
    const basis::ForcingSample sample = basis::evaluate_forcing(spec, x.grid());
    const Regression reg = build_matching_regression(x, sample, options.constant_term);
    const auto ls = numerics::solve_least_squares(reg.design, reg.targets);
    const std::size_t d = x.dimension();
    const std::size_t q = spec.dimension() + (options.constant_term ? 1 : 0);

    MatchedParameterSet out;
    const Matrix pi_t = ls.coefficients.transpose();  // d x (d + q + 1)
    out.A = pi_t.block(0, 0, d, d);
    out.B = pi_t.block(0, d, d, q);
    out.eta = pi_t.col_vector(d + q);
    out.residual_norm = ls.residual_norm;
    out.condition_estimate = ls.condition_estimate;
    out.forcing = spec;
    out.constant_term = options.constant_term;
    out.t1 = x.grid().front();
    return out;
}

inline Matrix matching_time_response(const MatchedParameterSet& params, const std::vector<double>& times,
                                     double steps_per_unit = 50.0) {
    return response::linear_response(params.A, params.B_basis(), params.constant(), params.forcing, params.eta,
                                     params.t1, times, steps_per_unit);
}

/// Fit, then evaluate the response on t_1..t_{n+r}.
inline VectorSeries matching_forecast(const VectorSeries& x, const basis::ForcingSpec& spec, std::size_t horizon,
                                      const MatchingOptions& options = {}) {
    const MatchedParameterSet params = fit_matching(x, spec, options);
    const TimeGrid grid = x.grid().extended(horizon);
    return {grid, matching_time_response(params, grid.points(), options.quadrature_steps_per_unit)};
}

}  // namespace greymatch::matching
