#pragma once

#include <string>
#include <utility>
#include <vector>

#include "basis.hpp"
#include "error.hpp"
#include "numerics.hpp"
#include "response.hpp"
#include "series.hpp"

namespace greymatch::grey {

enum class InitialStrategy { fixed_first, fixed_last, least_squares, reduced_consistent };

inline std::string to_string(InitialStrategy s) {
    switch (s) {
        case InitialStrategy::fixed_first: return "fixed_first";
        case InitialStrategy::fixed_last: return "fixed_last";
        case InitialStrategy::least_squares: return "least_squares";
        case InitialStrategy::reduced_consistent: return "reduced_consistent";
    }
    return "?";
}

inline InitialStrategy strategy_from_string(const std::string& s) {
    for (auto v : {InitialStrategy::fixed_first, InitialStrategy::fixed_last, InitialStrategy::least_squares,
                   InitialStrategy::reduced_consistent})
        if (to_string(v) == s) return v;
    throw ParseError("unknown initial strategy \"" + s + "\"");
}

struct GreyFitConfig {
    double background_lambda = 0.5;
    double quadrature_steps_per_unit = 50.0;  // only used for exogenous forcing
};

/// A, B, c of dy/dt = A y + B u + c.
struct GreyStructure {
    Matrix A;
    Matrix B;
    Vector c;
};

struct GreyParameterSet {
    Matrix A;
    Matrix B;
    Vector c;
    Vector eta;  // y(t1) of the fitted response
    InitialStrategy strategy_used = InitialStrategy::fixed_first;
    basis::ForcingSpec forcing;
    double lambda = 0.5;
    double t1 = 0.0;
    double residual_norm = 0.0;
    double condition_estimate = 0.0;

    GreyStructure structure() const { return {A, B, c}; }
    std::size_t dimension() const { return A.rows(); }
};

struct Regression {
    Matrix design;
    Matrix targets;
};

/**
 * @brief Background-weighted regression on the Cusum series.
 *
 * Row k (k = 2..n) is [lambda y_{k-1} + (1-lambda) y_k, lambda u_{k-1} + (1-lambda) u_k, 1]
 * with target (y_k - y_{k-1}) / h_k.
 */
inline Regression build_grey_regression(const VectorSeries& y, const basis::ForcingSample& forcing, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("background lambda must lie in [0, 1]");
    const std::size_t n = y.size();
    const std::size_t d = y.dimension();
    const std::size_t p = forcing.values.cols();
    if (forcing.values.rows() != n) throw ShapeError("forcing sample length differs from the series length");
    if (n < d + p + 2) {
        throw InsufficientDataError("grey regression needs n >= d + p + 2 = " + std::to_string(d + p + 2) +
                                    " points, got " + std::to_string(n));
    }
    Regression r{Matrix(n - 1, d + p + 1), Matrix(n - 1, d)};
    const auto& yv = y.values();
    for (std::size_t k = 1; k < n; ++k) {
        const std::size_t row = k - 1;
        const double h = y.grid().interval(k);
        for (std::size_t j = 0; j < d; ++j) {
            r.design(row, j) = lambda * yv(k - 1, j) + (1.0 - lambda) * yv(k, j);
            r.targets(row, j) = (yv(k, j) - yv(k - 1, j)) / h;
        }
        for (std::size_t j = 0; j < p; ++j)
            r.design(row, d + j) = lambda * forcing.values(k - 1, j) + (1.0 - lambda) * forcing.values(k, j);
        r.design(row, d + p) = 1.0;
    }
    return r;
}

/// Cusum-scale response y(t) on the given times for structure s and initial value eta.
inline Matrix cusum_response(const GreyStructure& s, const basis::ForcingSpec& spec, const Vector& eta, double t1,
                             const std::vector<double>& times, const GreyFitConfig& config = {}) {
    return response::linear_response(s.A, s.B, s.c, spec, eta, t1, times, config.quadrature_steps_per_unit);
}

/**
 * @brief Initial Cusum value eta for a fitted structure.
 *
 * The response is affine in eta: yhat(t_k) = Phi_k eta + psi_k with
 * Phi_k = exp(A (t_k - t_1)) and psi_k the response started from zero.
 */
inline Vector select_initial_value(const VectorSeries& y, const GreyStructure& s, const basis::ForcingSpec& spec,
                                   InitialStrategy strategy, const GreyFitConfig& config = {}) {
    const std::size_t d = y.dimension();
    const std::size_t n = y.size();
    const double t1 = y.grid().front();
    switch (strategy) {
        case InitialStrategy::fixed_first: return y.at(0);
        case InitialStrategy::reduced_consistent: {
            Vector rhs = s.c;
            if (s.B.cols() > 0) rhs = rhs + s.B * basis::u_at(spec, t1);
            try {
                return numerics::lu_solve(Matrix::identity(d) - s.A, rhs);
            } catch (const SingularMatrixError&) {
                throw StrategyInapplicableError("reduced_consistent initial value needs I - A invertible");
            }
        }
        case InitialStrategy::fixed_last: {
            const double tn = y.grid().back();
            const Matrix psi = cusum_response(s, spec, Vector(d, 0.0), t1, {tn}, config);
            Vector target = y.at(n - 1);
            for (std::size_t j = 0; j < d; ++j) target[j] -= psi(0, j);
            return numerics::matrix_exponential(s.A, -(tn - t1)) * target;
        }
        case InitialStrategy::least_squares: {
            const Matrix psi = cusum_response(s, spec, Vector(d, 0.0), t1, y.grid().points(), config);
            Matrix design(n * d, d);
            Matrix target(n * d, 1);
            for (std::size_t k = 0; k < n; ++k) {
                const Matrix phi = numerics::matrix_exponential(s.A, y.grid()[k] - t1);
                design.set_block(k * d, 0, phi);
                for (std::size_t j = 0; j < d; ++j) target(k * d + j, 0) = y.values()(k, j) - psi(k, j);
            }
            return numerics::solve_least_squares(design, target).coefficients.col_vector(0);
        }
    }
    throw UnsupportedError("unknown initial strategy");
}

/// Cusum, least-squares structure, then the chosen initial value.
inline GreyParameterSet fit_grey(const VectorSeries& x_raw, const basis::ForcingSpec& spec,
                                 const GreyFitConfig& config = {},
                                 InitialStrategy strategy = InitialStrategy::fixed_first) {
    const VectorSeries y = cusum(x_raw);
    const basis::ForcingSample sample = basis::evaluate_forcing(spec, x_raw.grid());
    const Regression reg = build_grey_regression(y, sample, config.background_lambda);
    const auto ls = numerics::solve_least_squares(reg.design, reg.targets);
    const std::size_t d = x_raw.dimension();
    const std::size_t p = spec.dimension();

    GreyParameterSet out;
    const Matrix xi_t = ls.coefficients.transpose();  // d x (d + p + 1)
    out.A = xi_t.block(0, 0, d, d);
    out.B = xi_t.block(0, d, d, p);
    out.c = xi_t.col_vector(d + p);
    out.forcing = spec;
    out.lambda = config.background_lambda;
    out.t1 = x_raw.grid().front();
    out.residual_norm = ls.residual_norm;
    out.condition_estimate = ls.condition_estimate;
    out.strategy_used = strategy;
    out.eta = select_initial_value(y, out.structure(), spec, strategy, config);
    return out;
}

/// Cusum-scale response of a fitted model.
inline Matrix grey_time_response(const GreyParameterSet& params, const std::vector<double>& times,
                                 const GreyFitConfig& config = {}) {
    return cusum_response(params.structure(), params.forcing, params.eta, params.t1, times, config);
}

/// Fitted and forecast raw-scale values on a grid starting at t1: the inverse Cusum of the response.
inline VectorSeries grey_restore(const GreyParameterSet& params, const TimeGrid& grid,
                                 const GreyFitConfig& config = {}) {
    if (std::abs(grid.front() - params.t1) > 1e-12 * std::max(1.0, std::abs(params.t1)))
        throw PreconditionError("restore grid must start at the model's t1");
    return inverse_cusum(VectorSeries(grid, grey_time_response(params, grid.points(), config)));
}

/// Full pipeline on t_1..t_{n+r}; the extension reuses the last sampling interval.
inline VectorSeries grey_forecast(const VectorSeries& x_raw, const basis::ForcingSpec& spec,
                                  const GreyFitConfig& config, InitialStrategy strategy, std::size_t horizon) {
    const GreyParameterSet params = fit_grey(x_raw, spec, config, strategy);
    return grey_restore(params, x_raw.grid().extended(horizon), config);
}

}  // namespace greymatch::grey
