#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "grey.hpp"
#include "matching.hpp"
#include "numerics.hpp"
#include "response.hpp"
#include "series.hpp"

namespace greymatch::theory {

struct Discrepancy {
    std::string quantity;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed() const { return value <= tolerance; }
};

/**
 * @brief Outcome of one identity check.
 *
 * Each detail row carries its own tolerance. The headline figures are taken
 * from the row with the largest value/tolerance ratio, so passed holds exactly
 * when every row passes.
 */
struct EquivalenceReport {
    std::string check_name;
    double max_abs_discrepancy = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::vector<Discrepancy> details;

    void add(std::string quantity, double value, double tol) {
        details.push_back({std::move(quantity), value, tol});
        double worst = -1.0;
        for (const auto& d : details) {
            const double ratio = std::isfinite(d.value) ? d.value / d.tolerance : INFINITY;
            if (ratio > worst) {
                worst = ratio;
                max_abs_discrepancy = d.value;
                tolerance = d.tolerance;
            }
        }
        passed = std::all_of(details.begin(), details.end(), [](const Discrepancy& d) { return d.passed(); });
    }
};

inline nlohmann::json to_json(const EquivalenceReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& d : r.details)
        rows.push_back({{"quantity", d.quantity}, {"discrepancy", d.value}, {"tolerance", d.tolerance},
                        {"passed", d.passed()}});
    return {{"check", r.check_name},
            {"max_abs_discrepancy", r.max_abs_discrepancy},
            {"tolerance", r.tolerance},
            {"passed", r.passed},
            {"details", rows}};
}

struct Tolerances {
    double parameters = 1e-9;
    double restored = 1e-8;
    double quadrature = 1e-6;
};

/// x with xi added to the first observation; its Cusum is the original Cusum shifted by xi.
inline VectorSeries shift_first(const VectorSeries& x, const Vector& xi) {
    if (xi.size() != x.dimension()) throw ShapeError("shift has wrong dimension");
    Matrix v = x.values();
    for (std::size_t j = 0; j < xi.size(); ++j) v(0, j) += xi[j];
    return {x.grid(), std::move(v)};
}

/**
 * @brief Fit the grey model before and after shifting the Cusum series by xi.
 *
 * A and B should not move, c should move by -A xi, and the restored values
 * from the second point on should not move. The last property needs an
 * initial value that shifts with the data (fixed_first, fixed_last,
 * least_squares); reduced_consistent does not.
 */
inline EquivalenceReport check_translation_invariance(const VectorSeries& x, const basis::ForcingSpec& spec,
                                                      const grey::GreyFitConfig& config,
                                                      grey::InitialStrategy strategy, const Vector& xi,
                                                      const Tolerances& tol = {}) {
    const auto base = grey::fit_grey(x, spec, config, strategy);
    const auto moved = grey::fit_grey(shift_first(x, xi), spec, config, strategy);
    EquivalenceReport r;
    r.check_name = "translation_invariance";
    r.add("A", scaled_discrepancy(moved.A, base.A), tol.parameters);
    if (base.B.cols() > 0) r.add("B", scaled_discrepancy(moved.B, base.B), tol.parameters);
    r.add("c + A xi", scaled_discrepancy(moved.c + moved.A * xi, base.c), tol.parameters);
    const VectorSeries xb = grey::grey_restore(base, x.grid(), config);
    const VectorSeries xm = grey::grey_restore(moved, x.grid(), config);
    const std::size_t n = x.size();
    const std::size_t d = x.dimension();
    r.add("restored x(t_k), k >= 2", scaled_discrepancy(xm.values().block(1, 0, n - 1, d), xb.values().block(1, 0, n - 1, d)),
          tol.restored);
    return r;
}

/// Initial value of the reduced model: x(t1) = A xi + B u(t1) + c.
inline Vector reduce_order(const Matrix& a, const Matrix& b, const Vector& c, const Vector& xi,
                           const basis::ForcingSpec& spec, double t1) {
    Vector x1 = a * xi + c;
    if (b.cols() > 0) x1 = x1 + b * basis::u_at(spec, t1);
    return x1;
}

/// Inverse of reduce_order: c = x(t1) - A xi - B u(t1).
inline Vector constant_from_reduced(const Matrix& a, const Matrix& b, const Vector& x1, const Vector& xi,
                                    const basis::ForcingSpec& spec, double t1) {
    Vector c = x1 - a * xi;
    if (b.cols() > 0) c = c - b * basis::u_at(spec, t1);
    return c;
}

/**
 * @brief Grey (lambda = 0.5) and integral-matching fits on equally spaced, unforced data.
 *
 * Compares A_g with A_m and eta_m with c_g + A x(t1) - (h/2) A x(t1).
 */
inline EquivalenceReport check_proposition1(const VectorSeries& x, const Tolerances& tol = {}) {
    if (!x.grid().equally_spaced()) throw PreconditionError("equal spacing is required for this check");
    if (x.size() < 3) throw InsufficientDataError("need at least three points");
    const double h = x.grid().interval(1);
    const auto g = grey::fit_grey(x, basis::ForcingSpec::zero(), {0.5, 50.0}, grey::InitialStrategy::fixed_first);
    const auto m = matching::fit_matching(x, basis::ForcingSpec::zero());
    const Vector x1 = x.at(0);
    const Vector ax1 = g.A * x1;
    const Vector predicted = g.c + ax1 - (h / 2.0) * ax1;
    EquivalenceReport r;
    r.check_name = "proposition1";
    r.add("A_grey vs A_matching", scaled_discrepancy(g.A, m.A), tol.parameters);
    r.add("eta_matching vs c_grey + (1 - h/2) A x(t1)", scaled_discrepancy(m.eta, predicted), tol.parameters);
    return r;
}

/// Reduced trajectory: dx/dt = A x + B du/dt, x(t1) = A xi + B u(t1) + c.
inline Matrix reduced_trajectory(const Matrix& a, const Matrix& b, const Vector& c, const Vector& xi,
                                 const basis::ForcingSpec& spec, double t1, const std::vector<double>& times) {
    const basis::Generator gen = basis::generator(spec);
    const Matrix g = b * gen.C * gen.N;
    return response::propagate_augmented(a, g, gen, reduce_order(a, b, c, xi, spec, t1), t1, times);
}

/**
 * @brief Round trip between the grey equation and its reduced form for known parameters.
 *
 * "integral": y(t_k) against xi + int x, the integral taken by Simpson quadrature.
 * "derivative": x(t_k) against A y(t_k) + B u(t_k) + c.
 */
inline EquivalenceReport check_theorem1(const Matrix& a, const Matrix& b, const Vector& c, const Vector& xi,
                                        const basis::ForcingSpec& spec, const std::vector<double>& times,
                                        const Tolerances& tol = {}, double steps_per_unit = 50.0) {
    if (!spec.analytic()) throw UnsupportedError("the reduced form needs du/dt; exogenous forcing is not supported");
    const std::size_t d = a.rows();
    const double t1 = times.front();
    const Matrix y = response::linear_response(a, b, c, spec, xi, t1, times);
    const Matrix x = reduced_trajectory(a, b, c, xi, spec, t1, times);

    const basis::Generator gen = basis::generator(spec);
    const Vector x1 = reduce_order(a, b, c, xi, spec, t1);
    Matrix big(d + gen.N.rows(), d + gen.N.rows());
    big.set_block(0, 0, a);
    big.set_block(0, d, b * gen.C * gen.N);
    big.set_block(d, d, gen.N);
    numerics::VectorFunction x_of = [&](double s) {
        Vector s0 = x1;
        const Vector z1 = gen.z(t1);
        s0.insert(s0.end(), z1.begin(), z1.end());
        const Vector full = numerics::matrix_exponential(big, s - t1) * s0;
        return Vector(full.begin(), full.begin() + static_cast<long>(d));
    };
    const Matrix y_from_x = response::propagate_quadrature(Matrix(d, d), x_of, xi, t1, times, steps_per_unit);

    Matrix dy(times.size(), d);
    for (std::size_t k = 0; k < times.size(); ++k) {
        Vector v = a * y.row_vector(k) + c;
        if (b.cols() > 0) v = v + b * basis::u_at(spec, times[k]);
        for (std::size_t j = 0; j < d; ++j) dy(k, j) = v[j];
    }
    EquivalenceReport r;
    r.check_name = "theorem1";
    r.add("y vs xi + integral of reduced x", scaled_discrepancy(y_from_x, y), tol.quadrature);
    r.add("reduced x vs A y + B u + c", scaled_discrepancy(x, dy), tol.quadrature);
    return r;
}

/**
 * @brief The scalar second-degree example: dy/dt = a y + b2 t^2 + b1 t + c, y(0) = xi,
 * and its reduced form dx/dt = a x + 2 b2 t + b1, x(0) = a xi + c.
 *
 * Both printed closed forms are compared with the general solver.
 */
inline EquivalenceReport check_worked_example(double a, double b2, double b1, double c, double xi,
                                              const std::vector<double>& times, double tolerance = 1e-8) {
    const double k_y = xi + c / a + b1 / (a * a) + 2.0 * b2 / (a * a * a);
    const double k_x = a * xi + c + b1 / a + 2.0 * b2 / (a * a);
    const Matrix am{{a}};
    const Matrix bm{{b1, b2}};
    const auto spec = basis::ForcingSpec::polynomial(2);
    const Matrix y = response::linear_response(am, bm, {c}, spec, {xi}, 0.0, times);
    const Matrix x = reduced_trajectory(am, bm, {c}, {xi}, spec, 0.0, times);
    Matrix y_printed(times.size(), 1), x_printed(times.size(), 1);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        y_printed(k, 0) = k_y * std::exp(a * t) - b2 / a * t * t - (b1 / a + 2.0 * b2 / (a * a)) * t -
                          (c / a + b1 / (a * a) + 2.0 * b2 / (a * a * a));
        x_printed(k, 0) = k_x * std::exp(a * t) - 2.0 * b2 / a * t - (b1 / a + 2.0 * b2 / (a * a));
    }
    EquivalenceReport r;
    r.check_name = "worked_example";
    r.add("y closed form", scaled_discrepancy(y, y_printed), tolerance);
    r.add("x closed form", scaled_discrepancy(x, x_printed), tolerance);
    return r;
}

}  // namespace greymatch::theory
