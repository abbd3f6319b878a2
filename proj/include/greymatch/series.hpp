#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace greymatch {

/**
 * @brief Strictly increasing sampling times t_1 < ... < t_n.
 *
 * The interval sequence follows the cumulative-sum convention h_1 = 1 and
 * h_k = t_k - t_{k-1} for k >= 2. Note that h_1 = 1 regardless of the units or
 * origin of the grid: the first cumulative value always equals the first
 * observation, even on irregular grids or grids that do not start at t = 1.
 */
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
        if (points_.empty()) throw ShapeError("TimeGrid: no time points");
        for (std::size_t k = 0; k < points_.size(); ++k) {
            if (!std::isfinite(points_[k])) throw ShapeError("TimeGrid: non-finite time at index " + std::to_string(k));
            if (k > 0 && !(points_[k] > points_[k - 1])) {
                throw ShapeError("TimeGrid: times must be strictly increasing (index " + std::to_string(k) + ")");
            }
        }
    }

    /// n points t_0 + k * step, k = 0..n-1.
    static TimeGrid uniform(double t0, double step, std::size_t n) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = t0 + step * static_cast<double>(k);
        return TimeGrid(std::move(p));
    }

    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t k) const { return points_[k]; }
    const std::vector<double>& points() const noexcept { return points_; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    /// h_k with h_1 = 1 (zero-based: interval(0) == 1).
    double interval(std::size_t k) const { return k == 0 ? 1.0 : points_[k] - points_[k - 1]; }

    /// True when every h_k, k >= 2, equals h_2 within a relative 1e-9.
    bool equally_spaced() const {
        if (points_.size() < 3) return true;
        const double h = interval(1);
        for (std::size_t k = 2; k < points_.size(); ++k)
            if (std::abs(interval(k) - h) > 1e-9 * std::abs(h)) return false;
        return true;
    }

    /// The first n points.
    TimeGrid head(std::size_t n) const {
        if (n == 0 || n > points_.size()) throw ShapeError("TimeGrid::head: invalid length");
        return TimeGrid(std::vector<double>(points_.begin(), points_.begin() + static_cast<long>(n)));
    }

    /// Appends `extra` points spaced by the last interval (h_n, or 1 for a single point).
    TimeGrid extended(std::size_t extra) const {
        std::vector<double> p = points_;
        const double h = points_.size() >= 2 ? interval(points_.size() - 1) : 1.0;
        for (std::size_t j = 1; j <= extra; ++j) p.push_back(points_.back() + h * static_cast<double>(j));
        return TimeGrid(std::move(p));
    }

private:
    std::vector<double> points_;
};

/// d-dimensional observations on a TimeGrid; values is n x d.
class VectorSeries {
public:
    VectorSeries() = default;

    VectorSeries(TimeGrid grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.rows() != grid_.size()) {
            throw ShapeError("VectorSeries: " + std::to_string(values_.rows()) + " rows for " +
                             std::to_string(grid_.size()) + " time points");
        }
        if (values_.cols() == 0) throw ShapeError("VectorSeries: dimension must be >= 1");
        if (!values_.all_finite()) throw ShapeError("VectorSeries: non-finite values");
    }

    /// Single-variable convenience constructor.
    static VectorSeries scalar(std::vector<double> times, const std::vector<double>& x) {
        return VectorSeries(TimeGrid(std::move(times)), Matrix::column(x));
    }

    const TimeGrid& grid() const noexcept { return grid_; }
    const Matrix& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return grid_.size(); }
    std::size_t dimension() const noexcept { return values_.cols(); }
    Vector at(std::size_t k) const { return values_.row_vector(k); }

    /// The first n observations.
    VectorSeries head(std::size_t n) const { return {grid_.head(n), values_.block(0, 0, n, values_.cols())}; }

private:
    TimeGrid grid_;
    Matrix values_;
};

/// y(t_k) = sum_{i<=k} h_i x(t_i), h_1 = 1.
inline VectorSeries cusum(const VectorSeries& x) {
    Matrix y(x.size(), x.dimension());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double h = x.grid().interval(k);
        for (std::size_t j = 0; j < x.dimension(); ++j)
            y(k, j) = (k == 0 ? 0.0 : y(k - 1, j)) + h * x.values()(k, j);
    }
    return {x.grid(), std::move(y)};
}

/// x(t_1) = y(t_1), x(t_k) = (y(t_k) - y(t_{k-1})) / h_k.
inline VectorSeries inverse_cusum(const VectorSeries& y) {
    Matrix x(y.size(), y.dimension());
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double h = y.grid().interval(k);
        for (std::size_t j = 0; j < y.dimension(); ++j)
            x(k, j) = (y.values()(k, j) - (k == 0 ? 0.0 : y.values()(k - 1, j))) / h;
    }
    return {y.grid(), std::move(x)};
}

/// Right-endpoint rule: x(t_1) + sum_{i=2..k} h_i x(t_i). Coincides with cusum.
inline VectorSeries integrate_piecewise_constant(const VectorSeries& x) {
    Matrix y(x.size(), x.dimension());
    for (std::size_t j = 0; j < x.dimension(); ++j) {
        y(0, j) = x.values()(0, j);
        for (std::size_t k = 1; k < x.size(); ++k) y(k, j) = y(k - 1, j) + x.grid().interval(k) * x.values()(k, j);
    }
    return {x.grid(), std::move(y)};
}

/// Trapezoid rule: x(t_1) + sum_{i=2..k} h_i (x(t_{i-1}) + x(t_i)) / 2.
inline VectorSeries integrate_piecewise_linear(const VectorSeries& x) {
    Matrix y(x.size(), x.dimension());
    for (std::size_t j = 0; j < x.dimension(); ++j) {
        y(0, j) = x.values()(0, j);
        for (std::size_t k = 1; k < x.size(); ++k) {
            const double h = x.grid().interval(k);
            y(k, j) = y(k - 1, j) + 0.5 * h * x.values()(k - 1, j) + 0.5 * h * x.values()(k, j);
        }
    }
    return {x.grid(), std::move(y)};
}

/// Absolute percentage errors and their in-/out-of-sample means, in percent.
struct ErrorReport {
    Vector mape_in;        ///< one entry per component; mean over points 1..split
    Vector mape_out;       ///< empty when split == n
    Matrix per_point_ape;  ///< n x d
    std::size_t split_index = 0;
};

/**
 * @brief MAPE with the first `split_index` points counted as in-sample.
 *
 * `actual` is the reference each error is divided by; callers choose which
 * series that is (observed, held-out, or noise-free).
 */
inline ErrorReport mape(const VectorSeries& actual, const VectorSeries& predicted, std::size_t split_index) {
    const std::size_t n = actual.size();
    const std::size_t d = actual.dimension();
    if (predicted.size() != n || predicted.dimension() != d) {
        throw ShapeError("mape: actual is " + actual.values().shape() + " but predicted is " +
                         predicted.values().shape());
    }
    if (split_index < 1 || split_index > n) {
        throw PreconditionError("mape: split_index " + std::to_string(split_index) + " outside [1, " +
                                std::to_string(n) + "]");
    }
    ErrorReport rep;
    rep.split_index = split_index;
    rep.per_point_ape = Matrix(n, d);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < d; ++j) {
            const double a = actual.values()(k, j);
            if (a == 0.0) {
                throw DivisionByZeroError("mape: actual value is zero at index " + std::to_string(k + 1) +
                                          ", component " + std::to_string(j + 1));
            }
            rep.per_point_ape(k, j) = std::abs((predicted.values()(k, j) - a) / a) * 100.0;
        }
    rep.mape_in.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < split_index; ++k) rep.mape_in[j] += rep.per_point_ape(k, j);
        rep.mape_in[j] /= static_cast<double>(split_index);
    }
    if (split_index < n) {
        rep.mape_out.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = split_index; k < n; ++k) rep.mape_out[j] += rep.per_point_ape(k, j);
            rep.mape_out[j] /= static_cast<double>(n - split_index);
        }
    }
    return rep;
}

}  // namespace greymatch
