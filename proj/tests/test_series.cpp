#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "greymatch/series.hpp"

using namespace greymatch;

namespace {

VectorSeries sampled(double h, double t_end, double (*f)(double)) {
    const auto n = static_cast<std::size_t>(std::round(t_end / h)) + 1;
    const TimeGrid grid = TimeGrid::uniform(0.0, h, n);
    Matrix v(n, 1);
    for (std::size_t k = 0; k < n; ++k) v(k, 0) = f(grid[k]);
    return {grid, v};
}

double smooth(double t) { return std::exp(0.4 * t) + std::sin(t); }
// x(t_1) + int_{t_1}^{t} smooth
double smooth_integral(double t) { return smooth(0.0) + (std::exp(0.4 * t) - 1.0) / 0.4 + 1.0 - std::cos(t); }

double max_error(const VectorSeries& y, double (*exact)(double)) {
    double e = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) e = std::max(e, std::abs(y.values()(k, 0) - exact(y.grid()[k])));
    return e;
}

}  // namespace

TEST(TimeGrid, RejectsBadPoints) {
    EXPECT_THROW(TimeGrid(std::vector<double>{}), ShapeError);
    EXPECT_THROW(TimeGrid({0.0, 1.0, 1.0}), ShapeError);
    EXPECT_THROW(TimeGrid({0.0, NAN}), ShapeError);
    EXPECT_NO_THROW(TimeGrid({3.0}));
}

TEST(TimeGrid, IntervalsStartAtOne) {
    const TimeGrid g({1.0, 1.5, 2.5});
    EXPECT_EQ(g.interval(0), 1.0);
    EXPECT_EQ(g.interval(1), 0.5);
    EXPECT_EQ(g.interval(2), 1.0);
    EXPECT_FALSE(g.equally_spaced());
    EXPECT_TRUE(TimeGrid::uniform(0, 0.25, 21).equally_spaced());
    EXPECT_EQ(TimeGrid::uniform(0, 0.25, 3).extended(2).back(), 1.0);
}

TEST(VectorSeries, ShapeChecks) {
    EXPECT_THROW(VectorSeries(TimeGrid({0, 1}), Matrix(3, 1)), ShapeError);
    EXPECT_THROW(VectorSeries(TimeGrid({0, 1}), Matrix(2, 0)), ShapeError);
    EXPECT_THROW(VectorSeries::scalar({0, 1}, {1.0, INFINITY}), ShapeError);
}

TEST(Cusum, OrdinaryCumulativeSum) {
    const auto y = cusum(VectorSeries::scalar({1, 2, 3, 4}, {1, 2, 3, 4}));
    EXPECT_EQ(y.values().col_vector(0), (Vector{1, 3, 6, 10}));
}

TEST(Cusum, SinglePoint) {
    const auto y = cusum(VectorSeries::scalar({7.0}, {5.0}));
    EXPECT_EQ(y.values()(0, 0), 5.0);
}

TEST(Cusum, IrregularGrid) {
    const auto x = VectorSeries::scalar({1, 1.5, 2.5}, {2, 4, 6});
    const auto y = cusum(x);
    EXPECT_EQ(y.values().col_vector(0), (Vector{2, 4, 10}));
    EXPECT_EQ(inverse_cusum(y).values().col_vector(0), (Vector{2, 4, 6}));
}

TEST(Cusum, InverseOfConstantIsImpulse) {
    const auto x = inverse_cusum(VectorSeries::scalar({0, 1, 2, 3}, {4, 4, 4, 4}));
    EXPECT_EQ(x.values().col_vector(0), (Vector{4, 0, 0, 0}));
}

TEST(Cusum, RoundTripOnRandomSeries) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-50, 50), gap(0.01, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial % 30, d = 1 + trial % 3;
        std::vector<double> t{u(rng)};
        for (std::size_t k = 1; k < n; ++k) t.push_back(t.back() + gap(rng));
        Matrix v(n, d);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < d; ++j) v(k, j) = u(rng);
        const VectorSeries x(TimeGrid(t), v);
        const auto back = inverse_cusum(cusum(x));
        EXPECT_LT(scaled_discrepancy(back.values(), x.values()), 1e-12);
        const auto fwd = cusum(inverse_cusum(x));
        EXPECT_LT(scaled_discrepancy(fwd.values(), x.values()), 1e-12);
        EXPECT_EQ(integrate_piecewise_constant(x).values(), cusum(x).values());
    }
}

TEST(Integration, PiecewiseConstantOfConstant) {
    const auto y = integrate_piecewise_constant(VectorSeries::scalar({0, 1, 2}, {3, 3, 3}));
    EXPECT_EQ(y.values().col_vector(0), (Vector{3, 6, 9}));
}

TEST(Integration, TrapezoidIsSecondOrder) {
    const double e1 = max_error(integrate_piecewise_linear(sampled(0.1, 4.0, smooth)), smooth_integral);
    const double e2 = max_error(integrate_piecewise_linear(sampled(0.05, 4.0, smooth)), smooth_integral);
    const double e3 = max_error(integrate_piecewise_linear(sampled(0.025, 4.0, smooth)), smooth_integral);
    EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.1);
    EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.1);
}

TEST(Integration, RectangleIsFirstOrder) {
    const double e1 = max_error(integrate_piecewise_constant(sampled(0.1, 4.0, smooth)), smooth_integral);
    const double e2 = max_error(integrate_piecewise_constant(sampled(0.05, 4.0, smooth)), smooth_integral);
    const double e3 = max_error(integrate_piecewise_constant(sampled(0.025, 4.0, smooth)), smooth_integral);
    EXPECT_NEAR(std::log2(e1 / e2), 1.0, 0.1);
    EXPECT_NEAR(std::log2(e2 / e3), 1.0, 0.1);
}

TEST(Mape, ExactPredictionIsZero) {
    const auto x = VectorSeries::scalar({1, 2, 3}, {10, 20, 30});
    const auto r = mape(x, x, 2);
    EXPECT_EQ(r.mape_in[0], 0.0);
    EXPECT_EQ(r.mape_out[0], 0.0);
}

TEST(Mape, SinglePoint) {
    const auto r = mape(VectorSeries::scalar({1}, {100}), VectorSeries::scalar({1}, {110}), 1);
    EXPECT_NEAR(r.mape_in[0], 10.0, 1e-12);
    EXPECT_TRUE(r.mape_out.empty());
}

TEST(Mape, ComponentOrderAndScaling) {
    const TimeGrid g({0, 1, 2, 3});
    const Matrix actual{{10, 5}, {20, 6}, {30, 7}, {40, 8}};
    const Matrix pred{{11, 5.5}, {21, 6.3}, {33, 7.1}, {41, 8.8}};
    const auto r = mape({g, actual}, {g, pred}, 3);
    Matrix swapped_a(4, 2), swapped_p(4, 2);
    for (std::size_t k = 0; k < 4; ++k) {
        swapped_a(k, 0) = actual(k, 1), swapped_a(k, 1) = actual(k, 0);
        swapped_p(k, 0) = pred(k, 1), swapped_p(k, 1) = pred(k, 0);
    }
    const auto s = mape({g, swapped_a}, {g, swapped_p}, 3);
    EXPECT_DOUBLE_EQ(r.mape_in[0], s.mape_in[1]);
    EXPECT_DOUBLE_EQ(r.mape_out[1], s.mape_out[0]);
    // errors are all one-sided (over-prediction), so doubling them doubles the MAPE
    const Matrix doubled = actual + 2.0 * (pred - actual);
    const auto t = mape({g, actual}, {g, doubled}, 3);
    EXPECT_NEAR(t.mape_in[0], 2.0 * r.mape_in[0], 1e-12);
    EXPECT_NEAR(t.mape_out[1], 2.0 * r.mape_out[1], 1e-12);
}

TEST(Mape, Errors) {
    const auto x = VectorSeries::scalar({1, 2}, {0, 1});
    EXPECT_THROW(mape(x, x, 2), DivisionByZeroError);
    const auto y = VectorSeries::scalar({1, 2}, {1, 1});
    EXPECT_THROW(mape(y, y, 0), PreconditionError);
    EXPECT_THROW(mape(y, y, 3), PreconditionError);
    EXPECT_THROW(mape(y, VectorSeries::scalar({1}, {1}), 1), ShapeError);
    try {
        mape(x, x, 1);
    } catch (const DivisionByZeroError& e) {
        EXPECT_NE(std::string(e.what()).find("index 1"), std::string::npos);
        EXPECT_EQ(e.kind(), ErrorKind::data);
    }
}
