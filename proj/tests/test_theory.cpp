#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "greymatch/simulate.hpp"
#include "greymatch/theory.hpp"
#include "random_instances.hpp"

using namespace greymatch;
using grey::InitialStrategy;

namespace {

const Matrix kA{{-0.25, 0.70}, {0.75, -0.25}};
const Vector kEta{1.20, 0.35};

Vector scaled(const Vector& v, double s) { return s * v; }

}  // namespace

TEST(Translation, ZeroShiftIsExact) {
    std::mt19937_64 rng(1);
    const auto in = fixtures::random_instance(rng, 4);
    const auto r = theory::check_translation_invariance(in.x, basis::ForcingSpec::zero(), {},
                                                        InitialStrategy::least_squares, Vector(in.x.dimension(), 0.0));
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_abs_discrepancy, 0.0);
}

TEST(Translation, RandomScalarSeries) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        Vector x;
        std::vector<double> t;
        for (int k = 0; k < 12; ++k) {
            t.push_back(1.0 + k);
            x.push_back(10.0 + 2.0 * k + std::normal_distribution<double>(0.0, 1.0)(rng));
        }
        const auto s = VectorSeries::scalar(t, x);
        for (auto st : {InitialStrategy::fixed_first, InitialStrategy::fixed_last, InitialStrategy::least_squares}) {
            const auto r = theory::check_translation_invariance(s, basis::ForcingSpec::polynomial(1), {}, st, {5.0});
            EXPECT_TRUE(r.passed) << grey::to_string(st) << " " << theory::to_json(r).dump();
        }
    }
}

TEST(Translation, AllStrategiesOnRandomInstances) {
    std::mt19937_64 rng(3);
    for (std::size_t trial = 0; trial < 30; ++trial) {
        const auto in = fixtures::random_instance(rng, trial);
        for (double s : {-10.0, 1.0, 5.0})
            for (auto st : {InitialStrategy::fixed_first, InitialStrategy::fixed_last, InitialStrategy::least_squares}) {
                const auto r = theory::check_translation_invariance(in.x, basis::ForcingSpec::zero(), {}, st,
                                                                    scaled(in.x.at(0), s));
                EXPECT_TRUE(r.passed) << "trial " << trial << " " << theory::to_json(r).dump();
            }
    }
}

TEST(Translation, ReducedConsistentDoesNotPreserveRestoredValues) {
    const auto x = simulate::generate_trajectory(simulate::reference_scenario(0.25, INFINITY)).noisy;
    const auto r = theory::check_translation_invariance(x, basis::ForcingSpec::zero(), {},
                                                        InitialStrategy::reduced_consistent, scaled(x.at(0), 5.0));
    ASSERT_EQ(r.details.size(), 3u);
    EXPECT_TRUE(r.details[0].passed());
    EXPECT_TRUE(r.details[1].passed());
    EXPECT_FALSE(r.details[2].passed());
}

TEST(Translation, ShiftAlignsGreyInterceptWithMatchingInitialValue) {
    const double h = 0.25;
    const auto x = simulate::generate_trajectory(simulate::reference_scenario(h, INFINITY)).noisy;
    const Vector xi = scaled(x.at(0), (h - 2.0) / 2.0);
    const auto g = grey::fit_grey(theory::shift_first(x, xi), basis::ForcingSpec::zero());
    const auto m = matching::fit_matching(x, basis::ForcingSpec::zero());
    EXPECT_LT(scaled_discrepancy(g.A, m.A), 1e-9);
    EXPECT_LT(scaled_discrepancy(g.c, m.eta), 1e-9);
}

TEST(ReduceOrder, ReferenceSystemConstants) {
    const Vector c = theory::constant_from_reduced(kA, Matrix(2, 0), kEta, kEta, basis::ForcingSpec::zero(), 0.0);
    EXPECT_NEAR(c[0], 1.2550, 1e-12);
    EXPECT_NEAR(c[1], -0.4625, 1e-12);
}

TEST(ReduceOrder, ZeroRateAndWorkedExample) {
    const auto spec = basis::ForcingSpec::polynomial(2);
    const Matrix b{{0.3, -0.2}};
    Vector x1 = theory::reduce_order(Matrix(1, 1), b, {0.7}, {9.0}, spec, 2.0);
    EXPECT_DOUBLE_EQ(x1[0], 0.3 * 2.0 - 0.2 * 4.0 + 0.7);
    x1 = theory::reduce_order(Matrix{{-0.5}}, b, {0.7}, {3.0}, spec, 0.0);
    EXPECT_DOUBLE_EQ(x1[0], -0.5 * 3.0 + 0.7);
}

TEST(ReduceOrder, InverseIsIdentity) {
    std::mt19937_64 rng(4);
    for (std::size_t trial = 0; trial < 50; ++trial) {
        const auto s = fixtures::random_forced_system(rng, trial);
        const auto spec = basis::ForcingSpec::polynomial(s.degree);
        const Vector x1 = theory::reduce_order(s.A, s.B, s.c, s.xi, spec, s.times.front());
        const Vector c = theory::constant_from_reduced(s.A, s.B, x1, s.xi, spec, s.times.front());
        EXPECT_LT(max_abs(c - s.c), 1e-12);
    }
}

TEST(Proposition1, RandomInstances) {
    std::mt19937_64 rng(5);
    for (std::size_t trial = 0; trial < 30; ++trial) {
        const auto in = fixtures::random_instance(rng, trial);
        const auto r = theory::check_proposition1(in.x);
        EXPECT_TRUE(r.passed) << "trial " << trial << " " << theory::to_json(r).dump();
    }
}

TEST(Proposition1, StepTwoRemovesCorrection) {
    std::mt19937_64 rng(6);
    auto in = fixtures::random_instance(rng, 1);
    const VectorSeries x(TimeGrid::uniform(0.0, 2.0, in.x.size()), in.x.values());
    const auto g = grey::fit_grey(x, basis::ForcingSpec::zero());
    const auto m = matching::fit_matching(x, basis::ForcingSpec::zero());
    EXPECT_LT(scaled_discrepancy(m.eta, g.c), 1e-9);
}

TEST(Proposition1, NoisyRealizationHasIdenticalStructure) {
    auto sc = simulate::reference_scenario(0.25, 2.5);
    const auto x = simulate::generate_trajectory(sc, 3).noisy;
    const auto r = theory::check_proposition1(x);
    EXPECT_TRUE(r.passed);
    EXPECT_LT(r.details[0].value, 1e-9);
}

TEST(Proposition1, UnequalSpacingRejected) {
    const auto x = VectorSeries::scalar({0, 1, 3, 4, 5}, {1, 2, 3, 4, 6});
    EXPECT_THROW(theory::check_proposition1(x), PreconditionError);
}

TEST(Theorem1, RandomForcedSystems) {
    std::mt19937_64 rng(7);
    for (std::size_t trial = 0; trial < 20; ++trial) {
        const auto s = fixtures::random_forced_system(rng, trial);
        const auto r = theory::check_theorem1(s.A, s.B, s.c, s.xi, basis::ForcingSpec::polynomial(s.degree), s.times);
        EXPECT_TRUE(r.passed) << "trial " << trial << " " << theory::to_json(r).dump();
    }
}

TEST(Theorem1, FourierForcing) {
    const auto r = theory::check_theorem1(Matrix{{-0.3}}, Matrix{{0.5, 0.2}}, {1.0}, {2.0},
                                          basis::ForcingSpec::fourier(1, 0.2), {0, 0.5, 1, 2, 3, 4});
    EXPECT_TRUE(r.passed) << theory::to_json(r).dump();
}

TEST(Theorem1, ExogenousUnsupported) {
    const auto spec = basis::ForcingSpec::exogenous({0, 1, 2}, Matrix{{1}, {2}, {3}});
    EXPECT_THROW(theory::check_theorem1(Matrix{{-0.3}}, Matrix{{1}}, {0}, {1}, spec, {0, 1, 2}), UnsupportedError);
}

TEST(Theorem1, WorkedExampleClosedForms) {
    const auto r = theory::check_worked_example(-0.3, 0.05, 0.4, 1.2, 2.0, {0, 0.5, 1, 2, 4, 8});
    EXPECT_TRUE(r.passed) << theory::to_json(r).dump();
    const auto r2 = theory::check_worked_example(0.2, -0.1, 0.3, -0.5, 1.0, {0, 1, 2, 3});
    EXPECT_TRUE(r2.passed) << theory::to_json(r2).dump();
}

TEST(EquivalenceReport, HeadlineIsWorstRow) {
    theory::EquivalenceReport r;
    r.add("a", 1e-10, 1e-9);
    r.add("b", 5e-9, 1e-8);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.max_abs_discrepancy, 5e-9);
    r.add("c", 2e-6, 1e-6);
    EXPECT_FALSE(r.passed);
    EXPECT_EQ(r.tolerance, 1e-6);
    const auto j = theory::to_json(r);
    EXPECT_EQ(j.at("details").size(), 3u);
    EXPECT_FALSE(j.at("passed").get<bool>());
}
