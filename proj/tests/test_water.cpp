#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "greymatch/water.hpp"

using namespace greymatch;

namespace {

model_io::ModelConfig config(const std::string& name) {
    for (const auto& [n, c] : water::models())
        if (n == name) return c;
    throw std::runtime_error("no model " + name);
}

const matching::MatchedParameterSet& matched(const water::ModelResult& r) {
    return std::get<matching::MatchedParameterSet>(r.fitted.params);
}

const grey::GreyParameterSet& grey_params(const water::ModelResult& r) {
    return std::get<grey::GreyParameterSet>(r.fitted.params);
}

}  // namespace

TEST(Water, DataAndIndexing) {
    const auto x = water::training();
    EXPECT_EQ(x.size(), 12u);
    EXPECT_EQ(x.grid().front(), 1.0);
    EXPECT_EQ(x.values()(0, 0), 17.20);
}

TEST(Water, Imde1Coefficients) {
    const auto r = water::evaluate("IMDE1", config("IMDE1"));
    EXPECT_NEAR(matched(r).A(0, 0), 0.1144, 5e-4);
    EXPECT_NEAR(matched(r).eta[0], 18.2176, 5e-4);
    // x(t) = 16.2482 exp(0.1144 t)
    EXPECT_NEAR(matched(r).eta[0] * std::exp(-matched(r).A(0, 0)), 16.2482, 5e-3);
}

TEST(Water, Imde3Coefficients) {
    const auto p = matched(water::evaluate("IMDE3", config("IMDE3")));
    EXPECT_NEAR(p.A(0, 0), -0.0458, 5e-4);
    EXPECT_NEAR(p.B(0, 0), 0.7730, 5e-4);
    EXPECT_NEAR(p.constant()[0], 0.5761, 5e-4);
    EXPECT_NEAR(p.eta[0], 20.8931, 5e-4);
}

TEST(Water, Imde4Coefficients) {
    const auto p = matched(water::evaluate("IMDE4", config("IMDE4")));
    EXPECT_NEAR(p.A(0, 0), -0.0395, 5e-4);
    EXPECT_NEAR(p.B(0, 0), 0.7717, 5e-4);
    EXPECT_NEAR(p.B(0, 1), -0.0018, 5e-4);
    EXPECT_NEAR(p.constant()[0], 0.4509, 5e-4);
    EXPECT_NEAR(p.eta[0], 20.9025, 5e-4);
}

TEST(Water, Imde3TimeResponse) {
    const auto xm = water::imde_closed_form(matched(water::evaluate("IMDE3", config("IMDE3"))));
    EXPECT_NEAR(xm.q[1], 16.8847, 5e-3);
    EXPECT_NEAR(xm.K, 377.1157, 5e-3);
    EXPECT_NEAR(xm.q[0], -356.2318, 5e-3);
    EXPECT_NEAR(xm.a, -0.04578, 5e-5);
}

TEST(Water, Imde3Table) {
    const auto r = water::evaluate("IMDE3", config("IMDE3"));
    const double expected[] = {71.24, 78.82, 86.81, 95.21, 103.98};
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(r.values[12 + k], expected[k], 0.01) << 2016 + k;
    EXPECT_NEAR(r.values[0], 20.89, 0.01);
    EXPECT_NEAR(r.ape[0], 21.47, 0.01);
    EXPECT_NEAR(r.mape_in, 4.40, 0.05);
    EXPECT_NEAR(r.mape_out, 1.32, 0.05);
}

TEST(Water, Imde2And5Table) {
    const auto r2 = water::evaluate("IMDE2", config("IMDE2"));
    EXPECT_NEAR(r2.values[14], 94.07, 0.01);
    EXPECT_NEAR(r2.ape[14], 8.87, 0.01);
    const auto r5 = water::evaluate("IMDE5", config("IMDE5"));
    EXPECT_NEAR(r5.mape_out, 8.71, 0.05);
}

TEST(Water, ImdeColumnsMatchPublishedTable) {
    const auto rep = water::reproduce();
    for (const auto& c : rep.table)
        if (c.label.rfind("IMDE", 0) == 0) {
            EXPECT_TRUE(c.passed()) << c.label << " " << c.computed << " vs " << c.published;
        }
}

TEST(Water, GpmStructuralEstimates) {
    const auto g = grey_params(water::evaluate("GPM(1,1,2)", config("GPM(1,1,2)")));
    EXPECT_NEAR(g.A(0, 0), -0.04578, 5e-5);
    EXPECT_NEAR(g.B(0, 0), 0.9626, 5e-4);
    EXPECT_NEAR(g.B(0, 1), 0.3865, 5e-4);
    EXPECT_NEAR(g.c[0], 20.6123, 5e-4);
}

TEST(Water, GpmReducedConsistentInitialValue) {
    const auto g = grey_params(water::evaluate("GPM(1,1,2)", config("GPM(1,1,2)")));
    const double t1 = 1.0;
    const double expected = (g.c[0] + g.B(0, 0) * t1 + g.B(0, 1) * t1 * t1) / (1.0 - g.A(0, 0));
    EXPECT_NEAR(g.eta[0], expected, 1e-12);
}

TEST(Water, GpmTimeResponsePolynomialPart) {
    const auto yg = water::gpm_closed_form(grey_params(water::evaluate("GPM(1,1,2)", config("GPM(1,1,2)"))));
    EXPECT_NEAR(yg.q[2], 8.4424, 5e-3);
    EXPECT_NEAR(yg.q[1], -347.7895, 5e-3);
    EXPECT_NEAR(yg.q[0], 8047.0682, 5e-3);
}

TEST(Water, GpmOutOfSampleMape) {
    EXPECT_NEAR(water::evaluate("GPM(1,1,2)", config("GPM(1,1,2)")).mape_out, 1.28, 0.05);
}

TEST(Water, GpmFirstForecast) {
    const auto r = water::evaluate("GPM(1,1,2)", config("GPM(1,1,2)"));
    EXPECT_NEAR(r.values[12], 71.14, 0.01);
    EXPECT_NEAR(r.ape[12], 0.40, 0.01);
}

TEST(Water, ReportSerializes) {
    const auto rep = water::reproduce();
    const auto j = water::to_json(rep);
    EXPECT_EQ(j.at("models").size(), 6u);
    EXPECT_EQ(j.at("published_external_models").size(), 4u);
    EXPECT_EQ(j.at("failed_cells").get<std::size_t>(), rep.failures().size());
    EXPECT_NE(water::render(rep).find("MAPE_out"), std::string::npos);
}
