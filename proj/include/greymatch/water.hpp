#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "closed_form.hpp"
#include "grey.hpp"
#include "matching.hpp"
#include "model_io.hpp"
#include "series.hpp"

namespace greymatch::water {

/// Other water supplies in China, 10^9 m^3, 2004..2018.
inline constexpr std::array<double, 15> supply = {17.20, 21.96, 22.70, 25.70, 28.74, 31.16, 33.12, 44.80,
                                                   44.60, 49.94, 57.46, 64.50, 70.85, 81.20, 86.40};
inline constexpr int first_year = 2004;
inline constexpr std::size_t train_size = 12;    // 2004..2015
inline constexpr std::size_t total_years = 17;   // through 2020

/// Series on t_k = k with 2004 at t = 1.
inline VectorSeries series(std::size_t count = supply.size()) {
    std::vector<double> t(count), x(count);
    for (std::size_t k = 0; k < count; ++k) {
        t[k] = static_cast<double>(k + 1);
        x[k] = supply[k];
    }
    return VectorSeries::scalar(std::move(t), x);
}

inline VectorSeries training() { return series(train_size); }

/// The six model structures compared on this data set.
inline std::vector<std::pair<std::string, model_io::ModelConfig>> models() {
    auto imde = [](int degree, bool constant) {
        model_io::ModelConfig c;
        c.model = "matching";
        c.forcing = degree > 0 ? basis::ForcingSpec::polynomial(degree) : basis::ForcingSpec::zero();
        c.constant_term = constant;
        return c;
    };
    model_io::ModelConfig gpm;
    gpm.model = "grey";
    gpm.forcing = basis::ForcingSpec::polynomial(2);
    gpm.strategy = grey::InitialStrategy::reduced_consistent;
    return {{"IMDE1", imde(0, false)}, {"IMDE2", imde(0, true)}, {"IMDE3", imde(1, true)},
            {"IMDE4", imde(2, true)},  {"IMDE5", imde(3, true)}, {"GPM(1,1,2)", gpm}};
}

/// Published fitted/forecast values (2004..2020), APEs (2004..2018) and MAPEs per model.
struct PublishedColumn {
    std::array<double, total_years> value;
    std::array<double, 15> ape;
    double mape_in;
    double mape_out;
};

inline const std::vector<PublishedColumn>& published() {
    static const std::vector<PublishedColumn> cols = {
        {{18.22, 20.43, 22.90, 25.68, 28.79, 32.28, 36.19, 40.58, 45.49, 51.01, 57.19, 64.12, 71.90, 80.61, 90.38,
          101.33, 113.61},
         {5.92, 6.99, 0.89, 0.09, 0.17, 3.59, 9.27, 9.43, 2.01, 2.14, 0.47, 0.58, 1.47, 0.73, 4.61},
         3.46,
         2.27},
        {{19.14, 21.12, 23.37, 25.95, 28.89, 32.24, 36.07, 40.43, 45.42, 51.10, 57.59, 64.99, 73.43, 83.07, 94.07,
          106.61, 120.93},
         {11.27, 3.84, 2.97, 0.97, 0.52, 3.47, 8.90, 9.74, 1.83, 2.33, 0.22, 0.76, 3.65, 2.30, 8.87},
         3.90,
         4.94},
        {{20.89, 21.66, 23.14, 25.32, 28.15, 31.61, 35.68, 40.31, 45.50, 51.20, 57.41, 64.10, 71.24, 78.82, 86.81,
          95.21, 103.98},
         {21.47, 1.38, 1.95, 1.49, 2.05, 1.45, 7.72, 10.02, 2.01, 2.53, 0.08, 0.62, 0.55, 2.93, 0.48},
         4.40,
         1.32},
        {{20.90, 21.67, 23.15, 25.33, 28.16, 31.62, 35.68, 40.32, 45.50, 51.21, 57.42, 64.10, 71.24, 78.81, 86.80,
          95.18, 103.93},
         {21.53, 1.33, 2.00, 1.45, 2.02, 1.47, 7.73, 10.01, 2.02, 2.54, 0.08, 0.62, 0.55, 2.94, 0.46},
         4.40,
         1.32},
        {{22.98, 22.32, 23.28, 25.47, 28.55, 32.29, 36.50, 41.10, 46.09, 51.60, 57.86, 65.23, 74.25, 85.60, 100.15,
          118.98, 143.40},
         {33.60, 1.66, 2.57, 0.90, 0.64, 3.63, 10.21, 8.26, 3.35, 3.32, 0.69, 1.14, 4.80, 5.42, 15.91},
         5.83,
         8.71},
        {{21.55, 21.48, 22.98, 25.16, 28.00, 31.47, 35.54, 40.18, 45.37, 51.08, 57.30, 63.99, 71.14, 78.72, 86.72,
          95.12, 103.89},
         {25.30, 2.17, 1.22, 2.10, 2.57, 0.99, 7.30, 10.31, 1.73, 2.29, 0.28, 0.79, 0.40, 3.06, 0.37},
         4.75,
         1.28},
    };
    return cols;
}

/// Published in-/out-of-sample MAPEs of the external comparison models (context only, not computed here).
struct ExternalModel {
    const char* name;
    double mape_in;
    double mape_out;
};
inline constexpr std::array<ExternalModel, 4> external_models = {
    ExternalModel{"LR", 8.14, 14.66}, {"ARIMA", 6.57, 7.76}, {"NNAR", 2.92, 11.18}, {"SVR", 6.05, 33.29}};

struct Cell {
    std::string label;
    double computed = 0.0;
    double published = 0.0;
    double tolerance = 0.0;
    bool passed() const { return std::abs(computed - published) <= tolerance; }
};

struct ModelResult {
    std::string name;
    model_io::FittedModel fitted;
    Vector values;  // 2004..2020
    Vector ape;     // 2004..2018
    double mape_in = 0.0;
    double mape_out = 0.0;
};

struct Tolerances {
    double coefficient = 5e-4;
    double gpm_rate = 5e-5;
    double table_value = 0.01;
    double mape = 0.05;
    double response_coefficient = 5e-3;
};

struct Report {
    std::vector<ModelResult> models;
    std::vector<Cell> coefficients;         // estimated parameters
    std::vector<Cell> response_coefficients;  // closed-form time-response coefficients
    std::vector<Cell> table;                // fitted values, forecasts, APEs, MAPEs
    bool passed() const {
        for (const auto* group : {&coefficients, &response_coefficients, &table})
            for (const auto& c : *group)
                if (!c.passed()) return false;
        return true;
    }
    std::vector<const Cell*> failures() const {
        std::vector<const Cell*> out;
        for (const auto* group : {&coefficients, &response_coefficients, &table})
            for (const auto& c : *group)
                if (!c.passed()) out.push_back(&c);
        return out;
    }
};

inline ModelResult evaluate(const std::string& name, const model_io::ModelConfig& cfg) {
    ModelResult r;
    r.name = name;
    r.fitted = model_io::fit(cfg, training());
    const VectorSeries pred = model_io::predict(r.fitted, total_years - train_size);
    r.values = pred.values().col_vector(0);
    const VectorSeries actual = series();
    const ErrorReport err = mape(actual, pred.head(supply.size()), train_size);
    r.ape = err.per_point_ape.col_vector(0);
    r.mape_in = err.mape_in[0];
    r.mape_out = err.mape_out[0];
    return r;
}

/// Closed form of a fitted scalar IMDE3: x(t) = K exp(a t) + q0 + q1 t.
inline closed_form::ScalarPolynomialResponse imde_closed_form(const matching::MatchedParameterSet& p) {
    // g(t) = c + b_1 t + ...; B holds the basis columns first and the constant last
    std::vector<double> g{p.constant()[0]};
    for (std::size_t j = 0; j < p.forcing.dimension(); ++j) g.push_back(p.B(0, j));
    return closed_form::scalar_polynomial_response(p.A(0, 0), g, p.eta[0], p.t1);
}

/// Closed form of the fitted scalar GPM on the Cusum scale.
inline closed_form::ScalarPolynomialResponse gpm_closed_form(const grey::GreyParameterSet& p) {
    std::vector<double> g{p.c[0]};
    for (std::size_t j = 0; j < p.forcing.dimension(); ++j) g.push_back(p.B(0, j));
    return closed_form::scalar_polynomial_response(p.A(0, 0), g, p.eta[0], p.t1);
}

inline Report reproduce(const Tolerances& tol = {}) {
    Report rep;
    const auto cfgs = models();
    const auto& pub = published();
    for (std::size_t m = 0; m < cfgs.size(); ++m) {
        rep.models.push_back(evaluate(cfgs[m].first, cfgs[m].second));
        const auto& r = rep.models.back();
        const auto& col = pub[m];
        for (std::size_t k = 0; k < total_years; ++k)
            rep.table.push_back({r.name + " " + std::to_string(first_year + static_cast<int>(k)) + " value", r.values[k],
                                 col.value[k], tol.table_value});
        for (std::size_t k = 0; k < supply.size(); ++k)
            rep.table.push_back({r.name + " " + std::to_string(first_year + static_cast<int>(k)) + " APE", r.ape[k],
                                 col.ape[k], tol.table_value});
        rep.table.push_back({r.name + " MAPE_in", r.mape_in, col.mape_in, tol.mape});
        rep.table.push_back({r.name + " MAPE_out", r.mape_out, col.mape_out, tol.mape});
    }

    auto matched = [&](std::size_t i) -> const matching::MatchedParameterSet& {
        return std::get<matching::MatchedParameterSet>(rep.models[i].fitted.params);
    };
    const auto& i1 = matched(0);
    const auto& i3 = matched(2);
    const auto& i4 = matched(3);
    const auto& gpm = std::get<grey::GreyParameterSet>(rep.models[5].fitted.params);
    const double c5 = tol.coefficient;
    rep.coefficients = {
        {"IMDE1 a", i1.A(0, 0), 0.1144, c5},          {"IMDE1 eta", i1.eta[0], 18.2176, c5},
        {"IMDE3 a", i3.A(0, 0), -0.0458, c5},         {"IMDE3 b1", i3.B(0, 0), 0.7730, c5},
        {"IMDE3 c", i3.constant()[0], 0.5761, c5},    {"IMDE3 eta", i3.eta[0], 20.8931, c5},
        {"IMDE4 a", i4.A(0, 0), -0.0395, c5},         {"IMDE4 b1", i4.B(0, 0), 0.7717, c5},
        {"IMDE4 b2", i4.B(0, 1), -0.0018, c5},        {"IMDE4 c", i4.constant()[0], 0.4509, c5},
        {"IMDE4 eta", i4.eta[0], 20.9025, c5},        {"GPM a", gpm.A(0, 0), -0.04578, tol.gpm_rate},
        {"GPM b1", gpm.B(0, 0), 0.9626, c5},          {"GPM b2", gpm.B(0, 1), 0.3865, c5},
        {"GPM c", gpm.c[0], 20.6123, c5},             {"GPM eta", gpm.eta[0], 21.5509, c5},
    };
    const auto xm = imde_closed_form(i3);
    const auto yg = gpm_closed_form(gpm);
    const double c3 = tol.response_coefficient;
    rep.response_coefficients = {
        {"IMDE3 x(t): t", xm.q[1], 16.8847, c3},
        {"IMDE3 x(t): exp", xm.K, 377.1157, c3},
        {"IMDE3 x(t): const", xm.q[0], -356.2318, c3},
        {"GPM y(t): t^2", yg.q[2], 8.4424, c3},
        {"GPM y(t): t", yg.q[1], -347.7895, c3},
        {"GPM y(t): exp", yg.K, -8046.2287, c3},
        {"GPM y(t): const", yg.q[0], 8047.0682, c3},
    };
    return rep;
}

inline nlohmann::json cells_to_json(const std::vector<Cell>& cells) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : cells)
        a.push_back({{"cell", c.label},
                     {"computed", c.computed},
                     {"published", c.published},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed()}});
    return a;
}

inline nlohmann::json to_json(const Report& r) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : r.models) {
        models.push_back({{"name", m.name},
                          {"model", model_io::to_json(m.fitted)},
                          {"values", m.values},
                          {"ape", m.ape},
                          {"mape_in", m.mape_in},
                          {"mape_out", m.mape_out}});
    }
    nlohmann::json ext = nlohmann::json::array();
    for (const auto& e : external_models)
        ext.push_back({{"name", e.name}, {"mape_in", e.mape_in}, {"mape_out", e.mape_out}});
    return {{"case", "water"},
            {"passed", r.passed()},
            {"failed_cells", r.failures().size()},
            {"models", models},
            {"coefficients", cells_to_json(r.coefficients)},
            {"response_coefficients", cells_to_json(r.response_coefficients)},
            {"table", cells_to_json(r.table)},
            {"published_external_models", ext}};
}

/// Plain-text rendering of the reproduced table next to the published one.
inline std::string render(const Report& r) {
    std::string out;
    char buf[256];
    out += "Year ";
    for (const auto& m : r.models) {
        std::snprintf(buf, sizeof buf, "| %-22s", m.name.c_str());
        out += buf;
    }
    out += "\n     ";
    for (std::size_t m = 0; m < r.models.size(); ++m) out += "|  value  APE  (published)";
    out += "\n";
    const auto& pub = published();
    for (std::size_t k = 0; k < total_years; ++k) {
        std::snprintf(buf, sizeof buf, "%d ", first_year + static_cast<int>(k));
        out += buf;
        for (std::size_t m = 0; m < r.models.size(); ++m) {
            const auto& res = r.models[m];
            if (k < supply.size())
                std::snprintf(buf, sizeof buf, "| %6.2f %5.2f (%6.2f %5.2f)", res.values[k], res.ape[k],
                              pub[m].value[k], pub[m].ape[k]);
            else
                std::snprintf(buf, sizeof buf, "| %6.2f       (%6.2f      )", res.values[k], pub[m].value[k]);
            out += buf;
        }
        out += "\n";
        if (k + 1 == train_size || k + 1 == supply.size()) {
            const bool in = k + 1 == train_size;
            out += in ? "MAPE_in " : "MAPE_out";
            for (std::size_t m = 0; m < r.models.size(); ++m) {
                std::snprintf(buf, sizeof buf, "|       %5.2f ( %5.2f)  ", in ? r.models[m].mape_in : r.models[m].mape_out,
                              in ? pub[m].mape_in : pub[m].mape_out);
                out += buf;
            }
            out += "\n";
        }
    }
    out += "\nPublished comparison models (context only, not computed here):\n";
    for (const auto& e : external_models) {
        std::snprintf(buf, sizeof buf, "  %-6s MAPE_in %5.2f  MAPE_out %5.2f\n", e.name, e.mape_in, e.mape_out);
        out += buf;
    }
    return out;
}

}  // namespace greymatch::water
