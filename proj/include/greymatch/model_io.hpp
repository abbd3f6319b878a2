#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "error.hpp"
#include "grey.hpp"
#include "matching.hpp"
#include "series.hpp"
#include "simulate.hpp"

namespace greymatch::model_io {

/// What a model config asks for before fitting.
struct ModelConfig {
    std::string model = "matching";  // "grey" or "matching"
    basis::ForcingSpec forcing;
    bool constant_term = false;  // matching only
    grey::GreyFitConfig grey_config;
    grey::InitialStrategy strategy = grey::InitialStrategy::fixed_first;
};

/**
 * @brief Parse a model config such as
 * {"model":"matching","forcing":{"kind":"polynomial","degree":1},"constant":true}.
 */
inline ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    try {
        c.model = j.value("model", std::string("matching"));
        if (c.model != "grey" && c.model != "matching") throw ParseError("model must be \"grey\" or \"matching\"");
        if (j.contains("forcing")) c.forcing = basis::from_json(j.at("forcing"));
        c.constant_term = j.value("constant", false);
        if (c.constant_term && c.model == "grey")
            throw ParseError("\"constant\" applies to matching models; the grey model always has c");
        c.grey_config.background_lambda = j.value("lambda", 0.5);
        c.grey_config.quadrature_steps_per_unit = j.value("quadrature_steps_per_unit", 50.0);
        if (j.contains("strategy")) c.strategy = grey::strategy_from_string(j.at("strategy").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid model config: ") + e.what());
    }
    return c;
}

/// A fitted model together with its training times, so it can be re-evaluated later.
struct FittedModel {
    std::variant<grey::GreyParameterSet, matching::MatchedParameterSet> params;
    std::vector<double> times;
    double quadrature_steps_per_unit = 50.0;

    bool is_grey() const { return std::holds_alternative<grey::GreyParameterSet>(params); }
    std::size_t dimension() const {
        return std::visit([](const auto& p) { return p.dimension(); }, params);
    }
};

inline FittedModel fit(const ModelConfig& cfg, const VectorSeries& x) {
    FittedModel m;
    m.times = x.grid().points();
    if (cfg.model == "grey") {
        m.params = grey::fit_grey(x, cfg.forcing, cfg.grey_config, cfg.strategy);
        m.quadrature_steps_per_unit = cfg.grey_config.quadrature_steps_per_unit;
    } else {
        matching::MatchingOptions opt;
        opt.constant_term = cfg.constant_term;
        opt.quadrature_steps_per_unit = cfg.grey_config.quadrature_steps_per_unit;
        m.params = matching::fit_matching(x, cfg.forcing, opt);
        m.quadrature_steps_per_unit = opt.quadrature_steps_per_unit;
    }
    return m;
}

/// Fitted values on the training times followed by r forecasts.
inline VectorSeries predict(const FittedModel& m, std::size_t horizon) {
    const TimeGrid grid = TimeGrid(m.times).extended(horizon);
    if (const auto* g = std::get_if<grey::GreyParameterSet>(&m.params)) {
        grey::GreyFitConfig cfg{g->lambda, m.quadrature_steps_per_unit};
        return grey::grey_restore(*g, grid, cfg);
    }
    const auto& p = std::get<matching::MatchedParameterSet>(m.params);
    return {grid, matching::matching_time_response(p, grid.points(), m.quadrature_steps_per_unit)};
}

inline nlohmann::json to_json(const FittedModel& m) {
    using simulate::matrix_to_json;
    nlohmann::json j;
    if (const auto* g = std::get_if<grey::GreyParameterSet>(&m.params)) {
        j = {{"model", "grey"},
             {"d", g->dimension()},
             {"forcing", basis::to_json(g->forcing)},
             {"A", matrix_to_json(g->A)},
             {"B", matrix_to_json(g->B)},
             {"c", g->c},
             {"eta", g->eta},
             {"strategy", grey::to_string(g->strategy_used)},
             {"lambda", g->lambda},
             {"residual_norm", g->residual_norm}};
    } else {
        const auto& p = std::get<matching::MatchedParameterSet>(m.params);
        j = {{"model", "matching"},
             {"d", p.dimension()},
             {"forcing", basis::to_json(p.forcing)},
             {"constant", p.constant_term},
             {"A", matrix_to_json(p.A)},
             {"B", matrix_to_json(p.B)},
             {"eta", p.eta},
             {"residual_norm", p.residual_norm}};
    }
    j["t"] = m.times;
    j["quadrature_steps_per_unit"] = m.quadrature_steps_per_unit;
    return j;
}

inline FittedModel from_json(const nlohmann::json& j) {
    using simulate::matrix_from_json;
    FittedModel m;
    try {
        const std::string kind = j.at("model").get<std::string>();
        const auto d = j.at("d").get<std::size_t>();
        m.times = j.at("t").get<std::vector<double>>();
        if (m.times.empty()) throw ParseError("fitted model has no training times");
        m.quadrature_steps_per_unit = j.value("quadrature_steps_per_unit", 50.0);
        const basis::ForcingSpec forcing = basis::from_json(j.at("forcing"));
        if (kind == "grey") {
            grey::GreyParameterSet g;
            g.forcing = forcing;
            g.A = matrix_from_json(j.at("A"));
            g.B = j.at("B").empty() ? Matrix(d, 0) : matrix_from_json(j.at("B"));
            g.c = j.at("c").get<Vector>();
            g.eta = j.at("eta").get<Vector>();
            g.strategy_used = grey::strategy_from_string(j.at("strategy").get<std::string>());
            g.lambda = j.value("lambda", 0.5);
            g.residual_norm = j.value("residual_norm", 0.0);
            g.t1 = m.times.front();
            if (g.A.rows() != d || !g.A.is_square() || g.B.rows() != d || g.B.cols() != forcing.dimension() ||
                g.c.size() != d || g.eta.size() != d)
                throw ShapeError("grey model parameters do not match d and the forcing spec");
            m.params = std::move(g);
        } else if (kind == "matching") {
            matching::MatchedParameterSet p;
            p.forcing = forcing;
            p.constant_term = j.value("constant", false);
            const std::size_t q = forcing.dimension() + (p.constant_term ? 1 : 0);
            p.A = matrix_from_json(j.at("A"));
            p.B = j.at("B").empty() ? Matrix(d, 0) : matrix_from_json(j.at("B"));
            p.eta = j.at("eta").get<Vector>();
            p.residual_norm = j.value("residual_norm", 0.0);
            p.t1 = m.times.front();
            if (p.A.rows() != d || !p.A.is_square() || p.B.rows() != d || p.B.cols() != q || p.eta.size() != d)
                throw ShapeError("matching model parameters do not match d and the forcing spec");
            m.params = std::move(p);
        } else {
            throw ParseError("unknown model kind \"" + kind + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid fitted-model JSON: ") + e.what());
    }
    return m;
}

}  // namespace greymatch::model_io
