// greymatch: fit, forecast, verify and simulate grey / integral-matching models from the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "greymatch/greymatch.hpp"
#include "greymatch/reproduce.hpp"

using namespace greymatch;
using nlohmann::json;

namespace {

struct Options {
    std::string input, model, output, tidy;
    std::optional<std::size_t> split;
    std::optional<double> train_fraction;
    std::size_t horizon = 0;
    std::optional<std::size_t> reps;
    std::uint64_t seed = 1;
    std::optional<double> tolerance;
    std::string reproduce_case = "water";
    std::string check = "proposition1";
    std::vector<double> shift;
    std::string strategy = "least_squares";
    unsigned workers = 0;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// Writes to the file at path, or to stdout when path is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

std::size_t split_index(const Options& o, std::size_t n) {
    std::size_t k = n;
    if (o.split) k = *o.split;
    if (o.train_fraction) {
        if (!(*o.train_fraction > 0.0 && *o.train_fraction <= 1.0))
            throw PreconditionError("--train-fraction must lie in (0, 1]");
        k = static_cast<std::size_t>(std::floor(*o.train_fraction * static_cast<double>(n)));
    }
    if (k < 1 || k > n)
        throw PreconditionError("split " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    return k;
}

VectorSeries head(const VectorSeries& x, std::size_t k) {
    return {x.grid().head(k), x.values().block(0, 0, k, x.dimension())};
}

int cmd_fit(const Options& o) {
    const VectorSeries x = csv::read_file(o.input).series;
    const auto cfg = model_io::config_from_json(read_json(o.model));
    const std::size_t k = split_index(o, x.size());
    const auto m = model_io::fit(cfg, head(x, k));
    const VectorSeries fitted = model_io::predict(m, 0);
    const auto err = mape(x, model_io::predict(m, x.size() - k), k);

    json j = model_io::to_json(m);
    j["report"] = {{"split_index", k},
                   {"fitted", simulate::matrix_to_json(fitted.values())},
                   {"mape_in", err.mape_in},
                   {"mape_out", err.mape_out},
                   {"ape", simulate::matrix_to_json(err.per_point_ape)}};
    emit(o.output, j.dump(2) + "\n");
    return 0;
}

int cmd_forecast(const Options& o) {
    const auto m = model_io::from_json(read_json(o.model));
    const VectorSeries f = model_io::predict(m, o.horizon);
    std::ostringstream out;
    csv::write(out, f, csv::default_header(f.dimension(), "_hat"));
    emit(o.output, out.str());
    return 0;
}

int cmd_simulate(const Options& o) {
    auto sc = o.model.empty() ? simulate::reference_scenario(0.25, 5.0) : simulate::scenario_from_json(read_json(o.model));
    if (o.reps) sc.replications = *o.reps;
    sc.seed = o.seed;
    if (o.workers) sc.workers = o.workers;
    const auto s = simulate::run_monte_carlo(sc);
    emit(o.output, simulate::to_json(s).dump(2) + "\n");
    if (!o.tidy.empty()) {
        std::ofstream out(o.tidy);
        if (!out) throw ParseError("cannot write " + o.tidy);
        simulate::write_tidy_csv(out, s);
    }
    return 0;
}

int cmd_verify(const Options& o) {
    theory::Tolerances tol;
    if (o.tolerance) tol.parameters = *o.tolerance;
    theory::EquivalenceReport r;
    if (o.check == "theorem1") {
        const auto m = model_io::from_json(read_json(o.model));
        if (!m.is_grey()) throw UnsupportedError("theorem1 needs a fitted grey model");
        const auto& g = std::get<grey::GreyParameterSet>(m.params);
        r = theory::check_theorem1(g.A, g.B, g.c, g.eta, g.forcing, m.times, tol, m.quadrature_steps_per_unit);
    } else {
        const VectorSeries x = csv::read_file(o.input).series;
        if (o.check == "proposition1") {
            r = theory::check_proposition1(x, tol);
        } else {
            const auto cfg = o.model.empty() ? model_io::ModelConfig{} : model_io::config_from_json(read_json(o.model));
            Vector xi = o.shift.empty() ? Vector(x.dimension(), 1.0) : Vector(o.shift.begin(), o.shift.end());
            if (xi.size() != x.dimension()) throw ShapeError("--shift needs one value per component");
            r = theory::check_translation_invariance(x, cfg.forcing, cfg.grey_config,
                                                     grey::strategy_from_string(o.strategy), xi, tol);
        }
    }
    emit(o.output, theory::to_json(r).dump(2) + "\n");
    return r.passed ? 0 : static_cast<int>(ErrorKind::tolerance);
}

void report_failures(const json& failing) {
    std::cerr << json{{"error", "tolerance"}, {"message", "reproduced values outside tolerance"}, {"cells", failing}}.dump()
              << "\n";
}

int cmd_reproduce(const Options& o) {
    if (o.reproduce_case == "water") {
        water::Tolerances tol;
        if (o.tolerance) tol.table_value = *o.tolerance;
        const auto rep = water::reproduce(tol);
        std::cout << water::render(rep);
        if (!o.output.empty()) emit(o.output, water::to_json(rep).dump(2) + "\n");
        if (rep.passed()) return 0;
        json failing = json::array();
        for (const auto* c : rep.failures()) failing.push_back(c->label);
        report_failures(failing);
        return static_cast<int>(ErrorKind::tolerance);
    }
    const std::size_t reps = o.reps.value_or(200);
    const auto rep = o.reproduce_case == "simulation-table4" ? reproduce::table4_report(reps, o.seed, o.workers)
                                                             : reproduce::fig5_report(reps, o.seed, o.workers);
    std::cout << reproduce::render(rep);
    if (!o.output.empty()) emit(o.output, reproduce::to_json(rep).dump(2) + "\n");
    if (rep.passed()) return 0;
    json failing = json::array();
    for (const auto& c : rep.cells)
        if (!c.passed()) failing.push_back(c.label);
    for (const auto& f : rep.failed_checks) failing.push_back(f);
    report_failures(failing);
    return static_cast<int>(ErrorKind::tolerance);
}

int fail(ErrorKind kind, const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
    return static_cast<int>(kind);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grey and integral-matching differential equation models"};
    app.require_subcommand(1);
    Options o;

    auto* fit = app.add_subcommand("fit", "fit a model to a CSV series");
    fit->add_option("--input", o.input, "CSV with header t,x1,...,xd")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", o.model, "model config JSON")->required()->check(CLI::ExistingFile);
    fit->add_option("--output", o.output, "fitted-model JSON (stdout if omitted)");
    auto* split = fit->add_option("--split", o.split, "number of leading rows used for fitting");
    auto* frac = fit->add_option("--train-fraction", o.train_fraction, "fraction of rows used for fitting");
    split->excludes(frac);

    auto* forecast = app.add_subcommand("forecast", "evaluate a fitted model r steps past its training data");
    forecast->add_option("--model", o.model, "fitted-model JSON")->required()->check(CLI::ExistingFile);
    forecast->add_option("--horizon", o.horizon, "number of steps ahead");
    forecast->add_option("--output", o.output, "forecast CSV (stdout if omitted)");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo comparison of the two estimators");
    sim->add_option("--model", o.model, "scenario JSON (reference system if omitted)")->check(CLI::ExistingFile);
    sim->add_option("--reps", o.reps, "replications");
    sim->add_option("--seed", o.seed, "base seed");
    sim->add_option("--workers", o.workers, "threads (0: all cores)");
    sim->add_option("--output", o.output, "summary JSON (stdout if omitted)");
    sim->add_option("--tidy", o.tidy, "per-replication CSV");

    auto* verify = app.add_subcommand("verify", "check a grey/matching identity numerically");
    verify->add_option("--check", o.check, "proposition1, translation or theorem1")
        ->check(CLI::IsMember({"proposition1", "translation", "theorem1"}));
    verify->add_option("--input", o.input, "CSV series")->check(CLI::ExistingFile);
    verify->add_option("--model", o.model, "model config (translation) or fitted grey model (theorem1)")
        ->check(CLI::ExistingFile);
    verify->add_option("--shift", o.shift, "translation added to the first observation");
    verify->add_option("--strategy", o.strategy, "initial-value strategy for the translation check");
    verify->add_option("--tolerance", o.tolerance, "parameter tolerance");
    verify->add_option("--output", o.output, "report JSON (stdout if omitted)");

    auto* repro = app.add_subcommand("reproduce", "regenerate the published tables");
    repro->add_option("--case", o.reproduce_case, "water, simulation-table4 or simulation-fig5")
        ->check(CLI::IsMember({"water", "simulation-table4", "simulation-fig5"}));
    repro->add_option("--reps", o.reps, "replications per scenario (default 200)");
    repro->add_option("--seed", o.seed, "base seed");
    repro->add_option("--workers", o.workers, "threads (0: all cores)");
    repro->add_option("--tolerance", o.tolerance, "table-value tolerance (water)");
    repro->add_option("--output", o.output, "report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(ErrorKind::usage, "usage", e.what());
    }

    try {
        if (*fit) return cmd_fit(o);
        if (*forecast) return cmd_forecast(o);
        if (*sim) return cmd_simulate(o);
        if (*verify) {
            if (o.check != "theorem1" && o.input.empty()) return fail(ErrorKind::usage, "usage", "--input is required");
            if (o.check == "theorem1" && o.model.empty()) return fail(ErrorKind::usage, "usage", "--model is required");
            return cmd_verify(o);
        }
        return cmd_reproduce(o);
    } catch (const Error& e) {
        return fail(e.kind(), e.code(), e.what());
    } catch (const json::exception& e) {
        return fail(ErrorKind::data, "parse", e.what());
    } catch (const std::exception& e) {
        return fail(ErrorKind::numerical, "internal", e.what());
    }
}
