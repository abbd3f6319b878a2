// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "greymatch/greymatch.hpp"
#include "greymatch/reproduce.hpp"
#include "../random_instances.hpp"

using namespace greymatch;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (ok) return;
        passed = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

const Matrix kA{{-0.25, 0.70}, {0.75, -0.25}};
const Vector kEta{1.20, 0.35};

model_io::ModelConfig water_config(const std::string& name) {
    for (const auto& [n, c] : water::models())
        if (n == name) return c;
    throw PreconditionError("no model " + name);
}

void near(Outcome& o, const std::string& what, double got, double want, double tol) {
    o.require(std::abs(got - want) <= tol, what + fmt(" = %.6f", got) + fmt(" (want %.4f)", want));
}

Outcome water_coefficients() {
    Outcome o;
    const auto m3 = std::get<matching::MatchedParameterSet>(water::evaluate("IMDE3", water_config("IMDE3")).fitted.params);
    near(o, "IMDE3 a", m3.A(0, 0), -0.0458, 5e-4);
    near(o, "IMDE3 b1", m3.B(0, 0), 0.7730, 5e-4);
    near(o, "IMDE3 c", m3.constant()[0], 0.5761, 5e-4);
    near(o, "IMDE3 eta", m3.eta[0], 20.8931, 5e-4);
    const auto m4 = std::get<matching::MatchedParameterSet>(water::evaluate("IMDE4", water_config("IMDE4")).fitted.params);
    near(o, "IMDE4 a", m4.A(0, 0), -0.0395, 5e-4);
    near(o, "IMDE4 b1", m4.B(0, 0), 0.7717, 5e-4);
    near(o, "IMDE4 b2", m4.B(0, 1), -0.0018, 5e-4);
    near(o, "IMDE4 c", m4.constant()[0], 0.4509, 5e-4);
    near(o, "IMDE4 eta", m4.eta[0], 20.9025, 5e-4);
    const auto g = std::get<grey::GreyParameterSet>(water::evaluate("GPM(1,1,2)", water_config("GPM(1,1,2)")).fitted.params);
    near(o, "GPM a", g.A(0, 0), -0.04578, 5e-5);
    if (o.passed) o.detail = "IMDE3, IMDE4 and the GPM rate within tolerance";
    return o;
}

Outcome summarize_cells(const std::vector<water::Cell>& cells) {
    Outcome o;
    std::size_t bad = 0;
    for (const auto& c : cells)
        if (!c.passed()) {
            if (bad < 6) o.require(false, c.label + fmt(" %.4f vs %.4f", c.computed, c.published));
            ++bad;
        }
    if (bad > 6) o.detail += "; " + std::to_string(bad - 6) + " more";
    if (o.passed) o.detail = std::to_string(cells.size()) + " cells within tolerance";
    else o.detail = std::to_string(bad) + "/" + std::to_string(cells.size()) + " cells off: " + o.detail;
    return o;
}

Outcome water_tables() { return summarize_cells(water::reproduce().table); }

Outcome response_formulas() { return summarize_cells(water::reproduce().response_coefficients); }

Outcome proposition1_suite() {
    Outcome o;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const auto in = fixtures::random_instance(rng, trial);
        const auto r = theory::check_proposition1(in.x);
        worst = std::max(worst, r.max_abs_discrepancy);
        o.require(r.passed, "instance " + std::to_string(trial));
    }
    if (o.passed) o.detail = "100 instances, worst " + fmt("%.2e", worst);
    return o;
}

Outcome translation_suite() {
    Outcome o;
    std::mt19937_64 rng(202);
    std::size_t checks = 0;
    for (std::size_t trial = 0; trial < 100; ++trial) {
        const auto in = fixtures::random_instance(rng, trial);
        for (double s : {-10.0, 1.0, 5.0})
            for (auto st : {grey::InitialStrategy::fixed_first, grey::InitialStrategy::fixed_last,
                            grey::InitialStrategy::least_squares}) {
                const auto r = theory::check_translation_invariance(in.x, basis::ForcingSpec::zero(), {}, st,
                                                                    s * in.x.at(0));
                ++checks;
                o.require(r.passed, "instance " + std::to_string(trial) + " " + grey::to_string(st));
            }
    }
    if (o.passed) o.detail = std::to_string(checks) + " fits invariant";
    return o;
}

Outcome theorem1_suite() {
    Outcome o;
    std::mt19937_64 rng(303);
    for (std::size_t trial = 0; trial < 50; ++trial) {
        const auto s = fixtures::random_forced_system(rng, trial);
        const auto r = theory::check_theorem1(s.A, s.B, s.c, s.xi, basis::ForcingSpec::polynomial(s.degree), s.times);
        o.require(r.passed, "system " + std::to_string(trial) + fmt(" off by %.2e", r.max_abs_discrepancy));
    }
    const auto w = theory::check_worked_example(-0.3, 0.05, 0.4, 1.2, 2.0, {0, 0.5, 1, 2, 4, 8});
    o.require(w.passed, "worked example" + fmt(" off by %.2e", w.max_abs_discrepancy));
    if (o.passed) o.detail = "50 systems and the worked example";
    return o;
}

Outcome simulation_means() {
    Outcome o;
    const auto s = simulate::run_monte_carlo(reproduce::study_scenario(0.25, 5.0, 200, 1));
    const Vector published{-0.250, 0.700, 0.744, -0.245, 1.201, 0.351};
    const auto names = simulate::parameter_names(2);
    o.require(s.failed == 0, std::to_string(s.failed) + " replications failed");
    for (std::size_t i = 0; i < published.size(); ++i)
        near(o, "mean " + names[i], s.matching.mean[i], published[i], 0.02);
    o.require(s.max_structural_gap <= 1e-9, fmt("structural gap %.2e", s.max_structural_gap));
    if (o.passed) o.detail = "R=200, gap " + fmt("%.1e", s.max_structural_gap);
    return o;
}

Outcome fig5_medians() {
    Outcome o;
    const auto rep = reproduce::fig5_report(200, 1);
    for (const auto& c : rep.cells)
        if (!c.passed()) o.require(false, c.label + fmt(" %.2f vs %.2f", c.computed, c.published));
    for (const auto& f : rep.failed_checks) o.require(false, f);
    for (const auto& r : rep.runs) o.require(r.failed == 0, "failed replications");
    if (o.passed) o.detail = "medians and orderings agree";
    return o;
}

Outcome noiseless_consistency() {
    Outcome o;
    const std::vector<double> hs{0.25, 0.1, 0.05};
    std::vector<double> err;
    for (double h : hs) {
        const auto x = simulate::generate_trajectory(simulate::reference_scenario(h, INFINITY)).noisy;
        const auto p = matching::fit_matching(x, basis::ForcingSpec::zero());
        err.push_back(std::max((p.A - kA).max_abs(), max_abs(p.eta - kEta)));
    }
    for (std::size_t i = 1; i < hs.size(); ++i) {
        const double order = std::log(err[i - 1] / err[i]) / std::log(hs[i - 1] / hs[i]);
        o.require(order >= 1.8, fmt("order %.2f at h=%.2f", order, hs[i]));
    }
    o.require(err.back() <= 1e-2, fmt("error %.2e at h=0.05", err.back()));
    if (o.passed) o.detail = fmt("error %.2e at h=0.05", err.back());
    return o;
}

Outcome numerics_substrate() {
    Outcome o;
    std::mt19937_64 rng(404);
    double worst_exp = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix m = fixtures::random_matrix(rng, 1 + trial % 4, 1 + trial % 4, 1.0);
        const double s = 0.3 + 0.05 * trial, t = 0.7;
        const Matrix id = Matrix::identity(m.rows());
        worst_exp = std::max(worst_exp, (numerics::matrix_exponential(m, s) * numerics::matrix_exponential(m, -s) - id).max_abs());
        worst_exp = std::max(worst_exp, scaled_discrepancy(numerics::matrix_exponential(m, s + t),
                                                           numerics::matrix_exponential(m, s) * numerics::matrix_exponential(m, t)));
    }
    o.require(worst_exp <= 1e-9, fmt("exponential identity off by %.2e", worst_exp));

    double worst_ls = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cols = 1 + trial % 5, rows = cols + 3 + trial % 7;
        const Matrix d = fixtures::random_matrix(rng, rows, cols, 1.0);
        const Matrix x = fixtures::random_matrix(rng, rows, 1, 1.0);
        const auto sol = numerics::solve_least_squares(d, x);
        if (sol.condition_estimate > 1e6) continue;
        const Vector oracle = numerics::lu_solve(d.transpose() * d, (d.transpose() * x).col_vector(0));
        worst_ls = std::max(worst_ls, scaled_discrepancy(sol.coefficients.col_vector(0), oracle));
    }
    o.require(worst_ls <= 1e-8, fmt("least squares off by %.2e", worst_ls));

    const double a = -0.8, t = 3.0;
    const double exact = (std::exp(-a * t) * (-a * std::cos(t) + std::sin(t)) + a) / (a * a + 1.0);
    auto f = [](double s) { return Vector{std::cos(s)}; };
    const double e1 = std::abs(numerics::convolution_integral(Matrix{{a}}, f, 0, t, 8)[0] - exact);
    const double e2 = std::abs(numerics::convolution_integral(Matrix{{a}}, f, 0, t, 16)[0] - exact);
    const double order = std::log2(e1 / e2);
    o.require(order >= 3.5, fmt("quadrature order %.2f", order));
    if (o.passed) o.detail = fmt("exp %.1e, ", worst_exp) + fmt("ls %.1e, ", worst_ls) + fmt("quadrature order %.2f", order);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;  // 0: no runtime bound
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "water golden coefficients", 1.0, water_coefficients},
        {2, "water golden tables", 5.0, water_tables},
        {3, "time-response formulas", 0.0, response_formulas},
        {4, "proposition 1 identities", 10.0, proposition1_suite},
        {5, "translation invariance", 0.0, translation_suite},
        {6, "reduced-form round trip", 0.0, theorem1_suite},
        {7, "simulation means", 60.0, simulation_means},
        {8, "error medians", 0.0, fig5_medians},
        {9, "noiseless consistency", 0.0, noiseless_consistency},
        {10, "numerics substrate", 0.0, numerics_substrate},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0.0 && secs > c.limit_seconds) o.require(false, fmt("took %.2f s, limit %.0f s", secs, c.limit_seconds));
        if (!o.passed) ++failures;
        std::printf("criterion %2d %-28s %s  %7.2f s  %s\n", c.id, c.name, o.passed ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
