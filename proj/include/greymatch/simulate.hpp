#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "error.hpp"
#include "grey.hpp"
#include "matching.hpp"
#include "response.hpp"
#include "series.hpp"

namespace greymatch::simulate {

/// How the per-component noise level follows from snr and the clean variance.
enum class NoiseLaw {
    inverse_sqrt,   ///< sigma_l = sqrt(Var x_l) / sqrt(snr)
    inverse_square  ///< sigma_l = sqrt(Var x_l) / snr^2
};

/// Reference series for the in-sample error.
enum class FitReference {
    noisy,  ///< divide by the observed values
    clean   ///< divide by the noise-free trajectory
};

inline std::string to_string(NoiseLaw l) { return l == NoiseLaw::inverse_sqrt ? "inverse_sqrt" : "inverse_square"; }
inline std::string to_string(FitReference r) { return r == FitReference::noisy ? "noisy" : "clean"; }

struct SimulationScenario {
    Matrix A;
    Vector eta;
    basis::ForcingSpec forcing;  // u(t) of dx/dt = A x + B u; zero for the autonomous case
    Matrix B;                    // d x p
    double t_start = 0.0;
    double t_end = 5.0;
    double h = 0.25;
    double snr = 5.0;  // +inf means no noise
    std::size_t replications = 200;
    std::uint64_t seed = 1;
    std::size_t out_of_sample = 10;
    NoiseLaw noise_law = NoiseLaw::inverse_sqrt;
    FitReference fit_reference = FitReference::noisy;
    std::vector<std::size_t> horizons{2, 5, 10};
    unsigned workers = 0;  // 0: hardware concurrency

    std::size_t dimension() const { return A.rows(); }

    std::size_t sample_size() const {
        const double span = t_end - t_start;
        const double steps = std::round(span / h);
        if (!(h > 0.0) || std::abs(steps * h - span) > 1e-9 * std::max(1.0, std::abs(span)))
            throw PreconditionError("scenario step h must divide the time span");
        return static_cast<std::size_t>(steps) + 1;
    }

    void validate() const {
        if (!A.is_square() || A.rows() == 0) throw ShapeError("scenario A must be square and nonempty");
        if (eta.size() != A.rows()) throw ShapeError("scenario eta has wrong dimension");
        if (B.rows() != A.rows() && forcing.dimension() > 0) throw ShapeError("scenario B has wrong row count");
        if (forcing.dimension() != B.cols()) throw ShapeError("scenario B columns differ from forcing dimension");
        if (!(snr > 0.0)) throw PreconditionError("snr must be > 0");
        if (replications < 1) throw PreconditionError("replications must be >= 1");
        for (auto r : horizons)
            if (r < 1 || r > out_of_sample) throw PreconditionError("each horizon must lie in [1, out_of_sample]");
        sample_size();
    }
};

/// The system used throughout the simulation study.
inline SimulationScenario reference_scenario(double h, double snr) {
    SimulationScenario s;
    s.A = Matrix{{-0.25, 0.70}, {0.75, -0.25}};
    s.eta = {1.20, 0.35};
    s.B = Matrix(2, 0);
    s.h = h;
    s.snr = snr;
    return s;
}

inline double noise_sd(double variance, double snr, NoiseLaw law) {
    if (std::isinf(snr)) return 0.0;
    const double sd = std::sqrt(variance);
    return law == NoiseLaw::inverse_sqrt ? sd / std::sqrt(snr) : sd / (snr * snr);
}

/// Sample variance with denominator n - 1.
inline double sample_variance(const Vector& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

/// splitmix64 finalizer; decorrelates (seed, replication) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 replication_engine(std::uint64_t seed, std::size_t replication) {
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(static_cast<std::uint64_t>(replication) + 0x5851f42d4c957f2dULL)));
}

struct Trajectory {
    VectorSeries clean;  // n + out_of_sample points
    VectorSeries noisy;  // n in-sample points
    Vector sigma;
};

/// Clean trajectory on the full grid, plus noise on the in-sample part.
inline Trajectory generate_trajectory(const SimulationScenario& sc, std::size_t replication = 0) {
    sc.validate();
    const std::size_t n = sc.sample_size();
    const std::size_t d = sc.dimension();
    const TimeGrid grid = TimeGrid::uniform(sc.t_start, sc.h, n).extended(sc.out_of_sample);
    const Matrix clean = response::linear_response(sc.A, sc.B, Vector(d, 0.0), sc.forcing, sc.eta, sc.t_start,
                                                   grid.points());
    Trajectory tr{VectorSeries(grid, clean), {}, Vector(d)};
    for (std::size_t j = 0; j < d; ++j) {
        Vector col(n);
        for (std::size_t k = 0; k < n; ++k) col[k] = clean(k, j);
        tr.sigma[j] = noise_sd(sample_variance(col), sc.snr, sc.noise_law);
    }
    auto rng = replication_engine(sc.seed, replication);
    std::normal_distribution<double> unit(0.0, 1.0);
    Matrix noisy = clean.block(0, 0, n, d);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < d; ++j) {
            const double e = unit(rng);
            noisy(k, j) += tr.sigma[j] * e;
        }
    tr.noisy = VectorSeries(grid.head(n), std::move(noisy));
    return tr;
}

/// Estimates and error metrics from one replication for one estimator.
struct EstimatorOutcome {
    Vector parameters;              // row-major A, then eta
    std::vector<Vector> metrics;    // per metric, one entry per component
};

struct ReplicationOutcome {
    bool ok = false;
    std::string error;
    EstimatorOutcome grey;
    EstimatorOutcome matching;
    double structural_gap = 0.0;  // scaled |A_grey - A_matching|
};

/// Metric names in storage order: fit, then mape_r and ape_r for each horizon r.
inline std::vector<std::string> metric_names(const SimulationScenario& sc) {
    std::vector<std::string> names{"fit"};
    for (auto r : sc.horizons) names.push_back("mape_" + std::to_string(r));
    for (auto r : sc.horizons) names.push_back("ape_" + std::to_string(r));
    return names;
}

inline std::vector<std::string> parameter_names(std::size_t d) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= d; ++j) names.push_back("a" + std::to_string(i) + std::to_string(j));
    for (std::size_t i = 1; i <= d; ++i) names.push_back("eta" + std::to_string(i));
    return names;
}

namespace detail {

inline EstimatorOutcome score(const SimulationScenario& sc, const Trajectory& tr, const Matrix& a, const Vector& eta,
                              const Matrix& fitted) {
    const std::size_t n = tr.noisy.size();
    const std::size_t d = sc.dimension();
    EstimatorOutcome out;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out.parameters.push_back(a(i, j));
    out.parameters.insert(out.parameters.end(), eta.begin(), eta.end());

    const Matrix& ref_in = sc.fit_reference == FitReference::noisy ? tr.noisy.values() : tr.clean.values();
    Vector fit(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < n; ++k) fit[j] += std::abs((fitted(k, j) - ref_in(k, j)) / ref_in(k, j));
        fit[j] *= 100.0 / static_cast<double>(n);
    }
    out.metrics.push_back(fit);
    const Matrix& clean = tr.clean.values();
    for (auto r : sc.horizons) {
        Vector m(d, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t s = 1; s <= r; ++s) {
                const std::size_t k = n - 1 + s;
                m[j] += std::abs((fitted(k, j) - clean(k, j)) / clean(k, j));
            }
            m[j] *= 100.0 / static_cast<double>(r);
        }
        out.metrics.push_back(m);
    }
    for (auto r : sc.horizons) {
        Vector m(d);
        const std::size_t k = n - 1 + r;
        for (std::size_t j = 0; j < d; ++j) m[j] = 100.0 * std::abs((fitted(k, j) - clean(k, j)) / clean(k, j));
        out.metrics.push_back(m);
    }
    return out;
}

}  // namespace detail

/**
 * @brief One replication: grey (lambda 0.5, reduced_consistent) and integral matching.
 *
 * Only the autonomous case is supported; both estimators use the zero spec.
 */
inline ReplicationOutcome run_replication(const SimulationScenario& sc, std::size_t replication) {
    ReplicationOutcome out;
    try {
        if (!sc.forcing.is_zero()) throw UnsupportedError("replications support the autonomous case only");
        const Trajectory tr = generate_trajectory(sc, replication);
        const TimeGrid& full = tr.clean.grid();
        const auto g = grey::fit_grey(tr.noisy, sc.forcing, {0.5, 50.0}, grey::InitialStrategy::reduced_consistent);
        const Matrix g_fit = grey::grey_restore(g, full).values();
        const auto m = matching::fit_matching(tr.noisy, basis::ForcingSpec::zero());
        const Matrix m_fit = matching::matching_time_response(m, full.points());
        out.grey = detail::score(sc, tr, g.A, g.eta, g_fit);
        out.matching = detail::score(sc, tr, m.A, m.eta, m_fit);
        out.structural_gap = scaled_discrepancy(g.A, m.A);
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    return out;
}

struct Quartiles {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

/// Linear-interpolation quantiles (the common "type 7" definition).
inline Quartiles quartiles(std::vector<double> v) {
    if (v.empty()) return {};
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {v.front(), q(0.25), q(0.5), q(0.75), v.back()};
}

struct EstimatorSummary {
    std::vector<std::string> parameter_names;
    Vector mean;
    Vector sd;
    std::vector<std::string> metric_names;
    std::vector<std::vector<Quartiles>> metrics;  // [metric][component]
};

struct ReplicationSummary {
    SimulationScenario scenario;
    std::size_t sample_size = 0;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::vector<std::string> failures;  // first few messages
    double max_structural_gap = 0.0;
    EstimatorSummary grey;
    EstimatorSummary matching;
    std::vector<ReplicationOutcome> replications;  // indexed by replication
};

namespace detail {

inline EstimatorSummary summarize(const SimulationScenario& sc, const std::vector<ReplicationOutcome>& reps,
                                  EstimatorOutcome ReplicationOutcome::*which) {
    EstimatorSummary s;
    const std::size_t d = sc.dimension();
    s.parameter_names = parameter_names(d);
    s.metric_names = metric_names(sc);
    const std::size_t np = s.parameter_names.size();
    s.mean.assign(np, 0.0);
    s.sd.assign(np, 0.0);
    std::size_t count = 0;
    for (const auto& r : reps) {
        if (!r.ok) continue;
        ++count;
        for (std::size_t i = 0; i < np; ++i) s.mean[i] += (r.*which).parameters[i];
    }
    if (count == 0) return s;
    for (double& m : s.mean) m /= static_cast<double>(count);
    for (const auto& r : reps) {
        if (!r.ok) continue;
        for (std::size_t i = 0; i < np; ++i) {
            const double dlt = (r.*which).parameters[i] - s.mean[i];
            s.sd[i] += dlt * dlt;
        }
    }
    for (double& v : s.sd) v = count > 1 ? std::sqrt(v / static_cast<double>(count - 1)) : 0.0;
    s.metrics.resize(s.metric_names.size());
    for (std::size_t m = 0; m < s.metric_names.size(); ++m)
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> vals;
            for (const auto& r : reps)
                if (r.ok) vals.push_back((r.*which).metrics[m][j]);
            s.metrics[m].push_back(quartiles(std::move(vals)));
        }
    return s;
}

}  // namespace detail

/**
 * @brief Run all replications, in parallel when workers > 1.
 *
 * Each replication owns its random stream and its result slot, and the
 * reduction walks slots in index order, so the summary does not depend on the
 * worker count.
 */
inline ReplicationSummary run_monte_carlo(const SimulationScenario& sc) {
    sc.validate();
    ReplicationSummary out;
    out.scenario = sc;
    out.sample_size = sc.sample_size();
    out.replications.resize(sc.replications);

    unsigned workers = sc.workers ? sc.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, sc.replications));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < sc.replications; i = next++) out.replications[i] = run_replication(sc, i);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& r : out.replications) {
        if (r.ok) {
            ++out.succeeded;
            out.max_structural_gap = std::max(out.max_structural_gap, r.structural_gap);
        } else {
            ++out.failed;
            if (out.failures.size() < 5) out.failures.push_back(r.error);
        }
    }
    out.grey = detail::summarize(sc, out.replications, &ReplicationOutcome::grey);
    out.matching = detail::summarize(sc, out.replications, &ReplicationOutcome::matching);
    return out;
}

// ---- serialization ----

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(m.row_vector(i));
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, std::size_t cols_if_empty = 0) {
    if (!j.is_array()) throw ParseError("matrix must be an array of rows");
    if (j.empty()) return Matrix(0, cols_if_empty);
    return Matrix::from_rows(j.get<std::vector<Vector>>());
}

inline nlohmann::json snr_to_json(double snr) {
    if (std::isinf(snr)) return "inf";
    return snr;
}

inline nlohmann::json to_json(const SimulationScenario& s) {
    return {{"A", matrix_to_json(s.A)},
            {"eta", s.eta},
            {"forcing", basis::to_json(s.forcing)},
            {"B", matrix_to_json(s.B)},
            {"t_span", {s.t_start, s.t_end}},
            {"h", s.h},
            {"snr", snr_to_json(s.snr)},
            {"replications", s.replications},
            {"seed", s.seed},
            {"out_of_sample", s.out_of_sample},
            {"noise_law", to_string(s.noise_law)},
            {"fit_reference", to_string(s.fit_reference)},
            {"horizons", s.horizons}};
}

/// Scenario JSON; omitted keys fall back to the defaults of `base`.
inline SimulationScenario scenario_from_json(const nlohmann::json& j,
                                             SimulationScenario base = reference_scenario(0.25, 5.0)) {
    try {
        if (j.contains("A")) base.A = matrix_from_json(j.at("A"));
        if (j.contains("eta")) base.eta = j.at("eta").get<Vector>();
        if (j.contains("forcing")) base.forcing = basis::from_json(j.at("forcing"));
        if (j.contains("B")) base.B = matrix_from_json(j.at("B"), base.forcing.dimension());
        else if (base.B.rows() != base.A.rows()) base.B = Matrix(base.A.rows(), base.forcing.dimension());
        if (j.contains("t_span")) {
            const auto span = j.at("t_span").get<std::vector<double>>();
            if (span.size() != 2) throw ParseError("t_span must have two entries");
            base.t_start = span[0];
            base.t_end = span[1];
        }
        if (j.contains("h")) base.h = j.at("h").get<double>();
        if (j.contains("n")) {
            const auto n = j.at("n").get<std::size_t>();
            if (n < 2) throw ParseError("n must be >= 2");
            base.h = (base.t_end - base.t_start) / static_cast<double>(n - 1);
        }
        if (j.contains("snr")) {
            const auto& v = j.at("snr");
            base.snr = v.is_string() && v.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                                         : v.get<double>();
        }
        if (j.contains("replications")) base.replications = j.at("replications").get<std::size_t>();
        if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out_of_sample")) base.out_of_sample = j.at("out_of_sample").get<std::size_t>();
        if (j.contains("horizons")) base.horizons = j.at("horizons").get<std::vector<std::size_t>>();
        if (j.contains("noise_law")) {
            const auto s = j.at("noise_law").get<std::string>();
            if (s == "inverse_sqrt") base.noise_law = NoiseLaw::inverse_sqrt;
            else if (s == "inverse_square") base.noise_law = NoiseLaw::inverse_square;
            else throw ParseError("unknown noise_law \"" + s + "\"");
        }
        if (j.contains("fit_reference")) {
            const auto s = j.at("fit_reference").get<std::string>();
            if (s == "noisy") base.fit_reference = FitReference::noisy;
            else if (s == "clean") base.fit_reference = FitReference::clean;
            else throw ParseError("unknown fit_reference \"" + s + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid scenario JSON: ") + e.what());
    }
    base.validate();
    return base;
}

inline nlohmann::json to_json(const EstimatorSummary& s) {
    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < s.parameter_names.size(); ++i)
        params[s.parameter_names[i]] = {{"mean", s.mean[i]}, {"sd", s.sd[i]}};
    nlohmann::json metrics = nlohmann::json::object();
    for (std::size_t m = 0; m < s.metrics.size(); ++m) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& q : s.metrics[m])
            comps.push_back({{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}});
        metrics[s.metric_names[m]] = comps;
    }
    return {{"parameters", params}, {"metrics", metrics}};
}

inline nlohmann::json to_json(const ReplicationSummary& s) {
    return {{"scenario", to_json(s.scenario)},
            {"n", s.sample_size},
            {"succeeded", s.succeeded},
            {"failed", s.failed},
            {"failures", s.failures},
            {"max_structural_gap", s.max_structural_gap},
            {"grey_initial_strategy", "reduced_consistent"},
            {"grey", to_json(s.grey)},
            {"matching", to_json(s.matching)}};
}

/// One row per replication x estimator x quantity x component.
inline void write_tidy_csv(std::ostream& out, const ReplicationSummary& s) {
    const auto pnames = parameter_names(s.scenario.dimension());
    const auto mnames = metric_names(s.scenario);
    out << "replication,estimator,quantity,component,value\n";
    char buf[40];
    for (std::size_t r = 0; r < s.replications.size(); ++r) {
        const auto& rep = s.replications[r];
        if (!rep.ok) continue;
        for (const auto& [name, est] : {std::pair{"grey", &rep.grey}, std::pair{"matching", &rep.matching}}) {
            for (std::size_t i = 0; i < pnames.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", est->parameters[i]);
                out << r << ',' << name << ',' << pnames[i] << ",," << buf << '\n';
            }
            for (std::size_t m = 0; m < mnames.size(); ++m)
                for (std::size_t j = 0; j < est->metrics[m].size(); ++j) {
                    std::snprintf(buf, sizeof buf, "%.17g", est->metrics[m][j]);
                    out << r << ',' << name << ',' << mnames[m] << ",x" << (j + 1) << ',' << buf << '\n';
                }
        }
    }
}

}  // namespace greymatch::simulate
