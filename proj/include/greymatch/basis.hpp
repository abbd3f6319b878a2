#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "matrix.hpp"
#include "series.hpp"

namespace greymatch::basis {

/// Monomials t, t^2, ..., t^degree. The constant is never part of u.
struct Polynomial {
    int degree = 1;
};

/// Pairs (sin(2 pi i f t), cos(2 pi i f t)) for i = 1..pairs, interleaved sin first.
struct Fourier {
    int pairs = 1;
    double frequency = 1.0;
};

/// A known input series; evaluated by linear interpolation between its samples.
struct Exogenous {
    std::vector<double> times;
    Matrix values;  // times.size() x p
};

using Component = std::variant<Polynomial, Fourier, Exogenous>;

/**
 * @brief Forcing u(t) as a concatenation of basis components.
 *
 * An empty component list is the zero spec (p = 0). A single component is
 * what the JSON calls polynomial / fourier / exogenous; more than one is mixed.
 */
class ForcingSpec {
public:
    ForcingSpec() = default;
    explicit ForcingSpec(std::vector<Component> components) : components_(std::move(components)) { validate(); }

    static ForcingSpec zero() { return {}; }
    static ForcingSpec polynomial(int degree) { return ForcingSpec({Polynomial{degree}}); }
    static ForcingSpec fourier(int pairs, double frequency) { return ForcingSpec({Fourier{pairs, frequency}}); }
    static ForcingSpec exogenous(std::vector<double> times, Matrix values) {
        return ForcingSpec({Exogenous{std::move(times), std::move(values)}});
    }

    const std::vector<Component>& components() const noexcept { return components_; }
    bool is_zero() const noexcept { return components_.empty(); }

    std::size_t dimension() const {
        std::size_t p = 0;
        for (const auto& c : components_) p += component_dimension(c);
        return p;
    }

    /// True when every component has closed-form derivatives and antiderivatives.
    bool analytic() const {
        return std::none_of(components_.begin(), components_.end(),
                            [](const Component& c) { return std::holds_alternative<Exogenous>(c); });
    }

    static std::size_t component_dimension(const Component& c) {
        if (auto* p = std::get_if<Polynomial>(&c)) return static_cast<std::size_t>(p->degree);
        if (auto* f = std::get_if<Fourier>(&c)) return 2 * static_cast<std::size_t>(f->pairs);
        return std::get<Exogenous>(c).values.cols();
    }

private:
    void validate() const {
        for (const auto& c : components_) {
            if (auto* p = std::get_if<Polynomial>(&c)) {
                if (p->degree < 1) throw UnsupportedError("polynomial forcing degree must be >= 1");
            } else if (auto* f = std::get_if<Fourier>(&c)) {
                if (f->pairs < 1) throw UnsupportedError("fourier forcing needs pairs >= 1");
                if (!(f->frequency > 0.0) || !std::isfinite(f->frequency))
                    throw UnsupportedError("fourier forcing frequency must be > 0");
            } else {
                const auto& e = std::get<Exogenous>(c);
                if (e.times.size() != e.values.rows() || e.times.size() < 2)
                    throw ShapeError("exogenous forcing needs >= 2 samples and one value row per time");
                if (e.values.cols() == 0) throw ShapeError("exogenous forcing has no columns");
                TimeGrid check(e.times);  // strictly increasing
                if (!e.values.all_finite()) throw ShapeError("exogenous forcing has non-finite values");
            }
        }
    }

    std::vector<Component> components_;
};

namespace detail {

inline double omega(const Fourier& f, int i) { return 2.0 * std::numbers::pi * static_cast<double>(i) * f.frequency; }

inline Vector interpolate(const Exogenous& e, double t) {
    constexpr double slack = 1e-9;
    const auto& ts = e.times;
    const double tol = slack * std::max(1.0, std::abs(t));
    if (t < ts.front() - tol || t > ts.back() + tol) {
        throw AlignmentError("exogenous forcing does not cover t = " + std::to_string(t) + " (range [" +
                             std::to_string(ts.front()) + ", " + std::to_string(ts.back()) + "])");
    }
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t hi = std::clamp<std::size_t>(static_cast<std::size_t>(it - ts.begin()), 1, ts.size() - 1);
    std::size_t lo = hi - 1;
    const double w = std::clamp((t - ts[lo]) / (ts[hi] - ts[lo]), 0.0, 1.0);
    Vector u(e.values.cols());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = (1.0 - w) * e.values(lo, j) + w * e.values(hi, j);
    return u;
}

/// Exact sample at a grid point; throws AlignmentError if t is not one of the series' times.
inline Vector sample_exact(const Exogenous& e, double t) {
    const auto& ts = e.times;
    auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9 * std::max(1.0, std::abs(t)));
    if (it == ts.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw AlignmentError("exogenous forcing has no sample at t = " + std::to_string(t));
    }
    return e.values.row_vector(static_cast<std::size_t>(it - ts.begin()));
}

}  // namespace detail

/// u(t) at a single time (exogenous components interpolate linearly).
inline Vector u_at(const ForcingSpec& spec, double t) {
    Vector u;
    u.reserve(spec.dimension());
    for (const auto& c : spec.components()) {
        if (auto* p = std::get_if<Polynomial>(&c)) {
            double tp = 1.0;
            for (int j = 1; j <= p->degree; ++j) u.push_back(tp *= t);
        } else if (auto* f = std::get_if<Fourier>(&c)) {
            for (int i = 1; i <= f->pairs; ++i) {
                u.push_back(std::sin(detail::omega(*f, i) * t));
                u.push_back(std::cos(detail::omega(*f, i) * t));
            }
        } else {
            const Vector v = detail::interpolate(std::get<Exogenous>(c), t);
            u.insert(u.end(), v.begin(), v.end());
        }
    }
    return u;
}

/// du/dt at a single time; exogenous components are rejected.
inline Vector du_at(const ForcingSpec& spec, double t) {
    Vector du;
    du.reserve(spec.dimension());
    for (const auto& c : spec.components()) {
        if (auto* p = std::get_if<Polynomial>(&c)) {
            double tp = 1.0;  // t^{j-1}
            for (int j = 1; j <= p->degree; ++j) {
                du.push_back(static_cast<double>(j) * tp);
                tp *= t;
            }
        } else if (auto* f = std::get_if<Fourier>(&c)) {
            for (int i = 1; i <= f->pairs; ++i) {
                const double w = detail::omega(*f, i);
                du.push_back(w * std::cos(w * t));
                du.push_back(-w * std::sin(w * t));
            }
        } else {
            throw UnsupportedError("forcing derivative is not available for exogenous inputs");
        }
    }
    return du;
}

/// Antiderivative U(t) of the analytic components, with U(0) = 0.
inline Vector antiderivative_at(const ForcingSpec& spec, double t) {
    Vector big_u;
    for (const auto& c : spec.components()) {
        if (auto* p = std::get_if<Polynomial>(&c)) {
            double tp = t;
            for (int j = 1; j <= p->degree; ++j) {
                tp *= t;
                big_u.push_back(tp / static_cast<double>(j + 1));
            }
        } else if (auto* f = std::get_if<Fourier>(&c)) {
            for (int i = 1; i <= f->pairs; ++i) {
                const double w = detail::omega(*f, i);
                big_u.push_back((1.0 - std::cos(w * t)) / w);
                big_u.push_back(std::sin(w * t) / w);
            }
        } else {
            throw UnsupportedError("analytic antiderivative is not available for exogenous inputs");
        }
    }
    return big_u;
}

struct ForcingSample {
    Matrix values;                 ///< n x p, u(t_k)
    Matrix antiderivative_values;  ///< n x p, U(t_k); only differences in k are meaningful
};

/**
 * @brief Sample u and its antiderivative on a grid.
 *
 * Exogenous columns must have a sample at every grid time; their antiderivative
 * is the trapezoid sum over the grid.
 */
inline ForcingSample evaluate_forcing(const ForcingSpec& spec, const TimeGrid& grid) {
    const std::size_t n = grid.size();
    const std::size_t p = spec.dimension();
    ForcingSample s{Matrix(n, p), Matrix(n, p)};
    std::size_t col = 0;
    for (const auto& c : spec.components()) {
        const std::size_t w = ForcingSpec::component_dimension(c);
        if (auto* e = std::get_if<Exogenous>(&c)) {
            for (std::size_t k = 0; k < n; ++k) {
                const Vector v = detail::sample_exact(*e, grid[k]);
                for (std::size_t j = 0; j < w; ++j) s.values(k, col + j) = v[j];
            }
            for (std::size_t j = 0; j < w; ++j) {
                s.antiderivative_values(0, col + j) = 0.0;
                for (std::size_t k = 1; k < n; ++k) {
                    s.antiderivative_values(k, col + j) =
                        s.antiderivative_values(k - 1, col + j) +
                        0.5 * grid.interval(k) * (s.values(k - 1, col + j) + s.values(k, col + j));
                }
            }
        } else {
            const ForcingSpec single({c});
            for (std::size_t k = 0; k < n; ++k) {
                const Vector v = u_at(single, grid[k]);
                const Vector big = antiderivative_at(single, grid[k]);
                for (std::size_t j = 0; j < w; ++j) {
                    s.values(k, col + j) = v[j];
                    s.antiderivative_values(k, col + j) = big[j];
                }
            }
        }
        col += w;
    }
    return s;
}

/// du/dt sampled on the grid (n x p).
inline Matrix forcing_derivative(const ForcingSpec& spec, const TimeGrid& grid) {
    Matrix out(grid.size(), spec.dimension());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vector du = du_at(spec, grid[k]);
        for (std::size_t j = 0; j < du.size(); ++j) out(k, j) = du[j];
    }
    return out;
}

/**
 * @brief Linear generator for analytic forcing.
 *
 * z(t) = [1, t, ..., t^P, sin(w1 t), cos(w1 t), ...] satisfies dz/dt = N z and
 * u(t) = C z(t). Entry 0 of z is the constant 1.
 */
struct Generator {
    Matrix N;  ///< m x m
    Matrix C;  ///< p x m
    std::function<Vector(double)> z;
};

inline Generator generator(const ForcingSpec& spec) {
    if (!spec.analytic()) throw UnsupportedError("generator requires analytic forcing");
    int max_degree = 0;
    std::vector<double> omegas;
    for (const auto& c : spec.components()) {
        if (auto* p = std::get_if<Polynomial>(&c)) max_degree = std::max(max_degree, p->degree);
        if (auto* f = std::get_if<Fourier>(&c))
            for (int i = 1; i <= f->pairs; ++i) omegas.push_back(detail::omega(*f, i));
    }
    const std::size_t poly_end = 1 + static_cast<std::size_t>(max_degree);
    const std::size_t m = poly_end + 2 * omegas.size();
    Generator g{Matrix(m, m), Matrix(spec.dimension(), m), {}};
    for (std::size_t j = 1; j < poly_end; ++j) g.N(j, j - 1) = static_cast<double>(j);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const std::size_t s = poly_end + 2 * i;
        g.N(s, s + 1) = omegas[i];
        g.N(s + 1, s) = -omegas[i];
    }
    std::size_t row = 0;
    std::size_t fourier_slot = 0;
    for (const auto& c : spec.components()) {
        if (auto* p = std::get_if<Polynomial>(&c)) {
            for (int j = 1; j <= p->degree; ++j) g.C(row++, static_cast<std::size_t>(j)) = 1.0;
        } else if (auto* f = std::get_if<Fourier>(&c)) {
            for (int i = 1; i <= f->pairs; ++i) {
                const std::size_t s = poly_end + 2 * fourier_slot++;
                g.C(row++, s) = 1.0;
                g.C(row++, s + 1) = 1.0;
            }
        }
    }
    g.z = [max_degree, omegas](double t) {
        Vector z;
        z.reserve(1 + static_cast<std::size_t>(max_degree) + 2 * omegas.size());
        double tp = 1.0;
        z.push_back(1.0);
        for (int j = 1; j <= max_degree; ++j) z.push_back(tp *= t);
        for (double w : omegas) {
            z.push_back(std::sin(w * t));
            z.push_back(std::cos(w * t));
        }
        return z;
    };
    return g;
}

// ---- JSON ----

inline nlohmann::json component_to_json(const Component& c) {
    if (auto* p = std::get_if<Polynomial>(&c)) return {{"kind", "polynomial"}, {"degree", p->degree}};
    if (auto* f = std::get_if<Fourier>(&c))
        return {{"kind", "fourier"}, {"pairs", f->pairs}, {"frequency", f->frequency}};
    const auto& e = std::get<Exogenous>(c);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < e.values.rows(); ++k) rows.push_back(e.values.row_vector(k));
    return {{"kind", "exogenous"}, {"t", e.times}, {"values", rows}};
}

inline nlohmann::json to_json(const ForcingSpec& spec) {
    if (spec.is_zero()) return {{"kind", "zero"}};
    if (spec.components().size() == 1) return component_to_json(spec.components().front());
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& c : spec.components()) parts.push_back(component_to_json(c));
    return {{"kind", "mixed"}, {"components", parts}};
}

inline std::vector<Component> components_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ParseError("forcing config must be an object with a string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    try {
        if (kind == "zero") return {};
        if (kind == "polynomial") return {Polynomial{j.at("degree").get<int>()}};
        if (kind == "fourier") return {Fourier{j.value("pairs", 1), j.at("frequency").get<double>()}};
        if (kind == "exogenous") {
            auto times = j.at("t").get<std::vector<double>>();
            auto rows = j.at("values").get<std::vector<std::vector<double>>>();
            Matrix v = Matrix::from_rows(rows);
            return {Exogenous{std::move(times), std::move(v)}};
        }
        if (kind == "mixed") {
            std::vector<Component> out;
            for (const auto& part : j.at("components")) {
                auto sub = components_from_json(part);
                out.insert(out.end(), sub.begin(), sub.end());
            }
            return out;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid " + kind + " forcing config: " + e.what());
    }
    throw ParseError("unknown forcing kind \"" + kind + "\"");
}

inline ForcingSpec from_json(const nlohmann::json& j) { return ForcingSpec(components_from_json(j)); }

}  // namespace greymatch::basis
