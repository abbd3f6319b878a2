#pragma once

#include <cmath>
#include <vector>

#include "error.hpp"

namespace greymatch::closed_form {

/**
 * @brief x(t) = K exp(a t) + q(t), the solution of dx/dt = a x + g(t), x(t1) = eta,
 * for a polynomial g(t) = g_0 + g_1 t + ... + g_m t^m and a != 0.
 *
 * q is the unique polynomial particular solution (same degree as g).
 */
struct ScalarPolynomialResponse {
    double a = 0.0;
    double K = 0.0;
    std::vector<double> q;  // q_0 + q_1 t + ...

    double operator()(double t) const {
        double v = 0.0;
        for (std::size_t j = q.size(); j-- > 0;) v = v * t + q[j];
        return K * std::exp(a * t) + v;
    }
};

inline ScalarPolynomialResponse scalar_polynomial_response(double a, const std::vector<double>& g, double eta,
                                                           double t1) {
    if (a == 0.0) throw SingularMatrixError("closed form needs a nonzero rate");
    ScalarPolynomialResponse r;
    r.a = a;
    const std::size_t m = g.size();
    r.q.assign(m, 0.0);
    // q' = a q + g, matched from the top degree down
    for (std::size_t j = m; j-- > 0;) {
        const double next = (j + 1 < m) ? static_cast<double>(j + 1) * r.q[j + 1] : 0.0;
        r.q[j] = (next - g[j]) / a;
    }
    double q_t1 = 0.0;
    for (std::size_t j = m; j-- > 0;) q_t1 = q_t1 * t1 + r.q[j];
    r.K = (eta - q_t1) * std::exp(-a * t1);
    return r;
}

}  // namespace greymatch::closed_form
