// perspective.hpp — the rate-power perspective term used by the approximate
// selection objective: psi(y, L) = coeff * L * (2^(ratio * y / L) - 1), the
// perspective of a convex exponential, jointly convex on L > 0.
#pragma once

#include <cmath>
#include <numbers>

namespace mvv {

struct PerspectiveRatePower {
    double coeff = 0;  // 1 / mean channel gain of the user
    double ratio = 0;  // R / B, target rate over subcarrier bandwidth

    double value(double y, double L) const {
        return coeff * L * std::expm1(std::numbers::ln2 * ratio * y / L);
    }

    struct Grad {
        double dy, dL;
    };
    Grad gradient(double y, double L) const {
        const double kappa = std::numbers::ln2 * ratio;
        const double u = y / L;
        const double e = std::exp(kappa * u);
        return {coeff * kappa * e, coeff * (e - 1.0 - kappa * u * e)};
    }

    struct Hess {
        double dyy, dyl, dll;
    };
    // Rank-one positive semidefinite: (c*kappa^2*e/L) * [1 -u; -u u^2].
    Hess hessian(double y, double L) const {
        const double kappa = std::numbers::ln2 * ratio;
        const double u = y / L;
        const double s = coeff * kappa * kappa * std::exp(kappa * u) / L;
        return {s, -s * u, s * u * u};
    }
};

}  // namespace mvv
