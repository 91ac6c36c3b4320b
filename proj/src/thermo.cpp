#include "mesoamp/thermo.hpp"

#include <cmath>
#include <stdexcept>

namespace mesoamp {

double fermi_dirac(double energy_kt, double mu_kt) {
    if (!std::isfinite(energy_kt) || !std::isfinite(mu_kt)) {
        throw std::domain_error("fermi_dirac: non-finite input");
    }
    const double x = energy_kt - mu_kt;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

BoseOccupancy bose_einstein(double x_kt) {
    if (!std::isfinite(x_kt)) {
        throw std::domain_error("bose_einstein: non-finite input");
    }
    if (x_kt <= 0.0) {
        throw std::domain_error("bose_einstein: argument must be positive");
    }
    bool clamped = false;
    double x = x_kt;
    if (x < bose_argument_min) {
        x = bose_argument_min;
        clamped = true;
    }
    return {1.0 / std::expm1(x), clamped};
}

double detailed_balance_residual(double k_forward, double k_backward, double e_from_kt,
                                 double e_to_kt) {
    if (!(k_forward > 0.0) || !(k_backward > 0.0)) {
        throw std::domain_error("detailed_balance_residual: rates must be positive");
    }
    const double log_ratio = std::log(k_forward) - std::log(k_backward);
    const double expected = -(e_to_kt - e_from_kt);
    return std::abs(std::expm1(log_ratio - expected));
}

}
