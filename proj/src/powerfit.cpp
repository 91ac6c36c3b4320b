#include "mesoamp/powerfit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace mesoamp {

std::string amplitude_unit_name(AmplitudeUnit unit) {
    return unit == AmplitudeUnit::vt ? "V_T" : "volt";
}

AmplitudeUnit amplitude_unit_from_name(std::string_view name) {
    if (name == "V_T") {
        return AmplitudeUnit::vt;
    }
    if (name == "volt") {
        return AmplitudeUnit::volt;
    }
    throw std::invalid_argument("unknown amplitude unit: " + std::string(name));
}

double evaluate_power(const PowerFit& fit, double a_in, double g) {
    if (!(a_in >= 0.0)) {
        throw std::domain_error("evaluate_power: a_in must be non-negative");
    }
    if (!(g >= 1.0 - 1e-9)) {
        throw std::domain_error("evaluate_power: g must be at least 1");
    }
    return std::exp(fit.a + fit.b * a_in + fit.c * g);
}

PowerFit fit_power_model(const std::vector<PowerSample>& samples) {
    const auto n = static_cast<Eigen::Index>(samples.size());
    if (n < 3) {
        throw std::invalid_argument("fit_power_model: need at least 3 samples");
    }
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd log_power(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const PowerSample& s = samples[static_cast<std::size_t>(i)];
        if (!(s.p > 0.0)) {
            throw std::domain_error("fit_power_model: powers must be positive");
        }
        design(i, 0) = 1.0;
        design(i, 1) = s.a_in;
        design(i, 2) = s.g;
        log_power(i) = std::log(s.p);
    }
    const auto qr = design.colPivHouseholderQr();
    if (qr.rank() < 3) {
        throw std::runtime_error("fit_power_model: rank-deficient design (collinear samples)");
    }
    const Eigen::Vector3d coef = qr.solve(log_power);
    const Eigen::VectorXd residual = design * coef - log_power;
    const double ss_res = residual.squaredNorm();
    const double mean = log_power.mean();
    const double ss_tot = (log_power.array() - mean).square().sum();

    PowerFit fit;
    fit.a = coef(0);
    fit.b = coef(1);
    fit.c = coef(2);
    fit.amplitude_unit = AmplitudeUnit::vt;
    fit.rmse = std::sqrt(ss_res / static_cast<double>(n));
    fit.r_square = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    fit.n_points = static_cast<int>(n);
    fit.source = "fit";
    return fit;
}

PowerFit builtin_fit(std::string_view name) {
    PowerFit fit;
    if (name == "paper-sim") {
        fit.a = -18.7;
        fit.b = 0.8156;
        fit.c = 8.569;
        fit.amplitude_unit = AmplitudeUnit::vt;
        fit.rmse = 0.06571;
        fit.r_square = 0.9993;
    } else if (name == "paper-entity") {
        fit.a = -50.5;
        fit.b = 1.415;
        fit.c = 33.49;
        fit.amplitude_unit = AmplitudeUnit::volt;
        fit.rmse = 0.008732;
        fit.r_square = 0.9983;
    } else {
        throw std::invalid_argument("unknown built-in fit: " + std::string(name));
    }
    fit.n_points = 0;
    fit.source = std::string(name);
    return fit;
}

}
