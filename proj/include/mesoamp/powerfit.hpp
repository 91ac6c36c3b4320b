#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mesoamp {

enum class AmplitudeUnit { vt, volt };

[[nodiscard]] std::string amplitude_unit_name(AmplitudeUnit unit);
[[nodiscard]] AmplitudeUnit amplitude_unit_from_name(std::string_view name);

/// Exponential power law ln P = a + b A_in + c G with its goodness of fit.
/// n_points is 0 for built-in parameter sets that ship without raw data.
struct PowerFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    AmplitudeUnit amplitude_unit = AmplitudeUnit::vt;
    double rmse = 0.0;
    double r_square = 1.0;
    int n_points = 0;
    std::string source;
};

struct PowerSample {
    double a_in;
    double g;
    double p;
};

/// exp(a + b a_in + c g); a_in must be expressed in fit.amplitude_unit.
[[nodiscard]] double evaluate_power(const PowerFit& fit, double a_in, double g);

/// Ordinary least squares of ln p on (1, a_in, g). RMSE and R-square are
/// reported on the ln scale. Throws std::domain_error on p <= 0 and
/// std::runtime_error on a rank-deficient design.
[[nodiscard]] PowerFit fit_power_model(const std::vector<PowerSample>& samples);

/// Named built-in parameter sets: "paper-sim" (thermal-unit amplitudes) and
/// "paper-entity" (volt amplitudes). Throws std::invalid_argument otherwise.
[[nodiscard]] PowerFit builtin_fit(std::string_view name);

}
