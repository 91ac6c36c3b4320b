#include "mesoamp/device.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mesoamp/thermo.hpp"

namespace mesoamp {

double level_energy(const TransistorLevel& level, double v_in) {
    return level.type == TransistorType::nmos ? level.reference_energy - v_in
                                              : level.reference_energy + v_in;
}

namespace {

/// Splits gamma into gamma*fraction plus remainder with fraction <= 1/2; the
/// small part keeps full relative accuracy and half-ulp rounding ties are
/// nudged so the pair sums back to gamma bit-exactly.
std::pair<double, double> split_coupling(double gamma, double fraction) {
    double small = gamma * fraction;
    double large = gamma - small;
    for (int i = 0; i < 8 && small + large != gamma; ++i) {
        small = std::nextafter(small, small + large > gamma ? 0.0 : gamma);
        large = gamma - small;
    }
    return {small, large};
}

}

ElectrodeRates electrode_rates(double level_energy_kt, double mu_kt, double gamma) {
    if (!(gamma > 0.0)) {
        throw std::domain_error("electrode_rates: gamma must be positive");
    }
    const double f = fermi_dirac(level_energy_kt, mu_kt);
    if (f <= 0.5) {
        const auto [k_in, k_out] = split_coupling(gamma, f);
        return {k_in, k_out};
    }
    const auto [k_out, k_in] = split_coupling(gamma, fermi_dirac(mu_kt, level_energy_kt));
    return {k_in, k_out};
}

Eigen::MatrixXd build_two_state_generator(const TransistorLevel& level, double v_in,
                                          const std::vector<Reservoir>& reservoirs) {
    if (reservoirs.empty()) {
        throw std::invalid_argument("build_two_state_generator: need at least one reservoir");
    }
    const double eps = level_energy(level, v_in);
    double k_in_total = 0.0;
    double k_out_total = 0.0;
    for (const Reservoir& r : reservoirs) {
        const ElectrodeRates rates = electrode_rates(eps, r.mu, r.gamma);
        k_in_total += rates.k_in;
        k_out_total += rates.k_out;
    }
    Eigen::MatrixXd m(2, 2);
    m(0, 0) = -k_in_total;
    m(1, 0) = k_in_total;
    m(0, 1) = k_out_total;
    m(1, 1) = -k_out_total;
    return m;
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& generator) {
    const auto n = generator.rows();
    if (n < 1 || generator.cols() != n) {
        throw std::invalid_argument("steady_state: generator must be square and non-empty");
    }
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = generator;
    a.bottomRows(1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd p = a.colPivHouseholderQr().solve(rhs);
    const double residual = (a * p - rhs).norm();
    if (!(residual < 1e-8)) {
        throw std::runtime_error("steady_state: no unique stationary distribution (residual " +
                                 std::to_string(residual) + ")");
    }
    p = p.cwiseMax(0.0);
    p /= p.sum();
    return p;
}

double electrode_current(double level_energy_kt, const Reservoir& r, double mean_occupancy) {
    if (!(mean_occupancy >= 0.0 && mean_occupancy <= 1.0)) {
        throw std::domain_error("electrode_current: occupancy must lie in [0, 1]");
    }
    const ElectrodeRates rates = electrode_rates(level_energy_kt, r.mu, r.gamma);
    return rates.k_in * (1.0 - mean_occupancy) - rates.k_out * mean_occupancy;
}

namespace {

/// Drain current of one level biased by drain at -v_ds and source at 0,
/// counted positive from the level into the drain reservoir.
double drain_current(const TransistorLevel& level, double v_in, double v_ds, double gamma) {
    const double eps = level_energy(level, v_in);
    const double f_d = fermi_dirac(eps, -v_ds);
    const double f_s = fermi_dirac(eps, 0.0);
    const double n = 0.5 * (f_d + f_s);
    return gamma * (n - f_d);
}

}

TransferCharacteristic sweep_transfer_characteristic(const TransistorLevel& level, double v_d,
                                                     const std::vector<double>& v_in_grid,
                                                     double gamma) {
    if (v_in_grid.empty()) {
        throw std::invalid_argument("sweep_transfer_characteristic: empty grid");
    }
    TransferCharacteristic out;
    out.points.reserve(v_in_grid.size());
    std::vector<double> grid = v_in_grid;
    std::sort(grid.begin(), grid.end());
    double max_abs = 0.0;
    for (const double v_in : grid) {
        const double i_d = drain_current(level, v_in, v_d, gamma);
        out.points.push_back({v_in, i_d});
        max_abs = std::max(max_abs, std::abs(i_d));
    }
    out.saturation_current = max_abs;
    out.pinch_off = std::numeric_limits<double>::quiet_NaN();
    const double threshold = 0.01 * max_abs;
    const auto n = static_cast<std::ptrdiff_t>(out.points.size());
    const bool ascending = level.type == TransistorType::nmos;
    const std::ptrdiff_t begin = ascending ? 0 : n - 1;
    const std::ptrdiff_t step = ascending ? 1 : -1;
    for (std::ptrdiff_t i = begin + step; i >= 0 && i < n; i += step) {
        if (std::abs(out.points[i].i_d) >= threshold &&
            std::abs(out.points[i - step].i_d) < threshold) {
            out.pinch_off = out.points[i - step].v_in;
            break;
        }
    }
    return out;
}

std::vector<OutputCurve> sweep_output_characteristic(const TransistorLevel& level,
                                                     const std::vector<double>& v_in_values,
                                                     const std::vector<double>& v_ds_grid,
                                                     double gamma) {
    if (v_in_values.empty() || v_ds_grid.empty()) {
        throw std::invalid_argument("sweep_output_characteristic: empty grid");
    }
    std::vector<OutputCurve> curves;
    curves.reserve(v_in_values.size());
    for (const double v_in : v_in_values) {
        OutputCurve curve;
        curve.v_in = v_in;
        curve.points.reserve(v_ds_grid.size());
        for (const double v_ds : v_ds_grid) {
            curve.points.push_back({v_ds, drain_current(level, v_in, v_ds, gamma)});
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

}
