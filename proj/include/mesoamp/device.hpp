#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mesoamp {

enum class TransistorType { nmos, pmos };

/// A single transport level whose energy responds to the gate voltage:
/// NMOS shifts down with v_in, PMOS shifts up.
struct TransistorLevel {
    TransistorType type = TransistorType::nmos;
    double reference_energy = 0.0;
};

/// An electron reservoir with chemical potential mu (kT) coupled at rate
/// gamma (1/unit time). The name labels trajectory channels and currents.
struct Reservoir {
    std::string name;
    double mu = 0.0;
    double gamma = 0.0;
};

struct ElectrodeRates {
    double k_in;
    double k_out;
};

struct TransferPoint {
    double v_in;
    double i_d;
};

struct TransferCharacteristic {
    std::vector<TransferPoint> points;
    double pinch_off;
    double saturation_current;
};

struct OutputPoint {
    double v_ds;
    double i_d;
};

struct OutputCurve {
    double v_in;
    std::vector<OutputPoint> points;
};

/// Level energy at a given gate voltage (both in kT-equivalent units).
[[nodiscard]] double level_energy(const TransistorLevel& level, double v_in);

/// Tunneling rates between a level at the given energy and a reservoir.
/// k_in + k_out == gamma exactly.
[[nodiscard]] ElectrodeRates electrode_rates(double level_energy_kt, double mu_kt, double gamma);

/// 2x2 generator over (empty, occupied) combining all reservoir couplings.
/// Columns sum to zero.
[[nodiscard]] Eigen::MatrixXd build_two_state_generator(const TransistorLevel& level, double v_in,
                                                        const std::vector<Reservoir>& reservoirs);

/// Normalized stationary distribution of a generator, computed by a
/// least-squares solve with the normalization row appended.
[[nodiscard]] Eigen::VectorXd steady_state(const Eigen::MatrixXd& generator);

/// Signed electron current from a reservoir into a level with the given
/// mean occupancy; zero at single-reservoir equilibrium.
[[nodiscard]] double electrode_current(double level_energy_kt, const Reservoir& r,
                                       double mean_occupancy);

/// Drain current versus gate voltage at fixed drain bias v_d, with the
/// pinch-off voltage (last grid point from the cut-off side whose |i_d|
/// stays below 1% of the maximum) and the maximum |i_d| over the sweep.
[[nodiscard]] TransferCharacteristic sweep_transfer_characteristic(
    const TransistorLevel& level, double v_d, const std::vector<double>& v_in_grid,
    double gamma = 0.2);

/// Drain current versus drain-source bias for each listed gate voltage.
[[nodiscard]] std::vector<OutputCurve> sweep_output_characteristic(
    const TransistorLevel& level, const std::vector<double>& v_in_values,
    const std::vector<double>& v_ds_grid, double gamma = 0.2);

}
