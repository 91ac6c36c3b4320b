#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mesoamp {

/// Single-NMOS voltage amplifier: supply v_dd, transistor coupling gamma,
/// drain resistor coupling gamma_r, level reference energy (all in thermal
/// units: voltages in V_T, rates in 1/unit-time, energies in kT).
struct AmplifierConfig {
    double v_dd;
    double gamma;
    double gamma_r;
    double nmos_reference_energy;
};

/// Complementary stage (PMOS + NMOS sharing the output node) with symmetric
/// supplies at +/- v_d and a load coupling gamma_l to ground.
struct CsvacConfig {
    double v_d;
    double gamma;
    double gamma_l;
    double nmos_reference_energy;
    double pmos_reference_energy;
};

/// CsvacConfig with the standard biasing: NMOS reference energy at v_d,
/// PMOS reference energy at 0.
[[nodiscard]] CsvacConfig make_csvac_config(double v_d, double gamma, double gamma_l);

/// Solved operating point: output voltage, level occupancies, named junction
/// currents, and dissipated power (with its additive components).
struct CircuitState {
    double v_out = 0.0;
    std::map<std::string, double> occupancies;
    std::map<std::string, double> currents;
    std::map<std::string, double> power_components;
    double power = 0.0;
    double balance_residual = 0.0;
    double ohms_law_v_out = std::numeric_limits<double>::quiet_NaN();
};

struct WaveformSample {
    double tau;
    double v_in;
    double v_out;
};

struct GainMeasurement {
    double input_amplitude;
    double output_amplitude;
    double gain;
    std::vector<WaveformSample> waveform;
};

struct ExchangeRates {
    double k_pn;
    double k_np;
    bool clamped;
};

/// Root finding failed: no sign change in the bracket or no convergence.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A requested target exceeds what the circuit can deliver at the fixed
/// supply; carries the best value actually reachable.
class CapabilityError : public std::runtime_error {
public:
    CapabilityError(const std::string& what, double max_achievable)
        : std::runtime_error(what), max_achievable_gain(max_achievable) {}
    double max_achievable_gain;
};

/// Electron current from a supply reservoir into a circuit node through a
/// resistive junction of coupling gamma_r; zero at equal potentials,
/// negative when the node sits above the supply.
[[nodiscard]] double resistor_current(double mu_node, double mu_supply, double gamma_r);

/// Equivalent resistance of the resistive junction in simulation units.
[[nodiscard]] double rd_from_gamma(double gamma_r);

/// Steady state of the amplifier at gate voltage v_in: root of the node
/// balance on [0, v_dd], with the Ohm's-law consistency voltage reported.
[[nodiscard]] CircuitState solve_amplifier(const AmplifierConfig& cfg, double v_in);

/// Electron transfer rates between the PMOS and NMOS levels: k_pn moves an
/// electron from the NMOS level onto the PMOS level, k_np the reverse.
/// Near-degenerate gaps are clamped and flagged.
[[nodiscard]] ExchangeRates inter_transistor_rates(double eps_p, double eps_n, double gamma);

/// 4-state generator over (n_P, n_N) in {0,1}^2, states ordered
/// (0,0), (1,0), (0,1), (1,1), combining both levels' reservoir couplings
/// and the inter-level exchange.
[[nodiscard]] Eigen::MatrixXd build_csvac_generator(const CsvacConfig& cfg, double v_in,
                                                    double v_out);

/// Steady state of the complementary stage at gate voltage v_in: root of
/// the output-node balance on [-v_d, +v_d], with per-transistor powers.
[[nodiscard]] CircuitState solve_csvac(const CsvacConfig& cfg, double v_in);

/// Total dissipated power of a solved state (sum of its components).
[[nodiscard]] double power_dissipation(const CircuitState& state);

/// Quasi-static response to one period of v_in(tau) = a_in sin(2 pi tau/T):
/// per-sample steady-state solves, amplitude from the output extremes.
[[nodiscard]] GainMeasurement measure_gain(const CsvacConfig& cfg, double a_in,
                                           int period_samples);

/// Transistor coupling gamma at which the measured gain hits the target
/// within 1e-3 relative, by geometric bracket expansion and bisection.
/// Throws CapabilityError when the supply cannot deliver the target.
[[nodiscard]] double calibrate_gamma_for_gain(const CsvacConfig& cfg_template, double a_in,
                                              double target_gain);

/// Mean instantaneous dissipated power over one full input period at the
/// given coupling gamma; the input phase offset does not affect the mean.
[[nodiscard]] double average_power(const CsvacConfig& cfg, double a_in, double gamma,
                                   int period_samples, double phase = 0.0);

}
