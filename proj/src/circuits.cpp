#include "mesoamp/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mesoamp/device.hpp"
#include "mesoamp/thermo.hpp"

namespace mesoamp {

namespace {

double fermi(double x) { return fermi_dirac(x, 0.0); }

void validate(const AmplifierConfig& cfg) {
    if (!(cfg.v_dd > 0.0) || !(cfg.gamma > 0.0) || !(cfg.gamma_r > 0.0)) {
        throw std::invalid_argument("AmplifierConfig: v_dd and rates must be positive");
    }
}

void validate(const CsvacConfig& cfg) {
    if (!(cfg.v_d > 0.0) || !(cfg.gamma > 0.0) || !(cfg.gamma_l > 0.0)) {
        throw std::invalid_argument("CsvacConfig: v_d and rates must be positive");
    }
}

/// Bisection on [lo, hi] down to interval collapse; the balance function is
/// continuous and changes sign across the bracket.
template <typename F>
double solve_root(F&& balance, double lo, double hi, const char* what) {
    double f_lo = balance(lo);
    double f_hi = balance(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        std::ostringstream msg;
        msg << what << ": no sign change on [" << lo << ", " << hi << "] (balance " << f_lo
            << " and " << f_hi << ")";
        throw SolverError(msg.str());
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f_mid = balance(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return std::abs(f_lo) <= std::abs(balance(hi)) ? lo : hi;
}

struct CsvacPoint {
    double n_p;
    double n_n;
    double j_ps;
    double j_ns;
};

CsvacPoint evaluate_csvac(const CsvacConfig& cfg, double v_in, double v_out) {
    const Eigen::VectorXd p = steady_state(build_csvac_generator(cfg, v_in, v_out));
    const double eps_p = cfg.pmos_reference_energy + v_in;
    const double eps_n = cfg.nmos_reference_energy - v_in;
    const double mu_s = -v_out;
    CsvacPoint point;
    point.n_p = p(1) + p(3);
    point.n_n = p(2) + p(3);
    point.j_ps = cfg.gamma * (point.n_p - fermi_dirac(eps_p, mu_s));
    point.j_ns = cfg.gamma * (point.n_n - fermi_dirac(eps_n, mu_s));
    return point;
}

double csvac_balance(const CsvacConfig& cfg, double v_in, double v_out) {
    const CsvacPoint point = evaluate_csvac(cfg, v_in, v_out);
    return point.j_ps + point.j_ns + 0.5 * cfg.gamma_l * (fermi(-v_out) - 0.5);
}

constexpr double gain_period = 6.0 * std::numbers::pi;

std::vector<double> period_phases(int period_samples) {
    std::vector<double> taus(static_cast<std::size_t>(period_samples));
    for (int k = 0; k < period_samples; ++k) {
        taus[static_cast<std::size_t>(k)] = gain_period * k / period_samples;
    }
    return taus;
}

/// Gain from the two phase extremes of the monotone transfer curve; equals
/// the full waveform measurement whenever the sample count is a multiple
/// of four.
double two_point_gain(const CsvacConfig& cfg, double a_in) {
    const double v_hi = solve_csvac(cfg, -a_in).v_out;
    const double v_lo = solve_csvac(cfg, a_in).v_out;
    return 0.5 * (v_hi - v_lo) / a_in;
}

}

CsvacConfig make_csvac_config(double v_d, double gamma, double gamma_l) {
    return {v_d, gamma, gamma_l, v_d, 0.0};
}

double resistor_current(double mu_node, double mu_supply, double gamma_r) {
    if (!(gamma_r > 0.0)) {
        throw std::domain_error("resistor_current: gamma_r must be positive");
    }
    return 0.5 * gamma_r * (fermi(mu_node - mu_supply) - 0.5);
}

double rd_from_gamma(double gamma_r) {
    if (!(gamma_r > 0.0)) {
        throw std::domain_error("rd_from_gamma: gamma_r must be positive");
    }
    return 8.432 / gamma_r;
}

CircuitState solve_amplifier(const AmplifierConfig& cfg, double v_in) {
    validate(cfg);
    const double eps = cfg.nmos_reference_energy - v_in;
    const double mu_dd = -cfg.v_dd;
    const auto balance = [&](double v_out) {
        const double mu_d = -v_out;
        const double f_d = fermi_dirac(eps, mu_d);
        const double f_s = fermi_dirac(eps, 0.0);
        const double n = 0.5 * (f_d + f_s);
        const double j_dn = cfg.gamma * (f_d - n);
        return resistor_current(mu_d, mu_dd, cfg.gamma_r) - j_dn;
    };
    const double v_out = solve_root(balance, 0.0, cfg.v_dd, "solve_amplifier");

    CircuitState state;
    state.v_out = v_out;
    const double mu_d = -v_out;
    const double f_d = fermi_dirac(eps, mu_d);
    const double f_s = fermi_dirac(eps, 0.0);
    const double n = 0.5 * (f_d + f_s);
    const double j_dn = cfg.gamma * (f_d - n);
    const double j_ddrd = resistor_current(mu_d, mu_dd, cfg.gamma_r);
    state.occupancies["n_N"] = n;
    state.currents["J_DD->Rd"] = j_ddrd;
    state.currents["J_d->N"] = j_dn;
    state.power_components["P_Rd"] = j_ddrd * (mu_dd - mu_d);
    state.power_components["P_NMOS"] = j_dn * mu_d;
    state.power = state.power_components["P_Rd"] + state.power_components["P_NMOS"];
    state.balance_residual = std::abs(j_ddrd - j_dn);
    state.ohms_law_v_out = cfg.v_dd - std::abs(j_ddrd) * rd_from_gamma(cfg.gamma_r);
    return state;
}

ExchangeRates inter_transistor_rates(double eps_p, double eps_n, double gamma) {
    if (!(gamma > 0.0)) {
        throw std::domain_error("inter_transistor_rates: gamma must be positive");
    }
    const double gap = eps_p - eps_n;
    const double mag = std::abs(gap);
    const bool clamped = mag < bose_argument_min;
    const double occupation = bose_einstein(std::max(mag, bose_argument_min)).value;
    if (gap >= 0.0) {
        return {gamma * occupation, gamma * (1.0 + occupation), clamped};
    }
    return {gamma * (1.0 + occupation), gamma * occupation, clamped};
}

Eigen::MatrixXd build_csvac_generator(const CsvacConfig& cfg, double v_in, double v_out) {
    validate(cfg);
    const double eps_p = cfg.pmos_reference_energy + v_in;
    const double eps_n = cfg.nmos_reference_energy - v_in;
    const double mu_s = -v_out;

    const ElectrodeRates p_drain = electrode_rates(eps_p, -cfg.v_d, cfg.gamma);
    const ElectrodeRates p_source = electrode_rates(eps_p, mu_s, cfg.gamma);
    const ElectrodeRates n_drain = electrode_rates(eps_n, cfg.v_d, cfg.gamma);
    const ElectrodeRates n_source = electrode_rates(eps_n, mu_s, cfg.gamma);
    const ExchangeRates exchange = inter_transistor_rates(eps_p, eps_n, cfg.gamma);

    const double kp_in = p_drain.k_in + p_source.k_in;
    const double kp_out = p_drain.k_out + p_source.k_out;
    const double kn_in = n_drain.k_in + n_source.k_in;
    const double kn_out = n_drain.k_out + n_source.k_out;

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    const auto add = [&m](int to, int from, double rate) {
        m(to, from) += rate;
        m(from, from) -= rate;
    };
    add(1, 0, kp_in);
    add(0, 1, kp_out);
    add(3, 2, kp_in);
    add(2, 3, kp_out);
    add(2, 0, kn_in);
    add(0, 2, kn_out);
    add(3, 1, kn_in);
    add(1, 3, kn_out);
    add(1, 2, exchange.k_pn);
    add(2, 1, exchange.k_np);
    return m;
}

CircuitState solve_csvac(const CsvacConfig& cfg, double v_in) {
    validate(cfg);
    const auto balance = [&](double v_out) { return csvac_balance(cfg, v_in, v_out); };
    const double v_out = solve_root(balance, -cfg.v_d, cfg.v_d, "solve_csvac");

    const CsvacPoint point = evaluate_csvac(cfg, v_in, v_out);
    const double eps_p = cfg.pmos_reference_energy + v_in;
    const double eps_n = cfg.nmos_reference_energy - v_in;
    const double mu_dp = -cfg.v_d;
    const double mu_dn = cfg.v_d;
    const double mu_s = -v_out;
    const double j_dp_p = cfg.gamma * (fermi_dirac(eps_p, mu_dp) - point.n_p);
    const double j_dn_n = cfg.gamma * (fermi_dirac(eps_n, mu_dn) - point.n_n);

    CircuitState state;
    state.v_out = v_out;
    state.occupancies["n_P"] = point.n_p;
    state.occupancies["n_N"] = point.n_n;
    state.currents["J_dP->P"] = j_dp_p;
    state.currents["J_dN->N"] = j_dn_n;
    state.currents["J_P->s"] = point.j_ps;
    state.currents["J_N->s"] = point.j_ns;
    state.currents["J_CSVAC->RL"] = 0.5 * cfg.gamma_l * (fermi(v_out) - 0.5);
    state.power_components["P_PMOS"] = j_dp_p * (mu_dp - mu_s);
    state.power_components["P_NMOS"] = j_dn_n * (mu_dn - mu_s);
    state.power = state.power_components["P_PMOS"] + state.power_components["P_NMOS"];
    state.balance_residual =
        std::abs(point.j_ps + point.j_ns + 0.5 * cfg.gamma_l * (fermi(-v_out) - 0.5));
    return state;
}

double power_dissipation(const CircuitState& state) {
    double total = 0.0;
    for (const auto& [name, value] : state.power_components) {
        total += value;
    }
    return total;
}

GainMeasurement measure_gain(const CsvacConfig& cfg, double a_in, int period_samples) {
    if (!(a_in > 0.0)) {
        throw std::invalid_argument("measure_gain: a_in must be positive");
    }
    if (period_samples < 16) {
        throw std::invalid_argument("measure_gain: period_samples must be at least 16");
    }
    GainMeasurement result;
    result.input_amplitude = a_in;
    result.waveform.reserve(static_cast<std::size_t>(period_samples));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const double tau : period_phases(period_samples)) {
        const double v_in = a_in * std::sin(2.0 * std::numbers::pi * tau / gain_period);
        double v_out = 0.0;
        try {
            v_out = solve_csvac(cfg, v_in).v_out;
        } catch (const SolverError& err) {
            std::ostringstream msg;
            msg << "measure_gain: solve failed at tau = " << tau << " (v_in = " << v_in
                << "): " << err.what();
            throw SolverError(msg.str());
        }
        result.waveform.push_back({tau, v_in, v_out});
        lo = std::min(lo, v_out);
        hi = std::max(hi, v_out);
    }
    result.output_amplitude = 0.5 * (hi - lo);
    result.gain = result.output_amplitude / a_in;
    return result;
}

double calibrate_gamma_for_gain(const CsvacConfig& cfg_template, double a_in,
                                double target_gain) {
    validate(cfg_template);
    if (!(a_in > 0.0)) {
        throw std::invalid_argument("calibrate_gamma_for_gain: a_in must be positive");
    }
    if (!(target_gain >= 1.0)) {
        throw std::invalid_argument("calibrate_gamma_for_gain: target_gain must be at least 1");
    }
    const auto gain_at = [&](double gamma) {
        CsvacConfig cfg = cfg_template;
        cfg.gamma = gamma;
        return two_point_gain(cfg, a_in);
    };

    double lo = 1e-4;
    double hi = 0.2;
    double g_hi = gain_at(hi);
    int doublings = 0;
    while (g_hi < target_gain && doublings < 24) {
        lo = hi;
        hi *= 2.0;
        g_hi = gain_at(hi);
        ++doublings;
    }
    if (g_hi < target_gain) {
        std::ostringstream msg;
        msg << "calibrate_gamma_for_gain: target gain " << target_gain
            << " is not achievable at v_d = " << cfg_template.v_d << " (maximum achievable "
            << g_hi << ")";
        throw CapabilityError(msg.str(), g_hi);
    }
    double g_lo = gain_at(lo);
    if (g_lo > target_gain) {
        throw SolverError("calibrate_gamma_for_gain: target below the bracket floor");
    }
    double mid = std::sqrt(lo * hi);
    for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
        mid = std::sqrt(lo * hi);
        const double g_mid = gain_at(mid);
        if (std::abs(g_mid - target_gain) <= 1e-4 * target_gain) {
            return mid;
        }
        if (g_mid < target_gain) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    return mid;
}

double average_power(const CsvacConfig& cfg, double a_in, double gamma, int period_samples,
                     double phase) {
    validate(cfg);
    if (!(a_in >= 0.0)) {
        throw std::invalid_argument("average_power: a_in must be non-negative");
    }
    if (period_samples < 16) {
        throw std::invalid_argument("average_power: period_samples must be at least 16");
    }
    CsvacConfig run = cfg;
    run.gamma = gamma;
    double total = 0.0;
    for (const double tau : period_phases(period_samples)) {
        const double v_in =
            a_in * std::sin(2.0 * std::numbers::pi * tau / gain_period + phase);
        try {
            total += solve_csvac(run, v_in).power;
        } catch (const SolverError& err) {
            std::ostringstream msg;
            msg << "average_power: solve failed at tau = " << tau << " (v_in = " << v_in
                << "): " << err.what();
            throw SolverError(msg.str());
        }
    }
    return total / period_samples;
}

}
