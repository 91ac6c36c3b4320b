#pragma once

namespace mesoamp {

/// Internal simulation units: energy in kT, voltage in V_T, time in beta*hbar,
/// rate in 1/(beta*hbar), current in q/(beta*hbar), power in kT/(beta*hbar).
/// With q*V_T = kT the numeric value of an energy in kT equals the numeric
/// value of the corresponding voltage in V_T, so both share plain doubles.
/// SI conversion happens only at I/O boundaries through this type.
struct UnitSystem {
    double temperature_kelvin;
    double thermal_energy_joule;
    double thermal_voltage_volt;
    double unit_time_second;
    double electron_charge_coulomb;

    /// Room-temperature system (T = 300 K) used throughout.
    static UnitSystem room_temperature();

    double volts_from_vt(double v_vt) const { return v_vt * thermal_voltage_volt; }
    double vt_from_volts(double v) const { return v / thermal_voltage_volt; }
    double seconds_from_time_units(double t) const { return t * unit_time_second; }
    double amperes_from_current_units(double j) const {
        return j * electron_charge_coulomb / unit_time_second;
    }
    double watts_from_power_units(double p) const {
        return p * thermal_energy_joule / unit_time_second;
    }
};

}
