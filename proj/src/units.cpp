#include "mesoamp/units.hpp"

namespace mesoamp {

UnitSystem UnitSystem::room_temperature() {
    constexpr double boltzmann_joule_per_kelvin = 1.380649e-23;
    constexpr double hbar_joule_second = 1.054571817e-34;
    UnitSystem u;
    u.temperature_kelvin = 300.0;
    u.electron_charge_coulomb = 1.6e-19;
    u.thermal_voltage_volt =
        boltzmann_joule_per_kelvin * u.temperature_kelvin / u.electron_charge_coulomb;
    u.thermal_energy_joule = u.thermal_voltage_volt * u.electron_charge_coulomb;
    u.unit_time_second = hbar_joule_second / u.thermal_energy_joule;
    return u;
}

}
