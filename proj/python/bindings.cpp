#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "mesoamp/circuits.hpp"
#include "mesoamp/device.hpp"
#include "mesoamp/io.hpp"
#include "mesoamp/multistage.hpp"
#include "mesoamp/powerfit.hpp"
#include "mesoamp/stochastic.hpp"
#include "mesoamp/thermo.hpp"
#include "mesoamp/units.hpp"

namespace py = pybind11;
using namespace mesoamp;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Master-equation simulator and power optimizer for mesoscopic "
              "transistor voltage amplifiers";
    m.attr("__version__") = "0.1.0";
    m.attr("rng_algorithm") = std::string(rng_algorithm);

    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<CapabilityError>(m, "CapabilityError");

    py::class_<UnitSystem>(m, "UnitSystem")
        .def_readonly("temperature_kelvin", &UnitSystem::temperature_kelvin)
        .def_readonly("thermal_energy_joule", &UnitSystem::thermal_energy_joule)
        .def_readonly("thermal_voltage_volt", &UnitSystem::thermal_voltage_volt)
        .def_readonly("unit_time_second", &UnitSystem::unit_time_second)
        .def_readonly("electron_charge_coulomb", &UnitSystem::electron_charge_coulomb)
        .def_static("room_temperature", &UnitSystem::room_temperature)
        .def("volts_from_vt", &UnitSystem::volts_from_vt, py::arg("v_vt"))
        .def("vt_from_volts", &UnitSystem::vt_from_volts, py::arg("v"))
        .def("seconds_from_time_units", &UnitSystem::seconds_from_time_units, py::arg("t"))
        .def("amperes_from_current_units", &UnitSystem::amperes_from_current_units,
             py::arg("j"))
        .def("watts_from_power_units", &UnitSystem::watts_from_power_units, py::arg("p"));

    py::class_<BoseOccupancy>(m, "BoseOccupancy")
        .def_readonly("value", &BoseOccupancy::value)
        .def_readonly("clamped", &BoseOccupancy::clamped);

    m.def("fermi_dirac", &fermi_dirac, py::arg("energy_kt"), py::arg("mu_kt"));
    m.def("bose_einstein", &bose_einstein, py::arg("x_kt"));
    m.def("detailed_balance_residual", &detailed_balance_residual, py::arg("k_forward"),
          py::arg("k_backward"), py::arg("e_from_kt"), py::arg("e_to_kt"));

    py::enum_<TransistorType>(m, "TransistorType")
        .value("nmos", TransistorType::nmos)
        .value("pmos", TransistorType::pmos);

    py::class_<TransistorLevel>(m, "TransistorLevel")
        .def(py::init<>())
        .def(py::init<TransistorType, double>(), py::arg("type"),
             py::arg("reference_energy"))
        .def_readwrite("type", &TransistorLevel::type)
        .def_readwrite("reference_energy", &TransistorLevel::reference_energy);

    py::class_<Reservoir>(m, "Reservoir")
        .def(py::init<>())
        .def(py::init<std::string, double, double>(), py::arg("name"), py::arg("mu"),
             py::arg("gamma"))
        .def_readwrite("name", &Reservoir::name)
        .def_readwrite("mu", &Reservoir::mu)
        .def_readwrite("gamma", &Reservoir::gamma);

    py::class_<ElectrodeRates>(m, "ElectrodeRates")
        .def_readonly("k_in", &ElectrodeRates::k_in)
        .def_readonly("k_out", &ElectrodeRates::k_out);

    py::class_<TransferPoint>(m, "TransferPoint")
        .def_readonly("v_in", &TransferPoint::v_in)
        .def_readonly("i_d", &TransferPoint::i_d);

    py::class_<TransferCharacteristic>(m, "TransferCharacteristic")
        .def_readonly("points", &TransferCharacteristic::points)
        .def_readonly("pinch_off", &TransferCharacteristic::pinch_off)
        .def_readonly("saturation_current", &TransferCharacteristic::saturation_current);

    py::class_<OutputPoint>(m, "OutputPoint")
        .def_readonly("v_ds", &OutputPoint::v_ds)
        .def_readonly("i_d", &OutputPoint::i_d);

    py::class_<OutputCurve>(m, "OutputCurve")
        .def_readonly("v_in", &OutputCurve::v_in)
        .def_readonly("points", &OutputCurve::points);

    m.def("level_energy", &level_energy, py::arg("level"), py::arg("v_in"));
    m.def("electrode_rates", &electrode_rates, py::arg("level_energy_kt"), py::arg("mu_kt"),
          py::arg("gamma"));
    m.def("build_two_state_generator", &build_two_state_generator, py::arg("level"),
          py::arg("v_in"), py::arg("reservoirs"));
    m.def("steady_state", &steady_state, py::arg("generator"));
    m.def("electrode_current", &electrode_current, py::arg("level_energy_kt"),
          py::arg("reservoir"), py::arg("mean_occupancy"));
    m.def("sweep_transfer_characteristic", &sweep_transfer_characteristic, py::arg("level"),
          py::arg("v_d"), py::arg("v_in_grid"), py::arg("gamma") = 0.2);
    m.def("sweep_output_characteristic", &sweep_output_characteristic, py::arg("level"),
          py::arg("v_in_values"), py::arg("v_ds_grid"), py::arg("gamma") = 0.2);

    py::class_<AmplifierConfig>(m, "AmplifierConfig")
        .def(py::init<double, double, double, double>(), py::arg("v_dd"), py::arg("gamma"),
             py::arg("gamma_r"), py::arg("nmos_reference_energy"))
        .def_readwrite("v_dd", &AmplifierConfig::v_dd)
        .def_readwrite("gamma", &AmplifierConfig::gamma)
        .def_readwrite("gamma_r", &AmplifierConfig::gamma_r)
        .def_readwrite("nmos_reference_energy", &AmplifierConfig::nmos_reference_energy);

    py::class_<CsvacConfig>(m, "CsvacConfig")
        .def(py::init<double, double, double, double, double>(), py::arg("v_d"),
             py::arg("gamma"), py::arg("gamma_l"), py::arg("nmos_reference_energy"),
             py::arg("pmos_reference_energy"))
        .def_readwrite("v_d", &CsvacConfig::v_d)
        .def_readwrite("gamma", &CsvacConfig::gamma)
        .def_readwrite("gamma_l", &CsvacConfig::gamma_l)
        .def_readwrite("nmos_reference_energy", &CsvacConfig::nmos_reference_energy)
        .def_readwrite("pmos_reference_energy", &CsvacConfig::pmos_reference_energy);

    m.def("make_csvac_config", &make_csvac_config, py::arg("v_d"), py::arg("gamma"),
          py::arg("gamma_l"));

    py::class_<CircuitState>(m, "CircuitState")
        .def_readonly("v_out", &CircuitState::v_out)
        .def_readonly("occupancies", &CircuitState::occupancies)
        .def_readonly("currents", &CircuitState::currents)
        .def_readonly("power_components", &CircuitState::power_components)
        .def_readonly("power", &CircuitState::power)
        .def_readonly("balance_residual", &CircuitState::balance_residual)
        .def_readonly("ohms_law_v_out", &CircuitState::ohms_law_v_out);

    py::class_<WaveformSample>(m, "WaveformSample")
        .def_readonly("tau", &WaveformSample::tau)
        .def_readonly("v_in", &WaveformSample::v_in)
        .def_readonly("v_out", &WaveformSample::v_out);

    py::class_<GainMeasurement>(m, "GainMeasurement")
        .def_readonly("input_amplitude", &GainMeasurement::input_amplitude)
        .def_readonly("output_amplitude", &GainMeasurement::output_amplitude)
        .def_readonly("gain", &GainMeasurement::gain)
        .def_readonly("waveform", &GainMeasurement::waveform);

    py::class_<ExchangeRates>(m, "ExchangeRates")
        .def_readonly("k_pn", &ExchangeRates::k_pn)
        .def_readonly("k_np", &ExchangeRates::k_np)
        .def_readonly("clamped", &ExchangeRates::clamped);

    m.def("resistor_current", &resistor_current, py::arg("mu_node"), py::arg("mu_supply"),
          py::arg("gamma_r"));
    m.def("rd_from_gamma", &rd_from_gamma, py::arg("gamma_r"));
    m.def("solve_amplifier", &solve_amplifier, py::arg("cfg"), py::arg("v_in"));
    m.def("inter_transistor_rates", &inter_transistor_rates, py::arg("eps_p"),
          py::arg("eps_n"), py::arg("gamma"));
    m.def("build_csvac_generator", &build_csvac_generator, py::arg("cfg"), py::arg("v_in"),
          py::arg("v_out"));
    m.def("solve_csvac", &solve_csvac, py::arg("cfg"), py::arg("v_in"));
    m.def("power_dissipation", &power_dissipation, py::arg("state"));
    m.def("measure_gain", &measure_gain, py::arg("cfg"), py::arg("a_in"),
          py::arg("period_samples"));
    m.def("calibrate_gamma_for_gain", &calibrate_gamma_for_gain, py::arg("cfg"),
          py::arg("a_in"), py::arg("target_gain"));
    m.def("average_power", &average_power, py::arg("cfg"), py::arg("a_in"), py::arg("gamma"),
          py::arg("period_samples"), py::arg("phase") = 0.0);

    py::class_<SplitMix64>(m, "SplitMix64")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("next_u64", &SplitMix64::next_u64)
        .def("next_uniform", &SplitMix64::next_uniform)
        .def("next_uniform_open", &SplitMix64::next_uniform_open);

    py::class_<JumpChannel>(m, "JumpChannel")
        .def_readonly("from_state", &JumpChannel::from)
        .def_readonly("to_state", &JumpChannel::to)
        .def_readonly("rate", &JumpChannel::rate)
        .def_readonly("junction", &JumpChannel::junction)
        .def_readonly("sign", &JumpChannel::sign);

    py::class_<ChannelSystem>(m, "ChannelSystem")
        .def_readonly("n_states", &ChannelSystem::n_states)
        .def_readonly("channels", &ChannelSystem::channels)
        .def("to_generator", &ChannelSystem::to_generator);

    py::class_<TrajectoryEvent>(m, "TrajectoryEvent")
        .def_readonly("time", &TrajectoryEvent::time)
        .def_readonly("from_state", &TrajectoryEvent::from_state)
        .def_readonly("to_state", &TrajectoryEvent::to_state)
        .def_readonly("channel", &TrajectoryEvent::channel);

    py::class_<ChannelCount>(m, "ChannelCount")
        .def_readonly("events", &ChannelCount::events)
        .def_readonly("net", &ChannelCount::net);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("seed", &Trajectory::seed)
        .def_readonly("events", &Trajectory::events)
        .def_readonly("total_time", &Trajectory::total_time)
        .def_readonly("channel_counts", &Trajectory::channel_counts)
        .def_readonly("state_times", &Trajectory::state_times)
        .def_readonly("final_state", &Trajectory::final_state)
        .def_readonly("absorbed", &Trajectory::absorbed);

    py::class_<RelaxationRun>(m, "RelaxationRun")
        .def_readonly("seed", &RelaxationRun::seed)
        .def_readonly("initial_v_out", &RelaxationRun::initial_v_out)
        .def_readonly("iterates", &RelaxationRun::iterates)
        .def_readonly("converged", &RelaxationRun::converged)
        .def_readonly("final_v_out", &RelaxationRun::final_v_out);

    m.def("channels_from_two_state", &channels_from_two_state, py::arg("level"),
          py::arg("v_in"), py::arg("reservoirs"));
    m.def("channels_from_csvac", &channels_from_csvac, py::arg("cfg"), py::arg("v_in"),
          py::arg("v_out"));
    m.def("channels_from_generator", &channels_from_generator, py::arg("generator"));
    m.def("gillespie_simulate", &gillespie_simulate, py::arg("system"),
          py::arg("initial_state"), py::arg("total_time"), py::arg("seed"));
    m.def("empirical_current", &empirical_current, py::arg("trajectory"), py::arg("channel"));
    m.def("empirical_occupancy", &empirical_occupancy, py::arg("trajectory"),
          py::arg("state"));
    m.def("stochastic_vout_relaxation", &stochastic_vout_relaxation, py::arg("cfg"),
          py::arg("v_in"), py::arg("seed"), py::arg("step_size") = 0.5,
          py::arg("batch_events") = 4000);

    py::enum_<AmplitudeUnit>(m, "AmplitudeUnit")
        .value("vt", AmplitudeUnit::vt)
        .value("volt", AmplitudeUnit::volt);

    py::class_<PowerFit>(m, "PowerFit")
        .def(py::init<>())
        .def_readwrite("a", &PowerFit::a)
        .def_readwrite("b", &PowerFit::b)
        .def_readwrite("c", &PowerFit::c)
        .def_readwrite("amplitude_unit", &PowerFit::amplitude_unit)
        .def_readwrite("rmse", &PowerFit::rmse)
        .def_readwrite("r_square", &PowerFit::r_square)
        .def_readwrite("n_points", &PowerFit::n_points)
        .def_readwrite("source", &PowerFit::source);

    py::class_<PowerSample>(m, "PowerSample")
        .def(py::init<double, double, double>(), py::arg("a_in"), py::arg("g"), py::arg("p"))
        .def_readwrite("a_in", &PowerSample::a_in)
        .def_readwrite("g", &PowerSample::g)
        .def_readwrite("p", &PowerSample::p);

    m.def("amplitude_unit_name", &amplitude_unit_name, py::arg("unit"));
    m.def("amplitude_unit_from_name",
          [](const std::string& name) { return amplitude_unit_from_name(name); },
          py::arg("name"));
    m.def("evaluate_power", &evaluate_power, py::arg("fit"), py::arg("a_in"), py::arg("g"));
    m.def("fit_power_model", &fit_power_model, py::arg("samples"));
    m.def("builtin_fit", [](const std::string& name) { return builtin_fit(name); },
          py::arg("name"));

    py::class_<MultistagePlan>(m, "MultistagePlan")
        .def_readonly("k", &MultistagePlan::k)
        .def_readonly("gains", &MultistagePlan::gains)
        .def_readonly("a_in", &MultistagePlan::a_in)
        .def_readonly("total_gain", &MultistagePlan::total_gain)
        .def_readonly("per_stage_power", &MultistagePlan::per_stage_power)
        .def_readonly("total_power", &MultistagePlan::total_power)
        .def_readonly("savings_vs_single", &MultistagePlan::savings_vs_single);

    py::class_<StageMapCell>(m, "StageMapCell")
        .def_readonly("a_in", &StageMapCell::a_in)
        .def_readonly("gain", &StageMapCell::gain)
        .def_readonly("k_opt", &StageMapCell::k_opt);

    m.attr("max_stage_count") = max_stage_count;
    m.attr("scheme1_improvement_tolerance") = scheme1_improvement_tolerance;

    m.def("total_power", &total_power, py::arg("fit"), py::arg("a_in"), py::arg("gains"));
    m.def("optimize_gains", &optimize_gains, py::arg("fit"), py::arg("a_in"),
          py::arg("total_gain"), py::arg("k"));
    m.def("two_stage_stationarity_residual", &two_stage_stationarity_residual,
          py::arg("fit"), py::arg("a_in"), py::arg("total_gain"), py::arg("g1"));
    m.def("min_beneficial_gain", &min_beneficial_gain, py::arg("fit"), py::arg("k"));
    m.def("scheme1", &scheme1, py::arg("fit"), py::arg("a_in"), py::arg("total_gain"),
          py::arg("improvement_tolerance") = scheme1_improvement_tolerance);
    m.def("optimal_stage_map", &optimal_stage_map, py::arg("fit"), py::arg("a_in_grid"),
          py::arg("gain_grid"),
          py::arg("improvement_tolerance") = scheme1_improvement_tolerance);

    m.def("format_double", &format_double, py::arg("x"));
    m.def("fit_to_json", [](const PowerFit& fit) { return fit_to_json(fit).dump(2); },
          py::arg("fit"));
    m.def("fit_from_json",
          [](const std::string& text) { return fit_from_json(nlohmann::json::parse(text)); },
          py::arg("text"));
    m.def("plan_to_json",
          [](const MultistagePlan& plan, const std::string& fit_source) {
              return plan_to_json(plan, fit_source).dump(2);
          },
          py::arg("plan"), py::arg("fit_source"));
}
