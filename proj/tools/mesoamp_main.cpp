#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "mesoamp/circuits.hpp"
#include "mesoamp/device.hpp"
#include "mesoamp/io.hpp"
#include "mesoamp/multistage.hpp"
#include "mesoamp/powerfit.hpp"
#include "mesoamp/stochastic.hpp"
#include "mesoamp/version.hpp"

namespace {

using nlohmann::json;
using namespace mesoamp;

/// Invalid usage detected after argument parsing; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

/// Flat `key = value` file with `#` comments. Returned in file order.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file: " + path);
    }
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line is not `key = value`: " + line);
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

const std::vector<std::string> command_names = {
    "characteristics", "amplifier", "csvac-sweep", "power-map", "gillespie",
    "relax",           "fit",       "optimize",    "scheme1",   "stage-map"};

/// Rewrites argv so config-file entries become flags placed right after the
/// subcommand name; explicit flags stay behind them and win.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config") {
            if (i + 1 >= raw.size()) {
                throw UsageError("--config expects a path");
            }
            config_path = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config_path = raw[i].substr(9);
        } else {
            rest.push_back(raw[i]);
        }
    }
    if (config_path.empty()) {
        return rest;
    }
    std::string command;
    std::vector<std::string> injected;
    for (const auto& [key, value] : parse_config_file(config_path)) {
        if (key == "command") {
            command = value;
        } else {
            injected.push_back("--" + key + "=" + value);
        }
    }
    const bool has_command =
        !rest.empty() && std::find(command_names.begin(), command_names.end(), rest.front()) !=
                             command_names.end();
    std::vector<std::string> args;
    if (has_command) {
        args.push_back(rest.front());
        rest.erase(rest.begin());
    } else if (!command.empty()) {
        args.push_back(command);
    }
    args.insert(args.end(), injected.begin(), injected.end());
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

std::vector<double> make_grid(double lo, double hi, double step, const std::string& what) {
    if (!(step > 0.0) || !(hi >= lo)) {
        throw UsageError(what + ": need max >= min and step > 0");
    }
    std::vector<double> grid;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        grid.push_back(lo + step * i);
    }
    return grid;
}

std::string resolve_out_path(const std::string& out, const std::string& command,
                             const std::string& extension) {
    if (!out.empty()) {
        return out;
    }
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("MESOAMP_OUT_DIR"); env != nullptr && *env != '\0') {
        dir = env;
    }
    return (dir / (command + "." + extension)).string();
}

struct Table {
    std::vector<std::string> columns;
    std::string units;
    std::vector<std::pair<std::string, double>> extras;
    std::vector<std::vector<double>> rows;
};

std::string render_table(const Table& table, const std::string& format) {
    if (format == "csv") {
        std::string text = "# columns: ";
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i > 0) {
                text += ',';
            }
            text += table.columns[i];
        }
        text += " | units: " + table.units;
        for (const auto& [key, value] : table.extras) {
            text += " | " + key + "=" + format_double(value);
        }
        text += '\n';
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (i > 0) {
                text += ',';
            }
            text += table.columns[i];
        }
        text += '\n';
        for (const auto& row : table.rows) {
            text += csv_row(row);
            text += '\n';
        }
        return text;
    }
    json extras = json::object();
    for (const auto& [key, value] : table.extras) {
        extras[key] = value;
    }
    const json doc = {{"columns", table.columns},
                      {"units", table.units},
                      {"extras", extras},
                      {"rows", table.rows}};
    return doc.dump(2) + "\n";
}

struct RunContext {
    CLI::App* sub = nullptr;
    std::string command;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

void write_manifest(const RunContext& ctx) {
    json resolved = json::object();
    for (const CLI::Option* opt : ctx.sub->get_options()) {
        const auto& lnames = opt->get_lnames();
        if (lnames.empty() || lnames.front() == "help" || lnames.front() == "config") {
            continue;
        }
        const std::string name = lnames.front();
        std::string value;
        if (!opt->results().empty()) {
            value = opt->results().back();
        } else {
            value = opt->get_default_str();
        }
        if (name == "out") {
            value = ctx.out_path;
        }
        if (value.empty()) {
            continue;
        }
        resolved[name] = value;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
    json manifest = {{"command", ctx.command},
                     {"resolved_config", resolved},
                     {"seed", nullptr},
                     {"rng_algorithm", nullptr},
                     {"library_version", std::string(library_version)},
                     {"wall_time_seconds", wall},
                     {"outputs", json::array({ctx.out_path})}};
    if (ctx.seed.has_value()) {
        manifest["seed"] = *ctx.seed;
        manifest["rng_algorithm"] = std::string(rng_algorithm);
    }
    write_text_file(ctx.out_path + ".manifest.json", manifest.dump(2) + "\n");
}

void emit_table(RunContext& ctx, const Table& table, const std::string& format) {
    write_text_file(ctx.out_path, render_table(table, format));
    write_manifest(ctx);
}

void emit_json(RunContext& ctx, const json& doc) {
    write_text_file(ctx.out_path, doc.dump(2) + "\n");
    write_manifest(ctx);
}

TransistorType parse_kind(std::string kind) {
    for (char& c : kind) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (kind == "nmos") {
        return TransistorType::nmos;
    }
    if (kind == "pmos") {
        return TransistorType::pmos;
    }
    throw UsageError("kind must be nmos or pmos, got " + kind);
}

PowerFit load_fit(const std::string& spec) {
    if (spec == "paper-sim" || spec == "paper-entity") {
        return builtin_fit(spec);
    }
    if (std::filesystem::exists(spec)) {
        return fit_from_json(json::parse(read_text_file(spec)));
    }
    throw UsageError("fit must be paper-sim, paper-entity, or a fit JSON path; got " + spec);
}

void check_unit(const std::string& unit, const PowerFit& fit) {
    if (unit.empty()) {
        return;
    }
    if (amplitude_unit_from_name(unit) != fit.amplitude_unit) {
        throw UsageError("amplitude unit " + unit + " does not match the fit's unit " +
                         amplitude_unit_name(fit.amplitude_unit));
    }
}

/// Samples from a CSV with named columns: amplitude (a_in, a_in_vt,
/// a_in_volt), gain (gain, g) and power (p, power, *power_kt_per_unit_time).
std::vector<PowerSample> read_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open samples file: " + path);
    }
    std::string line;
    std::vector<std::string> header;
    std::vector<PowerSample> samples;
    int col_a = -1;
    int col_g = -1;
    int col_p = -1;
    const auto split = [](const std::string& text) {
        std::vector<std::string> fields;
        std::stringstream ss(text);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(trim(field));
        }
        return fields;
    };
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split(line);
        if (col_a < 0) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string& name = fields[i];
                if (name == "a_in" || name == "a_in_vt" || name == "a_in_volt") {
                    col_a = static_cast<int>(i);
                } else if (name == "gain" || name == "g") {
                    col_g = static_cast<int>(i);
                } else if (name == "p" || name == "power" ||
                           name.find("power_kt_per_unit_time") != std::string::npos) {
                    col_p = static_cast<int>(i);
                }
            }
            if (col_a < 0 || col_g < 0 || col_p < 0) {
                throw UsageError("samples file needs a header row naming amplitude, gain, and "
                                 "power columns: " +
                                 path);
            }
            continue;
        }
        const auto need = static_cast<std::size_t>(std::max({col_a, col_g, col_p})) + 1;
        if (fields.size() < need) {
            throw UsageError("short sample row: " + line);
        }
        samples.push_back({std::stod(fields[static_cast<std::size_t>(col_a)]),
                           std::stod(fields[static_cast<std::size_t>(col_g)]),
                           std::stod(fields[static_cast<std::size_t>(col_p)])});
    }
    return samples;
}

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sub->add_option("--config", "flat key = value config file (flags override it)")
        ->type_name("PATH");
    return sub;
}

int run(int argc, char** argv) {
    CLI::App app{"Mesoscopic transistor amplifier simulator and multistage optimizer"};
    app.require_subcommand(1);

    // characteristics
    auto* characteristics = add_command(app, "characteristics", "Single-transistor sweeps");
    struct {
        std::string kind = "nmos";
        double eps0 = 0.0;
        double v_d = 15.0;
        double gamma = 0.2;
        std::string sweep = "transfer";
        double v_in_min = -10.0, v_in_max = 10.0, v_in_step = 0.5;
        double v_ds_min = 0.0, v_ds_max = 15.0, v_ds_step = 0.5;
        std::string v_in_values = "0,2.5,5,7.5,10";
        std::string out, format = "csv";
    } ch;
    characteristics->add_option("--kind", ch.kind, "transistor kind: nmos or pmos")
        ->capture_default_str();
    characteristics->add_option("--eps0", ch.eps0, "reference energy in kT")
        ->capture_default_str();
    characteristics->add_option("--v_d", ch.v_d, "drain bias in V_T")->capture_default_str();
    characteristics->add_option("--gamma", ch.gamma, "electrode rate in 1/unit-time")
        ->capture_default_str();
    characteristics->add_option("--sweep", ch.sweep, "transfer or output")
        ->check(CLI::IsMember({"transfer", "output"}))
        ->capture_default_str();
    characteristics->add_option("--v_in_min", ch.v_in_min)->capture_default_str();
    characteristics->add_option("--v_in_max", ch.v_in_max)->capture_default_str();
    characteristics->add_option("--v_in_step", ch.v_in_step)->capture_default_str();
    characteristics->add_option("--v_ds_min", ch.v_ds_min)->capture_default_str();
    characteristics->add_option("--v_ds_max", ch.v_ds_max)->capture_default_str();
    characteristics->add_option("--v_ds_step", ch.v_ds_step)->capture_default_str();
    characteristics
        ->add_option("--v_in_values", ch.v_in_values,
                     "comma-separated gate voltages for the output sweep")
        ->capture_default_str();
    characteristics->add_option("--out", ch.out, "output path")->capture_default_str();
    characteristics->add_option("--format", ch.format)
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    characteristics->callback([&] {
        RunContext ctx{characteristics, "characteristics"};
        ctx.out_path = resolve_out_path(ch.out, ctx.command, ch.format);
        const TransistorLevel level{parse_kind(ch.kind), ch.eps0};
        Table table;
        table.columns = {"v_in", "v_ds", "i_d"};
        table.units = "voltages in V_T, currents in q per unit time";
        if (ch.sweep == "transfer") {
            const auto grid = make_grid(ch.v_in_min, ch.v_in_max, ch.v_in_step, "v_in grid");
            const auto tc = sweep_transfer_characteristic(level, ch.v_d, grid, ch.gamma);
            for (const auto& p : tc.points) {
                table.rows.push_back({p.v_in, ch.v_d, p.i_d});
            }
            if (std::isfinite(tc.pinch_off)) {
                table.extras.emplace_back("pinch_off_vt", tc.pinch_off);
            }
            table.extras.emplace_back("saturation_current", tc.saturation_current);
        } else {
            const auto grid = make_grid(ch.v_ds_min, ch.v_ds_max, ch.v_ds_step, "v_ds grid");
            std::vector<double> gate_values;
            std::stringstream ss(ch.v_in_values);
            std::string field;
            while (std::getline(ss, field, ',')) {
                gate_values.push_back(std::stod(trim(field)));
            }
            for (const auto& curve :
                 sweep_output_characteristic(level, gate_values, grid, ch.gamma)) {
                for (const auto& p : curve.points) {
                    table.rows.push_back({curve.v_in, p.v_ds, p.i_d});
                }
            }
        }
        emit_table(ctx, table, ch.format);
    });

    // amplifier
    auto* amplifier = add_command(app, "amplifier", "Single-NMOS amplifier waveform");
    struct {
        double v_dd = 15.0, gamma = 0.2, gamma_r = 0.01, eps0 = 0.0;
        double a_in = 0.1, omega = 0.5;
        int samples = 64;
        std::string out, format = "csv";
    } am;
    amplifier->add_option("--v_dd", am.v_dd, "supply in V_T")->capture_default_str();
    amplifier->add_option("--gamma", am.gamma)->capture_default_str();
    amplifier->add_option("--gamma_r", am.gamma_r)->capture_default_str();
    amplifier->add_option("--eps0", am.eps0, "NMOS reference energy in kT")
        ->capture_default_str();
    amplifier->add_option("--a_in", am.a_in, "input amplitude in V_T")->capture_default_str();
    amplifier->add_option("--omega", am.omega, "input angular frequency in 1/unit-time")
        ->capture_default_str();
    amplifier->add_option("--samples", am.samples)->check(CLI::PositiveNumber)
        ->capture_default_str();
    amplifier->add_option("--out", am.out)->capture_default_str();
    amplifier->add_option("--format", am.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    amplifier->callback([&] {
        RunContext ctx{amplifier, "amplifier"};
        ctx.out_path = resolve_out_path(am.out, ctx.command, am.format);
        if (!(am.omega > 0.0)) {
            throw UsageError("omega must be positive");
        }
        const AmplifierConfig cfg{am.v_dd, am.gamma, am.gamma_r, am.eps0};
        const double period = 2.0 * std::numbers::pi / am.omega;
        Table table;
        table.columns = {"tau", "v_in_vt", "v_out_vt"};
        table.units = "tau in unit time, voltages in V_T";
        for (int k = 0; k < am.samples; ++k) {
            const double tau = period * k / am.samples;
            const double v_in = am.a_in * std::sin(am.omega * tau);
            table.rows.push_back({tau, v_in, solve_amplifier(cfg, v_in).v_out});
        }
        emit_table(ctx, table, am.format);
    });

    // shared CSVAC options
    struct CsvacCli {
        double v_d = 15.0, gamma = 0.2, gamma_l = 0.01;
        double eps_n0 = std::numeric_limits<double>::quiet_NaN();
        double eps_p0 = 0.0;

        CsvacConfig config() const {
            CsvacConfig cfg = make_csvac_config(v_d, gamma, gamma_l);
            if (std::isfinite(eps_n0)) {
                cfg.nmos_reference_energy = eps_n0;
            }
            cfg.pmos_reference_energy = eps_p0;
            return cfg;
        }
    };
    const auto add_csvac_options = [](CLI::App* sub, CsvacCli& c) {
        sub->add_option("--v_d", c.v_d, "supply half-swing in V_T")->capture_default_str();
        sub->add_option("--gamma", c.gamma)->capture_default_str();
        sub->add_option("--gamma_l", c.gamma_l)->capture_default_str();
        sub->add_option("--eps_n0", c.eps_n0, "NMOS reference energy in kT (default: v_d)");
        sub->add_option("--eps_p0", c.eps_p0, "PMOS reference energy in kT")
            ->capture_default_str();
    };

    // csvac-sweep
    auto* csvac_sweep = add_command(app, "csvac-sweep", "CSVAC input-output curve");
    struct {
        CsvacCli csvac;
        double v_in_min = -7.5, v_in_max = 7.5, v_in_step = 0.5;
        std::string out, format = "csv";
    } cs;
    add_csvac_options(csvac_sweep, cs.csvac);
    csvac_sweep->add_option("--v_in_min", cs.v_in_min)->capture_default_str();
    csvac_sweep->add_option("--v_in_max", cs.v_in_max)->capture_default_str();
    csvac_sweep->add_option("--v_in_step", cs.v_in_step)->capture_default_str();
    csvac_sweep->add_option("--out", cs.out)->capture_default_str();
    csvac_sweep->add_option("--format", cs.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    csvac_sweep->callback([&] {
        RunContext ctx{csvac_sweep, "csvac-sweep"};
        ctx.out_path = resolve_out_path(cs.out, ctx.command, cs.format);
        const CsvacConfig cfg = cs.csvac.config();
        Table table;
        table.columns = {"v_in_vt", "v_out_vt", "power_kt_per_unit_time"};
        table.units = "voltages in V_T, power in kT per unit time";
        for (const double v_in :
             make_grid(cs.v_in_min, cs.v_in_max, cs.v_in_step, "v_in grid")) {
            const CircuitState state = solve_csvac(cfg, v_in);
            table.rows.push_back({v_in, state.v_out, state.power});
        }
        emit_table(ctx, table, cs.format);
    });

    // power-map
    auto* power_map = add_command(app, "power-map", "Cycle-averaged power over (a_in, gain)");
    struct {
        CsvacCli csvac;
        double a_in_min = 2.0, a_in_max = 14.0, a_in_step = 1.0;
        double gain_min = 1.0, gain_max = 2.0, gain_step = 0.1;
        int samples = 64;
        std::string out, format = "csv";
    } pm;
    add_csvac_options(power_map, pm.csvac);
    power_map->add_option("--a_in_min", pm.a_in_min)->capture_default_str();
    power_map->add_option("--a_in_max", pm.a_in_max)->capture_default_str();
    power_map->add_option("--a_in_step", pm.a_in_step)->capture_default_str();
    power_map->add_option("--gain_min", pm.gain_min)->capture_default_str();
    power_map->add_option("--gain_max", pm.gain_max)->capture_default_str();
    power_map->add_option("--gain_step", pm.gain_step)->capture_default_str();
    power_map->add_option("--samples", pm.samples)->check(CLI::PositiveNumber)
        ->capture_default_str();
    power_map->add_option("--out", pm.out)->capture_default_str();
    power_map->add_option("--format", pm.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    power_map->callback([&] {
        RunContext ctx{power_map, "power-map"};
        ctx.out_path = resolve_out_path(pm.out, ctx.command, pm.format);
        const CsvacConfig cfg = pm.csvac.config();
        Table table;
        table.columns = {"a_in_vt", "gain", "gamma", "avg_power_kt_per_unit_time"};
        table.units = "amplitudes in V_T, rates in 1/unit-time, power in kT per unit time";
        int skipped = 0;
        for (const double a_in :
             make_grid(pm.a_in_min, pm.a_in_max, pm.a_in_step, "a_in grid")) {
            for (const double gain :
                 make_grid(pm.gain_min, pm.gain_max, pm.gain_step, "gain grid")) {
                try {
                    const double gamma = calibrate_gamma_for_gain(cfg, a_in, gain);
                    const double avg = average_power(cfg, a_in, gamma, pm.samples);
                    table.rows.push_back({a_in, gain, gamma, avg});
                } catch (const CapabilityError&) {
                    ++skipped;
                }
            }
        }
        table.extras.emplace_back("skipped_cells", skipped);
        emit_table(ctx, table, pm.format);
    });

    // gillespie
    auto* gillespie = add_command(app, "gillespie", "Sample one stochastic trajectory");
    struct {
        std::string system = "two-state";
        std::string kind = "nmos";
        double eps0 = 0.0;
        CsvacCli csvac;
        double v_in = 0.0, v_out = 0.0;
        double total_time = 1e5;
        std::uint64_t seed = 0;
        int initial_state = 0;
        std::string out, format = "csv";
    } gl;
    gillespie->add_option("--system", gl.system, "two-state or csvac")
        ->check(CLI::IsMember({"two-state", "csvac"}))
        ->capture_default_str();
    gillespie->add_option("--kind", gl.kind)->capture_default_str();
    gillespie->add_option("--eps0", gl.eps0)->capture_default_str();
    add_csvac_options(gillespie, gl.csvac);
    gillespie->add_option("--v_in", gl.v_in)->capture_default_str();
    gillespie->add_option("--v_out", gl.v_out, "frozen output voltage for the csvac chain")
        ->capture_default_str();
    gillespie->add_option("--total_time", gl.total_time, "duration in unit time")
        ->capture_default_str();
    gillespie->add_option("--seed", gl.seed)->required();
    gillespie->add_option("--initial_state", gl.initial_state)->capture_default_str();
    gillespie->add_option("--out", gl.out)->capture_default_str();
    gillespie->add_option("--format", gl.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    gillespie->callback([&] {
        RunContext ctx{gillespie, "gillespie"};
        ctx.seed = gl.seed;
        ctx.out_path = resolve_out_path(gl.out, ctx.command, gl.format);
        ChannelSystem system;
        if (gl.system == "two-state") {
            const TransistorLevel level{parse_kind(gl.kind), gl.eps0};
            system = channels_from_two_state(
                level, gl.v_in,
                {{"d", -gl.csvac.v_d, gl.csvac.gamma}, {"s", 0.0, gl.csvac.gamma}});
        } else {
            system = channels_from_csvac(gl.csvac.config(), gl.v_in, gl.v_out);
        }
        const Trajectory traj =
            gillespie_simulate(system, gl.initial_state, gl.total_time, gl.seed);
        Table table;
        table.columns = {"time", "state"};
        table.units = "time in unit time, state as chain index";
        table.extras.emplace_back("total_time", traj.total_time);
        table.extras.emplace_back("final_state", traj.final_state);
        table.extras.emplace_back("absorbed", traj.absorbed ? 1.0 : 0.0);
        for (const auto& [junction, count] : traj.channel_counts) {
            table.extras.emplace_back("net_" + junction, static_cast<double>(count.net));
        }
        table.rows.push_back({0.0, static_cast<double>(gl.initial_state)});
        for (const TrajectoryEvent& event : traj.events) {
            table.rows.push_back({event.time, static_cast<double>(event.to_state)});
        }
        emit_table(ctx, table, gl.format);
    });

    // relax
    auto* relax = add_command(app, "relax", "Stochastic output-voltage relaxation");
    struct {
        CsvacCli csvac;
        double v_in = 0.0;
        std::uint64_t seed = 0;
        double step_size = 0.5;
        int batch_events = 4000;
        std::string out, format = "csv";
    } rx;
    add_csvac_options(relax, rx.csvac);
    relax->add_option("--v_in", rx.v_in)->capture_default_str();
    relax->add_option("--seed", rx.seed)->required();
    relax->add_option("--step_size", rx.step_size)->capture_default_str();
    relax->add_option("--batch_events", rx.batch_events)->check(CLI::PositiveNumber)
        ->capture_default_str();
    relax->add_option("--out", rx.out)->capture_default_str();
    relax->add_option("--format", rx.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    relax->callback([&] {
        RunContext ctx{relax, "relax"};
        ctx.seed = rx.seed;
        ctx.out_path = resolve_out_path(rx.out, ctx.command, rx.format);
        const RelaxationRun run = stochastic_vout_relaxation(rx.csvac.config(), rx.v_in, rx.seed,
                                                             rx.step_size, rx.batch_events);
        Table table;
        table.columns = {"iteration", "v_out_vt", "seed"};
        table.units = "voltages in V_T";
        table.extras.emplace_back("converged", run.converged ? 1.0 : 0.0);
        table.extras.emplace_back("final_v_out_vt", run.final_v_out);
        table.rows.push_back({0.0, run.initial_v_out, static_cast<double>(run.seed)});
        for (std::size_t i = 0; i < run.iterates.size(); ++i) {
            table.rows.push_back(
                {static_cast<double>(i + 1), run.iterates[i], static_cast<double>(run.seed)});
        }
        emit_table(ctx, table, rx.format);
    });

    // fit
    auto* fit_cmd = add_command(app, "fit", "Fit ln P = a + b a_in + c gain to samples");
    struct {
        std::string input;
        std::string unit = "V_T";
        std::string out, format = "json";
    } ft;
    fit_cmd->add_option("--input", ft.input, "CSV of (a_in, gain, power) samples")->required();
    fit_cmd->add_option("--unit", ft.unit, "amplitude unit of the samples: V_T or volt")
        ->check(CLI::IsMember({"V_T", "volt"}))
        ->capture_default_str();
    fit_cmd->add_option("--out", ft.out)->capture_default_str();
    fit_cmd->add_option("--format", ft.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    fit_cmd->callback([&] {
        RunContext ctx{fit_cmd, "fit"};
        ctx.out_path = resolve_out_path(ft.out, ctx.command, ft.format);
        PowerFit fit = fit_power_model(read_samples(ft.input));
        fit.amplitude_unit = amplitude_unit_from_name(ft.unit);
        fit.source = ft.input;
        if (ft.format == "csv") {
            std::string text =
                "# columns: a,b,c,amplitude_unit,rmse,r_square,n_points,source | units: a "
                "dimensionless, b per amplitude-unit, c per unit gain\n";
            text += "a,b,c,amplitude_unit,rmse,r_square,n_points,source\n";
            text += format_double(fit.a) + ',' + format_double(fit.b) + ',' +
                    format_double(fit.c) + ',' + amplitude_unit_name(fit.amplitude_unit) + ',' +
                    format_double(fit.rmse) + ',' + format_double(fit.r_square) + ',' +
                    std::to_string(fit.n_points) + ',' + fit.source + '\n';
            write_text_file(ctx.out_path, text);
            write_manifest(ctx);
        } else {
            emit_json(ctx, fit_to_json(fit));
        }
    });

    // optimize
    auto* optimize = add_command(app, "optimize", "Optimal stage gains at fixed stage count");
    struct {
        std::string fit = "paper-sim";
        double a_in = 2.0, gain = 2.0;
        int k = 2;
        std::string unit;
        std::string out, format = "json";
    } op;
    optimize->add_option("--fit", op.fit, "paper-sim, paper-entity, or fit JSON path")
        ->capture_default_str();
    optimize->add_option("--a_in", op.a_in, "input amplitude in the fit's unit")
        ->capture_default_str();
    optimize->add_option("--gain", op.gain, "total gain")->capture_default_str();
    optimize->add_option("--k", op.k, "stage count")->check(CLI::PositiveNumber)
        ->capture_default_str();
    optimize->add_option("--unit", op.unit, "declared amplitude unit; must match the fit");
    optimize->add_option("--out", op.out)->capture_default_str();
    optimize->add_option("--format", op.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    optimize->callback([&] {
        RunContext ctx{optimize, "optimize"};
        ctx.out_path = resolve_out_path(op.out, ctx.command, op.format);
        const PowerFit fit = load_fit(op.fit);
        check_unit(op.unit, fit);
        const MultistagePlan plan = optimize_gains(fit, op.a_in, op.gain, op.k);
        emit_json(ctx, plan_to_json(plan, op.fit));
    });

    // scheme1
    auto* scheme = add_command(app, "scheme1", "Optimal stage-count search");
    struct {
        std::string fit = "paper-sim";
        double a_in = 2.0, gain = 2.0;
        std::string unit;
        std::string out, format = "json";
    } s1;
    scheme->add_option("--fit", s1.fit)->capture_default_str();
    scheme->add_option("--a_in", s1.a_in, "input amplitude in the fit's unit")
        ->capture_default_str();
    scheme->add_option("--gain", s1.gain, "total gain")->capture_default_str();
    scheme->add_option("--unit", s1.unit, "declared amplitude unit; must match the fit");
    scheme->add_option("--out", s1.out)->capture_default_str();
    scheme->add_option("--format", s1.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    scheme->callback([&] {
        RunContext ctx{scheme, "scheme1"};
        ctx.out_path = resolve_out_path(s1.out, ctx.command, s1.format);
        const PowerFit fit = load_fit(s1.fit);
        check_unit(s1.unit, fit);
        const MultistagePlan plan = scheme1(fit, s1.a_in, s1.gain);
        emit_json(ctx, plan_to_json(plan, s1.fit));
    });

    // stage-map
    auto* stage_map = add_command(app, "stage-map", "Optimal stage count over a grid");
    struct {
        std::string fit = "paper-sim";
        double a_in_min = 2.0, a_in_max = 14.0, a_in_step = 1.0;
        double gain_min = 1.05, gain_max = 6.0, gain_step = 0.25;
        std::string unit;
        std::string out, format = "csv";
    } sm;
    stage_map->add_option("--fit", sm.fit)->capture_default_str();
    stage_map->add_option("--a_in_min", sm.a_in_min)->capture_default_str();
    stage_map->add_option("--a_in_max", sm.a_in_max)->capture_default_str();
    stage_map->add_option("--a_in_step", sm.a_in_step)->capture_default_str();
    stage_map->add_option("--gain_min", sm.gain_min)->capture_default_str();
    stage_map->add_option("--gain_max", sm.gain_max)->capture_default_str();
    stage_map->add_option("--gain_step", sm.gain_step)->capture_default_str();
    stage_map->add_option("--unit", sm.unit, "declared amplitude unit; must match the fit");
    stage_map->add_option("--out", sm.out)->capture_default_str();
    stage_map->add_option("--format", sm.format)->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    stage_map->callback([&] {
        RunContext ctx{stage_map, "stage-map"};
        ctx.out_path = resolve_out_path(sm.out, ctx.command, sm.format);
        const PowerFit fit = load_fit(sm.fit);
        check_unit(sm.unit, fit);
        const auto a_grid = make_grid(sm.a_in_min, sm.a_in_max, sm.a_in_step, "a_in grid");
        const auto g_grid = make_grid(sm.gain_min, sm.gain_max, sm.gain_step, "gain grid");
        Table table;
        table.columns = {"a_in", "gain", "k_opt"};
        table.units = "amplitudes in the fit's unit, k_opt dimensionless";
        for (const StageMapCell& cell : optimal_stage_map(fit, a_grid, g_grid)) {
            table.rows.push_back({cell.a_in, cell.gain, static_cast<double>(cell.k_opt)});
        }
        emit_table(ctx, table, sm.format);
    });

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    std::vector<const char*> argv2;
    argv2.push_back("mesoamp");
    for (const std::string& arg : args) {
        argv2.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}

}

int main(int argc, char** argv) {
    return run(argc, argv);
}
