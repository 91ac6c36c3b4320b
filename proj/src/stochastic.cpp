#include "mesoamp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mesoamp/thermo.hpp"

namespace mesoamp {

std::uint64_t SplitMix64::next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::MatrixXd ChannelSystem::to_generator() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_states, n_states);
    for (const JumpChannel& ch : channels) {
        m(ch.to, ch.from) += ch.rate;
        m(ch.from, ch.from) -= ch.rate;
    }
    return m;
}

namespace {

double fermi(double x) { return fermi_dirac(x, 0.0); }

void append_reservoir(ChannelSystem& sys, int empty, int occupied, const ElectrodeRates& rates,
                      const std::string& junction) {
    sys.channels.push_back({empty, occupied, rates.k_in, junction, +1});
    sys.channels.push_back({occupied, empty, rates.k_out, junction, -1});
}

struct Compiled {
    std::vector<std::vector<int>> state_channels;
    std::vector<double> exit_rates;
};

Compiled compile(const ChannelSystem& sys) {
    if (sys.n_states < 1) {
        throw std::invalid_argument("gillespie: channel system has no states");
    }
    Compiled c;
    c.state_channels.resize(static_cast<std::size_t>(sys.n_states));
    c.exit_rates.assign(static_cast<std::size_t>(sys.n_states), 0.0);
    for (std::size_t i = 0; i < sys.channels.size(); ++i) {
        const JumpChannel& ch = sys.channels[i];
        if (ch.from < 0 || ch.from >= sys.n_states || ch.to < 0 || ch.to >= sys.n_states) {
            throw std::invalid_argument("gillespie: channel state out of range");
        }
        if (!(ch.rate >= 0.0)) {
            throw std::invalid_argument("gillespie: negative channel rate");
        }
        if (ch.rate == 0.0) {
            continue;
        }
        c.state_channels[static_cast<std::size_t>(ch.from)].push_back(static_cast<int>(i));
        c.exit_rates[static_cast<std::size_t>(ch.from)] += ch.rate;
    }
    return c;
}

struct BatchResult {
    double elapsed = 0.0;
    int final_state = 0;
    bool absorbed = false;
    std::vector<std::int64_t> channel_net;
};

/// Run exactly n_events jumps (fewer if absorbed), accumulating per-channel
/// net electron counts; no per-event storage.
BatchResult run_batch(const ChannelSystem& sys, const Compiled& c, int state, int n_events,
                      SplitMix64& rng) {
    BatchResult result;
    result.channel_net.assign(sys.channels.size(), 0);
    for (int e = 0; e < n_events; ++e) {
        const double exit_rate = c.exit_rates[static_cast<std::size_t>(state)];
        if (!(exit_rate > 0.0)) {
            result.absorbed = true;
            break;
        }
        result.elapsed += -std::log(rng.next_uniform_open()) / exit_rate;
        const double target = rng.next_uniform() * exit_rate;
        const auto& options = c.state_channels[static_cast<std::size_t>(state)];
        int chosen = options.back();
        double acc = 0.0;
        for (const int idx : options) {
            acc += sys.channels[static_cast<std::size_t>(idx)].rate;
            if (target < acc) {
                chosen = idx;
                break;
            }
        }
        const JumpChannel& ch = sys.channels[static_cast<std::size_t>(chosen)];
        result.channel_net[static_cast<std::size_t>(chosen)] += ch.sign;
        state = ch.to;
    }
    result.final_state = state;
    return result;
}

}

ChannelSystem channels_from_two_state(const TransistorLevel& level, double v_in,
                                      const std::vector<Reservoir>& reservoirs) {
    if (reservoirs.empty()) {
        throw std::invalid_argument("channels_from_two_state: need at least one reservoir");
    }
    const double eps = level_energy(level, v_in);
    ChannelSystem sys;
    sys.n_states = 2;
    for (const Reservoir& r : reservoirs) {
        append_reservoir(sys, 0, 1, electrode_rates(eps, r.mu, r.gamma), r.name);
    }
    return sys;
}

ChannelSystem channels_from_csvac(const CsvacConfig& cfg, double v_in, double v_out) {
    const double eps_p = cfg.pmos_reference_energy + v_in;
    const double eps_n = cfg.nmos_reference_energy - v_in;
    const double mu_s = -v_out;
    const ElectrodeRates p_drain = electrode_rates(eps_p, -cfg.v_d, cfg.gamma);
    const ElectrodeRates p_source = electrode_rates(eps_p, mu_s, cfg.gamma);
    const ElectrodeRates n_drain = electrode_rates(eps_n, cfg.v_d, cfg.gamma);
    const ElectrodeRates n_source = electrode_rates(eps_n, mu_s, cfg.gamma);
    const ExchangeRates exchange = inter_transistor_rates(eps_p, eps_n, cfg.gamma);

    ChannelSystem sys;
    sys.n_states = 4;
    append_reservoir(sys, 0, 1, p_drain, "dP");
    append_reservoir(sys, 2, 3, p_drain, "dP");
    append_reservoir(sys, 0, 1, p_source, "sP");
    append_reservoir(sys, 2, 3, p_source, "sP");
    append_reservoir(sys, 0, 2, n_drain, "dN");
    append_reservoir(sys, 1, 3, n_drain, "dN");
    append_reservoir(sys, 0, 2, n_source, "sN");
    append_reservoir(sys, 1, 3, n_source, "sN");
    sys.channels.push_back({2, 1, exchange.k_pn, "x", +1});
    sys.channels.push_back({1, 2, exchange.k_np, "x", -1});
    return sys;
}

ChannelSystem channels_from_generator(const Eigen::MatrixXd& generator) {
    const auto n = generator.rows();
    if (n < 1 || generator.cols() != n) {
        throw std::invalid_argument("channels_from_generator: generator must be square");
    }
    ChannelSystem sys;
    sys.n_states = static_cast<int>(n);
    for (int from = 0; from < n; ++from) {
        for (int to = 0; to < n; ++to) {
            if (to == from) {
                continue;
            }
            const double rate = generator(to, from);
            if (rate > 0.0) {
                std::ostringstream label;
                label << from << "->" << to;
                sys.channels.push_back({from, to, rate, label.str(), +1});
            }
        }
    }
    return sys;
}

Trajectory gillespie_simulate(const ChannelSystem& system, int initial_state, double total_time,
                              std::uint64_t seed) {
    if (!(total_time > 0.0)) {
        throw std::invalid_argument("gillespie_simulate: total_time must be positive");
    }
    if (initial_state < 0 || initial_state >= system.n_states) {
        throw std::invalid_argument("gillespie_simulate: initial state out of range");
    }
    const Compiled c = compile(system);

    Trajectory traj;
    traj.seed = seed;
    traj.state_times.assign(static_cast<std::size_t>(system.n_states), 0.0);
    for (const JumpChannel& ch : system.channels) {
        traj.channel_counts.emplace(ch.junction, ChannelCount{});
    }

    SplitMix64 rng(seed);
    double t = 0.0;
    int state = initial_state;
    while (true) {
        const double exit_rate = c.exit_rates[static_cast<std::size_t>(state)];
        if (!(exit_rate > 0.0)) {
            traj.absorbed = true;
            break;
        }
        const double dt = -std::log(rng.next_uniform_open()) / exit_rate;
        if (t + dt >= total_time) {
            traj.state_times[static_cast<std::size_t>(state)] += total_time - t;
            t = total_time;
            break;
        }
        t += dt;
        traj.state_times[static_cast<std::size_t>(state)] += dt;
        const double target = rng.next_uniform() * exit_rate;
        const auto& options = c.state_channels[static_cast<std::size_t>(state)];
        int chosen = options.back();
        double acc = 0.0;
        for (const int idx : options) {
            acc += system.channels[static_cast<std::size_t>(idx)].rate;
            if (target < acc) {
                chosen = idx;
                break;
            }
        }
        const JumpChannel& ch = system.channels[static_cast<std::size_t>(chosen)];
        traj.events.push_back({t, state, ch.to, chosen});
        ChannelCount& count = traj.channel_counts[ch.junction];
        count.events += 1;
        count.net += ch.sign;
        state = ch.to;
    }
    traj.final_state = state;
    traj.total_time = t;
    return traj;
}

double empirical_current(const Trajectory& traj, const std::string& channel) {
    if (!(traj.total_time > 0.0)) {
        throw std::invalid_argument("empirical_current: trajectory has no duration");
    }
    const auto it = traj.channel_counts.find(channel);
    if (it == traj.channel_counts.end()) {
        throw std::invalid_argument("empirical_current: unknown channel " + channel);
    }
    return static_cast<double>(it->second.net) / traj.total_time;
}

double empirical_occupancy(const Trajectory& traj, int state) {
    if (!(traj.total_time > 0.0)) {
        throw std::invalid_argument("empirical_occupancy: trajectory has no duration");
    }
    if (state < 0 || state >= static_cast<int>(traj.state_times.size())) {
        throw std::invalid_argument("empirical_occupancy: state out of range");
    }
    return traj.state_times[static_cast<std::size_t>(state)] / traj.total_time;
}

RelaxationRun stochastic_vout_relaxation(const CsvacConfig& cfg, double v_in, std::uint64_t seed,
                                         double step_size, int batch_events) {
    if (!(step_size > 0.0)) {
        throw std::invalid_argument("stochastic_vout_relaxation: step_size must be positive");
    }
    if (batch_events < 1) {
        throw std::invalid_argument("stochastic_vout_relaxation: batch_events must be positive");
    }
    constexpr int batch_cap = 400;
    constexpr int min_batches = 20;
    constexpr int refine_batches = 40;
    constexpr double smoothing = 0.2;
    constexpr double settle_threshold = 0.04;
    constexpr double max_step = 1.5;

    RelaxationRun run;
    run.seed = seed;
    SplitMix64 rng(seed);
    double v = cfg.v_d * (2.0 * rng.next_uniform() - 1.0);
    run.initial_v_out = v;

    int state = 0;
    const double load_scale = 0.25 * cfg.gamma_l;
    const auto batch_update = [&](double eta) {
        const ChannelSystem sys = channels_from_csvac(cfg, v_in, v);
        const Compiled c = compile(sys);
        const BatchResult batch = run_batch(sys, c, state, batch_events, rng);
        state = batch.final_state;
        double j_ps = 0.0;
        double j_ns = 0.0;
        for (std::size_t i = 0; i < sys.channels.size(); ++i) {
            const JumpChannel& ch = sys.channels[i];
            const double flow = static_cast<double>(batch.channel_net[i]) / batch.elapsed;
            if (ch.junction == "sP") {
                j_ps -= flow;
            } else if (ch.junction == "sN") {
                j_ns -= flow;
            }
        }
        const double balance = j_ps + j_ns + 0.5 * cfg.gamma_l * (fermi(-v) - 0.5);
        const double delta = std::clamp(-eta * balance / load_scale, -max_step, max_step);
        v = std::clamp(v + delta, -cfg.v_d, cfg.v_d);
        run.iterates.push_back(v);
        return delta;
    };

    double ema = 0.0;
    int settled_at = 0;
    for (int t = 1; t <= batch_cap; ++t) {
        const double delta = batch_update(step_size / std::sqrt(static_cast<double>(t)));
        ema = t == 1 ? std::abs(delta) : (1.0 - smoothing) * ema + smoothing * std::abs(delta);
        if (t >= min_batches && ema < settle_threshold) {
            settled_at = t;
            break;
        }
    }
    if (settled_at == 0) {
        run.converged = false;
        run.final_v_out = v;
        return run;
    }
    const double eta = step_size / std::sqrt(static_cast<double>(settled_at));
    double sum = 0.0;
    for (int i = 0; i < refine_batches; ++i) {
        batch_update(eta);
        sum += v;
    }
    run.converged = true;
    run.final_v_out = sum / refine_batches;
    return run;
}

}
