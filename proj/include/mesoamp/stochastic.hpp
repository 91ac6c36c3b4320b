#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mesoamp/circuits.hpp"
#include "mesoamp/device.hpp"

namespace mesoamp {

/// Identifier of the pseudo-random generator stored alongside results.
inline constexpr std::string_view rng_algorithm = "splitmix64";

/// Deterministic 64-bit generator (splitmix64). Uniforms use the top 53
/// bits; waiting-time draws use an open-interval variant so sampled times
/// are strictly positive.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double next_uniform();

    /// Uniform on the open interval (0, 1).
    double next_uniform_open();

private:
    std::uint64_t state_;
};

/// One elementary jump between chain states through a named junction.
/// sign is the electron count through the junction per event (+1 into the
/// level side, -1 out).
struct JumpChannel {
    int from;
    int to;
    double rate;
    std::string junction;
    int sign;
};

/// A continuous-time Markov chain presented as labelled jump channels, so
/// trajectories can attribute events to physical junctions even when two
/// junctions connect the same pair of states.
struct ChannelSystem {
    int n_states = 0;
    std::vector<JumpChannel> channels;

    [[nodiscard]] Eigen::MatrixXd to_generator() const;
};

/// Channel system of a single transistor level coupled to reservoirs;
/// junction labels are the reservoir names.
[[nodiscard]] ChannelSystem channels_from_two_state(const TransistorLevel& level, double v_in,
                                                    const std::vector<Reservoir>& reservoirs);

/// Channel system of the complementary stage at a frozen output voltage;
/// junction labels are dP, sP, dN, sN and x (inter-level exchange, counted
/// positive in the NMOS-to-PMOS direction).
[[nodiscard]] ChannelSystem channels_from_csvac(const CsvacConfig& cfg, double v_in,
                                                double v_out);

/// One channel per nonzero off-diagonal entry, labelled "from->to".
[[nodiscard]] ChannelSystem channels_from_generator(const Eigen::MatrixXd& generator);

struct TrajectoryEvent {
    double time;
    int from_state;
    int to_state;
    int channel;
};

struct ChannelCount {
    std::uint64_t events = 0;
    std::int64_t net = 0;
};

struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<TrajectoryEvent> events;
    double total_time = 0.0;
    std::map<std::string, ChannelCount> channel_counts;
    std::vector<double> state_times;
    int final_state = 0;
    bool absorbed = false;
};

struct RelaxationRun {
    std::uint64_t seed = 0;
    double initial_v_out = 0.0;
    std::vector<double> iterates;
    bool converged = false;
    double final_v_out = 0.0;
};

/// Exact stochastic simulation: exponential waiting times from the total
/// exit rate, categorical channel choice, deterministic given the seed.
/// Ends early with the absorbed flag if all exit rates vanish.
[[nodiscard]] Trajectory gillespie_simulate(const ChannelSystem& system, int initial_state,
                                            double total_time, std::uint64_t seed);

/// Time-averaged electron current through a junction: net count divided by
/// the trajectory duration.
[[nodiscard]] double empirical_current(const Trajectory& traj, const std::string& channel);

/// Time-averaged occupation probability of a state along a trajectory.
[[nodiscard]] double empirical_occupancy(const Trajectory& traj, int state);

/// Stochastic root search for the output voltage: starting from a uniform
/// draw on [-v_d, v_d], batches of Gillespie events estimate the node
/// balance and the voltage steps against it with a 1/sqrt(t) decaying step,
/// followed by an averaging refinement phase.
[[nodiscard]] RelaxationRun stochastic_vout_relaxation(const CsvacConfig& cfg, double v_in,
                                                       std::uint64_t seed,
                                                       double step_size = 0.5,
                                                       int batch_events = 4000);

}
