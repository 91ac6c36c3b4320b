#pragma once

#include <vector>

#include "mesoamp/powerfit.hpp"

namespace mesoamp {

/// A cascade of amplification stages with multiplicative gain composition:
/// stage lambda sees amplitude a_in * prod_{j<lambda} gains[j] and applies
/// gains[lambda].
struct MultistagePlan {
    int k = 1;
    std::vector<double> gains;
    double a_in = 0.0;
    double total_gain = 1.0;
    std::vector<double> per_stage_power;
    double total_power = 0.0;
    double savings_vs_single = 0.0;
};

struct StageMapCell {
    double a_in;
    double gain;
    int k_opt;
};

/// Stage-count search is capped here; improvements vanish far earlier for
/// any exponential fit.
inline constexpr int max_stage_count = 64;

/// Relative tolerance for Scheme 1's strict-improvement comparison.
inline constexpr double scheme1_improvement_tolerance = 1e-9;

/// Evaluate a fixed cascade: per-stage and summed power plus the savings
/// against the single-stage alternative.
[[nodiscard]] MultistagePlan total_power(const PowerFit& fit, double a_in,
                                         const std::vector<double>& gains);

/// Minimize the cascade power over gains in [1, total_gain] with product
/// fixed at total_gain, by projected coordinate descent with golden-section
/// line search.
[[nodiscard]] MultistagePlan optimize_gains(const PowerFit& fit, double a_in, double total_gain,
                                            int k);

/// Derivative of the two-stage power with respect to the first-stage gain,
/// evaluated at g1; zero at an interior optimum.
[[nodiscard]] double two_stage_stationarity_residual(const PowerFit& fit, double a_in,
                                                     double total_gain, double g1);

/// Smallest total gain at which splitting one equal stage of a K-stage
/// cascade in two pays off in the small-amplitude limit; for K = 2 this
/// solves x^2 - x = ln2/c with x = sqrt(G).
[[nodiscard]] double min_beneficial_gain(const PowerFit& fit, int k);

/// Stage-count selection: starting from one stage, increase the stage count
/// while the optimized cascade improves by more than improvement_tolerance
/// (relative), and return the last improving plan. Raising the tolerance
/// collapses near-tie plateaus onto the smaller stage count.
[[nodiscard]] MultistagePlan scheme1(const PowerFit& fit, double a_in, double total_gain,
                                     double improvement_tolerance = scheme1_improvement_tolerance);

/// Optimal stage count per (a_in, gain) grid cell, row-major over a_in then
/// gain.
[[nodiscard]] std::vector<StageMapCell> optimal_stage_map(
    const PowerFit& fit, const std::vector<double>& a_in_grid,
    const std::vector<double>& gain_grid,
    double improvement_tolerance = scheme1_improvement_tolerance);

}
