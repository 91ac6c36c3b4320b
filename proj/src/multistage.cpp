#include "mesoamp/multistage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mesoamp {

namespace {

constexpr double golden_ratio_step = 0.6180339887498949;

/// Minimize a unimodal function on [lo, hi] by golden-section search.
template <typename F>
double golden_minimize(F&& f, double lo, double hi) {
    double a = lo;
    double b = hi;
    double x1 = b - golden_ratio_step * (b - a);
    double x2 = a + golden_ratio_step * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < 90; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - golden_ratio_step * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + golden_ratio_step * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

double cascade_power(const PowerFit& fit, double a_in, const std::vector<double>& gains) {
    double amplitude = a_in;
    double total = 0.0;
    for (const double g : gains) {
        total += std::exp(fit.a + fit.b * amplitude + fit.c * g);
        amplitude *= g;
    }
    return total;
}

MultistagePlan make_plan(const PowerFit& fit, double a_in, std::vector<double> gains) {
    MultistagePlan plan;
    plan.k = static_cast<int>(gains.size());
    plan.a_in = a_in;
    plan.gains = std::move(gains);
    plan.per_stage_power.reserve(plan.gains.size());
    double amplitude = a_in;
    double total_gain = 1.0;
    double total = 0.0;
    for (const double g : plan.gains) {
        const double p = evaluate_power(fit, amplitude, g);
        plan.per_stage_power.push_back(p);
        total += p;
        amplitude *= g;
        total_gain *= g;
    }
    plan.total_gain = total_gain;
    plan.total_power = total;
    plan.savings_vs_single = 1.0 - total / evaluate_power(fit, a_in, total_gain);
    return plan;
}

}

MultistagePlan total_power(const PowerFit& fit, double a_in,
                           const std::vector<double>& gains) {
    if (gains.empty()) {
        throw std::invalid_argument("total_power: need at least one stage");
    }
    for (const double g : gains) {
        if (!(g >= 1.0 - 1e-9)) {
            throw std::invalid_argument("total_power: every stage gain must be at least 1");
        }
    }
    return make_plan(fit, a_in, gains);
}

MultistagePlan optimize_gains(const PowerFit& fit, double a_in, double total_gain, int k) {
    if (!(total_gain >= 1.0)) {
        throw std::invalid_argument("optimize_gains: total_gain must be at least 1");
    }
    if (k < 1) {
        throw std::invalid_argument("optimize_gains: stage count must be at least 1");
    }
    if (k == 1) {
        return make_plan(fit, a_in, {total_gain});
    }

    const auto n_free = static_cast<std::size_t>(k - 1);
    const double equal = std::pow(total_gain, 1.0 / k);
    std::vector<double> gains(static_cast<std::size_t>(k), equal);
    const auto close_last = [&]() {
        double partial = 1.0;
        for (std::size_t i = 0; i < n_free; ++i) {
            partial *= gains[i];
        }
        gains[n_free] = std::max(1.0, total_gain / partial);
    };
    close_last();

    double best = cascade_power(fit, a_in, gains);
    for (int sweep = 0; sweep < 200; ++sweep) {
        const double before = best;
        for (std::size_t i = 0; i < n_free; ++i) {
            double partial_others = 1.0;
            for (std::size_t j = 0; j < n_free; ++j) {
                if (j != i) {
                    partial_others *= gains[j];
                }
            }
            const double upper = std::max(1.0, total_gain / partial_others);
            const auto objective = [&](double g) {
                gains[i] = g;
                close_last();
                return cascade_power(fit, a_in, gains);
            };
            const double g_star = golden_minimize(objective, 1.0, upper);
            const double f_star = objective(g_star);
            const double f_lo = objective(1.0);
            if (f_lo < f_star) {
                gains[i] = 1.0;
            } else {
                gains[i] = g_star;
            }
            close_last();
        }
        best = cascade_power(fit, a_in, gains);
        if (before - best <= 1e-9 * std::abs(before)) {
            break;
        }
    }
    return make_plan(fit, a_in, gains);
}

double two_stage_stationarity_residual(const PowerFit& fit, double a_in, double total_gain,
                                       double g1) {
    if (!(g1 >= 1.0 - 1e-9) || !(g1 <= total_gain + 1e-9)) {
        throw std::invalid_argument("two_stage_stationarity_residual: g1 outside [1, G]");
    }
    const double stage1 = std::exp(fit.a + fit.b * a_in + fit.c * g1);
    const double stage2 = std::exp(fit.a + fit.b * a_in * g1 + fit.c * total_gain / g1);
    return fit.c * stage1 + (fit.b * a_in - fit.c * total_gain / (g1 * g1)) * stage2;
}

double min_beneficial_gain(const PowerFit& fit, int k) {
    if (k < 2) {
        throw std::invalid_argument("min_beneficial_gain: stage count must be at least 2");
    }
    if (!(fit.c > 0.0)) {
        throw std::domain_error("min_beneficial_gain: requires a positive gain coefficient");
    }
    const double kd = static_cast<double>(k);
    const auto margin = [&](double total_gain) {
        const double x = std::pow(total_gain, 1.0 / kd);
        return fit.c * (x * x - x) - std::numbers::ln2_v<double>;
    };
    double lo = 1.0;
    double hi = 2.0;
    while (margin(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) {
            throw std::runtime_error("min_beneficial_gain: no threshold found");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        if (margin(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

MultistagePlan scheme1(const PowerFit& fit, double a_in, double total_gain,
                       double improvement_tolerance) {
    if (!(total_gain >= 1.0)) {
        throw std::invalid_argument("scheme1: total_gain must be at least 1");
    }
    if (!(improvement_tolerance >= 0.0)) {
        throw std::invalid_argument("scheme1: improvement tolerance must be non-negative");
    }
    MultistagePlan best = optimize_gains(fit, a_in, total_gain, 1);
    MultistagePlan two = optimize_gains(fit, a_in, total_gain, 2);
    if (best.total_power <= two.total_power) {
        return best;
    }
    best = std::move(two);
    for (int k = 3; k <= max_stage_count; ++k) {
        MultistagePlan next = optimize_gains(fit, a_in, total_gain, k);
        if (next.total_power < best.total_power * (1.0 - improvement_tolerance)) {
            best = std::move(next);
        } else {
            break;
        }
    }
    return best;
}

std::vector<StageMapCell> optimal_stage_map(const PowerFit& fit,
                                            const std::vector<double>& a_in_grid,
                                            const std::vector<double>& gain_grid,
                                            double improvement_tolerance) {
    if (a_in_grid.empty() || gain_grid.empty()) {
        throw std::invalid_argument("optimal_stage_map: empty grid");
    }
    std::vector<StageMapCell> cells;
    cells.reserve(a_in_grid.size() * gain_grid.size());
    for (const double a_in : a_in_grid) {
        for (const double gain : gain_grid) {
            cells.push_back(
                {a_in, gain, scheme1(fit, a_in, gain, improvement_tolerance).k});
        }
    }
    return cells;
}

}
