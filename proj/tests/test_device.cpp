#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "mesoamp/device.hpp"
#include "mesoamp/thermo.hpp"

using namespace mesoamp;

namespace {

std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double v = lo; v <= hi + 1e-12; v += step) {
        g.push_back(v);
    }
    return g;
}

}

TEST_SUITE("device") {

TEST_CASE("gate voltage shifts the level against its kind") {
    const TransistorLevel nmos{TransistorType::nmos, 2.0};
    const TransistorLevel pmos{TransistorType::pmos, 2.0};
    CHECK(level_energy(nmos, 3.0) == -1.0);
    CHECK(level_energy(pmos, 3.0) == 5.0);
    CHECK(level_energy(nmos, 0.0) == 2.0);
}

TEST_CASE("electrode rates sum to the coupling exactly") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    std::uniform_real_distribution<double> g(1e-4, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double gamma = g(rng);
        const ElectrodeRates rates = electrode_rates(u(rng), u(rng), gamma);
        CHECK(rates.k_in + rates.k_out == gamma);
        CHECK(rates.k_in >= 0.0);
        CHECK(rates.k_out >= 0.0);
    }
}

TEST_CASE("electrode rates satisfy detailed balance") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int i = 0; i < 1000; ++i) {
        const double energy = u(rng);
        const double mu = u(rng);
        const ElectrodeRates rates = electrode_rates(energy, mu, 0.7);
        CHECK(detailed_balance_residual(rates.k_in, rates.k_out, mu, energy) < 1e-9);
    }
}

TEST_CASE("two-state generator conserves probability") {
    const TransistorLevel level{TransistorType::nmos, 0.0};
    const std::vector<Reservoir> reservoirs = {{"d", -15.0, 0.2}, {"s", 0.0, 0.2}};
    const Eigen::MatrixXd m = build_two_state_generator(level, 1.3, reservoirs);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 2);
    for (int c = 0; c < m.cols(); ++c) {
        CHECK(std::abs(m.col(c).sum()) < 1e-12);
    }
}

TEST_CASE("steady state matches the two-state closed form") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mu(-20.0, 20.0);
    std::uniform_real_distribution<double> gam(1e-3, 2.0);
    std::uniform_real_distribution<double> vin(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const TransistorLevel level{i % 2 == 0 ? TransistorType::nmos : TransistorType::pmos,
                                    vin(rng)};
        const std::vector<Reservoir> reservoirs = {{"d", mu(rng), gam(rng)},
                                                   {"s", mu(rng), gam(rng)}};
        const double v_in = vin(rng);
        const Eigen::MatrixXd m = build_two_state_generator(level, v_in, reservoirs);
        const Eigen::VectorXd p = steady_state(m);
        REQUIRE(p.size() == 2);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));

        const double energy = level_energy(level, v_in);
        double k_in = 0.0;
        double k_out = 0.0;
        for (const Reservoir& r : reservoirs) {
            const ElectrodeRates rates = electrode_rates(energy, r.mu, r.gamma);
            k_in += rates.k_in;
            k_out += rates.k_out;
        }
        CHECK(std::abs(p(1) - k_in / (k_in + k_out)) < 1e-12);
    }
}

TEST_CASE("steady-state electrode currents conserve charge") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> mu(-20.0, 20.0);
    std::uniform_real_distribution<double> gam(1e-3, 2.0);
    for (int i = 0; i < 200; ++i) {
        const TransistorLevel level{TransistorType::nmos, 0.0};
        const std::vector<Reservoir> reservoirs = {{"d", mu(rng), gam(rng)},
                                                   {"s", mu(rng), gam(rng)}};
        const double v_in = mu(rng) / 4.0;
        const Eigen::MatrixXd m = build_two_state_generator(level, v_in, reservoirs);
        const double n = steady_state(m)(1);
        const double energy = level_energy(level, v_in);
        double total = 0.0;
        for (const Reservoir& r : reservoirs) {
            total += electrode_current(energy, r, n);
        }
        CHECK(std::abs(total) < 1e-10);
    }
}

TEST_CASE("equilibrium occupancy is the Fermi function and carries no current") {
    const TransistorLevel level{TransistorType::nmos, 1.5};
    const std::vector<Reservoir> reservoirs = {{"d", -2.0, 0.3}, {"s", -2.0, 0.8}};
    const double v_in = 0.4;
    const Eigen::MatrixXd m = build_two_state_generator(level, v_in, reservoirs);
    const double n = steady_state(m)(1);
    const double energy = level_energy(level, v_in);
    CHECK(n == doctest::Approx(fermi_dirac(energy, -2.0)).epsilon(1e-12));
    for (const Reservoir& r : reservoirs) {
        CHECK(std::abs(electrode_current(energy, r, n)) < 1e-12);
    }
}

TEST_CASE("electrode current matches the rate difference") {
    const Reservoir r{"d", -15.0, 0.2};
    const double energy = 0.0;
    const double n = 0.25;
    const double f = fermi_dirac(energy, r.mu);
    CHECK(electrode_current(energy, r, n) == doctest::Approx(r.gamma * (f - n)).epsilon(1e-15));
    CHECK_THROWS_AS(electrode_current(energy, r, 1.5), std::domain_error);
}

TEST_CASE("NMOS transfer characteristic pinches off at -5 with V_d = 15") {
    const TransistorLevel level{TransistorType::nmos, 0.0};
    const auto tc = sweep_transfer_characteristic(level, 15.0, grid(-10.0, 10.0, 0.5));
    CHECK(tc.pinch_off == -5.0);
    CHECK(tc.saturation_current == doctest::Approx(0.1).epsilon(2e-2));
    for (std::size_t i = 1; i < tc.points.size(); ++i) {
        CHECK(tc.points[i].v_in > tc.points[i - 1].v_in);
        if (tc.points[i].v_in <= 7.5) {
            CHECK(tc.points[i].i_d >= tc.points[i - 1].i_d - 1e-12);
        }
    }
    CHECK(tc.points.front().i_d < 1e-4);
}

TEST_CASE("PMOS transfer characteristic mirrors the NMOS one") {
    const TransistorLevel pmos{TransistorType::pmos, 0.0};
    const auto tc = sweep_transfer_characteristic(pmos, 15.0, grid(-10.0, 10.0, 0.5));
    CHECK(tc.pinch_off == 5.0);
    const TransistorLevel nmos{TransistorType::nmos, 0.0};
    const auto nc = sweep_transfer_characteristic(nmos, 15.0, grid(-10.0, 10.0, 0.5));
    for (std::size_t i = 0; i < tc.points.size(); ++i) {
        const auto& mirrored = nc.points[nc.points.size() - 1 - i];
        CHECK(tc.points[i].i_d == doctest::Approx(mirrored.i_d).epsilon(1e-12));
    }
}

TEST_CASE("transfer current matches the split-occupancy formula") {
    const TransistorLevel level{TransistorType::nmos, 0.0};
    const auto tc = sweep_transfer_characteristic(level, 15.0, {0.0});
    const double f_d = fermi_dirac(0.0, -15.0);
    const double f_s = fermi_dirac(0.0, 0.0);
    CHECK(tc.points.front().i_d == doctest::Approx(0.2 * (f_s - f_d) / 2.0).epsilon(1e-12));
}

TEST_CASE("pinch-off is unreported when the grid never leaves saturation") {
    const TransistorLevel level{TransistorType::nmos, 0.0};
    const auto tc = sweep_transfer_characteristic(level, 15.0, grid(5.0, 10.0, 0.5));
    CHECK(std::isnan(tc.pinch_off));
}

TEST_CASE("output characteristic starts at zero and saturates") {
    const TransistorLevel level{TransistorType::nmos, 0.0};
    const auto curves = sweep_output_characteristic(level, {2.5, 5.0}, grid(0.0, 15.0, 0.5));
    REQUIRE(curves.size() == 2);
    for (const auto& curve : curves) {
        CHECK(std::abs(curve.points.front().i_d) < 1e-14);
        const double at_14 = curve.points[curve.points.size() - 3].i_d;
        const double at_15 = curve.points.back().i_d;
        CHECK(std::abs(at_15 - at_14) < 1e-2 * std::abs(at_15));
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].i_d >= curve.points[i - 1].i_d - 1e-12);
        }
    }
}

}
