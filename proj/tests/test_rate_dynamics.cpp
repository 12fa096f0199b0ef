#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "gainswitch/errors.hpp"
#include "gainswitch/pulse_metrics.hpp"
#include "gainswitch/rate_dynamics.hpp"
#include "gainswitch/reference_oracle.hpp"

using namespace gainswitch;

namespace {

constexpr double kJdc = 4.8e6;
constexpr double kJacSignal = 2.4e8;
constexpr double kJacDecoy = 2.0e8;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

DriveWaveform single_pulse(double j_ac)
{
    DriveWaveform d;
    d.j_dc = kJdc;
    d.j_ac = j_ac;
    return d;
}

} // namespace

TEST_CASE("derivatives at the DC point with no photons")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    const auto d = derivatives({th.n_dc, 0.0}, kJdc, th, c);
    CHECK(std::abs(d.n) <= 1e-12 * th.n_dc / th.tau_n);
    CHECK(rel(d.s, c.gamma * c.beta_sp * th.n_dc / th.tau_n) < 1e-15);
}

TEST_CASE("derivatives at transparency")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    for (double s : {0.0, 1e18, 1e22}) {
        const auto d = derivatives({th.n0, s}, 0.0, th, c);
        CHECK(rel(d.n, -th.n0 / th.tau_n) < 1e-15);
    }
}

TEST_CASE("derivatives at threshold: gain cancels cavity loss")
{
    const LaserConstants c;
    for (double t : {15.0, 25.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        for (double s : {1e20, 1e23}) {
            const auto d = derivatives({th.n_th, s}, kJdc, th, c);
            const double spont = c.gamma * c.beta_sp * th.n_th / th.tau_n;
            // Residual of the cancelling terms is bounded by their rounding.
            CHECK(std::abs(d.s - spont) < 1e-12 * s / c.tau_p);
        }
    }
}

TEST_CASE("steady_state_s closed form")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    CHECK(steady_state_s(th, c, 0.0) == 0.0);
    CHECK(rel(steady_state_s(th, c, th.n0), c.gamma * c.beta_sp * th.n0 * c.tau_p / th.tau_n)
          < 1e-14);
    // High-precision evaluation of the closed form.
    CHECK(rel(steady_state_s(th, c, th.n_dc), 1.7822506184886398e17) < 1e-13);
    CHECK(rel(steady_state_s(thermal_state(c, 15.0, kJdc), c, thermal_state(c, 15.0, kJdc).n_dc),
              1.8898851312341201e17)
          < 1e-13);
    CHECK(rel(steady_state_s(thermal_state(c, 45.0, kJdc), c, thermal_state(c, 45.0, kJdc).n_dc),
              1.6281974382915929e17)
          < 1e-13);
}

TEST_CASE("steady_state_s agrees with pseudo-time iteration")
{
    const LaserConstants c;
    for (double t : {15.0, 25.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        // Relax ds/dt = 0 at fixed n; the step is below the inverse decay rate.
        const double n = th.n_dc;
        const double h = 1e-12;
        double s = 0.0;
        for (int i = 0; i < 400; ++i) {
            s += h * derivatives({n, s}, kJdc, th, c).s;
        }
        CHECK(rel(steady_state_s(th, c, n), s) < 1e-12);
    }
}

TEST_CASE("steady_state_s errors")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    CHECK_THROWS_AS(steady_state_s(th, c, th.n_th), NoSteadyState);
    CHECK_THROWS_AS(steady_state_s(th, c, 2.0 * th.n_th), NoSteadyState);
    CHECK_THROWS_AS(steady_state_s(th, c, -1.0), InvalidInput);
}

TEST_CASE("DriveWaveform current and edges")
{
    DriveWaveform d = single_pulse(kJacSignal);
    CHECK(d.current(-1e-12) == kJdc);
    CHECK(d.current(0.0) == kJdc + kJacSignal);
    CHECK(d.current(99.9e-12) == kJdc + kJacSignal);
    CHECK(d.current(100e-12) == kJdc);
    CHECK_FALSE(d.periodic());

    d.period = 1.25e-9;
    d.n_pulses = 2;
    d.start_offset = 10e-12;
    CHECK(d.edge(1) == doctest::Approx(1.26e-9));
    CHECK(d.current(1.30e-9) == kJdc + kJacSignal);
    CHECK(d.current(2.60e-9) == kJdc);
    CHECK(d.current(1.2e-9) == kJdc);

    d.period = 50e-12;
    CHECK_THROWS_AS(d.validate(), InvalidInput);
    d = single_pulse(0.0);
    CHECK_THROWS_AS(d.validate(), InvalidInput);
    d = single_pulse(kJacSignal);
    d.n_pulses = 0;
    CHECK_THROWS_AS(d.validate(), InvalidInput);
}

TEST_CASE("DC equilibrium solves both rate equations")
{
    const LaserConstants c;
    for (double t : {15.0, 25.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        const auto eq = dc_equilibrium(th, c);
        const auto d = derivatives(eq, kJdc, th, c);
        CHECK(std::abs(d.n) < 1e-12 * eq.n / th.tau_n);
        CHECK(std::abs(d.s) < 1e-9 * eq.s / c.tau_p);
        // Photon absorption below transparency shifts it slightly above n_dc.
        CHECK(eq.n > th.n_dc);
        CHECK(rel(eq.n, th.n_dc) < 1e-3);
    }
}

TEST_CASE("DC fixed point stays fixed over 5 ns")
{
    const LaserConstants c;
    for (double t : {15.0, 25.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        DriveWaveform d = single_pulse(kJacSignal);
        d.start_offset = 1.0; // never fires inside the window
        const auto eq = dc_equilibrium(th, c);
        const auto traj = integrate(th, c, d, kDefaultTrainStep, 5e-9, eq);
        for (std::size_t i = 0; i < traj.size(); ++i) {
            REQUIRE(rel(traj.n[i], eq.n) < 1e-9);
            REQUIRE(rel(traj.s[i], eq.s) < 1e-9);
        }

        // The default start (n_dc, steady_state_s) relaxes onto it.
        const auto from_dc = integrate(th, c, d, kDefaultTrainStep, 15e-9);
        CHECK(rel(from_dc.n.back(), eq.n) < 1e-5);
        for (double n : from_dc.n) {
            REQUIRE(rel(n, th.n_dc) < 1e-3);
        }
    }
}

TEST_CASE("trajectory has uniform non-negative samples")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 45.0, kJdc);
    const auto traj = integrate(th, c, single_pulse(kJacSignal), kDefaultPulseStep, 1e-9);
    REQUIRE(traj.size() == 100001);
    CHECK(traj.dt() == doctest::Approx(kDefaultPulseStep));
    for (std::size_t i = 0; i < traj.size(); ++i) {
        REQUIRE(traj.n[i] >= 0.0);
        REQUIRE(traj.s[i] >= 0.0);
        if (i > 0) {
            REQUIRE(traj.times[i] > traj.times[i - 1]);
        }
    }
}

TEST_CASE("below-threshold relaxation follows the carrier lifetime")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    DriveWaveform d = single_pulse(kJacSignal);
    d.start_offset = 1.0;
    const double n_start = 0.5 * (th.n_dc + th.n0);
    const auto traj = integrate(th, c, d, kDefaultTrainStep, 8e-9,
                                {n_start, steady_state_s(th, c, n_start)});

    double prev = traj.n.front();
    for (std::size_t i = 1; i < traj.size(); ++i) {
        REQUIRE(traj.n[i] <= prev);
        prev = traj.n[i];
    }

    // Fit one decade of decay of the residual, after the photon transient.
    const double r_start = 0.8 * (n_start - th.n_dc);
    const double r_end = 0.1 * r_start;
    std::size_t i0 = 0;
    while (traj.n[i0] - th.n_dc > r_start) {
        ++i0;
    }
    std::size_t i1 = i0;
    while (traj.n[i1] - th.n_dc > r_end) {
        ++i1;
    }
    const double tau = (traj.times[i1] - traj.times[i0])
                       / std::log((traj.n[i0] - th.n_dc) / (traj.n[i1] - th.n_dc));
    CHECK(rel(tau, th.tau_n) < 0.02);
}

TEST_CASE("carrier density sits at threshold when photon density peaks")
{
    const LaserConstants c;
    for (double t : {15.0, 25.0, 45.0}) {
        for (double j_ac : {kJacSignal, kJacDecoy}) {
            const auto th = thermal_state(c, t, kJdc);
            const auto traj = integrate(th, c, single_pulse(j_ac), kDefaultPulseStep, 1e-9);
            std::size_t k = 0;
            for (std::size_t i = 1; i < traj.size(); ++i) {
                if (traj.s[i] > traj.s[k]) {
                    k = i;
                }
            }
            CHECK(rel(traj.n[k], th.n_th) < 0.01);
        }
    }
}

TEST_CASE("step halving changes metrics by less than 0.1 percent")
{
    const LaserConstants c;
    for (double t : {15.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        const double horizon = 9e-9;
        const auto coarse = extract_metrics(
            integrate(th, c, single_pulse(kJacSignal), kDefaultPulseStep, horizon));
        const auto fine = extract_metrics(
            integrate(th, c, single_pulse(kJacSignal), 0.5 * kDefaultPulseStep, horizon));
        CHECK(rel(coarse.t_on, fine.t_on) < 1e-3);
        CHECK(rel(coarse.t_peak, fine.t_peak) < 1e-3);
        CHECK(rel(coarse.s_max, fine.s_max) < 1e-3);
        REQUIRE(coarse.recovered());
        REQUIRE(fine.recovered());
        CHECK(rel(*coarse.t_re, *fine.t_re) < 1e-3);
    }
}

TEST_CASE("metrics are insensitive to the initial photon density")
{
    const LaserConstants c;
    for (double t : {15.0, 45.0}) {
        const auto th = thermal_state(c, t, kJdc);
        const double horizon = 9e-9;
        const auto ss = extract_metrics(
            integrate(th, c, single_pulse(kJacSignal), kDefaultPulseStep, horizon));
        const auto dark = extract_metrics(integrate(th, c, single_pulse(kJacSignal),
                                                    kDefaultPulseStep, horizon, {th.n_dc, 0.0}));
        CHECK(rel(ss.t_on, dark.t_on) < 1e-3);
        CHECK(rel(ss.t_peak, dark.t_peak) < 1e-3);
        CHECK(rel(ss.s_max, dark.s_max) < 1e-3);
        CHECK(rel(ss.pulse_energy, dark.pulse_energy) < 1e-3);
        REQUIRE(ss.recovered());
        REQUIRE(dark.recovered());
        CHECK(rel(*ss.t_re, *dark.t_re) < 1e-3);
    }
}

TEST_CASE("RK4 agrees with the fine-step Euler reference")
{
    const LaserConstants c;
    SUBCASE("25 degC signal")
    {
        const auto th = thermal_state(c, 25.0, kJdc);
        const auto d = single_pulse(kJacSignal);
        const auto main = extract_metrics(integrate(th, c, d, kDefaultPulseStep, 0.4e-9));
        const auto ref = extract_metrics(oracle::euler_reference_trajectory(
            th, c, d, kDefaultPulseStep / 100.0, 0.4e-9, 100));
        CHECK(rel(main.s_max, ref.s_max) < 5e-3);
        CHECK(std::abs(main.t_peak - ref.t_peak) < 1e-12);
    }
    SUBCASE("45 degC decoy")
    {
        const auto th = thermal_state(c, 45.0, kJdc);
        const auto d = single_pulse(kJacDecoy);
        const auto main = extract_metrics(integrate(th, c, d, kDefaultPulseStep, 0.4e-9));
        const auto ref = extract_metrics(oracle::euler_reference_trajectory(
            th, c, d, kDefaultPulseStep / 100.0, 0.4e-9, 100));
        CHECK(rel(main.s_max, ref.s_max) < 5e-3);
        CHECK(std::abs(main.t_peak - ref.t_peak) < 1e-12);
    }
}

TEST_CASE("simulate_train records edge densities")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 45.0, kJdc);
    DriveWaveform d = single_pulse(kJacSignal);
    d.period = 1.25e-9;
    d.n_pulses = 2;
    const auto train = simulate_train(th, c, d, kDefaultTrainStep, 1);
    REQUIRE(train.edge_density.size() == 2);
    CHECK(rel(train.edge_density[0], th.n_dc) < 1e-12);
    // At 800 MHz and 45 degC the carriers have not returned by the next edge.
    CHECK(train.edge_density[1] > 1.01 * th.n_dc);
    CHECK(train.trajectory.times.back() == doctest::Approx(3.75e-9));

    const auto first = extract_metrics(train.trajectory, 0);
    const auto second = extract_metrics(train.trajectory, 1);
    CHECK(second.s_max > 1.01 * first.s_max);
    CHECK(second.t_on < first.t_on);

    d.n_pulses = 1;
    CHECK_THROWS_AS(simulate_train(th, c, d, kDefaultTrainStep), InvalidInput);
    d.n_pulses = 2;
    d.period = INFINITY;
    CHECK_THROWS_AS(simulate_train(th, c, d, kDefaultTrainStep), InvalidInput);
}

TEST_CASE("integrate input validation")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    const auto d = single_pulse(kJacSignal);
    CHECK_THROWS_AS(integrate(th, c, d, 0.0, 1e-9), InvalidInput);
    CHECK_THROWS_AS(integrate(th, c, d, 1e-14, 1e-15), InvalidInput);
    CHECK_THROWS_AS(integrate(th, c, d, 1e-14, 1e-9, {-1.0, 0.0}), InvalidInput);
    DriveWaveform other = d;
    other.j_dc = 2.0 * kJdc;
    CHECK_THROWS_AS(integrate(th, c, other, 1e-14, 1e-9), InvalidInput);
}

TEST_CASE("oversized step diverges with a time stamp")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    try {
        integrate(th, c, single_pulse(kJacSignal), 2e-11, 1e-9);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() <= 1e-9);
    }
}

TEST_CASE("sample_at interpolates linearly")
{
    const std::vector<double> t{0.0, 1.0, 2.0};
    const std::vector<double> v{0.0, 10.0, 30.0};
    CHECK(sample_at(v, t, 0.5) == doctest::Approx(5.0));
    CHECK(sample_at(v, t, 1.5) == doctest::Approx(20.0));
    CHECK(sample_at(v, t, -1.0) == 0.0);
    CHECK(sample_at(v, t, 5.0) == 30.0);
    CHECK_THROWS_AS(sample_at({}, {}, 0.0), InvalidInput);
}

TEST_CASE("trajectory CSV round-trips doubles")
{
    const LaserConstants c;
    const auto th = thermal_state(c, 25.0, kJdc);
    const auto traj = integrate(th, c, single_pulse(kJacSignal), kDefaultPulseStep, 1e-12);
    std::ostringstream out;
    write_trajectory_csv(out, traj, 1);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "time_s,n_m3,s_m3");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        CHECK(std::stod(line.substr(0, a)) == traj.times[row]);
        CHECK(std::stod(line.substr(a + 1, b - a - 1)) == traj.n[row]);
        CHECK(std::stod(line.substr(b + 1)) == traj.s[row]);
        ++row;
    }
    CHECK(row == traj.size());

    std::ostringstream decimated;
    write_trajectory_csv(decimated, traj, 40);
    const std::string text = decimated.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3);
    CHECK_THROWS_AS(write_trajectory_csv(decimated, traj, 0), InvalidInput);
}
