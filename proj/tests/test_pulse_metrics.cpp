#include <doctest.h>

#include <cmath>
#include <vector>

#include "gainswitch/commands.hpp"
#include "gainswitch/config.hpp"
#include "gainswitch/errors.hpp"
#include "gainswitch/pulse_metrics.hpp"

using namespace gainswitch;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Hand-built trajectory with a single-pulse drive so window logic applies.
Trajectory synthetic(const std::vector<double>& n, const std::vector<double>& s, double dt,
                     const ThermalState& th)
{
    Trajectory traj;
    traj.thermal = th;
    traj.drive.j_dc = th.j_dc;
    traj.drive.j_ac = 1.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
        traj.times.push_back(static_cast<double>(i) * dt);
    }
    traj.n = n;
    traj.s = s;
    return traj;
}

ThermalState toy_state()
{
    ThermalState th{};
    th.n_th = 10.0;
    th.n_dc = 4.0;
    th.n0 = 8.0;
    th.tau_n = 1.0;
    th.j_dc = 0.0;
    return th;
}

} // namespace

TEST_CASE("extract_metrics on a synthetic trajectory")
{
    const auto th = toy_state();
    // Crosses threshold between samples 2 and 3 at fraction 0.5; the photon
    // photon samples around index 5 are symmetric; N settles at sample 8.
    const std::vector<double> n{4, 6, 8, 12, 11, 9, 6, 5, 4.02, 4.01, 4.0};
    const std::vector<double> s{0, 0, 0, 1, 5.75, 6.5, 5.75, 3.5, 1, 0.5, 0.1};
    const auto m = extract_metrics(synthetic(n, s, 1.0, th), 0, 0.01);
    CHECK(m.t_on == doctest::Approx(2.5));
    CHECK(m.t_peak == doctest::Approx(5.0));
    CHECK(m.s_max == doctest::Approx(6.5));
    REQUIRE(m.recovered());
    // Last outside sample is 7 (|5 - 4| > 0.04); the band edge 4.04 is
    // crossed at fraction 0.96/0.98 of the way to sample 8.
    CHECK(*m.t_re == doctest::Approx(7.0 + 0.96 / 0.98));
    CHECK(m.n_initial == 4.0);
    double trapezoid = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        trapezoid += 0.5 * (s[i] + s[i + 1]);
    }
    CHECK(m.pulse_energy == doctest::Approx(trapezoid));
}

TEST_CASE("parabolic peak refinement recovers an off-grid vertex")
{
    const auto th = toy_state();
    std::vector<double> n(21), s(21);
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double t = static_cast<double>(i);
        n[i] = i < 5 ? 4.0 + 2.0 * t : 4.0;
        s[i] = 100.0 - (t - 7.3) * (t - 7.3);
    }
    n[20] = 4.0;
    const auto m = extract_metrics(synthetic(n, s, 1.0, th));
    CHECK(m.t_peak == doctest::Approx(7.3));
    CHECK(m.s_max == doctest::Approx(100.0));
}

TEST_CASE("extract_metrics reports non-recovery without throwing")
{
    const auto th = toy_state();
    const std::vector<double> n{4, 8, 12, 11, 9, 7, 6};
    const std::vector<double> s{0, 0, 2, 3, 2, 1, 0.5};
    const auto m = extract_metrics(synthetic(n, s, 1.0, th));
    CHECK_FALSE(m.recovered());
    CHECK_THROWS_AS(max_repetition_rate(m), UndefinedRate);
}

TEST_CASE("extract_metrics errors")
{
    const auto th = toy_state();
    const std::vector<double> n{4, 6, 8, 9, 8, 6, 4};
    const std::vector<double> s{0, 0, 1, 2, 1, 0, 0};
    const auto traj = synthetic(n, s, 1.0, th);
    CHECK_THROWS_AS(extract_metrics(traj), BelowThresholdPulse);
    CHECK_THROWS_AS(extract_metrics(traj, 0, 0.0), InvalidInput);
    CHECK_THROWS_AS(extract_metrics(traj, 0, 0.2), InvalidInput);
    CHECK_THROWS_AS(extract_metrics(traj, 1), InvalidInput);
}

TEST_CASE("max_repetition_rate")
{
    PulseMetrics m;
    m.t_re = 1.24e-9;
    CHECK(max_repetition_rate(m) == doctest::Approx(806.45e6).epsilon(1e-4));
    m.t_re = 1.60e-9;
    CHECK(max_repetition_rate(m) == doctest::Approx(625.0e6));
    m.t_re = 2.0e-9;
    CHECK(max_repetition_rate(m) == doctest::Approx(500.0e6));
}

TEST_CASE("analytic_decay_time")
{
    ThermalState th{};
    th.tau_n = 1e-9;
    th.n_dc = 1e23;
    th.n0 = 1e23 * std::exp(1.0);
    CHECK(rel(analytic_decay_time(th), 1e-9) < 1e-15);

    const LaserConstants c;
    // High-precision direct evaluations.
    CHECK(rel(analytic_decay_time(thermal_state(c, 15.0, 4.8e6)), 1.1048927626466434e-9) < 1e-13);
    CHECK(rel(analytic_decay_time(thermal_state(c, 25.0, 4.8e6)), 1.2276128631376392e-9) < 1e-13);
    CHECK(rel(analytic_decay_time(thermal_state(c, 45.0, 4.8e6)), 1.4531103046623045e-9) < 1e-13);

    th.n0 = th.n_dc;
    CHECK_THROWS_AS(analytic_decay_time(th), InvalidRegime);
    th.n_dc = 0.0;
    CHECK_THROWS_AS(analytic_decay_time(th), InvalidRegime);
}

TEST_CASE("prediction brackets")
{
    const auto config = default_config();
    const auto& c = config.profile.constants;
    const auto drive = pulse_drive(config.profile, StateKind::signal);
    const double j_dc = config.profile.j_dc;
    const auto t15 = thermal_state(c, 15.0, j_dc);
    const auto t25 = thermal_state(c, 25.0, j_dc);
    const auto t45 = thermal_state(c, 45.0, j_dc);

    CHECK(smax_prediction_delta(t25, t25, c, drive) == 0.0);
    CHECK(energy_prediction_delta(t25, t25, c, drive) == 0.0);

    const double delta = smax_prediction_delta(t15, t45, c, drive);
    CHECK(delta < 0.0);
    CHECK(rel(delta, (t45.n_dc - t45.n_th) - (t15.n_dc - t15.n_th)) < 1e-9);
    CHECK(smax_prediction_delta(t45, t15, c, drive) == doctest::Approx(-delta));
    CHECK(smax_prediction_delta(t15, t25, c, drive) < 0.0);
    CHECK(energy_prediction_delta(t15, t45, c, drive) < 0.0);

    const auto s15 = extract_metrics(simulate_pulse(config.profile, 15.0, StateKind::signal));
    const auto s45 = extract_metrics(simulate_pulse(config.profile, 45.0, StateKind::signal));
    CHECK(s45.s_max < s15.s_max);
    CHECK(s45.pulse_energy < s15.pulse_energy);
}

TEST_CASE("compare_states")
{
    PulseMetrics a;
    a.t_on = 50e-12;
    a.t_peak = 90e-12;
    a.s_max = 1e23;
    a.pulse_energy = 2e12;
    const auto same = compare_states(a, a);
    CHECK(same.delta_t_on == 0.0);
    CHECK(same.delta_t_peak == 0.0);
    CHECK(same.smax_ratio == 1.0);
    CHECK(same.energy_ratio == 1.0);

    PulseMetrics b = a;
    b.t_on = 60e-12;
    b.t_peak = 105e-12;
    b.s_max = 0.5e23;
    b.pulse_energy = 0.5e12;
    const auto pair = compare_states(a, b);
    CHECK(pair.delta_t_on == doctest::Approx(10e-12));
    CHECK(pair.delta_t_peak == doctest::Approx(15e-12));
    CHECK(pair.smax_ratio == doctest::Approx(2.0));
    CHECK(pair.energy_ratio == doctest::Approx(4.0));
}

TEST_CASE("simulated signal and decoy pulses")
{
    const auto config = default_config();
    for (double t : {15.0, 25.0, 45.0}) {
        const auto sig = extract_metrics(simulate_pulse(config.profile, t, StateKind::signal));
        const auto dec = extract_metrics(simulate_pulse(config.profile, t, StateKind::decoy));
        CHECK(sig.t_on > 0.0);
        CHECK(sig.t_on < sig.t_peak);
        CHECK(dec.t_on < dec.t_peak);
        const auto pair = compare_states(sig, dec);
        CHECK(pair.delta_t_on > 0.0);
        CHECK(pair.delta_t_peak > 0.0);
        CHECK(pair.smax_ratio > 1.0);
        CHECK(pair.energy_ratio > 1.0);
    }
}

TEST_CASE("turn-on time and recovery trend with temperature")
{
    const auto config = default_config();
    double prev_on = 0.0;
    double prev_peak = 0.0;
    double prev_re = 0.0;
    for (double t = 15.0; t <= 45.0; t += 5.0) {
        const auto m = extract_metrics(
            simulate_pulse(config.profile, t, StateKind::signal, kDefaultPulseStep, 9e-9));
        CHECK(m.t_on > prev_on);
        CHECK(m.t_peak > prev_peak);
        REQUIRE(m.recovered());
        CHECK(*m.t_re > prev_re);
        CHECK(*m.t_re > m.t_peak);
        prev_on = m.t_on;
        prev_peak = m.t_peak;
        prev_re = *m.t_re;
    }
}

TEST_CASE("interpolated turn-on time is stable under step halving")
{
    const auto config = default_config();
    for (double t : {15.0, 30.0, 45.0}) {
        for (auto kind : {StateKind::signal, StateKind::decoy}) {
            const auto coarse = extract_metrics(
                simulate_pulse(config.profile, t, kind, kDefaultPulseStep, 0.5e-9));
            const auto fine = extract_metrics(
                simulate_pulse(config.profile, t, kind, 0.5 * kDefaultPulseStep, 0.5e-9));
            CHECK(std::abs(coarse.t_on - fine.t_on) < 0.2e-12);
        }
    }
}

TEST_CASE("metrics of a later cycle are measured from its own edge")
{
    const auto config = default_config();
    const auto& p = config.profile;
    const auto th = thermal_state(p.constants, 15.0, p.j_dc);
    DriveWaveform d = pulse_drive(p, StateKind::signal);
    d.period = 10e-9;
    d.n_pulses = 2;
    const auto train = simulate_train(th, p.constants, d, kDefaultTrainStep);
    const auto first = extract_metrics(train.trajectory, 0);
    const auto second = extract_metrics(train.trajectory, 1);
    CHECK(std::abs(first.t_on - second.t_on) < 0.1e-12);
    CHECK(rel(first.s_max, second.s_max) < 1e-3);
    CHECK(rel(second.n_initial, th.n_dc) < 0.01);
}
