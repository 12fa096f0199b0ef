#include "gainswitch/reference_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>

#include "gainswitch/errors.hpp"
#include "gainswitch/format.hpp"
#include "gainswitch/pulse_metrics.hpp"

namespace gainswitch::oracle {

namespace {

/// Poisson weights P(0..n_max), with the tail beyond n_max bounded.
std::vector<double> poisson_weights(double mean, int n_max)
{
    if (n_max < 20) {
        throw InvalidInput("truncation must keep at least 20 terms");
    }
    if (!std::isfinite(mean) || mean < 0.0) {
        throw InvalidInput("mean photon number must be finite and non-negative");
    }
    std::vector<double> w(static_cast<std::size_t>(n_max) + 1);
    w[0] = std::exp(-mean);
    for (int n = 1; n <= n_max; ++n) {
        w[static_cast<std::size_t>(n)] = w[static_cast<std::size_t>(n) - 1] * mean / n;
    }
    // P(N > n_max) <= P(n_max + 1) / (1 - mean / (n_max + 2)).
    const double next = w.back() * mean / (n_max + 1);
    const double ratio = mean / (n_max + 2);
    const double tail = ratio < 1.0 ? next / (1.0 - ratio) : INFINITY;
    // Yields never exceed 2.
    if (2.0 * tail >= kTailBound) {
        throw TruncationError("Poisson tail beyond n = " + std::to_string(n_max)
                              + " exceeds the truncation bound");
    }
    return w;
}

} // namespace

OracleReport make_report(std::string quantity, double main_value, double oracle_value,
                         double tolerance)
{
    const double diff = std::abs(main_value - oracle_value);
    const double dev = oracle_value != 0.0 ? diff / std::abs(oracle_value) : diff;
    return {std::move(quantity), main_value, oracle_value, dev, tolerance, dev <= tolerance};
}

OracleReport make_abs_report(std::string quantity, double main_value, double oracle_value,
                             double tolerance)
{
    const double dev = std::abs(main_value - oracle_value);
    return {std::move(quantity), main_value, oracle_value, dev, tolerance, dev <= tolerance};
}

double poisson_gain_oracle(double mean, double eta, double y0, int n_max)
{
    const auto w = poisson_weights(mean, n_max);
    double sum = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        sum += w[static_cast<std::size_t>(n)] * yield_n(n, eta, y0);
    }
    return sum;
}

double decoy_attacked_oracle(const AttackScenario& scenario, double eta_prime, double p_block,
                             int n_max)
{
    const auto w = poisson_weights(scenario.nu_attacked(), n_max);
    double multi = 0.0;
    for (int n = 2; n <= n_max; ++n) {
        multi += w[static_cast<std::size_t>(n)] * yield_n(n, eta_prime, scenario.y0);
    }
    const double distinguished = multi + (1.0 - p_block) * w[1] * yield_n(1, eta_prime, scenario.y0)
        + (w[0] + p_block * w[1]) * scenario.y0;
    return scenario.p_dis * distinguished + (1.0 - scenario.p_dis) * scenario.y0;
}

double signal_attacked_oracle(const AttackScenario& scenario, double eta_prime, int n_max)
{
    const auto w = poisson_weights(scenario.mu_attacked(), n_max);
    const double forwarded = yield_n(1, eta_prime, scenario.y0);
    double distinguished = 0.0;
    // Smallest terms first.
    for (int n = n_max; n >= 2; --n) {
        distinguished += w[static_cast<std::size_t>(n)] * forwarded;
    }
    distinguished += (w[0] + w[1]) * scenario.y0;
    return scenario.p_dis * distinguished + (1.0 - scenario.p_dis) * scenario.y0;
}

Trajectory euler_reference_trajectory(const ThermalState& thermal, const LaserConstants& constants,
                                      const DriveWaveform& drive, double dt_fine, double t_end,
                                      std::size_t stride)
{
    drive.validate();
    if (!(dt_fine > 0.0) || dt_fine > kDefaultPulseStep / 50.0) {
        throw InvalidInput("reference step must be positive and at most 1/50 of the default step");
    }
    if (stride == 0 || !(t_end >= dt_fine * static_cast<double>(stride))) {
        throw InvalidInput("reference horizon must cover at least one stored sample");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt_fine));
    const std::size_t stored = steps / stride + 1;

    Trajectory traj;
    traj.thermal = thermal;
    traj.drive = drive;
    traj.times.reserve(stored);
    traj.n.reserve(stored);
    traj.s.reserve(stored);

    // Same below-threshold start as the main path, computed independently.
    double n = thermal.n_dc;
    double s = constants.gamma * constants.beta_sp * thermal.n_dc / thermal.tau_n
        / (1.0 / constants.tau_p - constants.gamma * thermal.g0 * (thermal.n_dc - thermal.n0));
    traj.times.push_back(0.0);
    traj.n.push_back(n);
    traj.s.push_back(s);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt_fine;
        const CarrierPhoton rate = derivatives({n, s}, drive.current(t), thermal, constants);
        n = std::max(n + dt_fine * rate.n, 0.0);
        s = std::max(s + dt_fine * rate.s, 0.0);
        if (!std::isfinite(n) || !std::isfinite(s)) {
            throw DivergenceError("reference integration diverged", t + dt_fine);
        }
        if ((i + 1) % stride == 0) {
            traj.times.push_back(static_cast<double>(i + 1) * dt_fine);
            traj.n.push_back(n);
            traj.s.push_back(s);
        }
    }
    return traj;
}

std::vector<OracleReport> run_verification(const LaserConstants& constants, double j_dc,
                                           double j_ac_signal, double j_ac_decoy,
                                           double pulse_duration)
{
    std::vector<OracleReport> out;

    const AttackScenario gys{};
    for (double length : {0.0, 50.0, 100.0, 150.0}) {
        const double eta = channel_transmittance(gys.eta0, gys.delta_db_per_km, length);
        const std::string at = "@L=" + format_sig(length, 4) + "km";
        out.push_back(make_report("Q_mu" + at, count_rate_no_attack(gys.mu, eta, gys.y0),
                                  poisson_gain_oracle(gys.mu, eta, gys.y0), 1e-12));
        out.push_back(make_report("Q_nu" + at, count_rate_no_attack(gys.nu, eta, gys.y0),
                                  poisson_gain_oracle(gys.nu, eta, gys.y0), 1e-12));
    }
    for (double eta_prime : {1e-3, 1e-2, 0.045}) {
        const std::string at = "@eta'=" + format_sig(eta_prime, 3);
        out.push_back(make_report("Q_nu'" + at, count_rate_decoy_attacked(gys, eta_prime, 0.5),
                                  decoy_attacked_oracle(gys, eta_prime, 0.5), 1e-12));
        out.push_back(make_report("Q_mu'" + at, count_rate_signal_attacked(gys, eta_prime),
                                  signal_attacked_oracle(gys, eta_prime), 1e-12));
    }

    const double fine = kDefaultPulseStep / 100.0;
    const auto stride = static_cast<std::size_t>(std::llround(kDefaultPulseStep / fine));
    auto compare = [&](double temperature, double j_ac, const std::string& kind) {
        const ThermalState th = thermal_state(constants, temperature, j_dc);
        DriveWaveform drive;
        drive.j_dc = j_dc;
        drive.j_ac = j_ac;
        drive.pulse_duration = pulse_duration;
        const auto main_m = extract_metrics(
            integrate(th, constants, drive, kDefaultPulseStep, kDefaultPulseHorizon));
        const auto ref_m = extract_metrics(euler_reference_trajectory(
            th, constants, drive, fine, kDefaultPulseHorizon, stride));
        const std::string at = kind + "@" + format_sig(temperature, 3) + "C";
        out.push_back(make_report("s_max_" + at, main_m.s_max, ref_m.s_max, 5e-3));
        out.push_back(make_abs_report("t_peak_s_" + at, main_m.t_peak, ref_m.t_peak, 1e-12));
    };
    compare(25.0, j_ac_signal, "signal");
    compare(45.0, j_ac_decoy, "decoy");
    return out;
}

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports)
{
    out << "quantity,main,oracle,deviation,tolerance,pass\n";
    for (const auto& r : reports) {
        out << r.quantity << ',' << format_double(r.main_value) << ','
            << format_double(r.oracle_value) << ',' << format_double(r.deviation) << ','
            << format_double(r.tolerance) << ',' << (r.pass ? "true" : "false") << '\n';
    }
}

} // namespace gainswitch::oracle
