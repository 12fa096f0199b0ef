#include "gainswitch/rate_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "gainswitch/errors.hpp"
#include "gainswitch/format.hpp"

namespace gainswitch {

namespace {

constexpr double kClampTolerance = 1e-6;

// Clamps a slightly negative density to zero; anything larger than the
// tolerance relative to the previous value is a step-size failure.
double clamp_density(double value, double previous, double t, const char* name)
{
    if (value >= 0.0) {
        return value;
    }
    const double scale = std::max(previous, 1.0);
    if (-value > kClampTolerance * scale) {
        throw DivergenceError(std::string(name) + " went negative beyond clamp tolerance at t = "
                                  + format_double(t) + " s",
                              t);
    }
    return 0.0;
}

} // namespace

double DriveWaveform::current(double t) const noexcept
{
    if (t < start_offset) {
        return j_dc;
    }
    const double since = t - start_offset;
    if (!periodic()) {
        return since < pulse_duration ? j_dc + j_ac : j_dc;
    }
    const double k = std::floor(since / period);
    if (k >= n_pulses) {
        return j_dc;
    }
    return since - k * period < pulse_duration ? j_dc + j_ac : j_dc;
}

void DriveWaveform::validate() const
{
    if (!std::isfinite(j_dc) || j_dc < 0.0) {
        throw InvalidInput("drive j_dc must be finite and non-negative");
    }
    if (!std::isfinite(j_ac) || j_ac <= 0.0) {
        throw InvalidInput("drive j_ac must be finite and positive");
    }
    if (!std::isfinite(pulse_duration) || pulse_duration <= 0.0) {
        throw InvalidInput("pulse duration must be finite and positive");
    }
    if (n_pulses < 1) {
        throw InvalidInput("drive needs at least one pulse");
    }
    if (std::isnan(period) || (periodic() && period <= pulse_duration)) {
        throw InvalidInput("pulse period must exceed the pulse duration");
    }
    if (!std::isfinite(start_offset) || start_offset < 0.0) {
        throw InvalidInput("start offset must be finite and non-negative");
    }
}

CarrierPhoton derivatives(const CarrierPhoton& state, double j_now, const ThermalState& thermal,
                          const LaserConstants& constants) noexcept
{
    const double gain = thermal.g0 * (state.n - thermal.n0) * state.s;
    const double spont = state.n / thermal.tau_n;
    return {
        j_now / (constants.q * constants.d) - spont - gain,
        constants.gamma * gain - state.s / constants.tau_p + constants.gamma * constants.beta_sp * spont,
    };
}

double steady_state_s(const ThermalState& thermal, const LaserConstants& constants, double n)
{
    if (!std::isfinite(n) || n < 0.0) {
        throw InvalidInput("carrier density must be finite and non-negative");
    }
    if (n >= thermal.n_th) {
        throw NoSteadyState("no below-threshold photon steady state at or above n_th");
    }
    const double loss = 1.0 / constants.tau_p - constants.gamma * thermal.g0 * (n - thermal.n0);
    return constants.gamma * constants.beta_sp * (n / thermal.tau_n) / loss;
}

CarrierPhoton dc_equilibrium(const ThermalState& thermal, const LaserConstants& constants)
{
    // dn/dt along the photon steady state falls monotonically from j/(qd) at
    // n = 0 towards minus infinity at threshold; bisect on it.
    auto carrier_rate = [&](double n) {
        return derivatives({n, steady_state_s(thermal, constants, n)}, thermal.j_dc, thermal,
                           constants)
            .n;
    };
    double lo = 0.0;
    double hi = thermal.n_th;
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (carrier_rate(mid) > 0.0 ? lo : hi) = mid;
    }
    return {lo, steady_state_s(thermal, constants, lo)};
}

Trajectory integrate(const ThermalState& thermal, const LaserConstants& constants,
                     const DriveWaveform& drive, double dt, double t_end, CarrierPhoton initial)
{
    drive.validate();
    if (!std::isfinite(dt) || dt <= 0.0) {
        throw InvalidInput("time step must be finite and positive");
    }
    if (!std::isfinite(t_end) || t_end < dt) {
        throw InvalidInput("t_end must be at least one time step");
    }
    if (!std::isfinite(initial.n) || !std::isfinite(initial.s) || initial.n < 0.0
        || initial.s < 0.0) {
        throw InvalidInput("initial densities must be finite and non-negative");
    }
    if (std::abs(drive.j_dc - thermal.j_dc) > 1e-12 * std::max(thermal.j_dc, 1.0)) {
        throw InvalidInput("drive DC level differs from the bias of the thermal state");
    }

    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    Trajectory traj;
    traj.thermal = thermal;
    traj.drive = drive;
    traj.times.resize(steps + 1);
    traj.n.resize(steps + 1);
    traj.s.resize(steps + 1);

    auto rhs = [&](const CarrierPhoton& y, double t) {
        return derivatives(y, drive.current(t), thermal, constants);
    };

    CarrierPhoton y = initial;
    traj.times[0] = 0.0;
    traj.n[0] = y.n;
    traj.s[0] = y.s;
    const double half = 0.5 * dt;
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const CarrierPhoton k1 = rhs(y, t);
        const CarrierPhoton k2 = rhs({y.n + half * k1.n, y.s + half * k1.s}, t + half);
        const CarrierPhoton k3 = rhs({y.n + half * k2.n, y.s + half * k2.s}, t + half);
        const CarrierPhoton k4 = rhs({y.n + dt * k3.n, y.s + dt * k3.s}, t + dt);
        CarrierPhoton next{
            y.n + dt / 6.0 * (k1.n + 2.0 * k2.n + 2.0 * k3.n + k4.n),
            y.s + dt / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s),
        };
        const double t_next = static_cast<double>(i + 1) * dt;
        if (!std::isfinite(next.n) || !std::isfinite(next.s)) {
            throw DivergenceError("non-finite state at t = " + format_double(t_next) + " s", t_next);
        }
        next.n = clamp_density(next.n, y.n, t_next, "carrier density");
        next.s = clamp_density(next.s, y.s, t_next, "photon density");
        y = next;
        traj.times[i + 1] = t_next;
        traj.n[i + 1] = y.n;
        traj.s[i + 1] = y.s;
    }
    return traj;
}

Trajectory integrate(const ThermalState& thermal, const LaserConstants& constants,
                     const DriveWaveform& drive, double dt, double t_end)
{
    return integrate(thermal, constants, drive, dt, t_end,
                     {thermal.n_dc, steady_state_s(thermal, constants, thermal.n_dc)});
}

TrainTrajectory simulate_train(const ThermalState& thermal, const LaserConstants& constants,
                               const DriveWaveform& drive, double dt, int settle_cycles)
{
    if (!drive.periodic()) {
        throw InvalidInput("pulse train needs a finite period");
    }
    if (drive.n_pulses < 2) {
        throw InvalidInput("pulse train needs at least two pulses");
    }
    if (settle_cycles < 0) {
        throw InvalidInput("settle cycle count must be non-negative");
    }
    const double t_end = drive.start_offset + (drive.n_pulses + settle_cycles) * drive.period;

    TrainTrajectory train;
    train.trajectory = integrate(thermal, constants, drive, dt, t_end);
    train.edge_density.reserve(static_cast<std::size_t>(drive.n_pulses));
    for (int k = 0; k < drive.n_pulses; ++k) {
        train.edge_density.push_back(
            sample_at(train.trajectory.n, train.trajectory.times, drive.edge(k)));
    }
    return train;
}

double sample_at(const std::vector<double>& values, const std::vector<double>& times, double t)
{
    if (values.empty() || values.size() != times.size()) {
        throw InvalidInput("cannot sample an empty or mismatched series");
    }
    if (values.size() == 1 || t <= times.front()) {
        return values.front();
    }
    if (t >= times.back()) {
        return values.back();
    }
    const double step = times[1] - times[0];
    auto i = static_cast<std::size_t>((t - times.front()) / step);
    i = std::min(i, values.size() - 2);
    const double frac = (t - times[i]) / step;
    return values[i] + frac * (values[i + 1] - values[i]);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t decimation)
{
    if (decimation == 0) {
        throw InvalidInput("decimation factor must be at least 1");
    }
    out << "time_s,n_m3,s_m3\n";
    for (std::size_t i = 0; i < traj.size(); i += decimation) {
        out << format_double(traj.times[i]) << ',' << format_double(traj.n[i]) << ','
            << format_double(traj.s[i]) << '\n';
    }
}

} // namespace gainswitch
