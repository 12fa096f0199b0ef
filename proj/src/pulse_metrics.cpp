#include "gainswitch/pulse_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "gainswitch/errors.hpp"

namespace gainswitch {

namespace {

struct Window
{
    std::size_t first;
    std::size_t last; // inclusive
    double edge;
};

Window cycle_window(const Trajectory& traj, int cycle_index)
{
    const DriveWaveform& drive = traj.drive;
    if (cycle_index < 0 || cycle_index >= drive.n_pulses) {
        throw InvalidInput("cycle index out of range");
    }
    if (traj.size() < 3) {
        throw InvalidInput("trajectory too short for metric extraction");
    }
    const double dt = traj.dt();
    const double edge = drive.edge(cycle_index);
    const double stop = drive.periodic() ? edge + drive.period : traj.times.back();
    if (stop > traj.times.back() + 0.5 * dt) {
        throw InvalidInput("trajectory does not cover the full cycle");
    }
    // The edge sample itself is included; it carries the pre-pulse density.
    const auto first = static_cast<std::size_t>(std::ceil((edge - traj.times.front()) / dt - 1e-9));
    auto last = static_cast<std::size_t>(std::floor((stop - traj.times.front()) / dt + 1e-9));
    last = std::min(last, traj.size() - 1);
    if (last < first + 2) {
        throw InvalidInput("cycle window holds too few samples");
    }
    return {first, last, edge};
}

double crossing_time(const Trajectory& traj, std::size_t i, double level)
{
    // Level lies between samples i and i + 1.
    const double a = traj.n[i];
    const double b = traj.n[i + 1];
    const double frac = b == a ? 0.0 : (level - a) / (b - a);
    return traj.times[i] + frac * (traj.times[i + 1] - traj.times[i]);
}

} // namespace

PulseMetrics extract_metrics(const Trajectory& traj, int cycle_index, double recovery_band)
{
    if (!(recovery_band > 0.0 && recovery_band <= 0.1)) {
        throw InvalidInput("recovery band must lie in (0, 0.1]");
    }
    const Window w = cycle_window(traj, cycle_index);
    const ThermalState& th = traj.thermal;

    PulseMetrics m;
    m.temperature = th.temperature;
    m.recovery_band = recovery_band;
    m.n_initial = sample_at(traj.n, traj.times, w.edge);

    // Turn-on: first upward crossing of n_th.
    std::optional<double> on;
    for (std::size_t i = w.first; i < w.last; ++i) {
        if (traj.n[i] < th.n_th && traj.n[i + 1] >= th.n_th) {
            on = crossing_time(traj, i, th.n_th);
            break;
        }
    }
    if (!on) {
        throw BelowThresholdPulse("carrier density never reaches threshold in cycle "
                                  + std::to_string(cycle_index));
    }
    m.t_on = *on - w.edge;

    // Peak: discrete maximum refined by a parabola through its neighbours.
    const auto begin = traj.s.begin();
    const auto peak_it = std::max_element(begin + static_cast<std::ptrdiff_t>(w.first),
                                          begin + static_cast<std::ptrdiff_t>(w.last) + 1);
    const auto k = static_cast<std::size_t>(peak_it - begin);
    double t_peak = traj.times[k];
    double s_max = traj.s[k];
    if (k > w.first && k < w.last) {
        const double y0 = traj.s[k - 1];
        const double y1 = traj.s[k];
        const double y2 = traj.s[k + 1];
        const double curvature = y0 - 2.0 * y1 + y2;
        if (curvature < 0.0) {
            const double offset = 0.5 * (y0 - y2) / curvature;
            t_peak += offset * traj.dt();
            s_max = y1 - 0.25 * (y0 - y2) * offset;
        }
    }
    m.t_peak = t_peak - w.edge;
    m.s_max = s_max;

    double energy = 0.0;
    for (std::size_t i = w.first; i < w.last; ++i) {
        energy += 0.5 * (traj.s[i] + traj.s[i + 1]) * (traj.times[i + 1] - traj.times[i]);
    }
    m.pulse_energy = energy;

    // Recovery: after the peak, the last sample outside the band; the
    // crossing that follows it is where N settles for good.
    const double half_width = recovery_band * th.n_dc;
    auto outside = [&](std::size_t i) { return std::abs(traj.n[i] - th.n_dc) > half_width; };
    std::size_t last_out = k;
    for (std::size_t i = w.last + 1; i-- > k;) {
        if (outside(i)) {
            last_out = i;
            break;
        }
    }
    if (last_out < w.last) {
        const double level = traj.n[last_out] > th.n_dc ? th.n_dc + half_width : th.n_dc - half_width;
        m.t_re = crossing_time(traj, last_out, level) - w.edge;
    }
    return m;
}

double max_repetition_rate(const PulseMetrics& metrics)
{
    if (!metrics.t_re) {
        throw UndefinedRate("pulse never recovered; repetition rate undefined");
    }
    return 1.0 / *metrics.t_re;
}

double analytic_decay_time(const ThermalState& thermal)
{
    if (!(thermal.n_dc > 0.0) || thermal.n0 <= thermal.n_dc) {
        throw InvalidRegime("decay estimate needs n0 > n_dc > 0");
    }
    return thermal.tau_n * std::log(thermal.n0 / thermal.n_dc);
}

namespace {

double injected_density(const LaserConstants& constants, const DriveWaveform& drive)
{
    return drive.j_ac * drive.pulse_duration / (constants.q * constants.d);
}

} // namespace

double smax_prediction_delta(const ThermalState& a, const ThermalState& b,
                             const LaserConstants& constants, const DriveWaveform& drive)
{
    const double injected = injected_density(constants, drive);
    const double bracket_a = injected - a.n_th + a.n_dc;
    const double bracket_b = injected - b.n_th + b.n_dc;
    return bracket_b - bracket_a;
}

double energy_prediction_delta(const ThermalState& a, const ThermalState& b,
                               const LaserConstants& constants, const DriveWaveform& drive)
{
    const double injected = injected_density(constants, drive);
    const double bracket_a = injected - a.n0 + a.n_dc;
    const double bracket_b = injected - b.n0 + b.n_dc;
    return bracket_b - bracket_a;
}

StatePairMetrics compare_states(const PulseMetrics& signal, const PulseMetrics& decoy) noexcept
{
    return {
        decoy.t_on - signal.t_on,
        decoy.t_peak - signal.t_peak,
        signal.s_max / decoy.s_max,
        signal.pulse_energy / decoy.pulse_energy,
    };
}

} // namespace gainswitch
