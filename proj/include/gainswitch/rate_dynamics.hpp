#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "gainswitch/thermal_model.hpp"

namespace gainswitch {

/// DC bias plus a train of rectangular AC pulses. The AC amplitude adds to the
/// DC level while a pulse is on. Time zero is the trajectory origin; the first
/// rising edge sits at `start_offset`.
struct DriveWaveform
{
    double j_dc = 0.0;
    double j_ac = 0.0;
    double pulse_duration = 100e-12;
    double period = std::numeric_limits<double>::infinity();
    int n_pulses = 1;
    double start_offset = 0.0;

    bool periodic() const noexcept { return std::isfinite(period); }

    /// Current density at time t, A/m^2.
    double current(double t) const noexcept;

    /// Rising edge of pulse k.
    double edge(int k) const noexcept { return start_offset + k * (periodic() ? period : 0.0); }

    void validate() const;
};

struct CarrierPhoton
{
    double n; // carrier density, m^-3
    double s; // photon density, m^-3
};

/// Uniformly sampled N(t), S(t).
struct Trajectory
{
    std::vector<double> times;
    std::vector<double> n;
    std::vector<double> s;
    ThermalState thermal{};
    DriveWaveform drive{};

    std::size_t size() const noexcept { return times.size(); }
    double dt() const noexcept { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

inline constexpr double kDefaultPulseStep = 10e-15;
inline constexpr double kDefaultTrainStep = 20e-15;
inline constexpr double kDefaultPulseHorizon = 2e-9;

/// Right-hand side of the single-mode rate equations.
CarrierPhoton derivatives(const CarrierPhoton& state, double j_now, const ThermalState& thermal,
                          const LaserConstants& constants) noexcept;

/// Photon density with dS/dt = 0 at carrier density n (below threshold).
double steady_state_s(const ThermalState& thermal, const LaserConstants& constants, double n);

/// Exact stationary point of both rate equations under the DC bias alone.
/// Differs from (n_dc, steady_state_s(n_dc)) by the small photon absorption
/// term of the carrier equation.
CarrierPhoton dc_equilibrium(const ThermalState& thermal, const LaserConstants& constants);

/// Classic fixed-step RK4 from t = 0 to t_end. The drive is sampled at each
/// sub-stage time. Throws DivergenceError on non-finite state or on a clamp
/// larger than 1e-6 relative.
Trajectory integrate(const ThermalState& thermal, const LaserConstants& constants,
                     const DriveWaveform& drive, double dt, double t_end, CarrierPhoton initial);

/// Starts from (n_dc, steady_state_s(n_dc)).
Trajectory integrate(const ThermalState& thermal, const LaserConstants& constants,
                     const DriveWaveform& drive, double dt, double t_end);

struct TrainTrajectory
{
    Trajectory trajectory;
    /// Carrier density at each AC rising edge.
    std::vector<double> edge_density;
};

/// Integrates n_pulses periods followed by `settle_cycles` pulse-free periods.
TrainTrajectory simulate_train(const ThermalState& thermal, const LaserConstants& constants,
                               const DriveWaveform& drive, double dt, int settle_cycles = 0);

/// Linear interpolation of a uniformly sampled series at time t.
double sample_at(const std::vector<double>& values, const std::vector<double>& times, double t);

/// CSV with header `time_s,n_m3,s_m3`, every `decimation`-th sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, std::size_t decimation = 1);

} // namespace gainswitch
