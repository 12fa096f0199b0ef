#pragma once

#include <optional>
#include <vector>

#include "gainswitch/rate_dynamics.hpp"
#include "gainswitch/thermal_model.hpp"

namespace gainswitch {

inline constexpr double kDefaultRecoveryBand = 0.01;

/// Per-pulse observables. Times are measured from the pulse's rising edge.
struct PulseMetrics
{
    double temperature = 0.0;
    double t_on = 0.0;
    double t_peak = 0.0;
    double s_max = 0.0;
    double pulse_energy = 0.0; // integral of S over the cycle, m^-3 s
    std::optional<double> t_re; // empty when N never settles inside the band
    double n_initial = 0.0;
    double recovery_band = kDefaultRecoveryBand;

    bool recovered() const noexcept { return t_re.has_value(); }
};

struct StatePairMetrics
{
    double delta_t_on;
    double delta_t_peak;
    double smax_ratio;
    double energy_ratio;
};

/// Observables of pulse `cycle_index`. The cycle spans one period from its
/// rising edge (or to the end of the trajectory for a single pulse).
/// Throws BelowThresholdPulse when N never crosses n_th in the cycle.
PulseMetrics extract_metrics(const Trajectory& traj, int cycle_index = 0,
                             double recovery_band = kDefaultRecoveryBand);

/// 1 / t_re. Throws UndefinedRate for a pulse that never recovered.
double max_repetition_rate(const PulseMetrics& metrics);

/// tau_n ln(n0 / n_dc): pure exponential decay from transparency to the DC
/// level, ignoring the bias replenishment.
double analytic_decay_time(const ThermalState& thermal);

/// Change of J_AC T/(qd) - n_th + n_dc from state a to state b. Only its
/// sign is meaningful: it orders the peak photon densities.
double smax_prediction_delta(const ThermalState& a, const ThermalState& b,
                             const LaserConstants& constants, const DriveWaveform& drive);

/// Same bracket with n0 in place of n_th; orders pulse energies.
double energy_prediction_delta(const ThermalState& a, const ThermalState& b,
                               const LaserConstants& constants, const DriveWaveform& drive);

StatePairMetrics compare_states(const PulseMetrics& signal, const PulseMetrics& decoy) noexcept;

} // namespace gainswitch
