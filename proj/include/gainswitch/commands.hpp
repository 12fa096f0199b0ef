#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gainswitch/config.hpp"
#include "gainswitch/pulse_metrics.hpp"
#include "gainswitch/rate_dynamics.hpp"

namespace gainswitch {

enum class StateKind { signal, decoy };

std::string_view to_string(StateKind kind) noexcept;

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitDivergence = 3,
};

/// Single rectangular pulse of the given class, rising edge at t = 0.
DriveWaveform pulse_drive(const LaserProfile& profile, StateKind kind);

Trajectory simulate_pulse(const LaserProfile& profile, double temperature, StateKind kind,
                          double dt = kDefaultPulseStep, double horizon = kDefaultPulseHorizon);

struct SweepPoint
{
    ThermalState thermal;
    PulseMetrics signal;
    PulseMetrics decoy;
};

/// Signal and decoy pulse metrics at each temperature, computed on `jobs`
/// threads; output order follows `temperatures`.
std::vector<SweepPoint> sweep_states(const LaserProfile& profile,
                                     const std::vector<double>& temperatures, double dt,
                                     double horizon, double band, int jobs);

struct Table2Row
{
    std::string quantity;
    std::string unit;
    double display_scale; // SI value / display_scale = value in `unit`
    std::vector<double> simulated;
    std::vector<std::optional<double>> published;
};

/// The eight reference rows; the N_th row is the closed-form threshold.
std::vector<Table2Row> table2_rows(const std::vector<SweepPoint>& sweep);

void write_table2_csv(std::ostream& out, const std::vector<double>& temperatures,
                      const std::vector<Table2Row>& rows);
void write_table2_json(std::ostream& out, const std::vector<double>& temperatures,
                       const std::vector<Table2Row>& rows);
void write_table2_text(std::ostream& out, const std::vector<double>& temperatures,
                       const std::vector<Table2Row>& rows);

/// Header `temp_C,t_on_ps,t_peak_ps,smax_m3,energy_m3s,t_re_ns,n_initial_m3`.
void write_metrics_csv(std::ostream& out, const std::vector<PulseMetrics>& rows,
                       bool header = true);
void write_metrics_json(std::ostream& out, const std::vector<PulseMetrics>& rows);

struct TrainCycle
{
    int index;
    double edge_time;
    double n_initial;
    double s_max;
    double t_peak;
    bool elevated; // n_initial above n_dc by more than 1 %
};

std::vector<TrainCycle> train_cycles(const LaserProfile& profile, double temperature,
                                     double frequency, int n_pulses, double dt, double band);

void write_train_csv(std::ostream& out, const std::vector<TrainCycle>& cycles);

struct AttackScanOptions
{
    double l_min = 0.0;
    double l_max = 200.0;
    double step = 0.5;
    double resolution_km = 1e-3;
    /// Derive alpha and beta_d from pulse energy ratios between the first
    /// configured temperature and this one.
    std::optional<double> derive_from_temperature;
};

/// Heated/cold pulse energy ratios (signal, decoy).
std::pair<double, double> derive_attenuation(const LaserProfile& profile, double cold,
                                             double hot, double dt, double horizon);

int run_pulse(const RunConfig& config, double temperature, StateKind kind, double horizon,
              std::ostream& log);
int run_table2(const RunConfig& config, double horizon, std::ostream& log);
int run_train(const RunConfig& config, double frequency, double temperature, int n_pulses,
              std::ostream& log);
int run_attack(const RunConfig& config, const AttackScanOptions& options, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& out, std::ostream& log);

} // namespace gainswitch
