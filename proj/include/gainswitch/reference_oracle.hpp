#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gainswitch/decoy_attack.hpp"
#include "gainswitch/rate_dynamics.hpp"

namespace gainswitch::oracle {

inline constexpr int kDefaultTruncation = 60;
inline constexpr double kTailBound = 1e-15;

struct OracleReport
{
    std::string quantity;
    double main_value;
    double oracle_value;
    double deviation; // relative, or absolute when the oracle value is zero
    double tolerance;
    bool pass;
};

OracleReport make_report(std::string quantity, double main_value, double oracle_value,
                         double tolerance);

/// Absolute comparison, for quantities such as times where relative
/// deviation is meaningless.
OracleReport make_abs_report(std::string quantity, double main_value, double oracle_value,
                             double tolerance);

/// Explicit sum over n <= n_max of Poisson(mean) weights times yield_n.
/// Throws TruncationError when the neglected tail may exceed 1e-15.
double poisson_gain_oracle(double mean, double eta, double y0, int n_max = kDefaultTruncation);

/// Term-by-term decoy gain under attack: multiphoton pulses pass over the
/// replacement channel, single photons are blocked with p_block, vacuum
/// and undistinguished pulses give dark counts only.
double decoy_attacked_oracle(const AttackScenario& scenario, double eta_prime, double p_block,
                             int n_max = kDefaultTruncation);

/// Term-by-term signal gain under attack: every n >= 2 pulse forwards one
/// photon, n <= 1 pulses leave dark counts only.
double signal_attacked_oracle(const AttackScenario& scenario, double eta_prime,
                              int n_max = kDefaultTruncation);

/// Forward-Euler integration of the same rate equations, storing every
/// `stride`-th step. Requires dt_fine <= kDefaultPulseStep / 50.
Trajectory euler_reference_trajectory(const ThermalState& thermal, const LaserConstants& constants,
                                      const DriveWaveform& drive, double dt_fine, double t_end,
                                      std::size_t stride);

/// Main-path vs oracle comparisons used by the `verify` subcommand.
std::vector<OracleReport> run_verification(const LaserConstants& constants, double j_dc,
                                           double j_ac_signal, double j_ac_decoy,
                                           double pulse_duration);

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports);

} // namespace gainswitch::oracle
