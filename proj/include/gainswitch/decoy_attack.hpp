#pragma once

#include <optional>
#include <vector>

namespace gainswitch {

/// Decoy-state link under the heating-assisted photon-number-splitting attack.
/// Defaults are the GYS field parameters with alpha = 0.8, beta_d = 0.4,
/// p_dis = 0.8.
struct AttackScenario
{
    double mu = 0.48;
    double nu = 0.05;
    double alpha = 0.8;   // signal mean photon number scale under heating
    double beta_d = 0.4;  // decoy mean photon number scale under heating
    double p_dis = 0.8;   // probability of telling signal from decoy
    double y0 = 1.7e-6;
    double eta0 = 0.045;
    double delta_db_per_km = 0.21;
    double length_km = 0.0;

    double mu_attacked() const noexcept { return alpha * mu; }
    double nu_attacked() const noexcept { return beta_d * nu; }

    /// Domain checks only; the ordering 1 > alpha > beta_d is an attack-model
    /// assumption and not enforced, so degenerate limits remain solvable.
    void validate() const;
};

struct AttackSolution
{
    double length_km = 0.0;
    double eta = 0.0;
    double eta_prime = 0.0;
    double p_block = 0.0;
    bool feasible = false;
    std::optional<double> delta_prime_db_per_km;
    double signal_residual = 0.0; // Q_mu' - Q_mu
    double decoy_residual = 0.0;  // Q_nu' - Q_nu

    double eta_ratio() const noexcept { return eta_prime / eta; }
};

/// eta0 10^(-delta L / 10).
double channel_transmittance(double eta0, double delta_db_per_km, double length_km);

/// 1 - (1 - eta)^n + y0.
double yield_n(int n, double eta, double y0);

/// Gain of a Poisson source with no eavesdropper: y0 + 1 - exp(-eta mean).
double count_rate_no_attack(double mean, double eta, double y0);

/// Decoy gain after the attack with replacement transmittance eta_prime and
/// single-photon blocking probability p_block.
double count_rate_decoy_attacked(const AttackScenario& scenario, double eta_prime, double p_block);

/// Signal gain after the attack: multiphoton pulses forward one photon over
/// the replacement channel, single photons are blocked.
double count_rate_signal_attacked(const AttackScenario& scenario, double eta_prime);

/// Solves both gain balances at scenario.length_km.
AttackSolution solve_attack(const AttackScenario& scenario);

/// Shortest distance in [0, 500] km where eta_prime <= eta0, by bisection.
/// Throws NoCrossing when no such distance exists.
double min_feasible_distance(AttackScenario scenario, double resolution_km = 1e-3);

std::vector<AttackSolution> scan_distance(AttackScenario scenario, double l_min, double l_max,
                                          double step);

} // namespace gainswitch
