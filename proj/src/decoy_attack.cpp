#include "gainswitch/decoy_attack.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gainswitch/errors.hpp"

namespace gainswitch {

namespace {

constexpr double kMaxDistanceKm = 500.0;
constexpr double kClosedFormTolerance = 1e-8;

void require_range(double value, double lo, double hi, bool open_lo, const char* name)
{
    const bool ok = std::isfinite(value) && (open_lo ? value > lo : value >= lo) && value <= hi;
    if (!ok) {
        throw InvalidInput(std::string(name) + " out of range");
    }
}

void require_transmittance(double eta, const char* name)
{
    require_range(eta, 0.0, 1.0, false, name);
}

// 1 - exp(-x) without cancellation at small x.
double one_minus_exp(double x) { return -std::expm1(-x); }

// Fraction of pulses with two or more photons.
double multiphoton_fraction(double mean)
{
    return one_minus_exp(mean) - mean * std::exp(-mean);
}

double decoy_gain(const AttackScenario& scenario, double eta_prime, double p_block)
{
    const double nu_a = scenario.nu_attacked();
    const double passed = scenario.y0 + one_minus_exp(nu_a * eta_prime)
        - p_block * nu_a * std::exp(-nu_a) * eta_prime;
    return scenario.p_dis * passed + (1.0 - scenario.p_dis) * scenario.y0;
}

double signal_gain(const AttackScenario& scenario, double eta_prime)
{
    const double multi = multiphoton_fraction(scenario.mu_attacked());
    const double single_yield = eta_prime + scenario.y0;
    return scenario.p_dis * (multi * single_yield + (1.0 - multi) * scenario.y0)
        + (1.0 - scenario.p_dis) * scenario.y0;
}

} // namespace

void AttackScenario::validate() const
{
    require_range(nu, 0.0, INFINITY, true, "nu");
    if (!std::isfinite(mu) || mu <= nu) {
        throw InvalidInput("mu must exceed nu");
    }
    require_range(alpha, 0.0, 1.0, true, "alpha");
    require_range(beta_d, 0.0, 1.0, true, "beta_d");
    require_range(p_dis, 0.0, 1.0, true, "p_dis");
    require_range(y0, 0.0, 1.0, false, "y0");
    require_range(eta0, 0.0, 1.0, true, "eta0");
    require_range(delta_db_per_km, 0.0, INFINITY, false, "delta_db_per_km");
    require_range(length_km, 0.0, INFINITY, false, "length_km");
}

double channel_transmittance(double eta0, double delta_db_per_km, double length_km)
{
    return eta0 * std::pow(10.0, -delta_db_per_km * length_km / 10.0);
}

double yield_n(int n, double eta, double y0)
{
    if (n < 0) {
        throw InvalidInput("photon number must be non-negative");
    }
    require_transmittance(eta, "eta");
    if (n == 0) {
        return y0;
    }
    if (eta == 1.0) {
        return 1.0 + y0;
    }
    return -std::expm1(n * std::log1p(-eta)) + y0;
}

double count_rate_no_attack(double mean, double eta, double y0)
{
    require_range(mean, 0.0, INFINITY, false, "mean photon number");
    require_transmittance(eta, "eta");
    return y0 + one_minus_exp(eta * mean);
}

double count_rate_decoy_attacked(const AttackScenario& scenario, double eta_prime, double p_block)
{
    require_transmittance(eta_prime, "eta_prime");
    require_range(p_block, 0.0, 1.0, false, "p_block");
    return decoy_gain(scenario, eta_prime, p_block);
}

double count_rate_signal_attacked(const AttackScenario& scenario, double eta_prime)
{
    require_transmittance(eta_prime, "eta_prime");
    return signal_gain(scenario, eta_prime);
}

AttackSolution solve_attack(const AttackScenario& scenario)
{
    scenario.validate();
    const double p = scenario.p_dis;
    const double mu_a = scenario.mu_attacked();
    const double nu_a = scenario.nu_attacked();

    AttackSolution sol;
    sol.length_km = scenario.length_km;
    sol.eta = channel_transmittance(scenario.eta0, scenario.delta_db_per_km, scenario.length_km);

    // Signal balance Q_mu' = Q_mu is linear in eta':
    //   Q_mu' = p * multi * eta' + y0.
    const double q_mu = count_rate_no_attack(scenario.mu, sol.eta, scenario.y0);
    const double q_nu = count_rate_no_attack(scenario.nu, sol.eta, scenario.y0);
    sol.eta_prime = one_minus_exp(scenario.mu * sol.eta) / (p * multiphoton_fraction(mu_a));
    sol.signal_residual = signal_gain(scenario, sol.eta_prime) - q_mu;

    // Decoy balance is linear in p_block.
    const double blocked_per_unit = nu_a * std::exp(-nu_a) * sol.eta_prime;
    if (!(blocked_per_unit > 0.0)) {
        sol.p_block = std::numeric_limits<double>::quiet_NaN();
        sol.decoy_residual = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }
    sol.p_block = (one_minus_exp(nu_a * sol.eta_prime) - one_minus_exp(scenario.nu * sol.eta) / p)
        / blocked_per_unit;
    sol.decoy_residual = decoy_gain(scenario, sol.eta_prime, sol.p_block) - q_nu;
    if (std::abs(sol.decoy_residual) > kClosedFormTolerance) {
        // The residual root is authoritative; the balance is linear so one
        // Newton step lands on it.
        sol.p_block += sol.decoy_residual / (p * blocked_per_unit);
        sol.decoy_residual = decoy_gain(scenario, sol.eta_prime, sol.p_block) - q_nu;
    }

    sol.feasible = sol.eta_prime <= 1.0 && sol.eta_prime <= scenario.eta0 && sol.p_block > 0.0
        && sol.p_block < 1.0;
    if (sol.feasible && scenario.length_km > 0.0) {
        sol.delta_prime_db_per_km = scenario.delta_db_per_km
            - 10.0 * std::log10(sol.eta_prime / sol.eta) / scenario.length_km;
    }
    return sol;
}

double min_feasible_distance(AttackScenario scenario, double resolution_km)
{
    if (!std::isfinite(resolution_km) || resolution_km <= 0.0) {
        throw InvalidInput("resolution must be finite and positive");
    }
    auto excess = [&](double length) {
        scenario.length_km = length;
        return solve_attack(scenario).eta_prime - scenario.eta0;
    };
    double lo = 0.0;
    double hi = kMaxDistanceKm;
    if (excess(lo) <= 0.0) {
        return lo;
    }
    if (excess(hi) > 0.0) {
        throw NoCrossing("required transmittance exceeds eta0 over the whole [0, 500] km range");
    }
    while (hi - lo > resolution_km) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<AttackSolution> scan_distance(AttackScenario scenario, double l_min, double l_max,
                                          double step)
{
    if (!std::isfinite(l_min) || !std::isfinite(l_max) || l_min < 0.0 || !(l_min < l_max)) {
        throw InvalidInput("scan range must satisfy 0 <= l_min < l_max");
    }
    if (!std::isfinite(step) || step <= 0.0) {
        throw InvalidInput("scan step must be finite and positive");
    }
    std::vector<AttackSolution> out;
    const auto count = static_cast<long>(std::floor((l_max - l_min) / step + 1e-9));
    out.reserve(static_cast<std::size_t>(count + 1));
    for (long i = 0; i <= count; ++i) {
        scenario.length_km = l_min + static_cast<double>(i) * step;
        out.push_back(solve_attack(scenario));
    }
    return out;
}

} // namespace gainswitch
