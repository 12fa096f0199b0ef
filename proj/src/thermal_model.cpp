#include "gainswitch/thermal_model.hpp"

#include <cmath>
#include <string>

#include "gainswitch/errors.hpp"

namespace gainswitch {

namespace {

void require_positive(double value, const char* name)
{
    if (!std::isfinite(value) || value <= 0.0) {
        throw InvalidInput(std::string(name) + " must be finite and positive");
    }
}

void require_fraction(double value, const char* name)
{
    if (!std::isfinite(value) || value <= 0.0 || value > 1.0) {
        throw InvalidInput(std::string(name) + " must lie in (0, 1]");
    }
}

} // namespace

void LaserConstants::validate() const
{
    require_positive(q, "q");
    require_positive(d, "d");
    require_fraction(gamma, "gamma");
    require_fraction(beta_sp, "beta_sp");
    require_positive(tau_p, "tau_p");
    if (!std::isfinite(t_ref)) {
        throw InvalidInput("t_ref must be finite");
    }
    require_positive(g0_ref, "g0_ref");
    require_positive(n0_ref, "n0_ref");
    require_positive(tau_n_ref, "tau_n_ref");
    require_positive(t0, "t0");
    require_positive(t0a, "t0a");
}

ScaledParameters scale_parameters(const LaserConstants& constants, double delta_t)
{
    if (!std::isfinite(delta_t)) {
        throw InvalidInput("temperature offset must be finite");
    }
    const double active = std::exp(delta_t / constants.t0a);
    const double diode = std::exp(delta_t / constants.t0);
    return {
        constants.g0_ref / active,
        constants.n0_ref * active,
        constants.tau_n_ref * active / diode,
    };
}

double threshold_density(const LaserConstants& constants, const ScaledParameters& p)
{
    return p.n0 + 1.0 / (p.g0 * constants.gamma * constants.tau_p);
}

ThermalState thermal_state(const LaserConstants& constants, double temperature, double j_dc)
{
    if (!std::isfinite(temperature)) {
        throw InvalidInput("temperature must be finite");
    }
    if (!std::isfinite(j_dc) || j_dc < 0.0) {
        throw InvalidInput("DC current density must be finite and non-negative");
    }
    const ScaledParameters p = scale_parameters(constants, temperature - constants.t_ref);
    const double qd = constants.q * constants.d;

    ThermalState state{};
    state.temperature = temperature;
    state.g0 = p.g0;
    state.n0 = p.n0;
    state.tau_n = p.tau_n;
    state.n_th = threshold_density(constants, p);
    state.n_dc = j_dc * p.tau_n / qd;
    state.j_th = qd / p.tau_n * state.n_th;
    state.j_dc = j_dc;

    if (state.n_dc >= state.n_th) {
        throw AboveThresholdBias("DC bias puts the carrier density at or above threshold at "
                                 + std::to_string(temperature) + " degC");
    }
    return state;
}

double threshold_current_ratio(const LaserConstants& constants, double delta_t)
{
    if (!std::isfinite(delta_t)) {
        throw InvalidInput("temperature offset must be finite");
    }
    return std::exp(delta_t / constants.t0);
}

} // namespace gainswitch
