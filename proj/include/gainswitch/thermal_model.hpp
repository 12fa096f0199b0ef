#pragma once

namespace gainswitch {

/// Exact SI elementary charge, coulombs.
inline constexpr double kElementaryCharge = 1.602176634e-19;

/// Temperature-independent device parameters plus the reference-temperature
/// values of the three temperature-dependent ones. All fields SI; the
/// reference temperature is in degrees Celsius.
struct LaserConstants
{
    double q = kElementaryCharge;
    double d = 0.1e-6;         // active-region thickness, m
    double gamma = 0.5;        // mode confinement factor
    double beta_sp = 1e-3;     // spontaneous-emission coupling fraction
    double tau_p = 5.0e-12;    // photon lifetime, s
    double t_ref = 25.0;       // degC
    double g0_ref = 2e-12;     // differential gain, m^3/s
    double n0_ref = 1e24;      // transparency density, m^-3
    double tau_n_ref = 1.2e-9; // carrier lifetime, s
    double t0 = 80.0;          // diode characteristic temperature, K
    double t0a = 100.0;        // active-region characteristic temperature, K

    /// Throws InvalidInput when a field is non-finite, non-positive, or a
    /// fraction falls outside (0, 1].
    void validate() const;
};

/// Temperature-scaled gain, transparency density and carrier lifetime.
struct ScaledParameters
{
    double g0;
    double n0;
    double tau_n;
};

struct ThermalState
{
    double temperature; // degC
    double g0;
    double n0;
    double tau_n;
    double n_th;
    double n_dc;
    double j_th;
    double j_dc; // bias the state was evaluated at, A/m^2
};

/// Scales the reference parameters by a temperature offset (kelvin):
/// g0 falls and n0 rises with exp(delta_t / t0a); tau_n follows from
/// requiring the threshold current to scale as exp(delta_t / t0).
ScaledParameters scale_parameters(const LaserConstants& constants, double delta_t);

/// Threshold density n0 + 1/(g0 gamma tau_p).
double threshold_density(const LaserConstants& constants, const ScaledParameters& p);

/// Full parameter set at `temperature` (degC) under a DC bias `j_dc` (A/m^2).
/// Throws AboveThresholdBias when the bias alone reaches threshold.
ThermalState thermal_state(const LaserConstants& constants, double temperature, double j_dc);

/// exp(delta_t / t0).
double threshold_current_ratio(const LaserConstants& constants, double delta_t);

} // namespace gainswitch
