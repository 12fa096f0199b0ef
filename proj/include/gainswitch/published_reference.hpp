#pragma once

#include <array>

namespace gainswitch::published {

// Reference simulation results for the default profile at 15..45 degC.
inline constexpr std::array<double, 7> kTemperatures{15, 20, 25, 30, 35, 40, 45};

inline constexpr std::array<double, 7> kNth{1.13e24, 1.16e24, 1.20e24, 1.24e24,
                                            1.29e24, 1.33e24, 1.39e24};
inline constexpr std::array<double, 7> kNdc{3.69e23, 3.65e23, 3.60e23, 3.56e23,
                                            3.51e23, 3.47e23, 3.42e23};
inline constexpr std::array<double, 7> kSmaxSignal{1.42e23, 1.40e23, 1.37e23, 1.31e23,
                                                   1.17e23, 1.01e23, 0.83e23};
inline constexpr std::array<double, 7> kSmaxDecoy{8.82e22, 7.54e22, 6.33e22, 4.79e22,
                                                  3.26e22, 2.07e22, 0.57e22};
inline constexpr std::array<double, 7> kTonSignal{52.3e-12, 56.4e-12, 58.5e-12, 62.1e-12,
                                                  65.7e-12, 69.0e-12, 72.9e-12};
inline constexpr std::array<double, 7> kTpeakSignal{95.9e-12, 97.9e-12, 100e-12, 102e-12,
                                                    105e-12, 108e-12, 111e-12};
inline constexpr std::array<double, 7> kTonDecoy{63.6e-12, 67.8e-12, 71.3e-12, 74.0e-12,
                                                 80.1e-12, 83.8e-12, 90.1e-12};
inline constexpr std::array<double, 7> kTpeakDecoy{111e-12, 113e-12, 118e-12, 122e-12,
                                                   129e-12, 137e-12, 156e-12};

inline constexpr double kRecovery15C = 1.24e-9;
inline constexpr double kRecovery45C = 1.60e-9;
inline constexpr double kDeltaTpeak15C = 15.1e-12;
inline constexpr double kDeltaTpeak45C = 45.0e-12;
inline constexpr double kSmaxRatio15C = 1.61;
inline constexpr double kSmaxRatio45C = 14.56;
inline constexpr double kMinFeasibleDistanceKm = 48.6;
inline constexpr double kDeltaPrime100Km = 0.11;

/// Index of `temperature` in kTemperatures, or -1.
constexpr int index_of(double temperature)
{
    for (int i = 0; i < static_cast<int>(kTemperatures.size()); ++i) {
        if (kTemperatures[static_cast<std::size_t>(i)] == temperature) {
            return i;
        }
    }
    return -1;
}

} // namespace gainswitch::published
