#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gainswitch/decoy_attack.hpp"
#include "gainswitch/thermal_model.hpp"

namespace gainswitch {

/// Device constants plus the drive levels for both pulse classes, SI units.
struct LaserProfile
{
    LaserConstants constants;
    double j_dc = 0.0;
    double j_ac_signal = 0.0;
    double j_ac_decoy = 0.0;
    double pulse_duration = 0.0;
};

enum class OutputFormat { csv, json };

struct RunConfig
{
    LaserProfile profile;
    /// "embedded" or the path of the profile file in use.
    std::string profile_source = "embedded";
    std::vector<double> temperatures;
    /// Integrator step; empty selects the per-mode default.
    std::optional<double> dt;
    double recovery_band = 0.01;
    AttackScenario attack;
    std::string out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    std::size_t decimation = 1;
    int jobs = 1;

    void validate() const;
};

/// Text of the built-in profile.
std::string_view embedded_profile_text();

/// Built-in configuration: device, drive and attack defaults.
RunConfig default_config();

/// Applies `key = value unit` entries from `text` on top of `base`.
/// Throws ConfigError carrying the offending line number.
RunConfig parse_config(std::string_view text, RunConfig base);

RunConfig load_config(const std::string& path);

/// Serialises every field in the file format; parse_config of the result
/// reproduces the configuration.
std::string dump_config(const RunConfig& config);

/// Parses "15,20,25" style lists.
std::vector<double> parse_number_list(std::string_view text);

} // namespace gainswitch
