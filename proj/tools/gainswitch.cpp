// Command-line front end: single pulses, temperature sweeps, pulse trains and
// the attack distance scan.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gainswitch/commands.hpp"
#include "gainswitch/config.hpp"
#include "gainswitch/errors.hpp"

using namespace gainswitch;

int main(int argc, char** argv)
{
    CLI::App app{"Gain-switched laser temperature dynamics and decoy-state attack analysis"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> profile_path;
    std::optional<std::string> temps;
    std::optional<double> dt;
    std::optional<double> band;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<int> jobs;
    std::optional<int> decimation;

    app.add_option("--profile", profile_path, "Profile file (key = value unit)");
    app.add_option("--temps", temps, "Comma-separated temperatures, degC");
    app.add_option("--dt", dt, "Integrator step, seconds");
    app.add_option("--band", band, "Relative recovery band around n_dc");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_option("--decimation", decimation, "Keep every n-th trajectory sample")
        ->check(CLI::PositiveNumber);

    auto* pulse = app.add_subcommand("pulse", "Simulate one pulse and extract its metrics");
    double pulse_temp = 25.0;
    std::string state = "signal";
    double pulse_horizon = kDefaultPulseHorizon;
    pulse->add_option("--temp", pulse_temp, "Temperature, degC");
    pulse->add_option("--state", state, "Pulse class")->check(CLI::IsMember({"signal", "decoy"}));
    pulse->add_option("--horizon", pulse_horizon, "Simulated time, seconds");

    auto* table2 = app.add_subcommand("table2", "Temperature sweep against the reference table");
    double table_horizon = kDefaultPulseHorizon;
    table2->add_option("--horizon", table_horizon, "Simulated time per pulse, seconds");

    auto* train = app.add_subcommand("train", "Simulate a periodic pulse train");
    double freq = 800e6;
    double train_temp = 45.0;
    int n_pulses = 3;
    train->add_option("--freq", freq, "Repetition frequency, Hz")->check(CLI::PositiveNumber);
    train->add_option("--temp", train_temp, "Temperature, degC");
    train->add_option("--pulses", n_pulses, "Number of pulses")->check(CLI::Range(2, 100000));

    auto* attack = app.add_subcommand("attack", "Distance scan of the modified PNS attack");
    AttackScanOptions scan;
    attack->add_option("--lmin", scan.l_min, "Scan start, km");
    attack->add_option("--lmax", scan.l_max, "Scan end, km");
    attack->add_option("--lstep", scan.step, "Scan step, km");
    attack->add_option("--derive-from", scan.derive_from_temperature,
                       "Derive alpha/beta_d from pulse energies at this temperature");

    auto* verify = app.add_subcommand("verify", "Oracle cross-checks as CSV");
    verify->group("");

    auto* dump = app.add_subcommand("dump-config", "Print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    RunConfig config;
    try {
        config = profile_path ? load_config(*profile_path) : default_config();
        if (temps) {
            config.temperatures = parse_number_list(*temps);
        }
        if (dt) {
            config.dt = *dt;
        }
        if (band) {
            config.recovery_band = *band;
        }
        if (out_dir) {
            config.out_dir = *out_dir;
        }
        if (format) {
            config.format = *format == "json" ? OutputFormat::json : OutputFormat::csv;
        }
        if (jobs) {
            config.jobs = *jobs;
        }
        if (decimation) {
            config.decimation = static_cast<std::size_t>(*decimation);
        }
        config.validate();
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (*pulse) {
        return run_pulse(config, pulse_temp, state == "decoy" ? StateKind::decoy : StateKind::signal,
                         pulse_horizon, std::cerr);
    }
    if (*table2) {
        return run_table2(config, table_horizon, std::cout);
    }
    if (*train) {
        return run_train(config, freq, train_temp, n_pulses, std::cout);
    }
    if (*attack) {
        return run_attack(config, scan, std::cout);
    }
    if (*verify) {
        return run_verify(config, std::cout, std::cerr);
    }
    if (*dump) {
        std::cout << dump_config(config);
        return kExitOk;
    }
    return kExitFailure;
}
