#include "gainswitch/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "gainswitch/decoy_attack.hpp"
#include "gainswitch/errors.hpp"
#include "gainswitch/format.hpp"
#include "gainswitch/parallel.hpp"
#include "gainswitch/published_reference.hpp"
#include "gainswitch/reference_oracle.hpp"

namespace gainswitch {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kElevatedFraction = 0.01;

std::string temperature_tag(double t) { return format_double(t) + "C"; }

ordered_json to_json(const std::optional<double>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::trunc)
{
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::out | mode);
    if (!out) {
        throw InvalidInput("cannot write '" + path.string() + "'");
    }
    return out;
}

// Maps library failures onto exit codes.
int guarded(std::ostream& log, const std::function<void()>& body)
{
    try {
        body();
        return kExitOk;
    } catch (const DivergenceError& e) {
        log << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidInput& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const AboveThresholdBias& e) {
        log << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

double pulse_step(const RunConfig& config) { return config.dt.value_or(kDefaultPulseStep); }
double train_step(const RunConfig& config) { return config.dt.value_or(kDefaultTrainStep); }

ordered_json metrics_object(const PulseMetrics& m)
{
    ordered_json row;
    row["temp_C"] = m.temperature;
    row["t_on_ps"] = m.t_on * 1e12;
    row["t_peak_ps"] = m.t_peak * 1e12;
    row["smax_m3"] = m.s_max;
    row["energy_m3s"] = m.pulse_energy;
    row["t_re_ns"] = m.t_re ? ordered_json(*m.t_re * 1e9) : ordered_json(nullptr);
    row["n_initial_m3"] = m.n_initial;
    row["recovery_band"] = m.recovery_band;
    return row;
}

} // namespace

std::string_view to_string(StateKind kind) noexcept
{
    return kind == StateKind::signal ? "signal" : "decoy";
}

DriveWaveform pulse_drive(const LaserProfile& profile, StateKind kind)
{
    DriveWaveform drive;
    drive.j_dc = profile.j_dc;
    drive.j_ac = kind == StateKind::signal ? profile.j_ac_signal : profile.j_ac_decoy;
    drive.pulse_duration = profile.pulse_duration;
    return drive;
}

Trajectory simulate_pulse(const LaserProfile& profile, double temperature, StateKind kind,
                          double dt, double horizon)
{
    const ThermalState th = thermal_state(profile.constants, temperature, profile.j_dc);
    return integrate(th, profile.constants, pulse_drive(profile, kind), dt, horizon);
}

std::vector<SweepPoint> sweep_states(const LaserProfile& profile,
                                     const std::vector<double>& temperatures, double dt,
                                     double horizon, double band, int jobs)
{
    // Signal and decoy at each temperature are independent work items.
    const auto metrics = parallel_map(2 * temperatures.size(), jobs, [&](std::size_t i) {
        const StateKind kind = i % 2 == 0 ? StateKind::signal : StateKind::decoy;
        return extract_metrics(simulate_pulse(profile, temperatures[i / 2], kind, dt, horizon), 0,
                               band);
    });
    std::vector<SweepPoint> out;
    out.reserve(temperatures.size());
    for (std::size_t i = 0; i < temperatures.size(); ++i) {
        out.push_back({thermal_state(profile.constants, temperatures[i], profile.j_dc),
                       metrics[2 * i], metrics[2 * i + 1]});
    }
    return out;
}

std::vector<Table2Row> table2_rows(const std::vector<SweepPoint>& sweep)
{
    using Getter = std::function<double(const SweepPoint&)>;
    struct Spec
    {
        const char* quantity;
        const char* unit;
        double scale;
        Getter get;
        const std::array<double, 7>* published;
    };
    const std::vector<Spec> specs{
        {"N_th", "1e24 m^-3", 1e24, [](const SweepPoint& p) { return p.thermal.n_th; },
         &published::kNth},
        {"N_DC", "1e23 m^-3", 1e23, [](const SweepPoint& p) { return p.thermal.n_dc; },
         &published::kNdc},
        {"S_max signal", "1e23 m^-3", 1e23, [](const SweepPoint& p) { return p.signal.s_max; },
         &published::kSmaxSignal},
        {"S_max decoy", "1e22 m^-3", 1e22, [](const SweepPoint& p) { return p.decoy.s_max; },
         &published::kSmaxDecoy},
        {"t_on signal", "ps", 1e-12, [](const SweepPoint& p) { return p.signal.t_on; },
         &published::kTonSignal},
        {"t_peak signal", "ps", 1e-12, [](const SweepPoint& p) { return p.signal.t_peak; },
         &published::kTpeakSignal},
        {"t_on decoy", "ps", 1e-12, [](const SweepPoint& p) { return p.decoy.t_on; },
         &published::kTonDecoy},
        {"t_peak decoy", "ps", 1e-12, [](const SweepPoint& p) { return p.decoy.t_peak; },
         &published::kTpeakDecoy},
    };
    std::vector<Table2Row> rows;
    for (const Spec& spec : specs) {
        Table2Row row{spec.quantity, spec.unit, spec.scale, {}, {}};
        for (const SweepPoint& p : sweep) {
            row.simulated.push_back(spec.get(p));
            const int idx = published::index_of(p.thermal.temperature);
            row.published.push_back(idx >= 0 ? std::optional<double>(
                                                   (*spec.published)[static_cast<std::size_t>(idx)])
                                             : std::nullopt);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_table2_csv(std::ostream& out, const std::vector<double>& temperatures,
                      const std::vector<Table2Row>& rows)
{
    out << "quantity,unit";
    for (double t : temperatures) {
        const std::string tag = temperature_tag(t);
        out << ",sim_" << tag << ",ref_" << tag << ",dev_" << tag;
    }
    out << '\n';
    for (const Table2Row& row : rows) {
        out << row.quantity << ',' << row.unit;
        for (std::size_t i = 0; i < row.simulated.size(); ++i) {
            const double sim = row.simulated[i] / row.display_scale;
            out << ',' << format_double(sim);
            if (row.published[i]) {
                const double ref = *row.published[i] / row.display_scale;
                out << ',' << format_double(ref) << ',' << format_double((sim - ref) / ref);
            } else {
                out << ",,";
            }
        }
        out << '\n';
    }
}

void write_table2_json(std::ostream& out, const std::vector<double>& temperatures,
                       const std::vector<Table2Row>& rows)
{
    ordered_json doc;
    doc["temperatures_C"] = temperatures;
    doc["rows"] = ordered_json::array();
    for (const Table2Row& row : rows) {
        ordered_json r;
        r["quantity"] = row.quantity;
        r["unit"] = row.unit;
        r["simulated"] = ordered_json::array();
        r["reference"] = ordered_json::array();
        r["relative_deviation"] = ordered_json::array();
        for (std::size_t i = 0; i < row.simulated.size(); ++i) {
            const double sim = row.simulated[i] / row.display_scale;
            r["simulated"].push_back(sim);
            if (row.published[i]) {
                const double ref = *row.published[i] / row.display_scale;
                r["reference"].push_back(ref);
                r["relative_deviation"].push_back((sim - ref) / ref);
            } else {
                r["reference"].push_back(nullptr);
                r["relative_deviation"].push_back(nullptr);
            }
        }
        doc["rows"].push_back(std::move(r));
    }
    out << doc.dump(2) << '\n';
}

void write_table2_text(std::ostream& out, const std::vector<double>& temperatures,
                       const std::vector<Table2Row>& rows)
{
    out << std::left << std::setw(26) << "quantity";
    for (double t : temperatures) {
        out << std::setw(22) << (format_sig(t, 3) + " C  sim/ref");
    }
    out << '\n';
    for (const Table2Row& row : rows) {
        out << std::setw(26) << (row.quantity + " (" + row.unit + ")");
        for (std::size_t i = 0; i < row.simulated.size(); ++i) {
            std::string cell = format_sig(row.simulated[i] / row.display_scale);
            if (row.published[i]) {
                cell += " / " + format_sig(*row.published[i] / row.display_scale);
            }
            out << std::setw(22) << cell;
        }
        out << '\n';
    }
    out << std::right;
}

void write_metrics_csv(std::ostream& out, const std::vector<PulseMetrics>& rows, bool header)
{
    if (header) {
        out << "temp_C,t_on_ps,t_peak_ps,smax_m3,energy_m3s,t_re_ns,n_initial_m3\n";
    }
    for (const PulseMetrics& m : rows) {
        out << format_double(m.temperature) << ',' << format_double(m.t_on * 1e12) << ','
            << format_double(m.t_peak * 1e12) << ',' << format_double(m.s_max) << ','
            << format_double(m.pulse_energy) << ','
            << (m.t_re ? format_double(*m.t_re * 1e9) : std::string("nan")) << ','
            << format_double(m.n_initial) << '\n';
    }
}

void write_metrics_json(std::ostream& out, const std::vector<PulseMetrics>& rows)
{
    ordered_json doc = ordered_json::array();
    for (const PulseMetrics& m : rows) {
        doc.push_back(metrics_object(m));
    }
    out << doc.dump(2) << '\n';
}

std::vector<TrainCycle> train_cycles(const LaserProfile& profile, double temperature,
                                     double frequency, int n_pulses, double dt, double band)
{
    if (!std::isfinite(frequency) || frequency <= 0.0) {
        throw InvalidInput("frequency must be finite and positive");
    }
    const ThermalState th = thermal_state(profile.constants, temperature, profile.j_dc);
    DriveWaveform drive = pulse_drive(profile, StateKind::signal);
    drive.period = 1.0 / frequency;
    drive.n_pulses = n_pulses;
    const TrainTrajectory train = simulate_train(th, profile.constants, drive, dt);

    std::vector<TrainCycle> cycles;
    for (int k = 0; k < n_pulses; ++k) {
        const PulseMetrics m = extract_metrics(train.trajectory, k, band);
        const double n_init = train.edge_density[static_cast<std::size_t>(k)];
        cycles.push_back({k + 1, drive.edge(k), n_init, m.s_max, m.t_peak,
                          n_init > th.n_dc * (1.0 + kElevatedFraction)});
    }
    return cycles;
}

void write_train_csv(std::ostream& out, const std::vector<TrainCycle>& cycles)
{
    out << "cycle,edge_time_s,n_initial_m3,smax_m3,t_peak_ps,elevated\n";
    for (const TrainCycle& c : cycles) {
        out << c.index << ',' << format_double(c.edge_time) << ',' << format_double(c.n_initial)
            << ',' << format_double(c.s_max) << ',' << format_double(c.t_peak * 1e12) << ','
            << (c.elevated ? 1 : 0) << '\n';
    }
}

std::pair<double, double> derive_attenuation(const LaserProfile& profile, double cold, double hot,
                                             double dt, double horizon)
{
    auto energy = [&](double t, StateKind kind) {
        return extract_metrics(simulate_pulse(profile, t, kind, dt, horizon)).pulse_energy;
    };
    return {energy(hot, StateKind::signal) / energy(cold, StateKind::signal),
            energy(hot, StateKind::decoy) / energy(cold, StateKind::decoy)};
}

int run_pulse(const RunConfig& config, double temperature, StateKind kind, double horizon,
              std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        const Trajectory traj =
            simulate_pulse(config.profile, temperature, kind, pulse_step(config), horizon);
        const PulseMetrics m = extract_metrics(traj, 0, config.recovery_band);

        const fs::path dir(config.out_dir);
        const std::string stem = "pulse_" + std::string(to_string(kind)) + "_"
            + temperature_tag(temperature);
        {
            auto out = open_output(dir / (stem + ".csv"));
            write_trajectory_csv(out, traj, config.decimation);
        }
        const std::string metrics_name = "metrics_" + std::string(to_string(kind));
        if (config.format == OutputFormat::csv) {
            const fs::path path = dir / (metrics_name + ".csv");
            const bool fresh = !fs::exists(path);
            auto out = open_output(path, std::ios::app);
            write_metrics_csv(out, {m}, fresh);
        } else {
            const fs::path path = dir / (metrics_name + ".json");
            ordered_json doc = ordered_json::array();
            if (fs::exists(path)) {
                std::ifstream in(path);
                doc = ordered_json::parse(in);
            }
            doc.push_back(metrics_object(m));
            auto out = open_output(path);
            out << doc.dump(2) << '\n';
        }
        log << to_string(kind) << " @ " << format_sig(temperature) << " C: t_on "
            << format_sig(m.t_on * 1e12) << " ps, t_peak " << format_sig(m.t_peak * 1e12)
            << " ps, S_max " << format_sig(m.s_max) << " m^-3, t_re "
            << (m.t_re ? format_sig(*m.t_re * 1e9) + " ns" : std::string("not recovered"))
            << '\n';
    });
}

int run_table2(const RunConfig& config, double horizon, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        const auto sweep = sweep_states(config.profile, config.temperatures, pulse_step(config),
                                        horizon, config.recovery_band, config.jobs);
        const auto rows = table2_rows(sweep);
        const fs::path dir(config.out_dir);
        std::vector<PulseMetrics> signal;
        std::vector<PulseMetrics> decoy;
        for (const auto& p : sweep) {
            signal.push_back(p.signal);
            decoy.push_back(p.decoy);
        }
        if (config.format == OutputFormat::csv) {
            auto out = open_output(dir / "table2.csv");
            write_table2_csv(out, config.temperatures, rows);
            auto s = open_output(dir / "sweep_signal.csv");
            write_metrics_csv(s, signal);
            auto d = open_output(dir / "sweep_decoy.csv");
            write_metrics_csv(d, decoy);
        } else {
            auto out = open_output(dir / "table2.json");
            write_table2_json(out, config.temperatures, rows);
            auto s = open_output(dir / "sweep_signal.json");
            write_metrics_json(s, signal);
            auto d = open_output(dir / "sweep_decoy.json");
            write_metrics_json(d, decoy);
        }
        write_table2_text(log, config.temperatures, rows);
    });
}

int run_train(const RunConfig& config, double frequency, double temperature, int n_pulses,
              std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        const auto cycles = train_cycles(config.profile, temperature, frequency, n_pulses,
                                         train_step(config), config.recovery_band);
        const fs::path dir(config.out_dir);
        const std::string stem =
            "train_" + format_double(frequency / 1e6) + "MHz_" + temperature_tag(temperature);
        if (config.format == OutputFormat::csv) {
            auto out = open_output(dir / (stem + ".csv"));
            write_train_csv(out, cycles);
        } else {
            ordered_json doc = ordered_json::array();
            for (const auto& c : cycles) {
                doc.push_back({{"cycle", c.index},
                               {"edge_time_s", c.edge_time},
                               {"n_initial_m3", c.n_initial},
                               {"smax_m3", c.s_max},
                               {"t_peak_ps", c.t_peak * 1e12},
                               {"elevated", c.elevated}});
            }
            auto out = open_output(dir / (stem + ".json"));
            out << doc.dump(2) << '\n';
        }
        for (const auto& c : cycles) {
            log << "cycle " << c.index << ": n_initial " << format_sig(c.n_initial)
                << " m^-3, S_max " << format_sig(c.s_max) << " m^-3"
                << (c.elevated ? "  [elevated initial density]" : "") << '\n';
        }
    });
}

int run_attack(const RunConfig& config, const AttackScanOptions& options, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        AttackScenario scenario = config.attack;
        if (options.derive_from_temperature) {
            const auto [alpha, beta] =
                derive_attenuation(config.profile, config.temperatures.front(),
                                   *options.derive_from_temperature, pulse_step(config),
                                   kDefaultPulseHorizon);
            scenario.alpha = alpha;
            scenario.beta_d = beta;
            log << "derived alpha " << format_sig(alpha, 4) << ", beta_d " << format_sig(beta, 4)
                << '\n';
        }
        const auto scan = scan_distance(scenario, options.l_min, options.l_max, options.step);

        std::optional<double> min_distance;
        try {
            min_distance = min_feasible_distance(scenario, options.resolution_km);
        } catch (const NoCrossing&) {
        }

        std::optional<double> ratio_min, ratio_max, block_min, block_max;
        std::size_t feasible = 0;
        for (const auto& s : scan) {
            if (!s.feasible) {
                continue;
            }
            ++feasible;
            const double r = s.eta_ratio();
            ratio_min = std::min(ratio_min.value_or(r), r);
            ratio_max = std::max(ratio_max.value_or(r), r);
            block_min = std::min(block_min.value_or(s.p_block), s.p_block);
            block_max = std::max(block_max.value_or(s.p_block), s.p_block);
        }

        const fs::path dir(config.out_dir);
        {
            auto out = open_output(dir / "attack_scan.csv");
            out << "L_km,eta,eta_prime,eta_ratio,p_block,delta_prime_db_km,feasible\n";
            for (const auto& s : scan) {
                out << format_double(s.length_km) << ',' << format_double(s.eta) << ','
                    << format_double(s.eta_prime) << ',' << format_double(s.eta_ratio()) << ','
                    << format_double(s.p_block) << ','
                    << (s.delta_prime_db_per_km ? format_double(*s.delta_prime_db_per_km)
                                                : std::string("nan"))
                    << ',' << (s.feasible ? 1 : 0) << '\n';
            }
        }
        ordered_json summary;
        summary["scenario"] = {{"mu", scenario.mu},       {"nu", scenario.nu},
                               {"alpha", scenario.alpha}, {"beta_d", scenario.beta_d},
                               {"p_dis", scenario.p_dis}, {"y0", scenario.y0},
                               {"eta0", scenario.eta0},   {"delta_db_per_km", scenario.delta_db_per_km}};
        summary["scan"] = {{"l_min_km", options.l_min},
                           {"l_max_km", options.l_max},
                           {"step_km", options.step}};
        summary["min_feasible_distance_km"] = to_json(min_distance);
        summary["feasible_points"] = feasible;
        summary["feasible_region_empty"] = feasible == 0;
        summary["eta_ratio_min"] = to_json(ratio_min);
        summary["eta_ratio_max"] = to_json(ratio_max);
        summary["p_block_min"] = to_json(block_min);
        summary["p_block_max"] = to_json(block_max);
        {
            auto out = open_output(dir / "attack_summary.json");
            out << summary.dump(2) << '\n';
        }
        if (feasible == 0) {
            log << "no feasible attack point in [" << format_sig(options.l_min) << ", "
                << format_sig(options.l_max) << "] km\n";
        } else {
            log << "attack feasible at " << feasible << " of " << scan.size()
                << " scan points; minimum distance "
                << (min_distance ? format_sig(*min_distance, 4) + " km" : std::string("none"))
                << '\n';
        }
    });
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& log)
{
    int failures = 0;
    const int code = guarded(log, [&] {
        config.validate();
        const auto& p = config.profile;
        const auto reports = oracle::run_verification(p.constants, p.j_dc, p.j_ac_signal,
                                                      p.j_ac_decoy, p.pulse_duration);
        oracle::write_reports_csv(out, reports);
        failures = static_cast<int>(
            std::count_if(reports.begin(), reports.end(), [](const auto& r) { return !r.pass; }));
    });
    if (code != kExitOk) {
        return code;
    }
    if (failures > 0) {
        log << failures << " oracle comparison(s) outside tolerance\n";
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace gainswitch
