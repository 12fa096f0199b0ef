#include "gainswitch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "gainswitch/errors.hpp"
#include "gainswitch/format.hpp"

namespace gainswitch {

namespace {

constexpr std::string_view kEmbeddedProfile = R"(# Gain-switched laser diode, default device profile.
[laser]
g0_ref      = 2e-6     cm^3/s
n0_ref      = 1e18     cm^-3
tau_n_ref   = 1.2      ns
tau_p       = 5.0      ps
beta_sp     = 0.001    -
d           = 0.1      um
gamma       = 0.5      -
j_ac        = 2.4e4    A/cm^2
j_dc        = 4.8e2    A/cm^2
t0          = 80       K
t0a         = 100      K
t_ref       = 25       C

[drive]
j_ac_signal = 2.4e4    A/cm^2
j_ac_decoy  = 2.0e4    A/cm^2
duration    = 100      ps

[attack]
mu          = 0.48     -
nu          = 0.05     -
alpha       = 0.8      -
beta_d      = 0.4      -
p_dis       = 0.8      -
y0          = 1.7e-6   -
eta0        = 0.045    -
delta       = 0.21     dB/km

[run]
temps       = 15,20,25,30,35,40,45 C
band        = 0.01     -
format      = csv
out         = .
decimation  = 1        -
jobs        = 1        -
)";

enum class Kind { number, list, text };

struct Field
{
    std::string_view section;
    std::string_view key;
    std::string_view unit; // empty for text entries
    double scale;          // file value * scale = SI value
    Kind kind;
    std::function<void(RunConfig&, const std::vector<double>&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string render(double si, double scale) { return format_double(si / scale); }

template <typename Access>
Field numeric(std::string_view section, std::string_view key, std::string_view unit, double scale,
              Access access)
{
    return {section,
            key,
            unit,
            scale,
            Kind::number,
            [access, scale](RunConfig& c, const std::vector<double>& v, std::string_view) {
                access(c) = v.front() * scale;
            },
            [access, scale](const RunConfig& c) { return render(access(c), scale); }};
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> f;
        auto laser = [&](std::string_view key, std::string_view unit, double scale,
                         double LaserConstants::*member) {
            f.push_back(numeric("laser", key, unit, scale,
                                [member](auto& c) -> auto& { return c.profile.constants.*member; }));
        };
        laser("g0_ref", "cm^3/s", 1e-6, &LaserConstants::g0_ref);
        laser("n0_ref", "cm^-3", 1e6, &LaserConstants::n0_ref);
        laser("tau_n_ref", "ns", 1e-9, &LaserConstants::tau_n_ref);
        laser("tau_p", "ps", 1e-12, &LaserConstants::tau_p);
        laser("beta_sp", "-", 1.0, &LaserConstants::beta_sp);
        laser("d", "um", 1e-6, &LaserConstants::d);
        laser("gamma", "-", 1.0, &LaserConstants::gamma);
        f.push_back(numeric("laser", "j_ac", "A/cm^2", 1e4,
                            [](auto& c) -> auto& { return c.profile.j_ac_signal; }));
        f.push_back(numeric("laser", "j_dc", "A/cm^2", 1e4,
                            [](auto& c) -> auto& { return c.profile.j_dc; }));
        laser("t0", "K", 1.0, &LaserConstants::t0);
        laser("t0a", "K", 1.0, &LaserConstants::t0a);
        laser("t_ref", "C", 1.0, &LaserConstants::t_ref);

        f.push_back(numeric("drive", "j_ac_signal", "A/cm^2", 1e4,
                            [](auto& c) -> auto& { return c.profile.j_ac_signal; }));
        f.push_back(numeric("drive", "j_ac_decoy", "A/cm^2", 1e4,
                            [](auto& c) -> auto& { return c.profile.j_ac_decoy; }));
        f.push_back(numeric("drive", "duration", "ps", 1e-12,
                            [](auto& c) -> auto& { return c.profile.pulse_duration; }));

        auto attack = [&](std::string_view key, std::string_view unit, double AttackScenario::*member) {
            f.push_back(numeric("attack", key, unit, 1.0,
                                [member](auto& c) -> auto& { return c.attack.*member; }));
        };
        attack("mu", "-", &AttackScenario::mu);
        attack("nu", "-", &AttackScenario::nu);
        attack("alpha", "-", &AttackScenario::alpha);
        attack("beta_d", "-", &AttackScenario::beta_d);
        attack("p_dis", "-", &AttackScenario::p_dis);
        attack("y0", "-", &AttackScenario::y0);
        attack("eta0", "-", &AttackScenario::eta0);
        attack("delta", "dB/km", &AttackScenario::delta_db_per_km);

        f.push_back({"run", "temps", "C", 1.0, Kind::list,
                     [](RunConfig& c, const std::vector<double>& v, std::string_view) {
                         for (std::size_t i = 1; i < v.size(); ++i) {
                             if (!(v[i] > v[i - 1])) {
                                 throw InvalidInput("temperatures must be strictly ascending");
                             }
                         }
                         c.temperatures = v;
                     },
                     [](const RunConfig& c) {
                         std::string out;
                         for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
                             out += (i ? "," : "") + format_double(c.temperatures[i]);
                         }
                         return out;
                     }});
        f.push_back({"run", "dt", "fs", 1e-15, Kind::number,
                     [](RunConfig& c, const std::vector<double>& v, std::string_view) {
                         c.dt = v.front() * 1e-15;
                     },
                     [](const RunConfig& c) { return c.dt ? render(*c.dt, 1e-15) : std::string(); }});
        f.push_back(numeric("run", "band", "-", 1.0,
                            [](auto& c) -> auto& { return c.recovery_band; }));
        f.push_back({"run", "format", "", 1.0, Kind::text,
                     [](RunConfig& c, const std::vector<double>&, std::string_view text) {
                         if (text == "csv") {
                             c.format = OutputFormat::csv;
                         } else if (text == "json") {
                             c.format = OutputFormat::json;
                         } else {
                             throw InvalidInput("format must be csv or json");
                         }
                     },
                     [](const RunConfig& c) {
                         return std::string(c.format == OutputFormat::csv ? "csv" : "json");
                     }});
        f.push_back({"run", "out", "", 1.0, Kind::text,
                     [](RunConfig& c, const std::vector<double>&, std::string_view text) {
                         c.out_dir = std::string(text);
                     },
                     [](const RunConfig& c) { return c.out_dir; }});
        f.push_back({"run", "decimation", "-", 1.0, Kind::number,
                     [](RunConfig& c, const std::vector<double>& v, std::string_view) {
                         if (v.front() < 1.0 || v.front() != std::floor(v.front())) {
                             throw InvalidInput("decimation must be a positive integer");
                         }
                         c.decimation = static_cast<std::size_t>(v.front());
                     },
                     [](const RunConfig& c) { return std::to_string(c.decimation); }});
        f.push_back({"run", "jobs", "-", 1.0, Kind::number,
                     [](RunConfig& c, const std::vector<double>& v, std::string_view) {
                         if (v.front() < 1.0 || v.front() != std::floor(v.front())) {
                             throw InvalidInput("jobs must be a positive integer");
                         }
                         c.jobs = static_cast<int>(v.front());
                     },
                     [](const RunConfig& c) { return std::to_string(c.jobs); }});
        return f;
    }();
    return table;
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view text)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

} // namespace

std::vector<double> parse_number_list(std::string_view text)
{
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        const auto value = parse_double(item);
        if (!value) {
            throw InvalidInput("'" + std::string(item) + "' is not a number");
        }
        out.push_back(*value);
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

void RunConfig::validate() const
{
    profile.constants.validate();
    if (temperatures.empty()) {
        throw InvalidInput("temperature list is empty");
    }
    if (!std::is_sorted(temperatures.begin(), temperatures.end())
        || std::adjacent_find(temperatures.begin(), temperatures.end()) != temperatures.end()) {
        throw InvalidInput("temperature list must be strictly ascending");
    }
    for (double v : {profile.j_ac_signal, profile.j_ac_decoy, profile.pulse_duration}) {
        if (!(v > 0.0)) {
            throw InvalidInput("drive levels and pulse duration must be positive");
        }
    }
    if (!(profile.j_dc >= 0.0)) {
        throw InvalidInput("j_dc must be non-negative");
    }
    if (dt && !(*dt > 0.0)) {
        throw InvalidInput("dt must be positive");
    }
    if (!(recovery_band > 0.0 && recovery_band <= 0.1)) {
        throw InvalidInput("recovery band must lie in (0, 0.1]");
    }
    attack.validate();
    if (decimation == 0 || jobs < 1) {
        throw InvalidInput("decimation and jobs must be at least 1");
    }
}

std::string_view embedded_profile_text() { return kEmbeddedProfile; }

RunConfig default_config()
{
    static const RunConfig config = [] {
        RunConfig base;
        base.profile_source = "embedded";
        return parse_config(kEmbeddedProfile, base);
    }();
    return config;
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    std::string section;
    int line_no = 0;
    std::optional<double> signal_level;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("unterminated section header", line_no);
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "laser" && section != "drive" && section != "attack" && section != "run") {
                throw ConfigError("unknown section [" + section + "]", line_no);
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value unit'", line_no);
        }
        if (section.empty()) {
            throw ConfigError("entry outside of a section", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const auto rhs = trim(line.substr(eq + 1));

        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) {
            return f.section == section && f.key == key;
        });
        if (it == table.end()) {
            throw ConfigError("unknown key '" + std::string(key) + "' in [" + section + "]", line_no);
        }

        std::string_view value = rhs;
        if (it->kind != Kind::text) {
            const auto space = rhs.find_last_of(" \t");
            if (space == std::string_view::npos) {
                throw ConfigError(std::string(key) + ": missing units (expected '"
                                      + std::string(it->unit) + "')",
                                  line_no);
            }
            // The unit is the last token; lists may contain spaces.
            value = trim(rhs.substr(0, space));
            const auto unit = trim(rhs.substr(space));
            if (unit != it->unit) {
                throw ConfigError(std::string(key) + ": units '" + std::string(unit)
                                      + "' not accepted (expected '" + std::string(it->unit) + "')",
                                  line_no);
            }
        }
        try {
            std::vector<double> numbers;
            if (it->kind == Kind::number) {
                const auto v = parse_double(value);
                if (!v) {
                    throw InvalidInput("'" + std::string(value) + "' is not a number");
                }
                numbers.push_back(*v);
            } else if (it->kind == Kind::list) {
                numbers = parse_number_list(value);
            }
            it->set(base, numbers, value);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string(key) + ": " + e.what(), line_no);
        }

        // [laser] j_ac and [drive] j_ac_signal name the same level.
        if (key == "j_ac" || key == "j_ac_signal") {
            if (signal_level && *signal_level != base.profile.j_ac_signal) {
                throw ConfigError("[laser] j_ac and [drive] j_ac_signal disagree", line_no);
            }
            signal_level = base.profile.j_ac_signal;
        }
    }
    return base;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open profile '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    RunConfig config = parse_config(buf.str(), default_config());
    config.profile_source = path;
    return config;
}

std::string dump_config(const RunConfig& config)
{
    std::ostringstream out;
    out << "# profile source: " << config.profile_source << '\n';
    std::string_view section;
    for (const Field& f : fields()) {
        if (f.section == "drive" && f.key == "j_ac_signal") {
            continue; // carried by [laser] j_ac
        }
        const std::string value = f.get(config);
        if (value.empty()) {
            continue;
        }
        if (f.section != section) {
            section = f.section;
            out << "\n[" << section << "]\n";
        }
        out << f.key << " = " << value;
        if (!f.unit.empty()) {
            out << ' ' << f.unit;
        }
        out << '\n';
    }
    return out.str();
}

} // namespace gainswitch
