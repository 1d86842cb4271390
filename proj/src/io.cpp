#include "symtop/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "symtop/error.hpp"
#include "symtop/units.hpp"
#include "symtop/version.hpp"

namespace symtop::io {

namespace {

using json = nlohmann::ordered_json;

enum class Kind { real, integer, boolean, text };

struct Field {
    const char* key;
    Kind kind;
    std::function<void(SimulationConfig&, std::string_view)> set;
    std::function<json(const SimulationConfig&)> get;
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_real(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

double to_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    if (!parse_real(v, out) || !std::isfinite(out)) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

int to_int(std::string_view key, std::string_view v) {
    v = trim(v);
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

template <class T>
Field real_field(const char* key, T SimulationConfig::*section, double T::*member) {
    return {key, Kind::real,
            [=](SimulationConfig& c, std::string_view v) { c.*section.*member = to_real(key, v); },
            [=](const SimulationConfig& c) { return json(c.*section.*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        using C = SimulationConfig;
        std::vector<Field> f;
        auto molecule_real = [&](const char* key, double RotorConstants::*m) {
            f.push_back({key, Kind::real,
                         [=](C& c, std::string_view v) { c.molecule.constants.*m = to_real(key, v); },
                         [=](const C& c) { return json(c.molecule.constants.*m); }});
        };
        molecule_real("molecule.B_e", &RotorConstants::B_e);
        molecule_real("molecule.A_e", &RotorConstants::A_e);
        molecule_real("molecule.D_J", &RotorConstants::D_J);
        molecule_real("molecule.D_JK", &RotorConstants::D_JK);
        molecule_real("molecule.D_K", &RotorConstants::D_K);
        f.push_back(real_field("molecule.dipole", &C::molecule, &MoleculeSpec::dipole_debye));
        f.push_back(real_field("ensemble.temperature", &C::ensemble, &EnsembleSpec::temperature_K));
        f.push_back({"ensemble.J_max", Kind::integer,
                     [](C& c, std::string_view v) { c.ensemble.j_max = to_int("ensemble.J_max", v); },
                     [](const C& c) { return json(c.ensemble.j_max); }});
        f.push_back(real_field("ensemble.weight_cutoff", &C::ensemble, &EnsembleSpec::weight_cutoff));
        f.push_back(real_field("ensemble.truncation_tolerance", &C::ensemble, &EnsembleSpec::truncation_tolerance));
        f.push_back(real_field("pulse.E1", &C::pulse, &PulseSpec::E1_kV_per_cm));
        f.push_back(real_field("pulse.tau", &C::pulse, &PulseSpec::tau_ps));
        f.push_back(real_field("pulse.t0", &C::pulse, &PulseSpec::t0_ps));
        f.push_back(real_field("pulse.support_half_width", &C::pulse, &PulseSpec::support_half_width));
        f.push_back(real_field("relaxation.T2", &C::relaxation, &RelaxationSpec::T2_ps_atm));
        f.push_back(real_field("relaxation.pressure", &C::relaxation, &RelaxationSpec::pressure_bar));
        f.push_back(real_field("grid.t_start", &C::grid, &GridSpec::t_start_ps));
        f.push_back(real_field("grid.t_end", &C::grid, &GridSpec::t_end_ps));
        f.push_back(real_field("grid.dt_out", &C::grid, &GridSpec::dt_ps));
        f.push_back(real_field("fid.alpha", &C::fid, &FidSpec::alpha_kV_per_cm_ps));
        f.push_back({"fid.include_incident", Kind::boolean,
                     [](C& c, std::string_view v) { c.fid.include_incident = to_bool("fid.include_incident", v); },
                     [](const C& c) { return json(c.fid.include_incident); }});
        f.push_back(real_field("propagation.dt_fs", &C::propagation, &PropagationOptions::dt_fs));
        f.push_back({"propagation.min_steps", Kind::integer,
                     [](C& c, std::string_view v) { c.propagation.min_steps = to_int("propagation.min_steps", v); },
                     [](const C& c) { return json(c.propagation.min_steps); }});
        f.push_back({"output.dir", Kind::text,
                     [](C& c, std::string_view v) {
                         v = trim(v);
                         if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
                         if (v.empty()) throw ConfigError("output.dir must not be empty");
                         c.output_dir = std::string(v);
                     },
                     [](const C& c) { return json(c.output_dir); }});
        return f;
    }();
    return table;
}

const Field& find_field(std::string_view key) {
    for (const auto& f : fields()) {
        if (key == f.key) return f;
    }
    throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::string value_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return format_number(v.get<double>());
}

json config_json(const SimulationConfig& c) {
    json out = json::object();
    for (const auto& f : fields()) out[f.key] = f.get(c);
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// nlohmann writes NaN as null, which is what we want for missing peaks.
std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.emplace_back(f.key);
        return k;
    }();
    return keys;
}

void apply_setting(SimulationConfig& config, std::string_view key, std::string_view value) {
    find_field(trim(key)).set(config, value);
}

void apply_override(SimulationConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    }
    apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

SimulationConfig parse_config(std::string_view text, std::string_view origin) {
    SimulationConfig config;
    std::vector<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
            throw ConfigError(where + "duplicate key '" + key + "'");
        }
        try {
            apply_setting(config, key, trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
        seen.push_back(key);
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(origin) + ": " + e.what());
    }
    return config;
}

SimulationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

std::string config_text(const SimulationConfig& config) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += value_text(f.get(config));
        out += '\n';
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, ptr);
}

std::string manifest_json(const SimulationConfig& config, std::string_view command,
                          const std::vector<std::string>& outputs) {
    using K = units::PhysicalConstants;
    json m;
    m["program"] = "symtop";
    m["version"] = kVersion;
    m["command"] = std::string(command);
    m["constants_version"] = std::string(units::constants_version);
    m["constants"] = {{"speed_of_light_cm_per_s", K::speed_of_light},
                      {"boltzmann_wavenumber_per_K", K::boltzmann_wavenumber},
                      {"au_time_s", K::au_time},
                      {"au_field_V_per_cm", K::au_field},
                      {"debye_per_au", K::debye_per_au},
                      {"wavenumber_per_hartree", K::wavenumber_per_hartree},
                      {"atm_per_bar", K::atm_per_bar}};
    m["config"] = config_json(config);
    m["outputs"] = outputs;
    return dump(m);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::string trace_csv(const OrientationTrace& trace, std::string_view manifest_name) {
    std::string out = "# manifest: " + std::string(manifest_name) + "\n";
    const bool deriv = trace.has_derivative();
    out += deriv ? "time_ps,cos_theta,dcos_dt_per_ps\n" : "time_ps,cos_theta\n";
    for (std::size_t i = 0; i < trace.time_ps.size(); ++i) {
        out += format_number(trace.time_ps[i]);
        out += ',';
        out += format_number(trace.cos_theta[i]);
        if (deriv) {
            out += ',';
            out += format_number(trace.dcos_dt_per_ps[i]);
        }
        out += '\n';
    }
    return out;
}

std::string signal_csv(const Signal& signal, std::string_view value_header, std::string_view manifest_name) {
    std::string out = "# manifest: " + std::string(manifest_name) + "\n";
    out += "time_ps,";
    out += value_header;
    out += '\n';
    for (std::size_t i = 0; i < signal.time_ps.size(); ++i) {
        out += format_number(signal.time_ps[i]);
        out += ',';
        out += format_number(signal.values[i]);
        out += '\n';
    }
    return out;
}

Signal parse_signal_csv(std::string_view text, std::string_view origin) {
    Signal s;
    std::size_t line_no = 0;
    bool first_row = true;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        std::string_view a, b;
        const auto sep = line.find_first_of(",;\t ");
        if (sep != std::string_view::npos) {
            a = trim(line.substr(0, sep));
            b = trim(line.substr(sep + 1));
            // Tolerate extra separators such as ", " between the columns.
            while (!b.empty() && (b.front() == ',' || b.front() == ';')) b = trim(b.substr(1));
        }
        double t = 0.0, v = 0.0;
        const bool ok = sep != std::string_view::npos && parse_real(a, t) && parse_real(b, v) && std::isfinite(t) &&
                        std::isfinite(v);
        if (!ok) {
            if (first_row) {
                first_row = false;
                continue;  // header
            }
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                              ": expected two numeric columns, got '" + std::string(line) + "'");
        }
        first_row = false;
        if (!s.time_ps.empty() && !(t > s.time_ps.back())) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": time must be increasing");
        }
        s.time_ps.push_back(t);
        s.values.push_back(v);
    }
    if (s.time_ps.empty()) throw ConfigError(std::string(origin) + ": no data rows");
    return s;
}

Signal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open data file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_signal_csv(ss.str(), path.string());
}

std::string overlay_csv(const Overlap& o, const FitResult& fit, std::string_view manifest_name) {
    std::string out = "# manifest: " + std::string(manifest_name) + "\n";
    out += "time_ps,model_scaled_data_units,data_units\n";
    for (std::size_t i = 0; i < o.time_ps.size(); ++i) {
        out += format_number(o.time_ps[i]);
        out += ',';
        out += format_number(fit.scale * o.model[i] + fit.offset);
        out += ',';
        out += format_number(o.data[i]);
        out += '\n';
    }
    return out;
}

std::string scan_json(const ScanResult& r, std::string_view manifest_name) {
    json j;
    j["manifest"] = std::string(manifest_name);
    j["parameter"] = r.parameter;
    j["quantity"] = r.quantity;
    j["values"] = r.values;
    json channels = json::object();
    for (Channel c : kChannels) {
        const auto& ch = r.channel(c);
        channels[to_string(c)] = {{"peaks", ch.peaks},
                                  {"peak_times_ps", ch.peak_times_ps},
                                  {"slope", optional_number(ch.slope)},
                                  {"r_squared", optional_number(ch.r_squared)},
                                  {"argmax", ch.argmax}};
    }
    j["channels"] = channels;
    return dump(j);
}

std::string fit_json(const FitResult& r, double relative_residual, std::string_view data_path,
                     std::string_view manifest_name) {
    json j{{"manifest", std::string(manifest_name)},
           {"data", std::string(data_path)},
           {"scale", r.scale},
           {"offset", r.offset},
           {"residual_rms", r.residual_rms},
           {"relative_residual", relative_residual},
           {"time_shift_ps", r.time_shift_ps},
           {"samples", r.samples}};
    return dump(j);
}

std::string spectral_json(const SpectralCheckReport& r, std::string_view manifest_name) {
    json j{{"manifest", std::string(manifest_name)},
           {"max_deviation", r.max_deviation}, {"samples", r.samples},       {"dt_ps", r.dt_ps},
           {"retained_bins", r.retained_bins}, {"peak", r.peak},             {"endpoint_ratio", r.endpoint_ratio},
           {"threshold", 1e-6},                {"pass", r.max_deviation < 1e-6}};
    return dump(j);
}

}  // namespace symtop::io
