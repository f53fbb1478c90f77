#include "ncfsi/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ncfsi {

void RunConfig::finalize() {
    if (!(dt > 0.0)) throw ConfigError("constraint violation on dt: must be positive");
    if (!(t_max >= dt)) throw ConfigError("constraint violation on t_max: must be >= dt");
    if (mesh_vertices < 500)
        throw ConfigError("constraint violation on mesh_vertices: must be >= 500");
    if (snapshot_every < 0)
        throw ConfigError("constraint violation on snapshot_every: must be >= 0");
    if (ramp && !(t_ramp > 0.0))
        throw ConfigError("constraint violation on t_ramp: must be positive when ramp is on");
    if (mode == RunMode::classical) {
        params.mu_r = 0.0;
        params.lambda1 = 0.0;
        params.lambda2 = 0.0;
    }
    if (params.lambda2 != 0.0)
        std::fprintf(stderr,
                     "note: lambda2 = %g accepted and ignored (grad-div couple stress term "
                     "vanishes for scalar microrotation in 2D)\n",
                     params.lambda2);
    if (params.c2 != 0.0)
        std::fprintf(stderr,
                     "note: c2 = %g accepted; it only shifts the isotropic solid stress, which "
                     "the pressure absorbs for an incompressible material\n",
                     params.c2);
    try {
        geometry.validate();
        params.finalize();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("constraint violation: ") + e.what());
    }
}

namespace {

struct KeyEntry {
    std::function<void(RunConfig&, const std::string&)> set;
    const char* doc;
};

double parse_double(const std::string& v) {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    while (used < v.size() && std::isspace(static_cast<unsigned char>(v[used]))) ++used;
    if (used != v.size()) throw ConfigError("malformed number: " + v);
    return out;
}

int parse_int(const std::string& v) {
    const double d = parse_double(v);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) throw ConfigError("expected an integer: " + v);
    return i;
}

bool parse_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("expected on/off: " + v);
}

const std::map<std::string, KeyEntry>& key_table() {
    static const std::map<std::string, KeyEntry> table = [] {
        std::map<std::string, KeyEntry> t;
        const auto dbl = [](double RunConfig::*field, const char* doc) {
            return KeyEntry{[field](RunConfig& c, const std::string& v) { c.*field = parse_double(v); },
                            doc};
        };
        const auto geo = [](double BenchmarkGeometry::*field, const char* doc) {
            return KeyEntry{
                [field](RunConfig& c, const std::string& v) { c.geometry.*field = parse_double(v); },
                doc};
        };
        const auto mat = [](double MaterialParams::*field, const char* doc) {
            return KeyEntry{
                [field](RunConfig& c, const std::string& v) { c.params.*field = parse_double(v); },
                doc};
        };
        t["domain_length"] = geo(&BenchmarkGeometry::L, "channel length L [m]");
        t["domain_height"] = geo(&BenchmarkGeometry::H, "channel height H [m]");
        t["cylinder_x"] = geo(&BenchmarkGeometry::cx, "cylinder center x [m]");
        t["cylinder_y"] = geo(&BenchmarkGeometry::cy, "cylinder center y [m]");
        t["cylinder_radius"] = geo(&BenchmarkGeometry::r, "cylinder radius [m]");
        t["flag_length"] = geo(&BenchmarkGeometry::l, "flag length from the cylinder surface [m]");
        t["flag_thickness"] = geo(&BenchmarkGeometry::h, "flag thickness [m]");
        t["rho_f"] = mat(&MaterialParams::rho_f, "fluid density [kg/m^3]");
        t["rho_s"] = mat(&MaterialParams::rho_s, "solid density [kg/m^3]");
        t["mu"] = mat(&MaterialParams::mu, "dynamic viscosity [kg/(m s)]");
        t["mu_r"] = mat(&MaterialParams::mu_r, "microrotational viscosity [kg/(m s)]");
        t["lambda1"] = mat(&MaterialParams::lambda1, "angular viscosity beta+gamma");
        t["lambda2"] = mat(&MaterialParams::lambda2, "angular viscosity alpha+beta-gamma (inert in 2D)");
        t["micro_inertia"] = mat(&MaterialParams::micro_inertia, "microinertia coefficient I [m^2]");
        t["c1"] = mat(&MaterialParams::c1, "solid material parameter [Pa]");
        t["c2"] = mat(&MaterialParams::c2, "solid material parameter (pressure-absorbed)");
        t["zeta"] = mat(&MaterialParams::zeta, "pressure penalization");
        t["Ubar"] = mat(&MaterialParams::Ubar, "mean inflow velocity [m/s]");
        t["dt"] = dbl(&RunConfig::dt, "time step [s]");
        t["t_max"] = dbl(&RunConfig::t_max, "final time [s]");
        t["t_ramp"] = dbl(&RunConfig::t_ramp, "inflow ramp duration [s]");
        t["mesh_vertices"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.mesh_vertices = parse_int(v); },
            "target vertex count (within +-20%)"};
        t["snapshot_every"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.snapshot_every = parse_int(v); },
            "snapshot interval in steps (0 = off)"};
        t["output_dir"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.output_dir = v; }, "output directory"};
        t["mode"] = KeyEntry{[](RunConfig& c, const std::string& v) {
                                 if (v == "cosserat") c.mode = RunMode::cosserat;
                                 else if (v == "classical") c.mode = RunMode::classical;
                                 else throw ConfigError("mode must be cosserat or classical: " + v);
                             },
                             "cosserat | classical"};
        t["determinism"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.determinism = parse_bool(v); },
            "deterministic parallel reductions (on by default)"};
        t["ramp"] = KeyEntry{[](RunConfig& c, const std::string& v) { c.ramp = parse_bool(v); },
                             "cosine inflow ramp over [0, t_ramp]"};
        t["body_force_x"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.body_force.x = parse_double(v); },
            "constant body force, x"};
        t["body_force_y"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.body_force.y = parse_double(v); },
            "constant body force, y"};
        t["body_couple"] = KeyEntry{
            [](RunConfig& c, const std::string& v) { c.body_couple = parse_double(v); },
            "constant body couple"};
        t["control_x"] = KeyEntry{[](RunConfig& c, const std::string& v) {
                                      if (!c.control_point) c.control_point = Vec2{};
                                      c.control_point->x = parse_double(v);
                                  },
                                  "tracked point override, x"};
        t["control_y"] = KeyEntry{[](RunConfig& c, const std::string& v) {
                                      if (!c.control_point) c.control_point = Vec2{};
                                      c.control_point->y = parse_double(v);
                                  },
                                  "tracked point override, y"};
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

void set_key(RunConfig& config, const std::string& key, const std::string& value) {
    const auto it = key_table().find(key);
    if (it == key_table().end()) throw ConfigError("unknown key: " + key);
    it->second.set(config, value);
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("parse error at line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("parse error at line " + std::to_string(lineno) +
                              ": empty key or value");
        try {
            set_key(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
        }
    }
    return config;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must be key=value: " + assignment);
    set_key(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string config_keys_help() {
    std::ostringstream os;
    for (const auto& [key, entry] : key_table()) {
        os << "  " << key;
        for (std::size_t k = key.size(); k < 18; ++k) os << ' ';
        os << entry.doc << "\n";
    }
    return os.str();
}

} // namespace ncfsi
