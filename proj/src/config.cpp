#include "memxbar/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace memxbar {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InvalidInput("config: " + path + ": " + what);
}

const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(join(path, key), "missing");
    return j.at(key);
}

double get_double(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

/// Number, or the string "inf" for an ideal open.
double get_ohms(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (v.is_string() && v.get<std::string>() == "inf") return kOpenCircuit;
    if (!v.is_number()) fail(join(path, key), "expected a number or \"inf\"");
    return v.get<double>();
}

json ohms_json(double r) { return std::isinf(r) ? json("inf") : json(r); }

std::uint64_t get_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(path, "expected a non-negative integer");
}

std::uint64_t get_count(const json& j, const std::string& path, const char* key) {
    return get_count(field(j, path, key), join(path, key));
}

bool get_bool(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_boolean()) fail(join(path, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> get_doubles(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_array()) fail(join(path, key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) fail(join(path, key), "expected an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::size_t> get_counts(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_array()) fail(join(path, key), "expected an array of integers");
    std::vector<std::size_t> out;
    for (const auto& e : v) out.push_back(static_cast<std::size_t>(get_count(e, join(path, key))));
    return out;
}

std::vector<std::string> get_strings(const json& j, const std::string& path, const char* key) {
    const json& v = field(j, path, key);
    if (!v.is_array()) fail(join(path, key), "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) fail(join(path, key), "expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

SwitchParams get_switch(const json& j, const std::string& path) {
    return {get_ohms(j, path, "r_closed"), get_ohms(j, path, "r_open")};
}

json switch_json(const SwitchParams& s) { return json{{"r_closed", ohms_json(s.r_closed)}, {"r_open", ohms_json(s.r_open)}}; }

double from_nano(double n) { return n / 1e9; }  // correctly rounded, so 45 -> 45e-9 exactly

// Inverse of from_nano that survives the round trip: a nearby double whose
// image is exactly s, when one exists.
double to_nano(double s) {
    const double n = s * 1e9;
    if (!std::isfinite(n) || from_nano(n) == s) return n;
    double up = n, down = n;
    for (int k = 0; k < 16; ++k) {
        up = std::nextafter(up, std::numeric_limits<double>::infinity());
        down = std::nextafter(down, -std::numeric_limits<double>::infinity());
        if (from_nano(up) == s) return up;
        if (from_nano(down) == s) return down;
    }
    return n;
}

/// Objects whose keys are user-defined rather than fixed by the schema.
bool open_object(const std::string& path) { return path == "area.constants"; }

void merge_checked(json& base, const json& over, const std::string& path) {
    if (!over.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [k, v] : over.items()) {
        const std::string p = join(path, k);
        if (!base.contains(k)) {
            if (!open_object(path)) fail(p, "unknown field");
            base[k] = v;
        } else if (base[k].is_object() && v.is_object()) {
            merge_checked(base[k], v, p);
        } else {
            base[k] = v;
        }
    }
}

void merge_into(json& base, const json& over) {
    for (const auto& [k, v] : over.items()) {
        if (base.contains(k) && base[k].is_object() && v.is_object()) {
            merge_into(base[k], v);
        } else {
            base[k] = v;
        }
    }
}

template <class F>
void with_path(const std::string& path, F&& f) {
    try {
        f();
    } catch (const InvalidInput& e) {
        throw InvalidInput("config: " + path + ": " + e.what());
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    with_path("device", [&] { device.validate(); });
    with_path("topology", [&] {
        switch (topology.type) {
        case Architecture::hybrid: hybrid_spec().validate(); break;
        case Architecture::crossbar: crossbar_spec(topology.rows, topology.cols).validate(); break;
        case Architecture::one_t_one_m: one_t_one_m_spec().validate(); break;
        }
        if (!(topology.sense_r_on > 0) || !std::isfinite(topology.sense_r_on)) {
            throw InvalidInput("sense_r_on must be > 0");
        }
    });
    with_path("timing", [&] { timing.validate(device); });
    with_path("solver", [&] { solver.validate(); });
    with_path("area", [&] { area.validate(); });
    if (workload.rounds == 0) fail("workload.rounds", "must be >= 1");
    if (workload.read_passes == 0) fail("workload.read_passes", "must be >= 1");
    if (sweep.sense_r_on.empty() || sweep.v_write.empty() || sweep.tile.empty()) fail("sweep", "grids must be non-empty");
    for (double r : sweep.sense_r_on) {
        if (!(r > 0) || !std::isfinite(r)) fail("sweep.sense_r_on", "entries must be > 0");
    }
    for (double v : sweep.v_write) {
        if (!(v > 0) || !std::isfinite(v)) fail("sweep.v_write", "entries must be > 0");
    }
    for (std::size_t t : sweep.tile) {
        if (t < 1 || t > 16) fail("sweep.tile", "entries must be in 1..16");
    }
    if (sweep.rounds == 0) fail("sweep.rounds", "must be >= 1");
    if (energy_scaling.sizes.empty()) fail("energy_scaling.sizes", "must be non-empty");
    for (std::size_t s : energy_scaling.sizes) {
        if (s == 0) fail("energy_scaling.sizes", "entries must be >= 1");
    }
    if (energy_scaling.trials == 0) fail("energy_scaling.trials", "must be >= 1");
    if (device_test.sequence.empty()) fail("device_test.sequence", "must be non-empty");
    for (const auto& s : device_test.sequence) {
        if (s != "write" && s != "erase" && s != "read") {
            fail("device_test.sequence", "entries must be write, erase or read (got '" + s + "')");
        }
    }
    if (output.dir.empty()) fail("output.dir", "must be non-empty");
}

HybridArraySpec ExperimentConfig::hybrid_spec() const {
    HybridArraySpec s;
    s.tile_rows = topology.tile_rows;
    s.tile_cols = topology.tile_cols;
    s.tiles_x = topology.tiles_x;
    s.tiles_y = topology.tiles_y;
    s.wire_r = topology.wire_r;
    s.sense_r = topology.sense_r_on * r_on(device);
    s.threshold_r = topology.threshold_r;
    s.access = topology.access;
    s.column = topology.column;
    s.device = device;
    return s;
}

CrossbarSpec ExperimentConfig::crossbar_spec(std::size_t rows, std::size_t cols) const {
    CrossbarSpec s;
    s.rows = rows;
    s.cols = cols;
    s.wire_r = topology.wire_r;
    s.device = device;
    return s;
}

OneTOneMSpec ExperimentConfig::one_t_one_m_spec() const {
    OneTOneMSpec s;
    s.rows = topology.rows;
    s.cols = topology.cols;
    s.wire_r = topology.wire_r;
    s.sense_r = topology.sense_r_on * r_on(device);
    s.access = topology.access;
    s.column = topology.column;
    s.device = device;
    return s;
}

json to_json(const ExperimentConfig& c) {
    json j;
    const DeviceParams& d = c.device;
    j["device"] = json{{"v_p", d.v_p},         {"v_n", d.v_n},         {"a_p", d.a_p}, {"a_n", d.a_n},
                       {"x_p", d.x_p},         {"x_n", d.x_n},         {"alpha_p", d.alpha_p},
                       {"alpha_n", d.alpha_n}, {"a1", d.a1},           {"a2", d.a2},   {"b", d.b},
                       {"x0", d.x0},           {"x_floor", d.x_floor}};
    const TopologyConfig& t = c.topology;
    j["topology"] = json{{"type", architecture_name(t.type)},
                         {"tile_rows", t.tile_rows},
                         {"tile_cols", t.tile_cols},
                         {"tiles_x", t.tiles_x},
                         {"tiles_y", t.tiles_y},
                         {"rows", t.rows},
                         {"cols", t.cols},
                         {"wire_r", t.wire_r},
                         {"sense_r_on", t.sense_r_on},
                         {"threshold_r", t.threshold_r},
                         {"access_switch", switch_json(t.access)},
                         {"column_switch", switch_json(t.column)}};
    const TimingConfig& tm = c.timing;
    j["timing"] = json{{"write_width_ns", to_nano(tm.write_width)},
                       {"v_write", tm.v_write},
                       {"v_read", tm.v_read},
                       {"read_width_ns", to_nano(tm.read_width)},
                       {"gap_ns", to_nano(tm.gap)},
                       {"ramp_ns", to_nano(tm.ramp)}};
    j["workload"] = json{{"seed", c.workload.seed}, {"rounds", c.workload.rounds},
                         {"read_passes", c.workload.read_passes}};
    const SolverConfig& s = c.solver;
    j["solver"] = json{{"dt_ns", to_nano(s.dt)},
                       {"v_tol", s.v_tol},
                       {"i_tol", s.i_tol},
                       {"max_newton", s.max_newton},
                       {"parallel_kernels", s.parallel_kernels}};
    j["sweep"] = json{{"sense_r_on", c.sweep.sense_r_on},
                      {"v_write", c.sweep.v_write},
                      {"tile", c.sweep.tile},
                      {"rounds", c.sweep.rounds}};
    j["energy_scaling"] = json{{"sizes", c.energy_scaling.sizes}, {"trials", c.energy_scaling.trials}};
    j["device_test"] = json{{"sequence", c.device_test.sequence}};
    json constants = json::object();
    for (const auto& [name, k] : c.area.constants) {
        constants[name] = json{{"f2_per_bit", k.f2_per_bit}, {"feature_nm", to_nano(k.feature)}};
    }
    j["area"] = json{{"feature_nm", to_nano(c.area.feature)},
                     {"transistor_factor", c.area.transistor_factor},
                     {"memristor_factor", c.area.memristor_factor},
                     {"tile_rows", c.area.tile_rows},
                     {"tile_cols", c.area.tile_cols},
                     {"constants", constants}};
    j["output"] = json{{"dir", c.output.dir}, {"probes", c.output.probes}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    {
        const std::string p = "device";
        const json& d = field(j, "", "device");
        c.device.v_p = get_double(d, p, "v_p");
        c.device.v_n = get_double(d, p, "v_n");
        c.device.a_p = get_double(d, p, "a_p");
        c.device.a_n = get_double(d, p, "a_n");
        c.device.x_p = get_double(d, p, "x_p");
        c.device.x_n = get_double(d, p, "x_n");
        c.device.alpha_p = get_double(d, p, "alpha_p");
        c.device.alpha_n = get_double(d, p, "alpha_n");
        c.device.a1 = get_double(d, p, "a1");
        c.device.a2 = get_double(d, p, "a2");
        c.device.b = get_double(d, p, "b");
        c.device.x0 = get_double(d, p, "x0");
        c.device.x_floor = get_double(d, p, "x_floor");
    }
    {
        const std::string p = "topology";
        const json& t = field(j, "", "topology");
        with_path(p + ".type", [&] { c.topology.type = parse_architecture(get_string(t, p, "type")); });
        c.topology.tile_rows = get_count(t, p, "tile_rows");
        c.topology.tile_cols = get_count(t, p, "tile_cols");
        c.topology.tiles_x = get_count(t, p, "tiles_x");
        c.topology.tiles_y = get_count(t, p, "tiles_y");
        c.topology.rows = get_count(t, p, "rows");
        c.topology.cols = get_count(t, p, "cols");
        c.topology.wire_r = get_double(t, p, "wire_r");
        c.topology.sense_r_on = get_double(t, p, "sense_r_on");
        c.topology.threshold_r = get_double(t, p, "threshold_r");
        c.topology.access = get_switch(field(t, p, "access_switch"), p + ".access_switch");
        c.topology.column = get_switch(field(t, p, "column_switch"), p + ".column_switch");
    }
    {
        const std::string p = "timing";
        const json& t = field(j, "", "timing");
        c.timing.write_width = from_nano(get_double(t, p, "write_width_ns"));
        c.timing.v_write = get_double(t, p, "v_write");
        c.timing.v_read = get_double(t, p, "v_read");
        c.timing.read_width = from_nano(get_double(t, p, "read_width_ns"));
        c.timing.gap = from_nano(get_double(t, p, "gap_ns"));
        c.timing.ramp = from_nano(get_double(t, p, "ramp_ns"));
    }
    {
        const std::string p = "workload";
        const json& w = field(j, "", "workload");
        c.workload.seed = get_count(w, p, "seed");
        c.workload.rounds = get_count(w, p, "rounds");
        c.workload.read_passes = get_count(w, p, "read_passes");
    }
    {
        const std::string p = "solver";
        const json& s = field(j, "", "solver");
        c.solver.dt = from_nano(get_double(s, p, "dt_ns"));
        c.solver.v_tol = get_double(s, p, "v_tol");
        c.solver.i_tol = get_double(s, p, "i_tol");
        const auto n = get_count(s, p, "max_newton");
        if (n > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) fail("solver.max_newton", "too large");
        c.solver.max_newton = static_cast<int>(n);
        c.solver.parallel_kernels = get_bool(s, p, "parallel_kernels");
    }
    {
        const std::string p = "sweep";
        const json& s = field(j, "", "sweep");
        c.sweep.sense_r_on = get_doubles(s, p, "sense_r_on");
        c.sweep.v_write = get_doubles(s, p, "v_write");
        c.sweep.tile = get_counts(s, p, "tile");
        c.sweep.rounds = get_count(s, p, "rounds");
    }
    {
        const std::string p = "energy_scaling";
        const json& e = field(j, "", "energy_scaling");
        c.energy_scaling.sizes = get_counts(e, p, "sizes");
        c.energy_scaling.trials = get_count(e, p, "trials");
    }
    c.device_test.sequence = get_strings(field(j, "", "device_test"), "device_test", "sequence");
    {
        const std::string p = "area";
        const json& a = field(j, "", "area");
        c.area.feature = from_nano(get_double(a, p, "feature_nm"));
        c.area.transistor_factor = get_double(a, p, "transistor_factor");
        c.area.memristor_factor = get_double(a, p, "memristor_factor");
        c.area.tile_rows = get_count(a, p, "tile_rows");
        c.area.tile_cols = get_count(a, p, "tile_cols");
        const json& k = field(a, p, "constants");
        if (!k.is_object()) fail("area.constants", "expected an object");
        c.area.constants.clear();
        for (const auto& [name, v] : k.items()) {
            const std::string q = "area.constants." + name;
            c.area.constants[name] = {get_double(v, q, "f2_per_bit"), from_nano(get_double(v, q, "feature_nm"))};
        }
    }
    {
        const json& o = field(j, "", "output");
        c.output.dir = get_string(o, "output", "dir");
        c.output.probes = get_strings(o, "output", "probes");
    }
    return c;
}

ExperimentConfig config_from_partial(const json& overlay) {
    json base = to_json(ExperimentConfig{});
    merge_checked(base, overlay, "");
    return config_from_json(base);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidInput("--set expects path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    std::vector<std::string> keys;
    std::stringstream ss(path);
    for (std::string k; std::getline(ss, k, '.');) {
        if (k.empty()) throw InvalidInput("--set has an empty path segment: '" + path + "'");
        keys.push_back(k);
    }
    if (keys.empty() || path.back() == '.') throw InvalidInput("--set has an empty path segment: '" + path + "'");
    // Nest the value under its path; check it against the full schema, then
    // merge into the (possibly partial) document.
    json overlay = value;
    for (auto k = keys.rbegin(); k != keys.rend(); ++k) overlay = json{{*k, overlay}};
    json schema = to_json(ExperimentConfig{});
    merge_checked(schema, overlay, "");
    if (!doc.is_object()) doc = json::object();
    merge_into(doc, overlay);
}

json read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json j = json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw InvalidInput("config: '" + path + "' is not valid JSON");
    if (!j.is_object()) throw InvalidInput("config: '" + path + "' must hold a JSON object");
    if (j.contains("manifest_version") && j.contains("config")) return j.at("config");
    return j;
}

}  // namespace memxbar
