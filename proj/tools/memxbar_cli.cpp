// memxbar: command-line runner for the simulation studies.
//
//   memxbar device-test | energy-scaling | tile | sweep | density | netlist  [options]
//   memxbar rerun <manifest.json> [--out dir] [--jobs n]
//
// Every result is computed in memory first; the output directory is only
// created once all outputs exist, so a failed run leaves nothing behind.

#include "memxbar/config.hpp"
#include "memxbar/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#ifndef MEMXBAR_VERSION
#define MEMXBAR_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace memxbar;

namespace {

constexpr int kManifestVersion = 1;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rounds;
    std::optional<std::string> topology;
    std::vector<std::string> sets;
    std::string out;
    int jobs = 1;
};

// name -> file contents, in write order
using Outputs = std::vector<std::pair<std::string, std::string>>;

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

template <class F>
std::string render(F&& f) {
    std::ostringstream os;
    f(os);
    return os.str();
}

ExperimentConfig resolve(const Options& o) {
    ordered_json doc = ordered_json::object();
    if (!o.config_path.empty()) doc = read_config_file(o.config_path);
    for (const auto& s : o.sets) apply_override(doc, s);
    if (o.seed) apply_override(doc, "workload.seed=" + std::to_string(*o.seed));
    if (o.rounds) apply_override(doc, "workload.rounds=" + std::to_string(*o.rounds));
    if (o.topology) doc["topology"]["type"] = *o.topology;
    ExperimentConfig cfg = config_from_partial(doc);
    cfg.validate();
    return cfg;
}

Outputs run_command(const std::string& cmd, const ExperimentConfig& cfg, int jobs) {
    Outputs out;
    if (cmd == "device-test") {
        const auto r = run_device_test(cfg);
        out.emplace_back("trace.csv", render([&](std::ostream& os) { write_device_test_csv(os, r); }));
        out.emplace_back("summary.txt", render([&](std::ostream& os) { write_device_test_summary(os, r, cfg); }));
    } else if (cmd == "energy-scaling") {
        for (std::size_t s : cfg.energy_scaling.sizes) {
            if (s > 16) std::cerr << "warning: size " << s << " is beyond the 16x16 simulation scale\n";
        }
        const auto rows = run_energy_scaling(cfg);
        out.emplace_back("energy_scaling.csv", render([&](std::ostream& os) { write_energy_scaling_csv(os, rows); }));
    } else if (cmd == "tile") {
        const auto r = run_tile(cfg);
        out.emplace_back("report.txt", render([&](std::ostream& os) { write_tile_report(os, r); }));
        out.emplace_back("record.json", tile_record(r) + "\n");
        out.emplace_back("reads.csv", render([&](std::ostream& os) { write_read_samples_csv(os, r.samples); }));
        out.emplace_back("netlist_summary.txt", r.netlist_summary);
        // schedule and answer matrix for cross-checks with an external simulator
        const BuiltArray built = build_hybrid(cfg.hybrid_spec());
        const auto g = generate_workload(cfg.workload.seed, cfg.workload.rounds, built, cfg.timing);
        out.emplace_back("operations.csv", render([&](std::ostream& os) { write_operations_csv(os, g); }));
        out.emplace_back("answers.csv", render([&](std::ostream& os) { write_answers_csv(os, g.answers); }));
        if (!cfg.output.probes.empty()) {
            out.emplace_back("probes.csv", render([&](std::ostream& os) { write_trace_csv(os, r.probe_trace); }));
        }
    } else if (cmd == "sweep") {
        const auto pts = run_sweep(cfg, jobs);
        out.emplace_back("sweep.csv", render([&](std::ostream& os) { write_sweep_csv(os, pts); }));
        out.emplace_back("sweep.txt", render([&](std::ostream& os) { write_sweep_table(os, pts); }));
        for (const auto& p : pts) {
            if (!p.ok) {
                std::cerr << "sweep point tile=" << p.tile << " v_write=" << p.v_write
                          << " sense_r_on=" << p.sense_r_on << " failed: " << p.error << '\n';
            }
        }
    } else if (cmd == "density") {
        const auto rows = comparison_table(cfg.area);
        const auto ratios = density_ratios(cfg.area);
        out.emplace_back("density.txt", render([&](std::ostream& os) { write_density_table(os, rows, ratios); }));
        out.emplace_back("density.csv", render([&](std::ostream& os) { write_density_csv(os, rows); }));
    } else if (cmd == "netlist") {
        BuiltArray built;
        switch (cfg.topology.type) {
            case Architecture::crossbar:
                built = build_unconstrained(cfg.crossbar_spec(cfg.topology.rows, cfg.topology.cols));
                break;
            case Architecture::one_t_one_m: built = build_1t1m(cfg.one_t_one_m_spec()); break;
            case Architecture::hybrid: built = build_hybrid(cfg.hybrid_spec()); break;
        }
        out.emplace_back("netlist_summary.txt", topology_summary(built));
        out.emplace_back("netlist.txt", built.net.dump());
    } else {
        throw InvalidInput("unknown command '" + cmd + "'");
    }
    return out;
}

fs::path default_dir(const std::string& base, const std::string& cmd, std::uint64_t seed) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
    const std::string stem = cmd + "-" + stamp + "-seed" + std::to_string(seed);
    fs::path p = fs::path(base) / stem;
    for (int k = 2; fs::exists(p); ++k) p = fs::path(base) / (stem + "-" + std::to_string(k));
    return p;
}

ordered_json write_outputs(const fs::path& dir, const Outputs& outs) {
    fs::create_directories(dir);
    ordered_json inv = ordered_json::array();
    for (const auto& [name, data] : outs) {
        std::ofstream f(dir / name, std::ios::binary);
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        f.close();
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        inv.push_back({{"name", name}, {"bytes", data.size()}, {"sha256", sha256_hex(data)}});
    }
    return inv;
}

int execute(const std::string& cmd, const ExperimentConfig& cfg, int jobs, const std::string& out_flag,
            const ordered_json* expected) {
    const auto t0 = std::chrono::steady_clock::now();
    const Outputs outs = run_command(cmd, cfg, jobs);
    const fs::path dir = out_flag.empty() ? default_dir(cfg.output.dir, cmd, cfg.workload.seed) : fs::path(out_flag);
    const ordered_json inv = write_outputs(dir, outs);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ordered_json m;
    m["manifest_version"] = kManifestVersion;
    m["command"] = cmd;
    m["version"] = MEMXBAR_VERSION;
    m["seed"] = cfg.workload.seed;
    m["jobs"] = jobs;
    m["config"] = to_json(cfg);
    m["outputs"] = inv;
    m["wall_seconds"] = wall;
    {
        std::ofstream f(dir / "manifest.json", std::ios::binary);
        f << m.dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    }
    std::cout << dir.string() << '\n';

    if (expected == nullptr) return 0;
    std::map<std::string, std::string> want;
    for (const auto& e : *expected) want[e.at("name").get<std::string>()] = e.at("sha256").get<std::string>();
    std::size_t same = 0;
    for (const auto& e : inv) {
        const auto name = e["name"].get<std::string>();
        const auto it = want.find(name);
        if (it != want.end() && it->second == e["sha256"].get<std::string>()) {
            ++same;
        } else {
            std::cerr << "differs: " << name << '\n';
        }
    }
    const bool ok = same == want.size() && same == inv.size();
    std::cerr << "reproduced " << same << " of " << want.size() << " outputs\n";
    return ok ? 0 : 3;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config_path, "JSON config file or run manifest")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "workload seed");
    sub->add_option("--rounds", o.rounds, "workload rounds");
    sub->add_option("--topology", o.topology, "crossbar, 1t1m or hybrid");
    sub->add_option("--set", o.sets, "override one config value, path=value")->take_all();
    sub->add_option("--out", o.out, "output directory (default: output.dir/<command>-<time>-seed<seed>)");
    sub->add_option("--jobs", o.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memristor crossbar / hybrid tile simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", MEMXBAR_VERSION);

    Options o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"device-test", "single-device pulse trace"},
        {"energy-scaling", "unconstrained crossbar write energy vs size"},
        {"tile", "hybrid tile characterization"},
        {"sweep", "tile characterization over the sweep grid"},
        {"density", "density comparison table"},
        {"netlist", "element counts and netlist dump of the configured topology"}};
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

    std::string manifest_path;
    auto* rerun = app.add_subcommand("rerun", "repeat a run from its manifest and compare outputs");
    rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
    rerun->add_option("--out", o.out, "output directory");
    rerun->add_option("--jobs", o.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    // Stage 1: configuration.  Any failure here exits before touching disk.
    ExperimentConfig cfg;
    std::string run_cmd = cmd;
    ordered_json expected;
    try {
        if (cmd == "rerun") {
            std::ifstream f(manifest_path);
            const ordered_json m = ordered_json::parse(f);
            run_cmd = m.at("command").get<std::string>();
            cfg = config_from_json(m.at("config"));
            cfg.validate();
            expected = m.at("outputs");
        } else {
            cfg = resolve(o);
        }
        if ((run_cmd == "tile" || run_cmd == "sweep") && cfg.topology.type != Architecture::hybrid) {
            throw InvalidInput("topology.type: '" + run_cmd + "' needs a hybrid topology");
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    // Stage 2: simulate, then write.
    try {
        return execute(run_cmd, cfg, o.jobs, o.out, cmd == "rerun" ? &expected : nullptr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
