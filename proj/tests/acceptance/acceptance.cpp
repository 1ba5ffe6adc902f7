// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [criterion numbers...]     (default: all)
//
// Criteria 5 and 9 dominate the runtime (under a minute together).  Numbers in the detail lines are
// what the run measured, not what was expected.

#include "../dense_oracle.hpp"
#include "../ladder.hpp"
#include "memxbar/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#ifndef MEMXBAR_CLI
#error "MEMXBAR_CLI must name the memxbar executable"
#endif

using namespace memxbar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double us(double amps) { return amps * 1e6; }

// ---- 1 -------------------------------------------------------------------

void device_calibration(Outcome& o) {
    const DeviceParams p;
    const double dt = 0.05e-9;
    const double i_read = device_current(1.0, DeviceState{1.0}, p);
    DeviceState up{0.01};
    for (int k = 0; k < 200; ++k) up = advance_state(up, 7.0, dt, p);
    DeviceState down{1.0};
    for (int k = 0; k < 200; ++k) down = advance_state(down, -7.0, dt, p);
    const double roff_after = read_resistance(down, p);
    const double ratio = r_off(p) / r_on(p);
    o.detail << "I_read=" << us(i_read) << "uA R_on=" << r_on(p) << " x_after_write=" << up.x
             << " R_after_erase=" << roff_after << " ratio=" << ratio;
    o.require(std::abs(i_read - 8.00e-6) <= 0.05e-6, "1 V read current 8.00 +- 0.05 uA");
    o.require(std::abs(r_on(p) / 124.95e3 - 1.0) <= 0.01, "R_on within 1% of 124.95 kOhm");
    o.require(up.x >= 0.985, "write pulse reaches x >= 0.985");
    o.require(roff_after >= 1.2e11, "erase pulse reaches R >= 1.2e11");
    o.require(ratio >= 1e6, "R_off/R_on >= 1e6");
}

// ---- 2 -------------------------------------------------------------------

void threshold_exactness(Outcome& o) {
    const DeviceParams p;
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> volts(-p.dead_band(), p.dead_band());
    std::uniform_real_distribution<double> width(1e-12, 1e-6);
    std::uniform_real_distribution<double> xs(p.x_floor, 1.0);
    std::size_t moved = 0, pulses = 0;
    for (int train = 0; train < 10; ++train) {
        DeviceState s{xs(rng)};
        const double start = s.x;
        for (int k = 0; k < 1000; ++k, ++pulses) {
            s = advance_state(s, volts(rng), width(rng), p);
            if (s.x != start) ++moved;
        }
    }
    // the thresholds themselves
    for (double v : {p.v_p, -p.v_n}) {
        DeviceState s{0.5};
        s = advance_state(s, v, 1e-3, p);
        ++pulses;
        if (s.x != 0.5) ++moved;
    }
    o.detail << pulses << " pulses, " << moved << " moved the state";
    o.require(moved == 0, "x bit-identical after every sub-threshold pulse");
}

// ---- 3 -------------------------------------------------------------------

void solver_oracle(Outcome& o) {
    std::mt19937_64 rng(4242);
    double worst_op = 0.0, worst_balance = 0.0;
    std::size_t steps = 0;
    for (int trial = 0; trial < 50; ++trial) {
        auto l = testnets::random_ladder(rng, 30);
        const auto ref = oracle::dense_mna(l.net, l.sources, l.gates);
        const auto op = solve_operating_point(l.net, l.sources, l.gates);
        double scale = 0.0;
        for (double v : ref) scale = std::max(scale, std::abs(v));
        for (std::size_t n = 0; n < ref.size(); ++n) {
            worst_op = std::max(worst_op, std::abs(op.node_voltages[n] - ref[n]) / std::max(scale, 1e-30));
        }

        Schedule s(l.net);
        s.t_end = 2e-9;
        std::uniform_real_distribution<double> volts(-5.0, 5.0);
        for (auto& w : s.waveforms) {
            for (int k = 0; k <= 4; ++k) w.add(k * 0.5e-9, volts(rng));
        }
        for (std::size_t g = 0; g < s.gates.size(); ++g) {
            s.gates[g].set(0.0, l.gates[g] != 0);
            s.gates[g].set(1.0e-9, l.gates[g] == 0);
        }
        (void)transient_run(l.net, s, SolverConfig{}, {}, [&](const StepView& v) {
            const double sp = v.op.source_power;
            const double rel = std::abs(sp - v.op.dissipated_power) / std::max(std::abs(sp), 1e-15);
            worst_balance = std::max(worst_balance, rel);
            ++steps;
        });
    }
    o.detail << "max relative voltage error " << worst_op << ", max power imbalance " << worst_balance << " over "
             << steps << " steps";
    o.require(worst_op <= 1e-9, "operating points within 1e-9 of the elimination oracle");
    o.require(worst_balance <= 1e-6, "power balance within 1e-6 at every step");
}

// ---- 4 -------------------------------------------------------------------

void energy_trend(Outcome& o) {
    const ExperimentConfig cfg;
    const auto rows = run_energy_scaling(cfg);
    bool increasing = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        o.detail << (k ? ", " : "") << rows[k].size << "x" << rows[k].size << "=" << rows[k].energy * 1e12 << "pJ";
        if (k > 0 && !(rows[k].energy > rows[k - 1].energy)) increasing = false;
    }
    const double ratio = rows.back().energy / rows.front().energy;
    o.detail << " ratio=" << ratio;
    o.require(increasing, "strictly increasing over {4, 8, 12, 16}");
    o.require(ratio >= 3.0, "16x16 at least 3x the 4x4 value");
}

// ---- 5, 6 ------------------------------------------------------------------

struct TileRuns {
    TileReport t4, t8;
    std::vector<SweepPoint> sweep;
};

const TileRuns& tile_runs() {
    static const TileRuns runs = [] {
        TileRuns r;
        ExperimentConfig c4;
        r.t4 = run_tile(c4);
        ExperimentConfig c8;
        c8.topology.tile_rows = c8.topology.tile_cols = 8;
        c8.timing.v_write = 7.5;
        c8.topology.sense_r_on = 0.5;
        r.t8 = run_tile(c8);
        ExperimentConfig cs;
        cs.sweep.rounds = 50;
        r.sweep = run_sweep(cs, static_cast<int>(std::max(1L, sysconf(_SC_NPROCESSORS_ONLN))));
        return r;
    }();
    return runs;
}

void tile_bands(Outcome& o) {
    const auto& r = tile_runs();
    const double w4 = r.t4.write_energy.per_bit, w8 = r.t8.write_energy.per_bit;
    const double rd4 = r.t4.read_energy.per_bit, rd8 = r.t8.read_energy.per_bit;
    o.detail << "write 4x4=" << w4 * 1e12 << "pJ 8x8=" << w8 * 1e12 << "pJ; read 4x4=" << rd4 * 1e15
             << "fJ 8x8=" << rd8 * 1e15 << "fJ; margin 4x4=" << r.t4.margin.margin * 1e3
             << "mV 8x8=" << r.t8.margin.margin * 1e3 << "mV; sweep margins";
    double best = -1.0;
    double best_rs = 0.0;
    bool sweep_ok = !r.sweep.empty();
    for (const auto& p : r.sweep) {
        o.detail << " " << p.sense_r_on << ":" << (p.ok ? std::to_string(p.report.margin.margin * 1e3) : p.error);
        if (!p.ok) sweep_ok = false;
        if (p.ok && p.report.margin.margin > best) {
            best = p.report.margin.margin;
            best_rs = p.sense_r_on;
        }
    }
    std::size_t argmax_count = 0;
    bool argmax_at_8 = false;
    for (const auto& p : r.sweep) {
        if (p.argmax) {
            ++argmax_count;
            argmax_at_8 = p.sense_r_on == 8.0;
        }
    }
    o.require(w4 >= 1e-12 && w4 <= 10e-12, "4x4 write energy in [1, 10] pJ/bit");
    o.require(w8 > w4, "8x8 write energy above 4x4");
    o.require(rd4 >= 1e-15 && rd4 <= 50e-15, "4x4 read energy in [1, 50] fJ/bit");
    o.require(rd8 >= 1e-15 && rd8 <= 50e-15, "8x8 read energy in [1, 50] fJ/bit");
    o.require(r.t4.margin.margin > r.t8.margin.margin, "4x4 margin above 8x8 margin");
    o.require(sweep_ok, "every sweep point ran");
    o.require(argmax_count == 1 && argmax_at_8 && best_rs == 8.0, "unique margin argmax at 8 R_on");
}

void peak_currents(Outcome& o) {
    const auto& r = tile_runs();
    const double p4 = r.t4.peak_switch_current, p8 = r.t8.peak_switch_current;
    o.detail << "4x4 peak " << us(p4) << "uA (" << r.t4.peak_switch << "), 8x8 peak " << us(p8) << "uA ("
             << r.t8.peak_switch << ")";
    o.require(p4 >= 120e-6 / 3.0 && p4 <= 120e-6 * 3.0, "4x4 peak within 3x of 120 uA");
    o.require(p8 > p4, "8x8 peak above 4x4 peak");
}

// ---- 7 -------------------------------------------------------------------

void density_values(Outcome& o) {
    const AreaSpec spec;
    const auto rows = comparison_table(spec);
    auto density = [&](const std::string& name) {
        for (const auto& r : rows) {
            if (r.name == name) return r.gbit_per_cm2;
        }
        return std::nan("");
    };
    const std::vector<std::tuple<std::string, double, double>> want{
        {"Hybrid (4x4)", 1.98, 0.01},  {"Hybrid (8x8)", 3.95, 0.01}, {"1kB Crossbar", 12.35, 0.01},
        {"SRAM Active", 0.338, 5e-4},  {"SRAM Leakage", 0.338, 5e-4}, {"STT-MRAM", 0.760, 5e-4}};
    for (const auto& [name, value, tol] : want) {
        const double got = density(name);
        o.detail << name << "=" << got << " ";
        o.require(std::abs(got - value) <= tol, name);
    }
    const auto ratios = density_ratios(spec);
    o.detail << "ratios " << ratios.hybrid4_over_1t1m << " " << ratios.hybrid8_over_1t1m;
    o.require(std::abs(ratios.hybrid4_over_1t1m - 2.0) <= 1e-12, "hybrid 4x4 / 1T1M = 2");
    o.require(std::abs(ratios.hybrid8_over_1t1m - 4.0) <= 1e-12, "hybrid 8x8 / 1T1M = 4");
}

// ---- 8 -------------------------------------------------------------------

void round_trip(Outcome& o) {
    ExperimentConfig ideal;
    ideal.topology.tiles_x = ideal.topology.tiles_y = 1;
    ideal.topology.wire_r = 0.0;
    ideal.topology.access = {0.0, kOpenCircuit};
    ideal.topology.column = {0.0, kOpenCircuit};
    ideal.workload.rounds = 10;
    const auto r = run_tile(ideal);
    o.detail << "ideal tile: " << r.comparator_errors << " comparator errors, " << r.margin.errors
             << " at the best threshold, of " << r.reads << " reads, margin " << r.margin.margin * 1e3
             << "mV, worst half-select " << r.worst_half_select << "V";
    o.require(r.comparator_errors == 0, "ideal isolated tile reads back every bit");

    ExperimentConfig real;
    real.topology.tiles_x = real.topology.tiles_y = 1;
    real.workload.rounds = 10;
    const auto a = run_tile(real);
    const auto b = run_tile(real);
    std::ostringstream ra, rb;
    write_tile_report(ra, a);
    write_tile_report(rb, b);
    o.detail << "; real wires: " << a.comparator_errors << " errors, margin " << a.margin.margin * 1e3 << "mV";
    o.require(ra.str() == rb.str() && tile_record(a) == tile_record(b), "real-wire reports byte-identical");
    o.require(a.comparator_errors == b.comparator_errors && a.margin.margin == b.margin.margin,
              "real-wire errors and margin repeat");
}

// ---- 9 -------------------------------------------------------------------

int shell(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void cli_rerun(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / ("memxbar_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string exe = std::string("\"") + MEMXBAR_CLI + "\"";
    // defaults throughout, except a shorter workload for the sweep grid
    const std::vector<std::pair<std::string, std::string>> runs{{"device-test", ""},
                                                                {"energy-scaling", ""},
                                                                {"tile", ""},
                                                                {"sweep", " --set sweep.rounds=5 --jobs 4"},
                                                                {"density", ""},
                                                                {"netlist", ""}};
    std::size_t good = 0;
    for (const auto& [cmd, extra] : runs) {
        const fs::path dir = root / cmd;
        const fs::path log = root / (cmd + ".log");
        bool ok = shell(exe + " " + cmd + extra + " --out " + dir.string() + " >" + log.string() + " 2>&1") == 0;
        ok = ok && shell(exe + " rerun " + (dir / "manifest.json").string() + " --out " + (dir / "re").string() +
                         " >>" + log.string() + " 2>&1") == 0;
        if (ok) {
            // compare the bytes directly as well as through the manifest hashes
            std::ifstream mf(dir / "manifest.json");
            const auto m = nlohmann::json::parse(mf);
            for (const auto& e : m["outputs"]) {
                const std::string name = e["name"];
                std::ifstream a(dir / name, std::ios::binary), b(dir / "re" / name, std::ios::binary);
                std::ostringstream sa, sb;
                sa << a.rdbuf();
                sb << b.rdbuf();
                ok = ok && sa.str() == sb.str();
            }
        }
        o.detail << cmd << (ok ? " ok " : " MISMATCH ");
        o.require(ok, cmd + " rerun reproduces its outputs");
        good += ok;
    }
    if (good == runs.size()) fs::remove_all(root);
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: none stated
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "device calibration", 1.0, device_calibration},
        {2, "threshold exactness", 5.0, threshold_exactness},
        {3, "solver oracle", 0.0, solver_oracle},
        {4, "write-energy trend", 0.0, energy_trend},
        {5, "tile bands and orderings", 0.0, tile_bands},
        {6, "peak switch current", 0.0, peak_currents},
        {7, "density table", 0.0, density_values},
        {8, "round-trip oracle", 0.0, round_trip},
        {9, "CLI reproducibility", 0.0, cli_rerun},
    };
    std::set<int> pick;
    for (int k = 1; k < argc; ++k) pick.insert(std::atoi(argv[k]));

    int failed = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.contains(c.id)) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0 && secs >= c.budget_s) o.require(false, "runtime budget");
        std::printf("CRITERION %d %s: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
