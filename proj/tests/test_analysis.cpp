#include <catch2/catch_amalgamated.hpp>

#include "memxbar/analysis.hpp"
#include "memxbar/experiments.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace memxbar;
using Catch::Approx;

namespace {

std::vector<ReadSample> samples(std::initializer_list<double> ones, std::initializer_list<double> zeros) {
    std::vector<ReadSample> s;
    for (double v : ones) s.push_back({0, 0, 0, v, 1});
    for (double v : zeros) s.push_back({0, 0, 0, v, 0});
    return s;
}

// Brute-force errors of the best threshold: try every candidate.
std::size_t best_errors(const std::vector<ReadSample>& s) {
    std::vector<double> cand{-1e9};
    for (const auto& x : s) cand.push_back(x.peak);
    std::size_t best = s.size();
    for (double t : cand) best = std::min(best, count_errors(s, t));
    return best;
}

struct Resistor1k {
    Netlist net;
    Schedule sched;
};

// One source behind a gated switch and a resistor.
Resistor1k series_circuit(double volts, double t_end, bool closed, double r_closed) {
    Resistor1k c;
    const NodeId in = c.net.add_node("in");
    const NodeId mid = c.net.add_node("mid");
    const WaveformId w = c.net.add_waveform("in");
    const GateId g = c.net.add_gate("g");
    c.net.add_source("V", in, w);
    c.net.add_switch("S", in, mid, g, r_closed, kOpenCircuit);
    c.net.add_resistor("R", mid, kGround, 1000.0);
    c.sched = Schedule(c.net);
    c.sched.waveforms[w].add(0.0, volts);
    c.sched.waveforms[w].add(t_end, volts);
    c.sched.gates[g].set(0.0, closed);
    c.sched.t_end = t_end;
    return c;
}

}  // namespace

TEST_CASE("noise margin examples", "[analysis]") {
    auto r = noise_margin(samples({0.8, 0.9}, {0.2, 0.3}));
    CHECK(r.margin == Approx(0.5));
    CHECK(r.errors == 0);
    CHECK(r.min_one == 0.8);
    CHECK(r.max_zero == 0.3);
    CHECK(count_errors(samples({0.8, 0.9}, {0.2, 0.3}), r.threshold) == 0);

    r = noise_margin(samples({0.5}, {0.5}));
    CHECK(r.margin == 0.0);
    CHECK(r.errors >= 1);

    CHECK_THROWS_AS(noise_margin(samples({0.5, 0.6}, {})), InvalidInput);
    CHECK_THROWS_AS(noise_margin(samples({}, {0.1})), InvalidInput);
}

TEST_CASE("noise margin properties", "[analysis][property]") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> one(0.7, 0.15), zero(0.3, 0.15);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ReadSample> s;
        const int n = 2 + static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i) {
            const bool bit = i == 0 || (i > 1 && (rng() >> 63));
            s.push_back({0, 0, 0, bit ? one(rng) : zero(rng), static_cast<std::uint8_t>(bit)});
        }
        const auto base = noise_margin(s);
        CHECK(base.margin >= 0.0);
        if (base.margin > 0.0) CHECK(base.errors == 0);
        CHECK(base.errors == best_errors(s));
        CHECK(count_errors(s, base.threshold) == base.errors);

        auto perm = s;
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto p = noise_margin(perm);
        CHECK(p.margin == base.margin);
        CHECK(p.errors == base.errors);

        auto more = s;
        more.push_back({0, 0, 0, base.min_one + 0.1, 1});
        more.push_back({0, 0, 0, base.max_zero - 0.1, 0});
        CHECK(noise_margin(more).margin == base.margin);
    }
}

TEST_CASE("energy per bit of a 1 V pulse across 1 kOhm for 10 ns", "[analysis]") {
    auto c = series_circuit(1.0, 10e-9, true, 0.0);
    const auto tr = transient_run(c.net, c.sched, SolverConfig{});
    const std::vector<OpWindow> w{{OpKind::write, 0.0, 10e-9, 0, 0, 1}};
    // V^2/R * t = 1e-3 W * 1e-8 s
    CHECK(energy_per_bit(tr, w, OpKind::write).per_bit == Approx(1e-11).epsilon(1e-9));
    CHECK_THROWS_AS(energy_per_bit(tr, w, OpKind::read), InvalidInput);
    CHECK_THROWS_AS(energy_per_bit(tr, {}, OpKind::write), InvalidInput);
}

TEST_CASE("peak switch current", "[analysis]") {
    SECTION("1 V across a closed 1 kOhm switch and 1 kOhm") {
        auto c = series_circuit(1.0, 1e-9, true, 1000.0);
        const auto tr = transient_run(c.net, c.sched, SolverConfig{});
        const auto p = peak_switch_current(tr, c.net);
        CHECK(p.max == Approx(0.5e-3).epsilon(1e-12));
        CHECK(p.max_switch == "S");
    }
    SECTION("open switches carry nothing") {
        auto c = series_circuit(1.0, 1e-9, false, 1000.0);
        const auto tr = transient_run(c.net, c.sched, SolverConfig{});
        const auto p = peak_switch_current(tr, c.net);
        CHECK(p.max == 0.0);
        CHECK(p.per_switch == std::vector<double>{0.0});
    }
}

TEST_CASE("half-select bookkeeping sees the unselected rows", "[analysis]") {
    HybridArraySpec spec;
    spec.tiles_x = spec.tiles_y = 1;
    spec.wire_r = 0.0;
    spec.access = spec.column = SwitchParams{0.0, kOpenCircuit};
    const auto built = build_hybrid(spec);
    ProtocolBuilder b(built, TimingConfig{});
    b.write(WriteOp{0, 0, {1, 0, 1, 0}});
    GeneratedWorkload g;
    g.schedule = b.finish();
    g.windows = b.windows();
    const auto run = run_array(built, g, SolverConfig{});
    // unselected rows are grounded, columns at +-Vw/2
    REQUIRE(run.worst_half_select.size() == 1);
    CHECK(run.worst_half_select[0] == Approx(3.5).epsilon(1e-12));
    CHECK(run.max_write_voltage == Approx(7.0).epsilon(1e-12));
}

TEST_CASE("sweep results do not depend on grid order or thread count", "[analysis][sweep]") {
    ExperimentConfig cfg;
    cfg.topology.tiles_x = cfg.topology.tiles_y = 1;
    cfg.sweep.rounds = 2;
    cfg.sweep.tile = {4};
    cfg.sweep.sense_r_on = {8.0, 0.5, 2.0};
    std::ostringstream a, b, c;
    write_sweep_csv(a, run_sweep(cfg, 1));
    cfg.sweep.sense_r_on = {2.0, 8.0, 0.5};
    write_sweep_csv(b, run_sweep(cfg, 3));
    write_sweep_csv(c, run_sweep(cfg, 2));
    CHECK(a.str() == b.str());
    CHECK(a.str() == c.str());
}

TEST_CASE("a one-point sweep equals the direct run", "[analysis][sweep]") {
    ExperimentConfig cfg;
    cfg.topology.tiles_x = cfg.topology.tiles_y = 1;
    cfg.sweep.rounds = 2;
    cfg.sweep.tile = {4};
    cfg.sweep.sense_r_on = {4.0};
    const auto pts = run_sweep(cfg, 1);
    REQUIRE(pts.size() == 1);
    REQUIRE(pts[0].ok);
    CHECK(pts[0].argmax);
    cfg.workload.rounds = 2;
    cfg.topology.sense_r_on = 4.0;
    CHECK(tile_record(pts[0].report) == tile_record(run_tile(cfg)));
}

TEST_CASE("failed sweep points are marked without stopping the others", "[analysis][sweep]") {
    ExperimentConfig cfg;
    cfg.topology.tiles_x = cfg.topology.tiles_y = 1;
    cfg.sweep.rounds = 1;
    cfg.sweep.tile = {1, 4};
    cfg.sweep.sense_r_on = {8.0};
    // A seed whose single 1x1 write stores a 1: every read is a stored 1, so
    // the margin has no stored-0 population and that point fails.
    HybridArraySpec one;
    one.tile_rows = one.tile_cols = 1;
    one.tiles_x = one.tiles_y = 1;
    const auto map1 = build_hybrid(one).map;
    std::uint64_t seed = 0;
    while (std::get<WriteOp>(make_workload(seed, 1, map1).ops[0]).bits[0] == 0) ++seed;
    cfg.workload.seed = seed;

    const auto pts = run_sweep(cfg, 2);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].tile == 1);
    CHECK_FALSE(pts[0].ok);
    CHECK(pts[0].error.find("stored-0") != std::string::npos);
    CHECK_FALSE(pts[0].argmax);
    CHECK(pts[1].ok);
    CHECK(pts[1].argmax);
    std::ostringstream os;
    write_sweep_csv(os, pts);
    CHECK(os.str().find("\n1,7,8,0,") != std::string::npos);
}
