#include "memxbar/solver.hpp"

#include "memxbar/kernels.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace memxbar {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0U); }
    std::uint32_t find(std::uint32_t i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent_[b] = a;  // smallest id becomes the root, so ground stays a root
    }

private:
    std::vector<std::uint32_t> parent_;
};

constexpr int kNoSlot = -1;

}  // namespace

SimulationError::SimulationError(double t, const std::string& what)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "at t=" << t << " s: " << what;
          return os.str();
      }()),
      time_(t) {}

void SolverConfig::validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("solver.dt must be > 0");
    if (!(v_tol > 0)) throw InvalidInput("solver.v_tol must be > 0");
    if (!(i_tol > 0)) throw InvalidInput("solver.i_tol must be > 0");
    if (max_newton < 1) throw InvalidInput("solver.max_newton must be >= 1");
}

// Everything that depends only on the gate configuration.
struct MnaSolver::System {
    struct Stamp {
        std::uint32_t a;  // supernodes
        std::uint32_t b;
        int diag_a = kNoSlot;
        int diag_b = kNoSlot;
        int off = kNoSlot;
    };
    struct Linear {
        Stamp stamp;
        double g;
    };
    struct TreeEdge {
        NodeId child;
        NodeId parent;
        std::size_t sw;
    };

    std::vector<std::uint32_t> super;          // node -> supernode
    std::size_t n_super = 0;
    std::vector<int> unknown;                  // supernode -> unknown index or -1
    std::vector<std::uint8_t> grounded;        // supernode contains ground
    std::vector<std::vector<std::size_t>> drivers;  // supernode -> sources fixing it
    std::vector<int> root_source;              // supernode -> source receiving the supply current, or -1
    std::size_t n_unknown = 0;

    std::vector<Linear> linear;                // resistors and non-shorted switches with g > 0
    std::vector<std::size_t> linear_switch;    // switch index per linear entry, or SIZE_MAX for resistors
    std::vector<Stamp> mem;                    // per memristor
    std::vector<double> switch_g;              // per switch; 0 for open circuits
    std::vector<std::uint8_t> shorted;         // per switch
    std::vector<TreeEdge> tree;                // short edges, children after parents (BFS order)

    Eigen::SparseMatrix<double> jac;           // lower triangle only
    std::vector<double> lin_values;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt;
    bool factored = false;
    Eigen::VectorXd rhs;
};

MnaSolver::MnaSolver(const Netlist& net, SolverConfig cfg) : net_(net), cfg_(cfg) {
    cfg_.validate();
    for (const auto& m : net_.memristors()) model_of_.push_back(m.model);
    op_.node_voltages.assign(net_.node_count(), 0.0);
    op_.memristor_voltages.assign(net_.memristors().size(), 0.0);
    op_.memristor_currents.assign(net_.memristors().size(), 0.0);
    op_.switch_currents.assign(net_.switches().size(), 0.0);
    op_.source_currents.assign(net_.sources().size(), 0.0);
    mem_g_.assign(net_.memristors().size(), 0.0);
}

MnaSolver::~MnaSolver() = default;

MnaSolver::System& MnaSolver::system_for(std::span<const std::uint8_t> gates) {
    std::vector<std::uint8_t> key(gates.begin(), gates.end());
    for (auto& g : key) g = g ? 1 : 0;
    if (auto it = systems_.find(key); it != systems_.end()) return *it->second;

    auto sys = std::make_unique<System>();
    const std::size_t n_nodes = net_.node_count();
    const auto switches = net_.switches();

    // Merge terminals of closed ideal switches.
    DisjointSets shorts(n_nodes);
    sys->switch_g.assign(switches.size(), 0.0);
    sys->shorted.assign(switches.size(), 0);
    for (std::size_t i = 0; i < switches.size(); ++i) {
        const auto& s = switches[i];
        const double r = s.resistance(key[s.gate] != 0);
        if (r == 0.0) {
            sys->shorted[i] = 1;
            shorts.unite(s.a, s.b);
        } else if (std::isfinite(r)) {
            sys->switch_g[i] = 1.0 / r;
        }
    }
    std::vector<std::uint32_t> root_to_super(n_nodes, UINT32_MAX);
    sys->super.resize(n_nodes);
    for (NodeId n = 0; n < n_nodes; ++n) {
        const auto r = shorts.find(n);
        if (root_to_super[r] == UINT32_MAX) root_to_super[r] = static_cast<std::uint32_t>(sys->n_super++);
        sys->super[n] = root_to_super[r];
    }
    const std::size_t S = sys->n_super;
    sys->grounded.assign(S, 0);
    sys->grounded[sys->super[kGround]] = 1;
    sys->drivers.assign(S, {});
    const auto sources = net_.sources();
    for (std::size_t i = 0; i < sources.size(); ++i) sys->drivers[sys->super[sources[i].pos]].push_back(i);
    sys->root_source.assign(S, -1);
    sys->unknown.assign(S, -1);
    for (std::size_t s = 0; s < S; ++s) {
        if (!sys->grounded[s] && sys->drivers[s].empty()) sys->unknown[s] = static_cast<int>(sys->n_unknown++);
        if (!sys->grounded[s] && !sys->drivers[s].empty()) sys->root_source[s] = static_cast<int>(sys->drivers[s].front());
    }

    // Every free supernode needs a conductive path to a fixed one.
    DisjointSets conn(S);
    auto connect = [&](NodeId a, NodeId b) { conn.unite(sys->super[a], sys->super[b]); };
    for (const auto& r : net_.resistors()) connect(r.a, r.b);
    for (std::size_t i = 0; i < switches.size(); ++i) {
        if (sys->switch_g[i] > 0) connect(switches[i].a, switches[i].b);
    }
    for (const auto& m : net_.memristors()) connect(m.a, m.b);
    std::vector<std::uint8_t> anchored(S, 0);
    for (std::size_t s = 0; s < S; ++s) {
        if (sys->unknown[s] < 0) anchored[conn.find(static_cast<std::uint32_t>(s))] = 1;
    }
    for (NodeId n = 0; n < n_nodes; ++n) {
        if (!anchored[conn.find(sys->super[n])]) {
            throw SingularNetwork("node '" + net_.node_name(n) + "' has no conductive path to ground or a source");
        }
    }

    // Sparsity pattern over free supernodes, lower triangle.
    std::vector<Eigen::Triplet<double>> trip;
    auto add_pattern = [&](std::uint32_t a, std::uint32_t b) {
        const int ua = sys->unknown[a];
        const int ub = sys->unknown[b];
        if (ua >= 0) trip.emplace_back(ua, ua, 0.0);
        if (ub >= 0) trip.emplace_back(ub, ub, 0.0);
        if (ua >= 0 && ub >= 0 && ua != ub) trip.emplace_back(std::max(ua, ub), std::min(ua, ub), 0.0);
    };
    auto make_stamp = [&](NodeId a, NodeId b) {
        System::Stamp st;
        st.a = sys->super[a];
        st.b = sys->super[b];
        if (st.a != st.b) add_pattern(st.a, st.b);
        return st;
    };
    for (const auto& r : net_.resistors()) {
        auto st = make_stamp(r.a, r.b);
        if (st.a != st.b) {
            sys->linear.push_back({st, 1.0 / r.ohms});
            sys->linear_switch.push_back(SIZE_MAX);
        }
    }
    for (std::size_t i = 0; i < switches.size(); ++i) {
        if (sys->switch_g[i] <= 0) continue;
        auto st = make_stamp(switches[i].a, switches[i].b);
        if (st.a != st.b) {
            sys->linear.push_back({st, sys->switch_g[i]});
            sys->linear_switch.push_back(i);
        }
    }
    for (const auto& m : net_.memristors()) sys->mem.push_back(make_stamp(m.a, m.b));

    const auto nu = static_cast<Eigen::Index>(sys->n_unknown);
    sys->jac.resize(nu, nu);
    sys->jac.setFromTriplets(trip.begin(), trip.end());
    sys->jac.makeCompressed();
    auto slot = [&](int r, int c) -> int {
        const int* outer = sys->jac.outerIndexPtr();
        const int* inner = sys->jac.innerIndexPtr();
        const int* lo = inner + outer[c];
        const int* hi = inner + outer[c + 1];
        const int* it = std::lower_bound(lo, hi, r);
        return static_cast<int>(it - inner);
    };
    auto resolve = [&](System::Stamp& st) {
        if (st.a == st.b) return;
        const int ua = sys->unknown[st.a];
        const int ub = sys->unknown[st.b];
        if (ua >= 0) st.diag_a = slot(ua, ua);
        if (ub >= 0) st.diag_b = slot(ub, ub);
        if (ua >= 0 && ub >= 0) st.off = slot(std::max(ua, ub), std::min(ua, ub));
    };
    for (auto& l : sys->linear) resolve(l.stamp);
    for (auto& m : sys->mem) resolve(m);

    sys->lin_values.assign(static_cast<std::size_t>(sys->jac.nonZeros()), 0.0);
    for (const auto& l : sys->linear) {
        if (l.stamp.diag_a != kNoSlot) sys->lin_values[l.stamp.diag_a] += l.g;
        if (l.stamp.diag_b != kNoSlot) sys->lin_values[l.stamp.diag_b] += l.g;
        if (l.stamp.off != kNoSlot) sys->lin_values[l.stamp.off] -= l.g;
    }
    if (nu > 0) sys->ldlt.analyzePattern(sys->jac);
    sys->rhs.resize(nu);

    // Spanning forest of the shorted switches, rooted at the fixed node of
    // each supernode so that source supply currents land on the root.
    std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n_nodes);
    for (std::size_t i = 0; i < switches.size(); ++i) {
        if (!sys->shorted[i]) continue;
        adj[switches[i].a].emplace_back(switches[i].b, i);
        adj[switches[i].b].emplace_back(switches[i].a, i);
    }
    std::vector<std::uint8_t> seen(n_nodes, 0);
    auto bfs = [&](NodeId root) {
        seen[root] = 1;
        std::vector<NodeId> queue{root};
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const NodeId n = queue[q];
            for (const auto& [m, sw] : adj[n]) {
                if (seen[m]) continue;
                seen[m] = 1;
                sys->tree.push_back({m, n, sw});
                queue.push_back(m);
            }
        }
    };
    if (!adj[kGround].empty()) bfs(kGround);
    for (const auto& src : sources) {
        if (!seen[src.pos] && !adj[src.pos].empty()) bfs(src.pos);
    }
    for (NodeId n = 0; n < n_nodes; ++n) {
        if (!seen[n] && !adj[n].empty()) bfs(n);
    }

    auto& ref = *sys;
    systems_.emplace(std::move(key), std::move(sys));
    return ref;
}

const OperatingPoint& MnaSolver::solve(std::span<const double> source_values, std::span<const std::uint8_t> gates,
                                       std::span<const DeviceState> states) {
    if (source_values.size() != net_.sources().size()) throw InvalidInput("solve: one value per source required");
    if (gates.size() != net_.gate_count()) throw InvalidInput("solve: one state per gate required");
    if (states.size() != net_.memristors().size()) throw InvalidInput("solve: one state per memristor required");
    for (double v : source_values) {
        if (!std::isfinite(v)) throw InvalidInput("solve: non-finite source value");
    }

    System& sys = system_for(gates);
    const std::size_t S = sys.n_super;
    const auto nm = net_.memristors().size();

    // Initial guess from the previous solution; fixed supernodes from sources.
    super_v_.assign(S, 0.0);
    for (NodeId n = 0; n < net_.node_count(); ++n) {
        if (sys.unknown[sys.super[n]] >= 0) super_v_[sys.super[n]] = op_.node_voltages[n];
    }
    for (std::size_t s = 0; s < S; ++s) {
        if (sys.unknown[s] >= 0) continue;
        const double v0 = sys.grounded[s] ? 0.0 : source_values[sys.drivers[s].front()];
        for (std::size_t src : sys.drivers[s]) {
            if (source_values[src] != v0) {
                throw SingularNetwork("sources at different voltages are shorted together at '" +
                                      net_.node_name(net_.sources()[src].pos) + "'");
            }
        }
        super_v_[s] = v0;
    }

    states_.assign(states.begin(), states.end());
    const kernels::DeviceBatch batch{model_of_, net_.device_models()};
    auto& mv = op_.memristor_voltages;
    auto& mi = op_.memristor_currents;

    auto evaluate = [&] {
        for (std::size_t m = 0; m < nm; ++m) mv[m] = super_v_[sys.mem[m].a] - super_v_[sys.mem[m].b];
        if (cfg_.parallel_kernels) {
            kernels::parallel::evaluate(batch, mv, states_, mi, mem_g_);
        } else {
            kernels::serial::evaluate(batch, mv, states_, mi, mem_g_);
        }
        residual_.assign(S, 0.0);
        for (const auto& l : sys.linear) {
            const double i = l.g * (super_v_[l.stamp.a] - super_v_[l.stamp.b]);
            residual_[l.stamp.a] += i;
            residual_[l.stamp.b] -= i;
        }
        for (std::size_t m = 0; m < nm; ++m) {
            residual_[sys.mem[m].a] += mi[m];
            residual_[sys.mem[m].b] -= mi[m];
        }
        double worst = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            if (sys.unknown[s] >= 0) worst = std::max(worst, std::abs(residual_[s]));
        }
        return worst;
    };

    auto factorize = [&] {
        double* values = sys.jac.valuePtr();
        std::copy(sys.lin_values.begin(), sys.lin_values.end(), values);
        for (std::size_t m = 0; m < nm; ++m) {
            const auto& st = sys.mem[m];
            if (st.a == st.b) continue;
            const double g = mem_g_[m];
            if (st.diag_a != kNoSlot) values[st.diag_a] += g;
            if (st.diag_b != kNoSlot) values[st.diag_b] += g;
            if (st.off != kNoSlot) values[st.off] -= g;
        }
        sys.ldlt.factorize(sys.jac);
        if (sys.ldlt.info() != Eigen::Success || !(sys.ldlt.vectorD().minCoeff() > 0)) {
            sys.factored = false;
            throw SingularNetwork("nodal matrix is singular");
        }
        sys.factored = true;
        ++factorizations_;
    };

    // Every node of a passive network with monotone elements lies between
    // the lowest and highest fixed voltage.
    double v_lo = 0.0;
    double v_hi = 0.0;
    for (double v : source_values) {
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
    }

    int it = 0;
    double worst = evaluate();
    if (sys.n_unknown > 0) {
        bool refresh = !sys.factored;
        int steps_on_factor = 0;
        double prev_dv = std::numeric_limits<double>::infinity();
        std::vector<double> backup;
        while (true) {
            const bool fresh = refresh;
            if (refresh) {
                factorize();
                steps_on_factor = 0;
            }
            for (std::size_t s = 0; s < S; ++s) {
                if (sys.unknown[s] >= 0) sys.rhs[sys.unknown[s]] = -residual_[s];
            }
            const Eigen::VectorXd dv = sys.ldlt.solve(sys.rhs);
            backup = super_v_;
            double dv_max = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                if (sys.unknown[s] < 0) continue;
                const double d = dv[sys.unknown[s]];
                if (!std::isfinite(d)) throw NewtonDivergence("non-finite Newton update");
                super_v_[s] = std::clamp(super_v_[s] + d, v_lo, v_hi);
                dv_max = std::max(dv_max, std::abs(d));
            }
            ++it;
            ++steps_on_factor;
            const double before = worst;
            worst = evaluate();
            if (!fresh && worst > before && before >= cfg_.i_tol) {
                // A stale factor made things worse: undo and refactorize here.
                super_v_.swap(backup);
                worst = evaluate();
                refresh = true;
                prev_dv = std::numeric_limits<double>::infinity();
                if (it >= cfg_.max_newton) throw NewtonDivergence("Newton iteration cap reached after a rejected step");
                continue;
            }
            if (before < cfg_.i_tol && dv_max < cfg_.v_tol) break;
            if (it >= cfg_.max_newton) {
                std::ostringstream os;
                os << "Newton iteration cap (" << cfg_.max_newton << ") reached; residual " << worst
                   << " A, last update " << dv_max << " V";
                throw NewtonDivergence(os.str());
            }
            // Refresh the Jacobian when the chord iteration contracts slowly.
            refresh = dv_max > 0.25 * prev_dv || steps_on_factor >= 12;
            prev_dv = dv_max;
        }
    }
    op_.iterations = it;
    op_.max_residual = worst;
    for (NodeId n = 0; n < net_.node_count(); ++n) op_.node_voltages[n] = super_v_[sys.super[n]];
    recover_currents(sys, source_values);
    return op_;
}

void MnaSolver::recover_currents(const System& sys, std::span<const double> source_values) {
    const auto switches = net_.switches();
    const auto& v = op_.node_voltages;
    const std::size_t n_nodes = net_.node_count();

    double dissipated = 0.0;
    // Current leaving each original node through non-shorted branches.
    std::vector<double> inj(n_nodes, 0.0);
    auto branch = [&](NodeId a, NodeId b, double i) {
        inj[a] += i;
        inj[b] -= i;
        dissipated += i * (v[a] - v[b]);
    };
    for (const auto& r : net_.resistors()) branch(r.a, r.b, (v[r.a] - v[r.b]) / r.ohms);
    for (std::size_t i = 0; i < switches.size(); ++i) {
        if (sys.shorted[i]) continue;
        const double cur = sys.switch_g[i] * (v[switches[i].a] - v[switches[i].b]);
        op_.switch_currents[i] = cur;
        branch(switches[i].a, switches[i].b, cur);
    }
    const auto mems = net_.memristors();
    for (std::size_t m = 0; m < mems.size(); ++m) branch(mems[m].a, mems[m].b, op_.memristor_currents[m]);

    // Shorted switches carry whatever KCL requires; walk each spanning tree
    // from the leaves toward the root.
    std::vector<double> subtotal = inj;
    for (auto e = sys.tree.rbegin(); e != sys.tree.rend(); ++e) {
        const double toward_parent = -subtotal[e->child];
        op_.switch_currents[e->sw] = switches[e->sw].a == e->child ? toward_parent : -toward_parent;
        subtotal[e->parent] += subtotal[e->child];
    }
    for (std::size_t i = 0; i < switches.size(); ++i) {
        if (sys.shorted[i] && std::none_of(sys.tree.begin(), sys.tree.end(), [&](const auto& t) { return t.sw == i; })) {
            op_.switch_currents[i] = 0.0;  // closes a loop of shorts; split is indeterminate
        }
    }

    std::vector<double> super_out(sys.n_super, 0.0);
    for (NodeId n = 0; n < n_nodes; ++n) super_out[sys.super[n]] += inj[n];
    double supplied = 0.0;
    std::fill(op_.source_currents.begin(), op_.source_currents.end(), 0.0);
    for (std::size_t s = 0; s < sys.n_super; ++s) {
        if (sys.root_source[s] < 0) continue;
        const auto src = static_cast<std::size_t>(sys.root_source[s]);
        op_.source_currents[src] = super_out[s];
        supplied += source_values[src] * super_out[s];
    }
    op_.source_power = supplied;
    op_.dissipated_power = dissipated;
}

OperatingPoint solve_operating_point(const Netlist& net, std::span<const double> source_values,
                                     std::span<const std::uint8_t> gates, const SolverConfig& cfg) {
    MnaSolver solver(net, cfg);
    const auto states = net.states();
    return solver.solve(source_values, gates, states);
}

Trace transient_run(const Netlist& net, const Schedule& sched, const SolverConfig& cfg, std::span<const Probe> probes,
                    const StepObserver& observer) {
    cfg.validate();
    sched.validate(net);

    MnaSolver solver(net, cfg);
    Trace tr;
    for (const auto& p : probes) tr.labels.push_back(probe_label(net, p));
    tr.columns.resize(probes.size());
    tr.switch_peak_current.assign(net.switches().size(), 0.0);

    std::vector<DeviceState> states = net.states();
    std::vector<std::size_t> model_of;
    for (const auto& m : net.memristors()) model_of.push_back(m.model);
    const kernels::DeviceBatch batch{model_of, net.device_models()};

    const auto n_steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(sched.t_end / cfg.dt - 1e-9)));
    const auto reserve = n_steps + 1;
    tr.time.reserve(reserve);
    tr.energy.reserve(reserve);
    tr.source_power.reserve(reserve);
    tr.dissipated_power.reserve(reserve);
    for (auto& c : tr.columns) c.reserve(reserve);

    const auto sources = net.sources();
    std::vector<double> src(sources.size()), prev_src;
    std::vector<std::uint8_t> gates(net.gate_count()), prev_gates;
    bool states_changed = true;
    double energy = 0.0;
    auto time_of = [&](std::size_t k) { return k >= n_steps ? sched.t_end : static_cast<double>(k) * cfg.dt; };

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = time_of(k);
        for (std::size_t s = 0; s < sources.size(); ++s) src[s] = sched.waveforms[sources[s].waveform].at(t);
        for (std::size_t g = 0; g < gates.size(); ++g) gates[g] = sched.gates[g].at(t) ? 1 : 0;

        if (k > 0 && !states_changed && src == prev_src && gates == prev_gates) {
            ++tr.reused_steps;
        } else {
            try {
                solver.solve(src, gates, states);
            } catch (const SingularNetwork& e) {
                throw SimulationError(t, e.what());
            } catch (const NewtonDivergence& e) {
                throw SimulationError(t, e.what());
            }
            tr.newton_iterations += static_cast<std::size_t>(solver.last().iterations);
        }
        const OperatingPoint& op = solver.last();

        tr.time.push_back(t);
        tr.energy.push_back(energy);
        tr.source_power.push_back(op.source_power);
        tr.dissipated_power.push_back(op.dissipated_power);
        for (std::size_t p = 0; p < probes.size(); ++p) {
            double value = 0.0;
            switch (probes[p].kind) {
            case Probe::Kind::node_voltage: value = op.node_voltages.at(probes[p].index); break;
            case Probe::Kind::memristor_current: value = op.memristor_currents.at(probes[p].index); break;
            case Probe::Kind::memristor_state: value = states.at(probes[p].index).x; break;
            case Probe::Kind::memristor_voltage: value = op.memristor_voltages.at(probes[p].index); break;
            case Probe::Kind::switch_current: value = op.switch_currents.at(probes[p].index); break;
            }
            tr.columns[p].push_back(value);
        }
        for (std::size_t i = 0; i < tr.switch_peak_current.size(); ++i) {
            tr.switch_peak_current[i] = std::max(tr.switch_peak_current[i], std::abs(op.switch_currents[i]));
        }

        const double h = k < n_steps ? time_of(k + 1) - t : 0.0;
        if (observer) observer(StepView{t, h, src, gates, op, states});
        if (k == n_steps) break;

        energy += op.source_power * h;
        const std::size_t changed = cfg.parallel_kernels
                                        ? kernels::parallel::advance(batch, op.memristor_voltages, h, states)
                                        : kernels::serial::advance(batch, op.memristor_voltages, h, states);
        states_changed = changed > 0;
        prev_src = src;
        prev_gates = gates;
    }
    tr.factorizations = solver.factorizations();
    tr.final_states = std::move(states);
    return tr;
}

}  // namespace memxbar
