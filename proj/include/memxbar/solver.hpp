#pragma once

#include "memxbar/netlist.hpp"
#include "memxbar/schedule.hpp"
#include "memxbar/trace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memxbar {

/// A node has no conductive path to ground or a source, or two sources at
/// different voltages are shorted together.
class SingularNetwork : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NewtonDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A solver failure during a transient run, tagged with the failing time.
class SimulationError : public std::runtime_error {
public:
    SimulationError(double t, const std::string& what);
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

struct SolverConfig {
    double dt = 0.05e-9;       // [s]
    double v_tol = 1e-9;       // Newton update tolerance [V]
    double i_tol = 1e-12;      // KCL residual tolerance [A]
    int max_newton = 100;
    bool parallel_kernels = true;

    void validate() const;
};

struct OperatingPoint {
    std::vector<double> node_voltages;       // per node, ground included
    std::vector<double> memristor_voltages;
    std::vector<double> memristor_currents;
    std::vector<double> switch_currents;     // a -> b
    std::vector<double> source_currents;     // delivered out of the source node
    double source_power = 0.0;
    double dissipated_power = 0.0;
    double max_residual = 0.0;               // worst KCL residual over free nodes [A]
    int iterations = 0;
};

/// Modified nodal analysis with Newton iteration for the memristors.
///
/// Sources fix their node voltage; closed zero-ohm switches merge their
/// terminals.  The remaining free nodes form a symmetric positive definite
/// system that is factorized with a sparse LDL^T.  The factorization of each
/// gate configuration is cached and reused across calls (chord iterations);
/// it is refreshed whenever the iteration stops contracting quickly.
class MnaSolver {
public:
    MnaSolver(const Netlist& net, SolverConfig cfg);
    ~MnaSolver();
    MnaSolver(const MnaSolver&) = delete;
    MnaSolver& operator=(const MnaSolver&) = delete;

    /// Solves with the given per-source voltages, per-gate states (nonzero =
    /// closed) and device states.  The previous solution is the initial guess.
    const OperatingPoint& solve(std::span<const double> source_values, std::span<const std::uint8_t> gates,
                                std::span<const DeviceState> states);

    [[nodiscard]] const OperatingPoint& last() const noexcept { return op_; }
    [[nodiscard]] std::size_t factorizations() const noexcept { return factorizations_; }

private:
    struct System;
    System& system_for(std::span<const std::uint8_t> gates);
    void recover_currents(const System& sys, std::span<const double> source_values);

    const Netlist& net_;
    SolverConfig cfg_;
    std::vector<std::size_t> model_of_;
    std::map<std::vector<std::uint8_t>, std::unique_ptr<System>> systems_;
    std::vector<double> super_v_;
    std::vector<double> residual_;
    std::vector<double> mem_g_;
    std::vector<DeviceState> states_;
    OperatingPoint op_;
    std::size_t factorizations_ = 0;
};

/// One-shot operating point from a cold start.
[[nodiscard]] OperatingPoint solve_operating_point(const Netlist& net, std::span<const double> source_values,
                                                   std::span<const std::uint8_t> gates, const SolverConfig& cfg = {});

/// Everything an observer can see at one accepted step, before the device
/// states are advanced.
struct StepView {
    double t;
    double dt;  // length of the following step, 0 at the last sample
    std::span<const double> source_values;
    std::span<const std::uint8_t> gates;
    const OperatingPoint& op;
    std::span<const DeviceState> states;
};

using StepObserver = std::function<void(const StepView&)>;

/// Fixed-step transient: at each step the network is solved with the device
/// states frozen, the sample is recorded, then every state is advanced over
/// the step with its solved branch voltage.  Initial states come from the
/// netlist; the final states are returned in the trace.
[[nodiscard]] Trace transient_run(const Netlist& net, const Schedule& sched, const SolverConfig& cfg,
                                  std::span<const Probe> probes = {}, const StepObserver& observer = {});

}  // namespace memxbar
