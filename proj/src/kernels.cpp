#include "memxbar/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace memxbar::kernels {

namespace {

void check_sizes(const DeviceBatch& batch, std::size_t n, std::size_t m) {
    if (batch.model.size() != n || m != n) throw InvalidInput("kernels: span size mismatch");
}

}  // namespace

namespace serial {

void evaluate(const DeviceBatch& batch, std::span<const double> v, std::span<const DeviceState> states,
              std::span<double> current, std::span<double> conductance) {
    const std::size_t n = v.size();
    check_sizes(batch, n, states.size());
    check_sizes(batch, n, current.size());
    check_sizes(batch, n, conductance.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = batch.params[batch.model[i]];
        current[i] = device_current(v[i], states[i], p);
        conductance[i] = device_conductance(v[i], states[i], p);
    }
}

std::size_t advance(const DeviceBatch& batch, std::span<const double> v, double dt, std::span<DeviceState> states) {
    const std::size_t n = v.size();
    check_sizes(batch, n, states.size());
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const DeviceState next = advance_state(states[i], v[i], dt, batch.params[batch.model[i]]);
        if (next.x != states[i].x) ++changed;
        states[i] = next;
    }
    return changed;
}

}  // namespace serial

namespace parallel {

void evaluate(const DeviceBatch& batch, std::span<const double> v, std::span<const DeviceState> states,
              std::span<double> current, std::span<double> conductance) {
    const auto n = static_cast<std::int64_t>(v.size());
    check_sizes(batch, v.size(), states.size());
    check_sizes(batch, v.size(), current.size());
    check_sizes(batch, v.size(), conductance.size());
#pragma omp parallel for schedule(static) if (v.size() >= kParallelThreshold)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& p = batch.params[batch.model[i]];
        current[i] = device_current(v[i], states[i], p);
        conductance[i] = device_conductance(v[i], states[i], p);
    }
}

std::size_t advance(const DeviceBatch& batch, std::span<const double> v, double dt, std::span<DeviceState> states) {
    const auto n = static_cast<std::int64_t>(v.size());
    check_sizes(batch, v.size(), states.size());
    if (!(dt >= 0)) throw InvalidInput("advance: invalid time step");
    std::int64_t changed = 0;
    // advance_state only throws on non-finite input; screen here so no
    // exception escapes the parallel region.
    for (std::int64_t i = 0; i < n; ++i) {
        if (!std::isfinite(v[i])) throw InvalidInput("advance: non-finite branch voltage");
    }
#pragma omp parallel for schedule(static) reduction(+ : changed) if (v.size() >= kParallelThreshold)
    for (std::int64_t i = 0; i < n; ++i) {
        const DeviceState next = advance_state(states[i], v[i], dt, batch.params[batch.model[i]]);
        if (next.x != states[i].x) ++changed;
        states[i] = next;
    }
    return static_cast<std::size_t>(changed);
}

}  // namespace parallel

bool openmp_enabled() noexcept {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace memxbar::kernels
