#pragma once

// Per-device inner loops of the transient solver.  Each kernel exists twice:
// an OpenMP version used by the solver and a plain serial reference kept for
// testing and benchmarking.  Both produce bit-identical results because every
// element is computed independently.

#include "memxbar/device.hpp"

#include <cstddef>
#include <span>

namespace memxbar::kernels {

/// Inputs shared by the memristor kernels; all spans have one entry per
/// memristor except `params`, which is indexed through `model`.
struct DeviceBatch {
    std::span<const std::size_t> model;
    std::span<const DeviceParams> params;
};

namespace serial {

/// Branch current and small-signal conductance for every device.
void evaluate(const DeviceBatch& batch, std::span<const double> v, std::span<const DeviceState> states,
              std::span<double> current, std::span<double> conductance);

/// Advances every state over dt at its branch voltage.  Returns the number
/// of devices whose state changed.
std::size_t advance(const DeviceBatch& batch, std::span<const double> v, double dt, std::span<DeviceState> states);

}  // namespace serial

namespace parallel {

void evaluate(const DeviceBatch& batch, std::span<const double> v, std::span<const DeviceState> states,
              std::span<double> current, std::span<double> conductance);

std::size_t advance(const DeviceBatch& batch, std::span<const double> v, double dt, std::span<DeviceState> states);

}  // namespace parallel

/// Below this many devices the parallel kernels run on the calling thread.
inline constexpr std::size_t kParallelThreshold = 64;

/// True when the library was built with OpenMP.
[[nodiscard]] bool openmp_enabled() noexcept;

}  // namespace memxbar::kernels
