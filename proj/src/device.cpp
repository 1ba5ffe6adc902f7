#include "memxbar/device.hpp"

#include <algorithm>
#include <cmath>

namespace memxbar {

namespace {

// Largest change of g*h per RK4 sub-step.  The window slope is bounded by
// roughly 1/(1 - x_p), so this keeps lambda*h well inside the RK4 stability
// region for the default fit.
constexpr double kMaxMotionPerSubstep = 0.0025;
constexpr long kMaxSubsteps = 1'000'000;

void require(bool ok, const char* field) {
    if (!ok) throw InvalidInput(std::string("device params: invalid ") + field);
}

double clamp_state(double x, const DeviceParams& p) noexcept {
    return std::clamp(x, p.x_floor, 1.0);
}

}  // namespace

void DeviceParams::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    require(finite(v_p) && v_p > 0, "v_p");
    require(finite(v_n) && v_n > 0, "v_n");
    require(finite(a_p) && a_p > 0, "a_p");
    require(finite(a_n) && a_n > 0, "a_n");
    require(finite(x_p) && x_p > 0 && x_p < 1, "x_p");
    require(finite(x_n) && x_n > 0 && x_n < 1, "x_n");
    require(finite(alpha_p), "alpha_p");
    require(finite(alpha_n), "alpha_n");
    require(finite(a1) && a1 > 0, "a1");
    require(finite(a2) && a2 > 0, "a2");
    require(finite(b) && b > 0, "b");
    require(finite(x_floor) && x_floor > 0, "x_floor");
    require(finite(x0) && x0 >= x_floor && x0 <= 1, "x0");
}

double ionic_rate(double v, const DeviceParams& p) noexcept {
    if (v > p.v_p) return p.a_p * (std::exp(v) - std::exp(p.v_p));
    if (v < -p.v_n) return -p.a_n * (std::exp(-v) - std::exp(p.v_n));
    return 0.0;
}

double window(double x, Direction dir, const DeviceParams& p) noexcept {
    if (dir == Direction::increasing) {
        if (x < p.x_p) return 1.0;
        return std::exp(-p.alpha_p * (x - p.x_p)) * ((p.x_p - x) / (1.0 - p.x_p) + 1.0);
    }
    if (x > 1.0 - p.x_n) return 1.0;
    return std::exp(p.alpha_n * (x + p.x_n - 1.0)) * (x / (1.0 - p.x_n));
}

double device_current(double v, DeviceState s, const DeviceParams& p) noexcept {
    const double a = v >= 0 ? p.a1 : p.a2;
    return a * s.x * std::sinh(p.b * v);
}

double device_conductance(double v, DeviceState s, const DeviceParams& p) noexcept {
    const double a = v >= 0 ? p.a1 : p.a2;
    return a * s.x * p.b * std::cosh(p.b * v);
}

double state_derivative(double v, DeviceState s, const DeviceParams& p) noexcept {
    const double g = ionic_rate(v, p);
    if (g == 0.0) return 0.0;
    return g * window(s.x, g > 0 ? Direction::increasing : Direction::decreasing, p);
}

DeviceState advance_state(DeviceState s, double v, double dt, const DeviceParams& p) {
    if (!std::isfinite(v) || !std::isfinite(dt) || dt < 0) {
        throw InvalidInput("advance_state: non-finite voltage or invalid time step");
    }
    const double g = ionic_rate(v, p);
    if (g == 0.0 || dt == 0.0) return s;

    const Direction dir = g > 0 ? Direction::increasing : Direction::decreasing;
    auto rhs = [&](double x) { return g * window(clamp_state(x, p), dir, p); };

    const long n = std::clamp(static_cast<long>(std::ceil(std::abs(g) * dt / kMaxMotionPerSubstep)),
                              1L, kMaxSubsteps);
    const double h = dt / static_cast<double>(n);
    double x = clamp_state(s.x, p);
    for (long k = 0; k < n; ++k) {
        const double k1 = rhs(x);
        const double k2 = rhs(x + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h * k2);
        const double k4 = rhs(x + h * k3);
        x = clamp_state(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), p);
    }
    return DeviceState{x};
}

double read_resistance(DeviceState s, const DeviceParams& p, double v_read) {
    if (v_read == 0.0 || !std::isfinite(v_read)) throw InvalidInput("read_resistance: v_read must be non-zero");
    return v_read / device_current(v_read, DeviceState{std::max(s.x, p.x_floor)}, p);
}

}  // namespace memxbar
