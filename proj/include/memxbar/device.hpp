#pragma once

#include <stdexcept>
#include <string>

namespace memxbar {

/// Thrown for inputs that violate a documented precondition (non-finite
/// voltages, invalid parameter blocks, out-of-range indices).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Constants of the threshold-gated memristor compact model.  Defaults are
/// the fit to the Lu et al. Ag/a-Si device (R_on ~ 125 kOhm, ~1e6 on/off).
struct DeviceParams {
    double v_p = 1.088;       // positive switching threshold [V]
    double v_n = 1.088;       // negative threshold magnitude [V]
    double a_p = 816000.0;    // motion-rate amplitude, positive side [1/s]
    double a_n = 816000.0;    // motion-rate amplitude, negative side [1/s]
    double x_p = 0.985;       // window onset, increasing direction
    double x_n = 0.985;       // window onset, decreasing direction
    double alpha_p = 0.1;     // window decay rate, increasing direction
    double alpha_n = 0.1;     // window decay rate, decreasing direction
    double a1 = 1.6e-4;       // conduction amplitude for v >= 0 [A]
    double a2 = 1.6e-4;       // conduction amplitude for v < 0 [A]
    double b = 0.05;          // conduction curvature [1/V]
    double x0 = 0.01;         // initial state
    double x_floor = 1e-6;    // lower clamp on the state

    /// Throws InvalidInput naming the first offending field.
    void validate() const;

    /// Largest voltage magnitude that is guaranteed not to move the state.
    [[nodiscard]] double dead_band() const noexcept { return v_p < v_n ? v_p : v_n; }

    bool operator==(const DeviceParams&) const = default;
};

struct DeviceState {
    double x = 0.01;

    bool operator==(const DeviceState&) const = default;
};

enum class Direction { increasing, decreasing };

/// Threshold-gated state motion g(v).  Exactly zero on [-v_n, v_p].
[[nodiscard]] double ionic_rate(double v, const DeviceParams& p) noexcept;

/// Boundary window f(x) for the given direction of motion.
[[nodiscard]] double window(double x, Direction dir, const DeviceParams& p) noexcept;

/// Branch current a*x*sinh(b*v), with a = a1 for v >= 0 and a2 otherwise.
[[nodiscard]] double device_current(double v, DeviceState s, const DeviceParams& p) noexcept;

/// Small-signal conductance d(device_current)/dv at v.
[[nodiscard]] double device_conductance(double v, DeviceState s, const DeviceParams& p) noexcept;

/// dx/dt = g(v) * f(x, sign(g)).
[[nodiscard]] double state_derivative(double v, DeviceState s, const DeviceParams& p) noexcept;

/// Integrates the state over dt with v held fixed (RK4 with internal
/// sub-stepping), clamping to [x_floor, 1].  Identity when g(v) == 0.
[[nodiscard]] DeviceState advance_state(DeviceState s, double v, double dt, const DeviceParams& p);

/// v_read / device_current(v_read).
[[nodiscard]] double read_resistance(DeviceState s, const DeviceParams& p, double v_read = 1.0);

/// Resistance at x = 1 and x = x_floor, for a 1 V read unless stated.
[[nodiscard]] inline double r_on(const DeviceParams& p, double v_read = 1.0) {
    return read_resistance(DeviceState{1.0}, p, v_read);
}
[[nodiscard]] inline double r_off(const DeviceParams& p, double v_read = 1.0) {
    return read_resistance(DeviceState{p.x_floor}, p, v_read);
}

}  // namespace memxbar
