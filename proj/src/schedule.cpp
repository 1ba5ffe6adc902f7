#include "memxbar/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memxbar {

void PwlWaveform::add(double t, double volts) {
    if (!std::isfinite(t) || !std::isfinite(volts)) throw InvalidInput("pwl: non-finite breakpoint");
    if (!points_.empty() && !(t > points_.back().first)) throw InvalidInput("pwl: breakpoint times must be strictly increasing");
    points_.emplace_back(t, volts);
}

double PwlWaveform::at(double t) const {
    if (points_.empty()) return 0.0;
    if (t <= points_.front().first) return points_.front().second;
    if (t >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const auto& p) { return v < p.first; });
    auto lo = hi - 1;
    if (lo->second == hi->second) return lo->second;
    const double f = (t - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

void GateTimeline::set(double t, bool closed) {
    if (!std::isfinite(t)) throw InvalidInput("gate: non-finite event time");
    if (!events_.empty()) {
        if (t < events_.back().first) throw InvalidInput("gate: event times must be non-decreasing");
        if (t == events_.back().first) {
            events_.back().second = closed;
            return;
        }
    }
    events_.emplace_back(t, closed);
}

bool GateTimeline::at(double t) const {
    auto it = std::upper_bound(events_.begin(), events_.end(), t,
                               [](double v, const auto& e) { return v < e.first; });
    if (it == events_.begin()) return false;
    return (it - 1)->second;
}

void Schedule::validate(const Netlist& net) const {
    if (waveforms.size() != net.waveform_count()) throw InvalidInput("schedule: waveform table size mismatch");
    if (gates.size() != net.gate_count()) throw InvalidInput("schedule: gate table size mismatch");
    if (!(t_end > 0) || !std::isfinite(t_end)) throw InvalidInput("schedule: t_end must be > 0");
    for (const auto& w : waveforms) {
        for (const auto& [t, v] : w.points()) {
            if (t < 0 || t > t_end) throw InvalidInput("schedule: breakpoint outside [0, t_end]");
        }
    }
    for (const auto& g : gates) {
        for (const auto& [t, c] : g.events()) {
            if (t < 0 || t > t_end) throw InvalidInput("schedule: gate event outside [0, t_end]");
        }
    }
}

std::string Schedule::dump(const Netlist& net) const {
    std::ostringstream os;
    os.precision(12);
    os << "t_end " << t_end << '\n';
    for (std::size_t i = 0; i < waveforms.size(); ++i) {
        os << "waveform " << net.waveform_name(static_cast<WaveformId>(i));
        for (const auto& [t, v] : waveforms[i].points()) os << ' ' << t << ':' << v;
        os << '\n';
    }
    for (std::size_t i = 0; i < gates.size(); ++i) {
        os << "gate " << net.gate_name(static_cast<GateId>(i));
        for (const auto& [t, c] : gates[i].events()) os << ' ' << t << ':' << (c ? "closed" : "open");
        os << '\n';
    }
    return os.str();
}

}  // namespace memxbar
