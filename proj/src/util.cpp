#include "memxbar/util.hpp"

#include <charconv>
#include <cmath>

namespace memxbar {

std::string format_number(double v) {
    if (v == 0.0) return "0";
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, end};
}

}  // namespace memxbar
