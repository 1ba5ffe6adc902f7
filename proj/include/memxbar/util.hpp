#pragma once

#include <string>

namespace memxbar {

/// Shortest round-trippable decimal form of v, locale-independent.
[[nodiscard]] std::string format_number(double v);

}  // namespace memxbar
