#pragma once

// Independent reference for linear networks: textbook MNA with one extra
// unknown per voltage source (and per closed ideal switch), solved by dense
// Gaussian elimination with partial pivoting.  Shares nothing with the
// production solver beyond the Netlist container.

#include "memxbar/netlist.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<double> gaussian_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (a[piv][col] == 0.0) throw std::runtime_error("oracle: singular system");
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Node voltages (ground included) of a memristor-free netlist.
inline std::vector<double> dense_mna(const memxbar::Netlist& net, std::span<const double> source_values,
                                     std::span<const std::uint8_t> gates) {
    if (!net.memristors().empty()) throw std::runtime_error("oracle: linear networks only");
    const std::size_t nv = net.node_count() - 1;
    std::vector<std::pair<std::size_t, std::size_t>> branches;  // voltage-defined branches (pos, neg)
    std::vector<double> branch_v;
    for (std::size_t s = 0; s < net.sources().size(); ++s) {
        branches.emplace_back(net.sources()[s].pos, net.sources()[s].neg);
        branch_v.push_back(source_values[s]);
    }
    for (const auto& sw : net.switches()) {
        if (gates[sw.gate] && sw.r_closed == 0.0) {
            branches.emplace_back(sw.a, sw.b);
            branch_v.push_back(0.0);
        }
    }
    const std::size_t n = nv + branches.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    auto stamp_g = [&](std::size_t p, std::size_t q, double g) {
        if (p) a[p - 1][p - 1] += g;
        if (q) a[q - 1][q - 1] += g;
        if (p && q) {
            a[p - 1][q - 1] -= g;
            a[q - 1][p - 1] -= g;
        }
    };
    for (const auto& r : net.resistors()) stamp_g(r.a, r.b, 1.0 / r.ohms);
    for (const auto& sw : net.switches()) {
        const double r = sw.resistance(gates[sw.gate] != 0);
        if (r > 0 && std::isfinite(r)) stamp_g(sw.a, sw.b, 1.0 / r);
    }
    for (std::size_t k = 0; k < branches.size(); ++k) {
        const auto [p, q] = branches[k];
        const std::size_t row = nv + k;
        if (p) {
            a[p - 1][row] += 1.0;
            a[row][p - 1] += 1.0;
        }
        if (q) {
            a[q - 1][row] -= 1.0;
            a[row][q - 1] -= 1.0;
        }
        b[row] = branch_v[k];
    }
    const auto x = gaussian_solve(std::move(a), std::move(b));
    std::vector<double> v(net.node_count(), 0.0);
    for (std::size_t i = 0; i < nv; ++i) v[i + 1] = x[i];
    return v;
}

}  // namespace oracle
