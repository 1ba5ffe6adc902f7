#include "memxbar/area.hpp"

#include "memxbar/device.hpp"
#include "memxbar/util.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace memxbar {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

const CellConstant& constant(const AreaSpec& spec, const std::string& name) {
    const auto it = spec.constants.find(name);
    if (it == spec.constants.end()) throw InvalidInput("area: missing comparison constant '" + name + "'");
    return it->second;
}

DisplayConstants display(const AreaSpec& spec, const std::string& name) {
    const auto it = spec.display.find(name);
    return it == spec.display.end() ? DisplayConstants{} : it->second;
}

DensityRow hybrid_row(const AreaSpec& spec, std::size_t r, std::size_t c) {
    const double f2 = static_cast<double>(r + c) * spec.transistor_factor / static_cast<double>(r * c);
    const std::string name = "Hybrid (" + std::to_string(r) + "x" + std::to_string(c) + ")";
    return {name, density_gbit_cm2(f2, spec.feature), f2, spec.feature, display(spec, name)};
}

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : "-"; }

}  // namespace

void AreaSpec::validate() const {
    if (!positive(feature)) throw InvalidInput("area feature must be > 0");
    if (!positive(transistor_factor)) throw InvalidInput("area transistor_factor must be > 0");
    if (!positive(memristor_factor)) throw InvalidInput("area memristor_factor must be > 0");
    if (tile_rows == 0 || tile_cols == 0) throw InvalidInput("area tile dimensions must be >= 1");
    for (const auto& [name, c] : constants) {
        if (!positive(c.f2_per_bit) || !positive(c.feature)) throw InvalidInput("area constant '" + name + "' must be > 0");
    }
}

double density_gbit_cm2(double f2_per_bit, double feature) {
    const double f_cm = feature * 100.0;
    return 1.0 / (f2_per_bit * f_cm * f_cm) / 1e9;
}

DensityRow hybrid_density(const AreaSpec& spec) {
    spec.validate();
    return hybrid_row(spec, spec.tile_rows, spec.tile_cols);
}

DensityRow one_t_one_m_density(const AreaSpec& spec) {
    spec.validate();
    return {"1T1M", density_gbit_cm2(spec.transistor_factor, spec.feature), spec.transistor_factor, spec.feature, {}};
}

DensityRow crossbar_density(const AreaSpec& spec) {
    spec.validate();
    return {"1kB Crossbar", density_gbit_cm2(spec.memristor_factor, spec.feature), spec.memristor_factor, spec.feature,
            display(spec, "1kB Crossbar")};
}

std::vector<DensityRow> comparison_table(const AreaSpec& spec) {
    spec.validate();
    std::vector<DensityRow> rows;
    const CellConstant& sram = constant(spec, "SRAM");
    const CellConstant& stt = constant(spec, "STT-MRAM");
    const double sram_d = density_gbit_cm2(sram.f2_per_bit, sram.feature);
    rows.push_back({"SRAM Active", sram_d, sram.f2_per_bit, sram.feature, display(spec, "SRAM Active")});
    rows.push_back({"SRAM Leakage", sram_d, sram.f2_per_bit, sram.feature, display(spec, "SRAM Leakage")});
    rows.push_back({"STT-MRAM", density_gbit_cm2(stt.f2_per_bit, stt.feature), stt.f2_per_bit, stt.feature,
                    display(spec, "STT-MRAM")});
    rows.push_back(hybrid_row(spec, 4, 4));
    rows.push_back(hybrid_row(spec, 8, 8));
    const bool custom = !(spec.tile_rows == spec.tile_cols && (spec.tile_rows == 4 || spec.tile_rows == 8));
    if (custom) rows.push_back(hybrid_row(spec, spec.tile_rows, spec.tile_cols));
    rows.push_back(crossbar_density(spec));
    return rows;
}

DensityRatios density_ratios(const AreaSpec& spec) {
    const double t = one_t_one_m_density(spec).gbit_per_cm2;
    const double h4 = hybrid_row(spec, 4, 4).gbit_per_cm2;
    const double h8 = hybrid_row(spec, 8, 8).gbit_per_cm2;
    const CellConstant& stt = constant(spec, "STT-MRAM");
    return {h4 / t, h8 / t, h8 / density_gbit_cm2(stt.f2_per_bit, stt.feature)};
}

void write_density_table(std::ostream& os, const std::vector<DensityRow>& rows, const DensityRatios& ratios) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-19s %12s %10s %10s %14s %14s %12s %12s\n", "Memory Architecture",
                  "Gbits/cm^2", "F^2/bit", "F (nm)", "Read (fJ/bit)", "Write (fJ/bit)", "Read (ns)", "Write (ns)");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-19s %12.3f %10.4g %10.4g %14s %14s %12s %12s\n", r.name.c_str(),
                      r.gbit_per_cm2, r.f2_per_bit, r.feature * 1e9, cell(r.display.read_energy_fj).c_str(),
                      cell(r.display.write_energy_fj).c_str(), cell(r.display.read_time_ns).c_str(),
                      cell(r.display.write_time_ns).c_str());
        os << buf;
    }
    os << "energies and times: literature values (display constants, not simulated here)\n";
    std::snprintf(buf, sizeof buf, "hybrid 4x4 / 1T1M: %.4g\nhybrid 8x8 / 1T1M: %.4g\nhybrid 8x8 / STT-MRAM: %.4g\n",
                  ratios.hybrid4_over_1t1m, ratios.hybrid8_over_1t1m, ratios.hybrid8_over_stt);
    os << buf;
}

void write_density_csv(std::ostream& os, const std::vector<DensityRow>& rows) {
    os << "architecture,gbit_per_cm2,f2_per_bit,feature_nm\n";
    for (const auto& r : rows) {
        os << r.name << ',' << format_number(r.gbit_per_cm2) << ',' << format_number(r.f2_per_bit) << ','
           << format_number(r.feature * 1e9) << '\n';
    }
}

}  // namespace memxbar
