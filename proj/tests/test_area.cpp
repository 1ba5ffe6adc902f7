#include <catch2/catch_amalgamated.hpp>

#include "memxbar/area.hpp"

#include <cmath>
#include <sstream>

using namespace memxbar;
using Catch::Approx;

namespace {

const DensityRow& find(const std::vector<DensityRow>& rows, const std::string& name) {
    for (const auto& r : rows) {
        if (r.name == name) return r;
    }
    FAIL("missing row " << name);
    throw;
}

// 1 / (f2 * (F in cm)^2), in Gbit
double oracle(double f2, double feature_m) { return 1e-9 / (f2 * std::pow(feature_m * 1e2, 2)); }

}  // namespace

TEST_CASE("table densities at 45 nm", "[area]") {
    const AreaSpec spec;
    const auto rows = comparison_table(spec);
    CHECK(find(rows, "SRAM Active").gbit_per_cm2 == Approx(0.338).margin(0.0005));
    CHECK(find(rows, "SRAM Leakage").gbit_per_cm2 == Approx(0.338).margin(0.0005));
    CHECK(find(rows, "STT-MRAM").gbit_per_cm2 == Approx(0.760).margin(0.0005));
    CHECK(find(rows, "Hybrid (4x4)").gbit_per_cm2 == Approx(1.98).margin(0.01));
    CHECK(find(rows, "Hybrid (8x8)").gbit_per_cm2 == Approx(3.95).margin(0.01));
    CHECK(find(rows, "1kB Crossbar").gbit_per_cm2 == Approx(12.35).margin(0.01));
    CHECK(find(rows, "Hybrid (4x4)").f2_per_bit == 25.0);
    CHECK(find(rows, "Hybrid (8x8)").f2_per_bit == 12.5);
    CHECK(rows.size() == 6);
}

TEST_CASE("density identity holds for every row", "[area][property]") {
    for (double f : {22e-9, 45e-9, 90e-9}) {
        for (std::size_t n : {1, 2, 4, 8, 16}) {
            AreaSpec spec;
            spec.feature = f;
            spec.tile_rows = spec.tile_cols = n;
            for (const auto& r : comparison_table(spec)) {
                const double f_cm = r.feature * 100.0;
                CHECK(r.gbit_per_cm2 * 1e9 * r.f2_per_bit * f_cm * f_cm == Approx(1.0).epsilon(1e-12));
                CHECK(r.gbit_per_cm2 == Approx(oracle(r.f2_per_bit, r.feature)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("hybrid formula", "[area]") {
    AreaSpec spec;
    spec.tile_rows = spec.tile_cols = 1;
    CHECK(hybrid_density(spec).f2_per_bit == 100.0);
    spec.tile_rows = spec.tile_cols = 16;
    CHECK(hybrid_density(spec).f2_per_bit == 6.25);
    CHECK(hybrid_density(spec).gbit_per_cm2 == Approx(oracle(6.25, 45e-9)).epsilon(1e-12));
    spec.tile_rows = 2;
    spec.tile_cols = 8;
    CHECK(hybrid_density(spec).f2_per_bit == Approx(10.0 * 50.0 / 16.0));
    CHECK(hybrid_density(spec).name == "Hybrid (2x8)");
}

TEST_CASE("square hybrids grow with tile size and stay below the crossbar bound", "[area][property]") {
    AreaSpec spec;
    const double crossbar = crossbar_density(spec).gbit_per_cm2;
    double prev = 0.0;
    for (std::size_t n = 1; n <= 16; ++n) {
        spec.tile_rows = spec.tile_cols = n;
        const auto row = hybrid_density(spec);
        CHECK(row.f2_per_bit == Approx(100.0 / static_cast<double>(n)).epsilon(1e-15));
        CHECK(row.gbit_per_cm2 > prev);
        CHECK(row.gbit_per_cm2 < crossbar);
        prev = row.gbit_per_cm2;
    }
}

TEST_CASE("feature size scaling", "[area]") {
    AreaSpec a, b;
    b.feature = 90e-9;
    CHECK(crossbar_density(b).gbit_per_cm2 == Approx(crossbar_density(a).gbit_per_cm2 / 4.0).epsilon(1e-12));
    b.feature = 22e-9;
    const double k = std::pow(45.0 / 22.0, 2);
    CHECK(hybrid_density(b).gbit_per_cm2 == Approx(hybrid_density(a).gbit_per_cm2 * k).epsilon(1e-12));
    b = a;
    b.memristor_factor = 8.0;
    CHECK(crossbar_density(b).gbit_per_cm2 == Approx(6.17).margin(0.005));
}

TEST_CASE("hybrid over 1T1M ratios", "[area]") {
    const auto r = density_ratios(AreaSpec{});
    CHECK(r.hybrid4_over_1t1m == Approx(2.0).epsilon(1e-14));
    CHECK(r.hybrid8_over_1t1m == Approx(4.0).epsilon(1e-14));
    CHECK(r.hybrid8_over_stt == Approx(3.95 / 0.760).epsilon(2e-3));
}

TEST_CASE("custom tiles add a row", "[area]") {
    AreaSpec spec;
    spec.tile_rows = spec.tile_cols = 16;
    const auto rows = comparison_table(spec);
    CHECK(rows.size() == 7);
    CHECK(find(rows, "Hybrid (16x16)").f2_per_bit == 6.25);
}

TEST_CASE("area validation", "[area]") {
    AreaSpec spec;
    spec.constants.erase("STT-MRAM");
    try {
        (void)comparison_table(spec);
        FAIL("expected a missing-constant error");
    } catch (const InvalidInput& e) {
        CHECK(std::string(e.what()).find("STT-MRAM") != std::string::npos);
    }
    spec = {};
    spec.feature = 0.0;
    CHECK_THROWS_AS(hybrid_density(spec), InvalidInput);
    spec = {};
    spec.tile_rows = 0;
    CHECK_THROWS_AS(hybrid_density(spec), InvalidInput);
}

TEST_CASE("density report layout", "[area][csv]") {
    const AreaSpec spec;
    std::ostringstream txt, csv;
    write_density_table(txt, comparison_table(spec), density_ratios(spec));
    write_density_csv(csv, comparison_table(spec));
    CHECK(txt.str().find("literature values") != std::string::npos);
    const std::string text = txt.str();
    const auto at = text.find("Hybrid (4x4)");
    REQUIRE(at != std::string::npos);
    CHECK(text.substr(at, text.find('\n', at) - at).find(" 1.975 ") != std::string::npos);
    CHECK(csv.str().rfind("architecture,gbit_per_cm2,f2_per_bit,feature_nm\n", 0) == 0);
    CHECK(csv.str().find("\r") == std::string::npos);
}
