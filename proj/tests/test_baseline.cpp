#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "baseline/baseline.hpp"

using namespace echofilter;

namespace {

core::Echogram make_echogram(int n_pings, int n_depths, float value = -70.0f,
                             double step = 0.25) {
    core::Echogram eg;
    eg.timestamps.resize(n_pings);
    for (int i = 0; i < n_pings; ++i) eg.timestamps[i] = 1.6e9 + i;
    eg.depths.resize(n_depths);
    for (int k = 0; k < n_depths; ++k) eg.depths[k] = step * k;
    eg.sv.assign(static_cast<size_t>(n_pings) * n_depths, value);
    eg.present.assign(eg.sv.size(), 1);
    return eg;
}

core::BoundaryLine const_line(int n, double depth) {
    core::BoundaryLine l;
    l.depths.assign(n, depth);
    l.valid.assign(n, 1);
    return l;
}

}  // namespace

TEST_CASE("blurring a constant field changes nothing") {
    const core::Echogram eg = make_echogram(20, 30, -55.0f);
    const core::Echogram out = baseline::gaussian_blur_2d(eg, 13, 2.0);
    for (size_t i = 0; i < eg.sv.size(); ++i)
        CHECK(out.sv[i] == doctest::Approx(-55.0).epsilon(1e-9));
}

TEST_CASE("an impulse blurs into a normalized gaussian stencil") {
    core::Echogram eg = make_echogram(31, 31, 0.0f);
    eg.at(15, 15) = 1.0f;
    const core::Echogram out = baseline::gaussian_blur_2d(eg, 13, 2.0);
    // build the reference kernel
    const int r = 6;
    std::vector<double> k1(13);
    double z = 0.0;
    for (int i = -r; i <= r; ++i) z += (k1[i + r] = std::exp(-0.5 * i * i / 4.0));
    for (auto& v : k1) v /= z;
    for (int di = -r; di <= r; ++di)
        for (int dk = -r; dk <= r; ++dk)
            CHECK(out.at(15 + di, 15 + dk) ==
                  doctest::Approx(k1[di + r] * k1[dk + r]).epsilon(1e-5));
    CHECK(out.at(15, 15 + r + 1) == doctest::Approx(0.0));
}

TEST_CASE("vanishing sigma approaches the identity") {
    core::Echogram eg = make_echogram(10, 10, -70.0f);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> dist(-95.0f, -45.0f);
    for (auto& v : eg.sv) v = dist(rng);
    const core::Echogram out = baseline::gaussian_blur_2d(eg, 13, 1e-6);
    for (size_t i = 0; i < eg.sv.size(); ++i)
        CHECK(out.sv[i] == doctest::Approx(eg.sv[i]).epsilon(1e-6));
}

TEST_CASE("blur excludes missing cells via mask weighting") {
    core::Echogram eg = make_echogram(15, 15, -60.0f);
    eg.at(7, 7) = 999.0f;  // value that would poison the blur
    eg.present[static_cast<size_t>(7) * 15 + 7] = 0;
    const core::Echogram out = baseline::gaussian_blur_2d(eg, 13, 2.0);
    CHECK(out.at(7, 6) == doctest::Approx(-60.0).epsilon(1e-6));
    CHECK(out.at(6, 7) == doctest::Approx(-60.0).epsilon(1e-6));
}

TEST_CASE("threshold pick finds the first quiet sample below the surface") {
    core::Echogram eg = make_echogram(5, 80, -90.0f);  // 0..19.75 m
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 40; ++k) eg.at(i, k) = -60.0f;  // loud above 10 m
    const core::BoundaryLine surface = const_line(5, 0.0);
    const core::BoundaryLine l = baseline::threshold_offset_pick(eg, surface, -80.0);
    for (int i = 0; i < 5; ++i) {
        CHECK(l.valid[i] == 1);
        CHECK(l.depths[i] == doctest::Approx(10.0));
    }
}

TEST_CASE("an all-quiet column crosses immediately at the surface") {
    const core::Echogram eg = make_echogram(3, 40, -95.0f);
    const core::BoundaryLine surface = const_line(3, 2.0);
    const core::BoundaryLine l = baseline::threshold_offset_pick(eg, surface, -80.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(l.valid[i] == 1);
        CHECK(l.depths[i] == doctest::Approx(2.0).epsilon(0.15));
    }
}

TEST_CASE("an all-loud column is flagged at the deepest sample") {
    const core::Echogram eg = make_echogram(3, 40, -50.0f);
    const core::BoundaryLine surface = const_line(3, 0.0);
    const core::BoundaryLine l = baseline::threshold_offset_pick(eg, surface, -80.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(l.valid[i] == 0);
        CHECK(l.depths[i] == doctest::Approx(eg.depths.back()));
    }
}

TEST_CASE("the search starts at the surface line, not the top") {
    core::Echogram eg = make_echogram(2, 80, -60.0f);
    // quiet wedge near the top that must be skipped when surface is below it
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 8; ++k) eg.at(i, k) = -95.0f;
    for (int i = 0; i < 2; ++i)
        for (int k = 60; k < 80; ++k) eg.at(i, k) = -95.0f;  // quiet below 15 m
    const core::BoundaryLine surface = const_line(2, 5.0);
    const core::BoundaryLine l = baseline::threshold_offset_pick(eg, surface, -80.0);
    CHECK(l.depths[0] == doctest::Approx(15.0));
}

TEST_CASE("raising the threshold never deepens the pick on decaying columns") {
    core::Echogram eg = make_echogram(1, 100, 0.0f);
    for (int k = 0; k < 100; ++k) eg.at(0, k) = -40.0f - 0.6f * k;  // monotone down
    const core::BoundaryLine surface = const_line(1, 0.0);
    double prev = 1e9;
    for (double thr : {-90.0, -80.0, -70.0, -60.0}) {
        const core::BoundaryLine l = baseline::threshold_offset_pick(eg, surface, thr);
        CHECK(l.depths[0] <= prev + 1e-9);
        prev = l.depths[0];
    }
}

TEST_CASE("best bottom candidate locks onto a clean seafloor step") {
    core::Echogram eg = make_echogram(6, 200, -80.0f);  // 0..49.75 m
    for (int i = 0; i < 6; ++i)
        for (int k = 120; k < 200; ++k) eg.at(i, k) = -30.0f;  // floor from 30 m
    const core::BoundaryLine l =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, false);
    for (int i = 0; i < 6; ++i) {
        CHECK(l.valid[i] == 1);
        CHECK(l.depths[i] == doctest::Approx(30.0).epsilon(0.02));
    }
}

TEST_CASE("inverted pick finds the bottom of an entrained-air layer") {
    core::Echogram eg = make_echogram(4, 100, -85.0f);  // water
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 32; ++k) eg.at(i, k) = -50.0f;  // air above 8 m
    // inverted: air -> -100 (quiet), water -> -65 (loud); onset at 8 m
    const core::BoundaryLine l =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, true);
    for (int i = 0; i < 4; ++i) {
        CHECK(l.valid[i] == 1);
        CHECK(l.depths[i] == doctest::Approx(8.0).epsilon(0.05));
    }
}

TEST_CASE("a fully quiet column yields invalid pings") {
    const core::Echogram eg = make_echogram(4, 60, -95.0f);
    const core::BoundaryLine l =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, false);
    for (int i = 0; i < 4; ++i) CHECK(l.valid[i] == 0);
}

TEST_CASE("short spikes do not qualify as a sustained layer") {
    core::Echogram eg = make_echogram(1, 200, -85.0f);
    eg.at(0, 60) = -30.0f;  // 1-sample glitch at 15 m
    eg.at(0, 61) = -30.0f;  // 2 samples still under the qualification window
    for (int k = 140; k < 200; ++k) eg.at(0, k) = -30.0f;  // true floor at 35 m
    const core::BoundaryLine l =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, false);
    CHECK(l.depths[0] == doctest::Approx(35.0).epsilon(0.02));
}

TEST_CASE("backstep walks shallower along a loud shoulder") {
    core::Echogram eg = make_echogram(1, 200, -85.0f);
    // gradual shoulder: loud-ish from 28 m, full floor from 30 m
    for (int k = 112; k < 120; ++k) eg.at(0, k) = -60.0f;
    for (int k = 120; k < 200; ++k) eg.at(0, k) = -30.0f;
    const core::BoundaryLine l =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, false);
    CHECK(l.depths[0] == doctest::Approx(28.0).epsilon(0.02));
}

TEST_CASE("inverted pick agrees with threshold crossing on monotone columns") {
    core::Echogram eg = make_echogram(1, 150, 0.0f);
    for (int k = 0; k < 150; ++k) eg.at(0, k) = -45.0f - 0.4f * k;  // monotone quietening
    // inverted value crosses -70 where -Sv-150 > -70, i.e. Sv < -80
    const core::BoundaryLine inv =
        baseline::best_bottom_candidate(eg, -70.0, -70.0, -70.0, true);
    const core::BoundaryLine surface = const_line(1, 0.0);
    const core::BoundaryLine thr = baseline::threshold_offset_pick(eg, surface, -80.0);
    REQUIRE(inv.valid[0] == 1);
    CHECK(inv.depths[0] == doctest::Approx(thr.depths[0]).epsilon(0.02));
}

TEST_CASE("downfacing annotation adds the half-metre bottom offset") {
    core::Echogram eg = make_echogram(8, 200, -85.0f);
    eg.orientation = core::Orientation::kDownfacing;
    for (int i = 0; i < 8; ++i) {
        for (int k = 0; k < 20; ++k) eg.at(i, k) = -50.0f;      // air above 5 m
        for (int k = 120; k < 200; ++k) eg.at(i, k) = -30.0f;   // floor at 30 m
    }
    const baseline::BaselineLines lines = baseline::baseline_annotate(eg);
    for (int i = 2; i < 6; ++i) {
        REQUIRE(lines.seafloor.valid[i] == 1);
        CHECK(lines.seafloor.depths[i] == doctest::Approx(30.5).epsilon(0.05));
        CHECK(lines.entrained_air.depths[i] == doctest::Approx(5.0).epsilon(0.3));
    }
}

TEST_CASE("upfacing annotation picks a surface and searches below it") {
    core::Echogram eg = make_echogram(8, 200, -85.0f);
    eg.orientation = core::Orientation::kUpfacing;
    for (int i = 0; i < 8; ++i) {
        for (int k = 0; k < 12; ++k) eg.at(i, k) = -20.0f;   // surface return above 3 m
        for (int k = 12; k < 40; ++k) eg.at(i, k) = -50.0f;  // entrained air to 10 m
    }
    const baseline::BaselineLines lines = baseline::baseline_annotate(eg);
    for (int i = 2; i < 6; ++i) {
        REQUIRE(lines.surface.valid[i] == 1);
        CHECK(lines.surface.depths[i] < 3.5);
        REQUIRE(lines.entrained_air.valid[i] == 1);
        CHECK(lines.entrained_air.depths[i] == doctest::Approx(10.0).epsilon(0.1));
        CHECK(lines.entrained_air.depths[i] > lines.surface.depths[i]);
    }
}
