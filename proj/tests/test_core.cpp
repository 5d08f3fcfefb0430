#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "core/preprocess.hpp"
#include "core/stats.hpp"
#include "core/targets.hpp"
#include "support/errors.hpp"
#include "support/timeutil.hpp"

using namespace echofilter;

namespace {

formats::SvPing make_ping(int idx, double t, double start, double stop,
                          std::vector<float> samples) {
    formats::SvPing p;
    p.ping_index = idx;
    p.datetime = epoch_to_civil(t);
    p.range_start = start;
    p.range_stop = stop;
    p.present.assign(samples.size(), 1);
    p.samples = std::move(samples);
    return p;
}

core::Echogram uniform_echogram(int n_pings, int n_depths, float value = -70.0f,
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

core::BoundaryLine const_line(int n, double depth, bool valid = true) {
    core::BoundaryLine l;
    l.depths.assign(n, depth);
    l.valid.assign(n, valid ? 1 : 0);
    return l;
}

}  // namespace

TEST_CASE("type-7 quantile matches hand values") {
    std::vector<double> v{1, 2, 3, 4};
    CHECK(core::quantile(v, 0.0) == doctest::Approx(1.0));
    CHECK(core::quantile(v, 1.0) == doctest::Approx(4.0));
    CHECK(core::quantile(v, 0.5) == doctest::Approx(2.5));
    CHECK(core::quantile(v, 0.25) == doctest::Approx(1.75));  // 1 + 0.75*(2-1)
    CHECK(core::median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
    CHECK(core::iqr({1, 2, 3, 4}) == doctest::Approx(3.25 - 1.75));
    CHECK(core::idr({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}) == doctest::Approx(8.0));  // 9 - 1
}

TEST_CASE("median filter shrinks windows at the edges and skips invalid points") {
    const std::vector<double> v{1, 1, 9, 1, 1};
    const auto out = core::median_filter(v, {}, 3);
    CHECK(out[0] == doctest::Approx(1.0));  // window {1,1}
    CHECK(out[2] == doctest::Approx(1.0));  // window {1,9,1}
    const std::vector<unsigned char> valid{1, 1, 0, 1, 1};
    const auto masked = core::median_filter(v, valid, 3);
    CHECK(masked[1] == doctest::Approx(1.0));  // 9 skipped
    CHECK(masked[3] == doctest::Approx(1.0));
}

TEST_CASE("regrid picks the modal resolution and interpolates the rest") {
    formats::SvCsvRecording rec;
    // two pings at 0.1 m over [0, 0.3], one at 0.2 m over [0, 0.4]
    rec.pings.push_back(make_ping(0, 1.6e9 + 0, 0.0, 0.3, {0, 1, 2, 3}));
    rec.pings.push_back(make_ping(1, 1.6e9 + 1, 0.0, 0.3, {4, 5, 6, 7}));
    rec.pings.push_back(make_ping(2, 1.6e9 + 2, 0.0, 0.4, {0, 10, 20}));
    const core::Echogram eg = core::regrid_depth(rec, core::Orientation::kDownfacing);
    CHECK(eg.depth_step() == doctest::Approx(0.1));
    CHECK(eg.at(0, 1) == 1.0f);  // on-grid ping untouched bitwise
    CHECK(eg.at(2, 0) == doctest::Approx(0.0));
    CHECK(eg.at(2, 1) == doctest::Approx(5.0));  // halfway between 0 and 10
    CHECK(eg.at(2, 2) == doctest::Approx(10.0));
    // third ping stops at 0.4 m, grid extends to 0.4: last bin present
    CHECK(eg.present_at(2, 4) == 1);
    // first ping has no data past 0.3 m
    CHECK(eg.present_at(0, 4) == 0);
}

TEST_CASE("regrid linear interpolation example") {
    formats::SvCsvRecording rec;
    rec.pings.push_back(make_ping(0, 1.6e9, 0.0, 1.0, {0, 10}));
    rec.pings.push_back(make_ping(1, 1.6e9 + 1, 0.0, 1.0, {0, 5, 10}));
    rec.pings.push_back(make_ping(2, 1.6e9 + 2, 0.0, 1.0, {0, 1, 10}));
    const core::Echogram eg = core::regrid_depth(rec, core::Orientation::kDownfacing);
    CHECK(eg.depth_step() == doctest::Approx(0.5));
    CHECK(eg.at(0, 0) == doctest::Approx(0.0));
    CHECK(eg.at(0, 1) == doctest::Approx(5.0));
    CHECK(eg.at(0, 2) == doctest::Approx(10.0));
}

TEST_CASE("regrid stays within each ping's value bracket") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<float> val(-100.0f, -40.0f);
    formats::SvCsvRecording rec;
    for (int i = 0; i < 6; ++i) {
        std::vector<float> samples(i % 2 ? 11 : 21);
        for (auto& s : samples) s = val(rng);
        rec.pings.push_back(make_ping(i, 1.6e9 + i, 0.0, 10.0, samples));
    }
    const core::Echogram eg = core::regrid_depth(rec, core::Orientation::kDownfacing);
    for (int i = 0; i < eg.n_pings(); ++i) {
        float lo = 1e9f, hi = -1e9f;
        for (float s : rec.pings[i].samples) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        for (int k = 0; k < eg.n_depths(); ++k) {
            if (!eg.present_at(i, k)) continue;
            CHECK(eg.at(i, k) >= lo - 1e-4f);
            CHECK(eg.at(i, k) <= hi + 1e-4f);
        }
    }
}

TEST_CASE("regrid rejects single-sample pings") {
    formats::SvCsvRecording rec;
    rec.pings.push_back(make_ping(0, 1.6e9, 0.0, 1.0, {42.0f}));
    CHECK_THROWS_AS(core::regrid_depth(rec, core::Orientation::kDownfacing), DomainError);
}

TEST_CASE("orientation standardization is an involution") {
    core::Echogram eg = uniform_echogram(4, 6);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 6; ++k) eg.at(i, k) = static_cast<float>(10 * i + k);
    eg.orientation = core::Orientation::kUpfacing;
    const core::Echogram flipped = core::standardize_orientation(eg);
    CHECK(flipped.at(0, 0) == eg.at(0, 5));
    CHECK(flipped.at(2, 1) == eg.at(2, 4));
    const core::Echogram twice = core::standardize_orientation(flipped);
    CHECK(twice.sv == eg.sv);

    core::Echogram down = uniform_echogram(2, 3);
    down.at(1, 2) = -1.0f;
    const core::Echogram same = core::standardize_orientation(down);
    CHECK(same.sv == down.sv);
}

TEST_CASE("line interpolation onto ping timestamps") {
    formats::LineFile line;
    line.points.push_back({1.6e9 + 1.0, 4.0, formats::LineStatus::kGood});
    line.points.push_back({1.6e9 + 3.0, 8.0, formats::LineStatus::kGood});
    const std::vector<double> ts{1.6e9, 1.6e9 + 1, 1.6e9 + 2, 1.6e9 + 3, 1.6e9 + 4};
    const core::BoundaryLine out = core::line_on_timestamps(line, ts);
    CHECK(out.valid[0] == 0);  // before the trace
    CHECK(out.valid[4] == 0);  // after it
    CHECK(out.valid[1] == 1);
    CHECK(out.depths[1] == doctest::Approx(4.0));
    CHECK(out.depths[2] == doctest::Approx(6.0));
    CHECK(out.depths[3] == doctest::Approx(8.0));
}

TEST_CASE("surface cleaning replaces a large spike with the local median") {
    const int n = 300;
    core::BoundaryLine line = const_line(n, 5.0);
    for (int i = 0; i < n; ++i) line.depths[i] = 5.0 + 0.01 * std::sin(0.1 * i);
    line.depths[150] = 55.0;  // +50 m spike
    const core::BoundaryLine cleaned =
        core::clean_surface_line(line, nullptr, core::Orientation::kUpfacing);
    CHECK(cleaned.depths[150] == doctest::Approx(5.0).epsilon(0.02));
    CHECK(cleaned.depths[10] == doctest::Approx(line.depths[10]));
}

TEST_CASE("surface cleaning reports anomalous pings and is idempotent") {
    const int n = 300;
    core::BoundaryLine line = const_line(n, 5.0);
    for (int i = 0; i < n; ++i) line.depths[i] = 5.0 + 0.05 * std::sin(0.2 * i);
    line.depths[40] = 80.0;
    std::vector<uint8_t> anomalous;
    const core::BoundaryLine once =
        core::clean_surface_line(line, nullptr, core::Orientation::kUpfacing, &anomalous);
    CHECK(anomalous[40] == 1);
    CHECK(anomalous[41] == 0);
    const core::BoundaryLine twice =
        core::clean_surface_line(once, nullptr, core::Orientation::kUpfacing);
    for (int i = 0; i < n; ++i) {
        CHECK(twice.valid[i] == once.valid[i]);
        if (once.valid[i]) CHECK(twice.depths[i] == doctest::Approx(once.depths[i]));
    }
}

TEST_CASE("surface clamped to the entrained-air line") {
    const int n = 50;
    core::BoundaryLine surface = const_line(n, 6.0);
    core::BoundaryLine entrained = const_line(n, 4.0);
    const core::BoundaryLine cleaned =
        core::clean_surface_line(surface, &entrained, core::Orientation::kUpfacing);
    for (int i = 0; i < n; ++i) CHECK(cleaned.depths[i] == doctest::Approx(4.0));
}

TEST_CASE("downfacing surface is the transducer face") {
    const core::BoundaryLine cleaned = core::clean_surface_line(
        const_line(20, 3.0), nullptr, core::Orientation::kDownfacing);
    for (double d : cleaned.depths) CHECK(d == doctest::Approx(0.0));
}

TEST_CASE("constant surface line passes through unchanged") {
    const core::BoundaryLine cleaned = core::clean_surface_line(
        const_line(250, 5.0), nullptr, core::Orientation::kUpfacing);
    for (double d : cleaned.depths) CHECK(d == doctest::Approx(5.0));
}

TEST_CASE("passive detection finds a 60 dB attenuated burst") {
    core::Echogram eg = uniform_echogram(20, 50);
    for (int i = 5; i <= 8; ++i)
        for (int k = 0; k < 50; ++k) eg.at(i, k) -= 60.0f;
    const auto intervals = core::detect_passive_periods(eg);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0] == core::PingInterval{5, 8});
}

TEST_CASE("passive detection ignores sub-threshold attenuation") {
    core::Echogram eg = uniform_echogram(20, 50);
    for (int i = 5; i <= 8; ++i)
        for (int k = 0; k < 50; ++k) eg.at(i, k) -= 20.0f;
    CHECK(core::detect_passive_periods(eg).empty());
    // exactly 25 dB is not a boundary (strict comparison)
    core::Echogram edge = uniform_echogram(20, 50);
    for (int i = 5; i <= 8; ++i)
        for (int k = 0; k < 50; ++k) edge.at(i, k) -= 25.0f;
    CHECK(core::detect_passive_periods(edge).empty());
}

TEST_CASE("passive detection only reads the first 38 samples") {
    core::Echogram a = uniform_echogram(30, 80);
    for (int i = 10; i <= 14; ++i)
        for (int k = 0; k < 80; ++k) a.at(i, k) -= 60.0f;
    core::Echogram b = a;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> noise(-40.0f, 40.0f);
    for (int i = 0; i < 30; ++i)
        for (int k = 38; k < 80; ++k) b.at(i, k) += noise(rng);
    CHECK(core::detect_passive_periods(a) == core::detect_passive_periods(b));
}

TEST_CASE("passive interval open at the end of the recording") {
    core::Echogram eg = uniform_echogram(20, 50);
    for (int i = 15; i < 20; ++i)
        for (int k = 0; k < 50; ++k) eg.at(i, k) -= 60.0f;
    const auto intervals = core::detect_passive_periods(eg);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0] == core::PingInterval{15, 19});
}

TEST_CASE("recording that begins passive is recovered from the rising edge") {
    core::Echogram eg = uniform_echogram(20, 50);
    for (int i = 0; i <= 4; ++i)
        for (int k = 0; k < 50; ++k) eg.at(i, k) -= 60.0f;
    const auto intervals = core::detect_passive_periods(eg);
    REQUIRE(intervals.size() == 1);
    CHECK(intervals[0] == core::PingInterval{0, 4});
}

namespace {

struct TargetFixture {
    core::Echogram raw;
    core::Echogram clean;
    core::LineInputs lines;

    // entrained at bin 4 (1.0 m), seafloor at bin 16 (4.0 m), 20 bins
    TargetFixture(int n_pings = 30) {
        raw = uniform_echogram(n_pings, 20, -70.0f);
        lines.entrained_air = const_line(n_pings, 1.0);
        lines.seafloor = const_line(n_pings, 4.0);
        lines.surface = const_line(n_pings, 0.0);
        clean = raw;
        for (int i = 0; i < n_pings; ++i) {
            for (int k = 0; k < 20; ++k) {
                if (k < 4 || k >= 16) clean.set_present(i, k, 0);
            }
        }
    }
};

}  // namespace

TEST_CASE("build_targets passes clean annotations through") {
    TargetFixture fx;
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    for (int i = 0; i < 30; ++i) {
        CHECK(tg.entrained_air.depths[i] == doctest::Approx(1.0));
        CHECK(tg.seafloor.depths[i] == doctest::Approx(4.0));
        CHECK(tg.seafloor_aggressive.depths[i] == doctest::Approx(4.0));
        CHECK(tg.surface.depths[i] == doctest::Approx(0.0));
    }
    CHECK(tg.passive_periods.empty());
    CHECK(tg.bad_periods.empty());
    for (uint8_t v : tg.patch_mask) CHECK(v == 0);
}

TEST_CASE("entrained-air target takes the deepest extent of line and mask") {
    TargetFixture fx;
    // mask extends 2 samples deeper than the line at ping 7
    fx.clean.set_present(7, 4, 0);
    fx.clean.set_present(7, 5, 0);
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    CHECK(tg.entrained_air.depths[7] == doctest::Approx(1.5));  // bin 6
    CHECK(tg.entrained_air_original.depths[7] == doctest::Approx(1.0));
    CHECK(tg.entrained_air.depths[6] == doctest::Approx(1.0));
}

TEST_CASE("aggressive seafloor swallows masked area touching the line") {
    TargetFixture fx;
    for (int i = 10; i <= 12; ++i)
        for (int k = 14; k < 16; ++k) fx.clean.set_present(i, k, 0);
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    CHECK(tg.seafloor_aggressive.depths[11] == doctest::Approx(3.5));  // bin 14
    CHECK(tg.seafloor.depths[11] == doctest::Approx(4.0));             // original kept
    CHECK(tg.seafloor_aggressive.depths[5] == doctest::Approx(4.0));
}

TEST_CASE("fully masked runs become bad periods; blobs become patches") {
    TargetFixture fx;
    for (int i = 15; i <= 26; ++i)
        for (int k = 0; k < 20; ++k) fx.clean.set_present(i, k, 0);
    for (int i = 3; i <= 5; ++i)
        for (int k = 8; k <= 10; ++k) fx.clean.set_present(i, k, 0);
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    REQUIRE(tg.bad_periods.size() == 1);
    CHECK(tg.bad_periods[0] == core::PingInterval{15, 26});
    CHECK(tg.patch_mask[static_cast<size_t>(4) * 20 + 9] == 1);
    CHECK(tg.patch_mask[static_cast<size_t>(4) * 20 + 12] == 0);
    // patch pixels are not inside the bad period
    CHECK(tg.patch_mask[static_cast<size_t>(16) * 20 + 9] == 0);
}

TEST_CASE("passive pings are excluded from bad periods") {
    TargetFixture fx;
    // attenuate pings 10..13 to make them passive in the raw recording, and
    // mask them fully in the clean export
    for (int i = 10; i <= 13; ++i)
        for (int k = 0; k < 20; ++k) {
            fx.raw.at(i, k) -= 60.0f;
            fx.clean.set_present(i, k, 0);
        }
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    REQUIRE(tg.passive_periods.size() == 1);
    CHECK(tg.passive_periods[0] == core::PingInterval{10, 13});
    CHECK(tg.bad_periods.empty());
}

TEST_CASE("good mask reconstruction matches the clean export pixel for pixel") {
    TargetFixture fx;
    fx.clean.set_present(7, 4, 0);
    for (int i = 15; i <= 26; ++i)
        for (int k = 0; k < 20; ++k) fx.clean.set_present(i, k, 0);
    for (int i = 3; i <= 5; ++i)
        for (int k = 8; k <= 10; ++k) fx.clean.set_present(i, k, 0);
    const core::SegmentationTargets tg = core::build_targets(fx.raw, fx.clean, fx.lines);
    const std::vector<uint8_t> rebuilt = core::reconstruct_good_mask(
        fx.raw, tg.entrained_air, tg.seafloor_aggressive, tg.passive_periods,
        tg.bad_periods, &tg.patch_mask);
    REQUIRE(rebuilt.size() == tg.good_mask.size());
    for (size_t i = 0; i < rebuilt.size(); ++i) CHECK(rebuilt[i] == tg.good_mask[i]);
    // and the good mask is exactly the clean export's presence
    for (size_t i = 0; i < rebuilt.size(); ++i) CHECK(tg.good_mask[i] == fx.clean.present[i]);
}

TEST_CASE("build_targets rejects mismatched grids") {
    TargetFixture fx;
    core::Echogram other = uniform_echogram(30, 19);
    CHECK_THROWS_AS(core::build_targets(fx.raw, other, fx.lines), DomainError);
}
