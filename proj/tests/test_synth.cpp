#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "core/preprocess.hpp"
#include "core/targets.hpp"
#include "formats/sv_csv.hpp"
#include "support/errors.hpp"
#include "synth/synth.hpp"

using namespace echofilter;

TEST_CASE("zero amplitude and zero noise give a constant boundary at the base") {
    synth::SynthConfig cfg;
    cfg.seed = 1;
    cfg.n_pings = 64;
    cfg.air_amplitude = 0.0;
    cfg.boundary_noise_sigma = 0.0;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    // the air fraction is measured against the usable water column, which for
    // a downfacing recording ends at the seafloor
    for (size_t i = 0; i < rec.lines.entrained_air.depths.size(); ++i) {
        REQUIRE(rec.lines.entrained_air.valid[i] == 1);
        const double expected = cfg.air_base * rec.lines.seafloor.depths[i];
        CHECK(std::abs(rec.lines.entrained_air.depths[i] - expected) < 0.3);
    }
}

TEST_CASE("one seed, bit-identical recordings") {
    synth::SynthConfig cfg;
    cfg.seed = 42;
    cfg.n_pings = 128;
    cfg.passive_every = 40;
    cfg.n_patches = 2;
    const synth::SynthRecording a = synth::generate_recording(cfg);
    const synth::SynthRecording b = synth::generate_recording(cfg);
    CHECK(a.raw.sv == b.raw.sv);
    CHECK(a.raw.present == b.raw.present);
    CHECK(a.clean.present == b.clean.present);
    CHECK(a.lines.entrained_air.depths == b.lines.entrained_air.depths);
    CHECK(a.targets.good_mask == b.targets.good_mask);
    synth::SynthConfig other = cfg;
    other.seed = 43;
    const synth::SynthRecording c = synth::generate_recording(other);
    CHECK(a.raw.sv != c.raw.sv);
}

TEST_CASE("mean air penetration tracks the configured base") {
    synth::SynthConfig cfg;
    cfg.seed = 7;
    cfg.n_pings = 10000;
    cfg.air_amplitude = 0.0;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    double mean_air = 0.0, mean_floor = 0.0;
    for (double d : rec.lines.entrained_air.depths) mean_air += d;
    for (double d : rec.lines.seafloor.depths) mean_floor += d;
    const double fraction = mean_air / mean_floor;
    CHECK(fraction == doctest::Approx(cfg.air_base).epsilon(0.02));
}

TEST_CASE("generated targets round-trip through mask reconstruction") {
    for (uint64_t seed : {3ull, 9ull, 21ull}) {
        synth::SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_pings = 200;
        cfg.passive_every = 60;
        cfg.bad_period_every = 70;
        cfg.n_patches = 2;
        const synth::SynthRecording rec = synth::generate_recording(cfg);
        const core::SegmentationTargets rebuilt =
            core::build_targets(rec.raw, rec.clean, rec.lines);
        CHECK(rebuilt.good_mask == rec.targets.good_mask);
        CHECK(rebuilt.passive_periods == rec.targets.passive_periods);
        CHECK(rebuilt.bad_periods == rec.targets.bad_periods);
        CHECK(rebuilt.patch_mask == rec.targets.patch_mask);
        for (size_t i = 0; i < rebuilt.entrained_air.depths.size(); ++i)
            CHECK(rebuilt.entrained_air.depths[i] ==
                  doctest::Approx(rec.targets.entrained_air.depths[i]).epsilon(1e-9));
    }
}

TEST_CASE("injected passive bursts are recovered exactly") {
    synth::SynthConfig cfg;
    cfg.seed = 11;
    cfg.n_pings = 300;
    cfg.passive_every = 50;
    cfg.passive_length = 12;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    REQUIRE_FALSE(rec.targets.passive_periods.empty());
    const auto detected = core::detect_passive_periods(rec.raw);
    CHECK(detected == rec.targets.passive_periods);
}

TEST_CASE("upfacing recordings carry their orientation and a surface line") {
    synth::SynthConfig cfg;
    cfg.seed = 13;
    cfg.n_pings = 96;
    cfg.orientation = core::Orientation::kUpfacing;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    CHECK(rec.raw.orientation == core::Orientation::kUpfacing);
    for (size_t i = 0; i < rec.lines.surface.depths.size(); ++i) {
        REQUIRE(rec.lines.surface.valid[i] == 1);
        CHECK(rec.lines.surface.depths[i] >= 0.0);
        CHECK(rec.lines.surface.depths[i] < rec.lines.entrained_air.depths[i]);
    }
}

TEST_CASE("downfacing seafloor ramps and stays inside the column") {
    synth::SynthConfig cfg;
    cfg.seed = 17;
    cfg.n_pings = 256;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    const auto& floor_line = rec.lines.seafloor;
    CHECK(floor_line.depths.front() < floor_line.depths.back());
    for (size_t i = 0; i < floor_line.depths.size(); ++i) {
        CHECK(floor_line.depths[i] < cfg.depth_max);
        CHECK(floor_line.depths[i] > rec.lines.entrained_air.depths[i]);
    }
}

TEST_CASE("extra range leaves the deep portion quiet for autozoom runs") {
    synth::SynthConfig cfg;
    cfg.seed = 19;
    cfg.n_pings = 64;
    cfg.extra_range_fraction = 0.6;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    // boundary and seafloor confined to the first 40% of the range
    for (size_t i = 0; i < rec.lines.seafloor.depths.size(); ++i)
        CHECK(rec.lines.seafloor.depths[i] <= 0.4 * cfg.depth_max + 1e-6);
}

TEST_CASE("configuration invariants are enforced") {
    synth::SynthConfig bad;
    bad.air_base = 0.95;
    CHECK_THROWS_AS(synth::generate_recording(bad), DomainError);
    synth::SynthConfig weak;
    weak.passive_every = 40;
    weak.passive_attenuation_db = 20.0;
    CHECK_THROWS_AS(synth::generate_recording(weak), DomainError);
    synth::SynthConfig tiny;
    tiny.n_pings = 0;
    CHECK_THROWS_AS(synth::generate_recording(tiny), DomainError);
}

TEST_CASE("written artifacts feed back through the real ingestion path") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "echofilter_synth_io";
    fs::create_directories(dir);

    synth::SynthConfig cfg;
    cfg.seed = 23;
    cfg.n_pings = 120;
    cfg.passive_every = 40;
    cfg.n_patches = 1;
    const synth::SynthRecording rec = synth::generate_recording(cfg);
    const std::string base = synth::write_recording(rec, dir.string(), "sample");

    const formats::SvCsvRecording raw_csv = formats::read_sv_csv(base + "_raw.csv");
    CHECK(static_cast<int>(raw_csv.pings.size()) == cfg.n_pings);
    const core::Echogram raw = core::regrid_depth(raw_csv, cfg.orientation);
    CHECK(raw.n_depths() == rec.raw.n_depths());
    REQUIRE(raw.present == rec.raw.present);
    for (size_t i = 0; i < raw.sv.size(); ++i)
        if (raw.present[i]) CHECK(raw.sv[i] == rec.raw.sv[i]);

    const formats::SvCsvRecording clean_csv = formats::read_sv_csv(base + "_clean.csv");
    const core::Echogram clean = core::regrid_depth(clean_csv, cfg.orientation);
    CHECK(clean.present == rec.clean.present);

    const formats::LineFile entrained = formats::read_evl(base + "_entrained.evl");
    CHECK(entrained.points.size() == static_cast<size_t>(cfg.n_pings));
    core::LineInputs lines;
    lines.entrained_air = core::line_on_timestamps(entrained, raw.timestamps);
    lines.seafloor = core::line_on_timestamps(formats::read_evl(base + "_seafloor.evl"),
                                              raw.timestamps);
    lines.surface = core::line_on_timestamps(formats::read_evl(base + "_surface.evl"),
                                             raw.timestamps);
    const core::SegmentationTargets tg = core::build_targets(raw, clean, lines);
    CHECK(tg.good_mask == rec.targets.good_mask);
    CHECK(tg.passive_periods == rec.targets.passive_periods);
    fs::remove_all(dir);
}
