#pragma once

#include <string>

#include "core/echogram.hpp"
#include "core/targets.hpp"

namespace echofilter::synth {

struct SynthConfig {
    uint64_t seed = 0;
    core::Orientation orientation = core::Orientation::kDownfacing;
    int n_pings = 256;
    double depth_max = 50.0;       // metres; grid starts at 0
    double depth_step = 0.25;
    double ping_interval = 1.0;    // seconds
    double start_timestamp = 1.6e9;

    // entrained-air boundary: base + amplitude * |sin(2 pi t / period)| + noise
    double tide_period = 240.0;    // seconds
    double air_base = 0.25;        // water-column fraction
    double air_amplitude = 0.10;
    double boundary_noise_sigma = 0.5;  // metres, smoothed along time

    double air_mean_db = -50.0;
    double air_sigma_db = 6.0;
    double water_db = -92.0;
    double water_sigma_db = 3.0;
    double seafloor_db = -30.0;
    double fish_rate = 5e-4;       // blob seeds per water pixel
    double porosity = 0.35;        // peak dropout probability near the boundary

    double seafloor_fraction = 0.8;     // downfacing ramp midpoint as depth fraction
    double seafloor_ramp = 0.1;         // fraction drop across the recording
    double extra_range_fraction = 0.0;  // empty range fraction (exercises autozoom)

    double passive_attenuation_db = 60.0;
    int passive_every = 0;          // pings between passive bursts; 0 = none
    int passive_length = 12;
    int bad_period_every = 0;       // pings between injected bad periods; 0 = none
    int bad_period_length = 12;
    int n_patches = 0;
    int patch_size = 6;             // square side, pixels
};

struct SynthRecording {
    core::Echogram raw;    // full export, passive pings attenuated, bad data missing
    core::Echogram clean;  // same Sv with the good mask applied
    core::LineInputs lines;
    core::SegmentationTargets targets;
};

// Deterministic in the seed.
SynthRecording generate_recording(const SynthConfig& cfg);

// Writes <base>_raw.csv, <base>_clean.csv, <base>_<line>.evl, <base>.evr
// so the real ingestion path runs unmodified. Returns the base path.
std::string write_recording(const SynthRecording& rec, const std::string& dir,
                            const std::string& base);

}  // namespace echofilter::synth
