#pragma once

#include <array>
#include <random>

#include "core/echogram.hpp"
#include "formats/shards.hpp"

namespace echofilter::augment {

using Rng = std::mt19937_64;

// Line target slots, shared between views and loss planes 1-5.
enum LineSlot {
    kEntrained = 0,
    kEntrainedOriginal = 1,
    kSeafloor = 2,
    kSeafloorAggressive = 3,
    kSurface = 4,
    kNumLines = 5,
};

// Working representation between augmentation stages: an Sv image on a
// uniform depth axis with ping-level targets still in physical units.
struct View {
    int n_pings = 0;
    int n_bins = 0;
    double depth0 = 0.0;
    double depth_step = 0.0;
    std::vector<float> image;           // (n_pings x n_bins)
    std::vector<uint8_t> present;
    std::array<core::BoundaryLine, kNumLines> lines;
    std::vector<uint8_t> surface_anomalous;
    std::vector<uint8_t> passive;
    std::vector<uint8_t> bad_period;
    std::vector<uint8_t> patch;         // (n_pings x n_bins)
    core::Orientation orientation = core::Orientation::kDownfacing;

    double depth_max() const { return depth0 + depth_step * (n_bins - 1); }
};

View view_from_shard(const formats::Shard& shard);

// Fixed-size model input with targets in view coordinates.
struct TrainingView {
    int n_pings = 0;   // 128
    int n_bins = 0;    // 512
    std::vector<float> image;
    // One-hot depth-bin index per ping per line; -1 where the line is invalid.
    std::array<std::vector<int>, kNumLines> line_bins;
    std::vector<uint8_t> surface_anomalous;
    std::vector<uint8_t> passive;
    std::vector<uint8_t> bad_period;
    std::vector<uint8_t> patch;
    core::Orientation orientation = core::Orientation::kDownfacing;
    // Replay record: rebuilding from the same source with this seed and
    // augment flag reproduces the view bit-exactly.
    uint64_t seed = 0;
    bool augmented = false;
};

// Parameters actually drawn for one view (introspection and tests).
struct AugmentDraw {
    double stretch_factor = 1.0;
    int crop_branch = 0;  // 0 full, 1 optimal, 2 near-optimal, 3 uniform
    double crop_lo = 0.0, crop_hi = 0.0;
    bool reflected = false;
    double jitter_offset = 0.0, jitter_gain = 1.0;
    bool brightness_first = true;
    bool elastic = false;
    int interp_order = 1;
};

// --- individual stages ---

// Median to 0, scale by idr/2.56 (divisor falls back to 1 when the idr is 0),
// then missing cells set to -3.
void normalize_sv(std::vector<float>& image, const std::vector<uint8_t>& present);

View stretch_time(const View& v, double factor);

struct CropWindow {
    int branch = 0;
    double lo = 0.0, hi = 0.0;
};
CropWindow choose_depth_crop(const View& v, Rng& rng);
View apply_depth_crop(const View& v, double lo, double hi);

View reflect_time(const View& v);

void color_jitter(View& v, double offset, double gain, bool brightness_first);

View elastic_deform(const View& v, double sigma_time, double sigma_depth, double alpha,
                    int order, Rng& rng);

TrainingView finalize_view(const View& v, int out_pings, int out_bins);

// --- composed pipeline ---

// Deterministic in (source, seed, augment). With augment=false only the
// normalization and final rescale are applied.
TrainingView build_training_view(const View& source, uint64_t seed, bool augment,
                                 int out_pings = 128, int out_bins = 512,
                                 AugmentDraw* draw_out = nullptr);

// 1-D interpolation at fractional position with clamped edges;
// order 1 = linear, 2 = quadratic, 3 = cubic (Lagrange).
float interp1(const float* values, int n, double pos, int order);

}  // namespace echofilter::augment
