#pragma once

#include <string>

#include "core/echogram.hpp"
#include "infer/postprocess.hpp"
#include "nn/unet.hpp"

namespace echofilter::infer {

struct InferenceConfig {
    double autozoom_threshold = 0.35;  // second pass when cropped fraction exceeds this
    double zoom_margin = 2.0;          // metres past the zoom limit
    double zoom_spread = 4.0;          // robust standard deviations
    double line_offset = 1.0;          // metres, exclusion direction per line
    double logit_smoothing_sigma = 0.0;  // 0 = off
    PostprocessConfig postprocess;
};

struct AnnotationResult {
    core::BoundaryLine entrained_air, surface, seafloor;          // raw
    core::BoundaryLine entrained_air_offset, surface_offset, seafloor_offset;
    RegionSet regions;
    std::string model_id;
    int passes = 1;
    double zoom_lo = 0.0, zoom_hi = 0.0;  // window of the final pass
};

// Softmax each ping column, boundary where the cumulative probability first
// exceeds 0.5, reported at the bin centre in view coordinates.
core::BoundaryLine extract_line(const float* plane, int n_pings, int n_bins,
                                double depth0, double bin_height);

struct DepthInterval {
    double lo = 0.0, hi = 0.0;
};

// Depth window for the zoomed pass: limit at the less distal of
// mean +/- spread * (idr/2.56) and the furthest line extent, then the margin.
DepthInterval compute_zoom_window(const core::BoundaryLine& line,
                                  core::Orientation orientation, double depth_lo,
                                  double depth_hi, double spread, double margin);

// In-place separable Gaussian blur of each (n_pings x n_bins) plane.
void smooth_logits(std::vector<float>& planes, int n_planes, int n_pings, int n_bins,
                   double sigma);

// Shift each line in its exclusion direction, clamped to the depth extent.
void apply_offsets(AnnotationResult& r, double offset, core::Orientation orientation,
                   double depth_lo, double depth_hi);

// Two-pass zoom+repeat inference over a standardized-orientation echogram.
AnnotationResult infer_recording(nn::UNet& model, const core::Echogram& eg,
                                 const InferenceConfig& cfg);

}  // namespace echofilter::infer
