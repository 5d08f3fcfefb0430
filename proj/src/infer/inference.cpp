#include "infer/inference.hpp"

#include <algorithm>
#include <cmath>

#include "augment/augment.hpp"
#include "core/stats.hpp"
#include "support/errors.hpp"
#include "train/loss.hpp"

namespace echofilter::infer {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

int map_index(int j, int n_from, int n_to) {
    return std::clamp(static_cast<int>((j + 0.5) * n_to / n_from), 0, n_to - 1);
}

// per-recording-ping outputs of one network pass
struct PassOutput {
    core::BoundaryLine entrained, seafloor, surface;
    std::vector<uint8_t> passive, bad;
    std::vector<uint8_t> patch;  // recording grid, pings x bins
};

PassOutput run_pass(nn::UNet& model, const augment::View& normalized, double lo, double hi,
                    const InferenceConfig& cfg) {
    const augment::View cropped = augment::apply_depth_crop(normalized, lo, hi);
    const int time_div = model.config().time_divisor();
    const int out_h = model.config().input_h;
    int wm = static_cast<int>(std::lround(static_cast<double>(cropped.n_pings) / time_div)) *
             time_div;
    wm = std::max(wm, time_div);

    augment::TrainingView tv = augment::finalize_view(cropped, wm, out_h);
    nn::Tensor x({1, 1, wm, out_h});
    std::copy(tv.image.begin(), tv.image.end(), x.data.begin());
    nn::Tensor logits = model.forward(x, false);

    if (cfg.logit_smoothing_sigma > 0.0)
        smooth_logits(logits.data, logits.shape[1], wm, out_h, cfg.logit_smoothing_sigma);

    const double span = cropped.depth_step * std::max(cropped.n_bins - 1, 1);
    const double bin_height = span / out_h;
    auto plane = [&](int role) {
        return logits.data.data() + static_cast<size_t>(role) * wm * out_h;
    };

    const core::BoundaryLine entr =
        extract_line(plane(train::kPlaneEntrained), wm, out_h, cropped.depth0, bin_height);
    const core::BoundaryLine floor_line =
        extract_line(plane(train::kPlaneSeafloor), wm, out_h, cropped.depth0, bin_height);
    const core::BoundaryLine surf =
        extract_line(plane(train::kPlaneSurface), wm, out_h, cropped.depth0, bin_height);

    std::vector<uint8_t> passive_m(wm), bad_m(wm);
    for (int i = 0; i < wm; ++i) {
        const float* pcol = plane(train::kPlanePassive) + static_cast<size_t>(i) * out_h;
        const float* bcol = plane(train::kPlaneBadPeriod) + static_cast<size_t>(i) * out_h;
        passive_m[i] = sigmoid(train::log_avg_exp(pcol, out_h)) > 0.5;
        bad_m[i] = sigmoid(train::log_avg_exp(bcol, out_h)) > 0.5;
    }

    const int n_pings = normalized.n_pings;
    const int n_bins = normalized.n_bins;
    PassOutput out;
    out.entrained.depths.resize(n_pings);
    out.entrained.valid.assign(n_pings, 1);
    out.seafloor = out.entrained;
    out.surface = out.entrained;
    out.passive.resize(n_pings);
    out.bad.resize(n_pings);
    out.patch.assign(static_cast<size_t>(n_pings) * n_bins, 0);

    const float* patch_plane = plane(train::kPlanePatch);
    for (int j = 0; j < n_pings; ++j) {
        const int i = map_index(j, n_pings, wm);
        out.entrained.depths[j] = entr.depths[i];
        out.seafloor.depths[j] = floor_line.depths[i];
        out.surface.depths[j] = surf.depths[i];
        out.passive[j] = passive_m[i];
        out.bad[j] = bad_m[i];
        for (int k = 0; k < n_bins; ++k) {
            const double d = normalized.depth0 + k * normalized.depth_step;
            if (d < lo || d > hi) continue;
            const double pos = (d - cropped.depth0) / std::max(span, 1e-12);
            const int b = std::clamp(static_cast<int>(std::floor(pos * out_h)), 0, out_h - 1);
            if (sigmoid(patch_plane[static_cast<size_t>(i) * out_h + b]) > 0.5)
                out.patch[static_cast<size_t>(j) * n_bins + k] = 1;
        }
    }
    return out;
}

}  // namespace

core::BoundaryLine extract_line(const float* plane, int n_pings, int n_bins, double depth0,
                                double bin_height) {
    core::BoundaryLine line;
    line.depths.resize(n_pings);
    line.valid.assign(n_pings, 1);
    std::vector<double> probs(n_bins);
    for (int i = 0; i < n_pings; ++i) {
        const float* col = plane + static_cast<size_t>(i) * n_bins;
        float m = col[0];
        for (int k = 1; k < n_bins; ++k) m = std::max(m, col[k]);
        double z = 0.0;
        for (int k = 0; k < n_bins; ++k) {
            probs[k] = std::exp(static_cast<double>(col[k]) - m);
            z += probs[k];
        }
        double cum = 0.0;
        int boundary = n_bins - 1;
        for (int k = 0; k < n_bins; ++k) {
            cum += probs[k] / z;
            if (cum > 0.5) {
                boundary = k;
                break;
            }
        }
        line.depths[i] = depth0 + (boundary + 0.5) * bin_height;
    }
    return line;
}

DepthInterval compute_zoom_window(const core::BoundaryLine& line, core::Orientation orientation,
                                  double depth_lo, double depth_hi, double spread,
                                  double margin) {
    std::vector<double> depths;
    for (size_t i = 0; i < line.depths.size(); ++i)
        if (line.valid.empty() || line.valid[i]) depths.push_back(line.depths[i]);
    if (depths.empty()) return {depth_lo, depth_hi};

    double mean = 0.0;
    for (double d : depths) mean += d;
    mean /= static_cast<double>(depths.size());
    const double sigma = core::idr(depths) / 2.56;

    DepthInterval w{depth_lo, depth_hi};
    if (orientation == core::Orientation::kDownfacing) {
        const double deepest = *std::max_element(depths.begin(), depths.end());
        const double limit = std::min(mean + spread * sigma, deepest);
        w.hi = std::clamp(limit + margin, depth_lo, depth_hi);
    } else {
        const double shallowest = *std::min_element(depths.begin(), depths.end());
        const double limit = std::max(mean - spread * sigma, shallowest);
        w.lo = std::clamp(limit - margin, depth_lo, depth_hi);
    }
    if (w.hi <= w.lo) return {depth_lo, depth_hi};
    return w;
}

void smooth_logits(std::vector<float>& planes, int n_planes, int n_pings, int n_bins,
                   double sigma) {
    if (sigma <= 0.0) return;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double mass = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        mass += kernel[i + radius];
    }
    for (auto& k : kernel) k /= mass;

    const size_t plane_size = static_cast<size_t>(n_pings) * n_bins;
    std::vector<float> tmp(plane_size);
    for (int p = 0; p < n_planes; ++p) {
        float* plane = planes.data() + p * plane_size;
        // along time, zero-padded edges
        for (int i = 0; i < n_pings; ++i) {
            for (int k = 0; k < n_bins; ++k) {
                double acc = 0.0;
                for (int r = -radius; r <= radius; ++r) {
                    const int s = i + r;
                    if (s < 0 || s >= n_pings) continue;
                    acc += kernel[r + radius] * plane[static_cast<size_t>(s) * n_bins + k];
                }
                tmp[static_cast<size_t>(i) * n_bins + k] = static_cast<float>(acc);
            }
        }
        // along depth
        for (int i = 0; i < n_pings; ++i) {
            for (int k = 0; k < n_bins; ++k) {
                double acc = 0.0;
                for (int r = -radius; r <= radius; ++r) {
                    const int s = k + r;
                    if (s < 0 || s >= n_bins) continue;
                    acc += kernel[r + radius] * tmp[static_cast<size_t>(i) * n_bins + s];
                }
                plane[static_cast<size_t>(i) * n_bins + k] = static_cast<float>(acc);
            }
        }
    }
}

void apply_offsets(AnnotationResult& r, double offset, core::Orientation orientation,
                   double depth_lo, double depth_hi) {
    (void)orientation;
    auto shift = [&](const core::BoundaryLine& in, double delta) {
        core::BoundaryLine out = in;
        for (auto& d : out.depths) d = std::clamp(d + delta, depth_lo, depth_hi);
        return out;
    };
    // exclusion directions: entrained air and surface exclude shallower content,
    // the seafloor excludes deeper content
    r.entrained_air_offset = shift(r.entrained_air, offset);
    r.surface_offset = shift(r.surface, offset);
    r.seafloor_offset = shift(r.seafloor, -offset);
}

AnnotationResult infer_recording(nn::UNet& model, const core::Echogram& eg,
                                 const InferenceConfig& cfg) {
    const int n_pings = eg.n_pings();
    const int n_bins = eg.n_depths();
    if (n_pings < 1) throw DomainError("recording has no pings");
    if (n_bins < 2) throw DomainError("recording needs at least two depth bins");

    augment::View view;
    view.n_pings = n_pings;
    view.n_bins = n_bins;
    view.depth0 = eg.depths.front();
    view.depth_step = eg.depth_step();
    view.image = eg.sv;
    view.present = eg.present;
    view.orientation = eg.orientation;
    for (auto& line : view.lines) {
        line.depths.assign(n_pings, 0.0);
        line.valid.assign(n_pings, 0);
    }
    view.surface_anomalous.assign(n_pings, 0);
    view.passive.assign(n_pings, 0);
    view.bad_period.assign(n_pings, 0);
    view.patch.assign(static_cast<size_t>(n_pings) * n_bins, 0);
    augment::normalize_sv(view.image, view.present);

    const double depth_lo = view.depth0;
    const double depth_hi = view.depth_max();

    PassOutput pass = run_pass(model, view, depth_lo, depth_hi, cfg);

    AnnotationResult result;
    result.passes = 1;
    result.zoom_lo = depth_lo;
    result.zoom_hi = depth_hi;

    const core::BoundaryLine& zoom_line =
        eg.orientation == core::Orientation::kDownfacing ? pass.seafloor : pass.surface;
    const DepthInterval window = compute_zoom_window(zoom_line, eg.orientation, depth_lo,
                                                     depth_hi, cfg.zoom_spread,
                                                     cfg.zoom_margin);
    const double full_span = depth_hi - depth_lo;
    const double cropped_fraction = 1.0 - (window.hi - window.lo) / full_span;
    if (cropped_fraction > cfg.autozoom_threshold) {
        pass = run_pass(model, view, window.lo, window.hi, cfg);
        result.passes = 2;
        result.zoom_lo = window.lo;
        result.zoom_hi = window.hi;
    }

    result.entrained_air = pass.entrained;
    result.surface = pass.surface;
    result.seafloor = pass.seafloor;
    apply_offsets(result, cfg.line_offset, eg.orientation, depth_lo, depth_hi);

    // bad pings where the entrained-air line reaches the bottom analytical line
    std::vector<uint8_t> bad = pass.bad;
    for (int j = 0; j < n_pings; ++j) {
        const double lower = eg.orientation == core::Orientation::kDownfacing
                                 ? result.seafloor_offset.depths[j]
                                 : depth_hi;
        if (result.entrained_air_offset.depths[j] >= lower - 1e-9) bad[j] = 1;
    }

    RegionSet raw;
    raw.passive = intervals_from_flags(pass.passive);
    raw.bad_periods = intervals_from_flags(bad);
    raw.patches = patches_from_mask(pass.patch, n_pings, n_bins, view.depth0,
                                    view.depth_step);
    result.regions = postprocess_regions(raw, cfg.postprocess);
    return result;
}

}  // namespace echofilter::infer
