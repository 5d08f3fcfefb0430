#include "augment/augment.hpp"

#include <algorithm>
#include <cmath>

#include "core/stats.hpp"
#include "support/errors.hpp"

namespace echofilter::augment {

namespace {

double nearest_src(int i, int n_out, int n_in) {
    return std::floor((i + 0.5) * static_cast<double>(n_in) / n_out);
}

int clamp_idx(double v, int n) {
    return std::clamp(static_cast<int>(v), 0, n - 1);
}

// Endpoint-aligned fractional source index for resampling n_in -> n_out.
double resample_src(int i, int n_out, int n_in) {
    if (n_out <= 1) return 0.0;
    return static_cast<double>(i) * (n_in - 1) / static_cast<double>(n_out - 1);
}

std::vector<float> gaussian_smooth_1d(const std::vector<float>& x, double sigma) {
    const int n = static_cast<int>(x.size());
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double mass = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        mass += kernel[i + radius];
    }
    for (auto& k : kernel) k /= mass;
    std::vector<float> out(n, 0.0f);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) {
            const int idx = std::clamp(i + j, 0, n - 1);
            acc += kernel[j + radius] * x[idx];
        }
        out[i] = static_cast<float>(acc);
    }
    return out;
}

}  // namespace

float interp1(const float* values, int n, double pos, int order) {
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    if (n == 1) return values[0];
    if (order <= 1) {
        const int lo = std::min(static_cast<int>(std::floor(pos)), n - 2);
        const double f = pos - lo;
        return static_cast<float>((1.0 - f) * values[lo] + f * values[lo + 1]);
    }
    // Lagrange polynomial over a local window; exact at the nodes.
    const int width = order + 1;
    int start = static_cast<int>(std::floor(pos)) - (order - 1) / 2;
    start = std::clamp(start, 0, n - width);
    double acc = 0.0;
    for (int a = 0; a < width; ++a) {
        double basis = 1.0;
        for (int b = 0; b < width; ++b) {
            if (a == b) continue;
            basis *= (pos - (start + b)) / static_cast<double>(a - b);
        }
        acc += basis * values[start + a];
    }
    return static_cast<float>(acc);
}

View view_from_shard(const formats::Shard& shard) {
    View v;
    v.n_pings = shard.n_pings();
    v.n_bins = shard.sv.n_depths();
    v.depth0 = shard.sv.depths.empty() ? 0.0 : shard.sv.depths[0];
    v.depth_step = shard.sv.depth_step();
    v.image = shard.sv.sv;
    v.present = shard.sv.present;
    v.lines[kEntrained] = shard.entrained_air;
    v.lines[kEntrainedOriginal] = shard.entrained_air_original;
    v.lines[kSeafloor] = shard.seafloor;
    v.lines[kSeafloorAggressive] = shard.seafloor_aggressive;
    v.lines[kSurface] = shard.surface;
    v.surface_anomalous = shard.surface_anomalous;
    v.passive = shard.passive;
    v.bad_period = shard.bad_period;
    v.patch = shard.patch_mask;
    v.orientation = shard.sv.orientation;
    return v;
}

void normalize_sv(std::vector<float>& image, const std::vector<uint8_t>& present) {
    std::vector<double> vals;
    vals.reserve(image.size());
    for (size_t i = 0; i < image.size(); ++i)
        if (present.empty() || present[i]) vals.push_back(image[i]);
    if (vals.empty()) throw DomainError("normalize_sv: no present values");
    const double med = core::median(vals);
    double divisor = core::idr(vals) / 2.56;
    if (divisor <= 0.0) divisor = 1.0;
    for (size_t i = 0; i < image.size(); ++i) {
        if (present.empty() || present[i])
            image[i] = static_cast<float>((image[i] - med) / divisor);
        else
            image[i] = -3.0f;
    }
}

View stretch_time(const View& v, double factor) {
    if (factor <= 0.0) throw DomainError("stretch factor must be positive");
    const int n_out = std::max(1, static_cast<int>(std::lround(v.n_pings * factor)));
    View out = v;
    out.n_pings = n_out;
    out.image.assign(static_cast<size_t>(n_out) * v.n_bins, 0.0f);
    out.present.assign(static_cast<size_t>(n_out) * v.n_bins, 0);
    out.patch.assign(static_cast<size_t>(n_out) * v.n_bins, 0);
    out.surface_anomalous.assign(n_out, 0);
    out.passive.assign(n_out, 0);
    out.bad_period.assign(n_out, 0);
    for (auto& line : out.lines) {
        line.depths.assign(n_out, 0.0);
        line.valid.assign(n_out, 0);
    }
    std::vector<float> column(v.n_pings);
    // image: linear resample along time, one depth bin at a time
    for (int k = 0; k < v.n_bins; ++k) {
        for (int i = 0; i < v.n_pings; ++i)
            column[i] = v.image[static_cast<size_t>(i) * v.n_bins + k];
        for (int i = 0; i < n_out; ++i) {
            const double src = resample_src(i, n_out, v.n_pings);
            out.image[static_cast<size_t>(i) * v.n_bins + k] =
                interp1(column.data(), v.n_pings, src, 1);
        }
    }
    for (int i = 0; i < n_out; ++i) {
        const double src = resample_src(i, n_out, v.n_pings);
        const int near = clamp_idx(std::lround(src), v.n_pings);
        for (int k = 0; k < v.n_bins; ++k) {
            out.present[static_cast<size_t>(i) * v.n_bins + k] =
                v.present[static_cast<size_t>(near) * v.n_bins + k];
            out.patch[static_cast<size_t>(i) * v.n_bins + k] =
                v.patch[static_cast<size_t>(near) * v.n_bins + k];
        }
        out.surface_anomalous[i] = v.surface_anomalous[near];
        out.passive[i] = v.passive[near];
        out.bad_period[i] = v.bad_period[near];
        for (int s = 0; s < kNumLines; ++s) {
            out.lines[s].valid[i] = v.lines[s].valid[near];
            if (!out.lines[s].valid[i]) continue;
            const int lo = std::min(static_cast<int>(std::floor(src)), v.n_pings - 1);
            const int hi = std::min(lo + 1, v.n_pings - 1);
            const double f = src - lo;
            if (v.lines[s].valid[lo] && v.lines[s].valid[hi]) {
                out.lines[s].depths[i] =
                    (1.0 - f) * v.lines[s].depths[lo] + f * v.lines[s].depths[hi];
            } else {
                out.lines[s].depths[i] = v.lines[s].depths[near];
            }
        }
    }
    return out;
}

CropWindow choose_depth_crop(const View& v, Rng& rng) {
    const double full_lo = v.depth0;
    const double full_hi = v.depth_max();
    double opt_lo = full_lo, opt_hi = full_hi;
    {
        bool any = false;
        double m = 0.0;
        for (int i = 0; i < v.n_pings; ++i) {
            if (v.lines[kSurface].valid.empty() || !v.lines[kSurface].valid[i]) continue;
            m = any ? std::min(m, v.lines[kSurface].depths[i]) : v.lines[kSurface].depths[i];
            any = true;
        }
        if (any) opt_lo = std::clamp(m, full_lo, full_hi);
    }
    {
        bool any = false;
        double m = 0.0;
        for (int i = 0; i < v.n_pings; ++i) {
            if (v.lines[kSeafloor].valid.empty() || !v.lines[kSeafloor].valid[i]) continue;
            m = any ? std::max(m, v.lines[kSeafloor].depths[i]) : v.lines[kSeafloor].depths[i];
            any = true;
        }
        if (any) opt_hi = std::clamp(m, opt_lo + v.depth_step, full_hi);
    }

    auto removed_fraction = [&](LineSlot slot, double lo, double hi) {
        int total = 0, removed = 0;
        for (int i = 0; i < v.n_pings; ++i) {
            if (v.lines[slot].valid.empty() || !v.lines[slot].valid[i]) continue;
            ++total;
            const double d = v.lines[slot].depths[i];
            if (d < lo || d > hi) ++removed;
        }
        return total > 0 ? static_cast<double>(removed) / total : 0.0;
    };

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double branch_draw = unit(rng);
    CropWindow w;
    if (branch_draw < 0.1) {
        w = {0, full_lo, full_hi};
    } else if (branch_draw < 0.2) {
        w = {1, opt_lo, opt_hi};
    } else if (branch_draw < 0.6) {
        w.branch = 2;
        const double span = std::max(opt_hi - opt_lo, v.depth_step);
        w.lo = opt_lo;
        w.hi = opt_hi;
        for (int attempt = 0; attempt < 20; ++attempt) {
            std::uniform_real_distribution<double> jitter(-0.25 * span, 0.25 * span);
            const double lo = std::clamp(opt_lo + jitter(rng), full_lo, full_hi);
            const double hi = std::clamp(opt_hi + jitter(rng), lo + v.depth_step, full_hi);
            if (removed_fraction(kEntrained, lo, hi) > 0.25) continue;
            if (v.orientation == core::Orientation::kDownfacing &&
                removed_fraction(kSeafloor, lo, hi) > 0.5)
                continue;
            w.lo = lo;
            w.hi = hi;
            break;
        }
    } else {
        w.branch = 3;
        std::uniform_real_distribution<double> lo_draw(full_lo, opt_lo);
        std::uniform_real_distribution<double> hi_draw(opt_hi, full_hi);
        w.lo = lo_draw(rng);
        w.hi = hi_draw(rng);
    }
    if (w.hi <= w.lo) w.hi = w.lo + v.depth_step;
    return w;
}

View apply_depth_crop(const View& v, double lo, double hi) {
    int k_lo = static_cast<int>(std::ceil((lo - v.depth0) / v.depth_step - 1e-9));
    int k_hi = static_cast<int>(std::floor((hi - v.depth0) / v.depth_step + 1e-9));
    k_lo = std::clamp(k_lo, 0, v.n_bins - 1);
    k_hi = std::clamp(k_hi, k_lo, v.n_bins - 1);
    const int nb = k_hi - k_lo + 1;
    View out = v;
    out.n_bins = nb;
    out.depth0 = v.depth0 + k_lo * v.depth_step;
    out.image.resize(static_cast<size_t>(v.n_pings) * nb);
    out.present.resize(static_cast<size_t>(v.n_pings) * nb);
    out.patch.resize(static_cast<size_t>(v.n_pings) * nb);
    for (int i = 0; i < v.n_pings; ++i) {
        for (int k = 0; k < nb; ++k) {
            out.image[static_cast<size_t>(i) * nb + k] =
                v.image[static_cast<size_t>(i) * v.n_bins + k_lo + k];
            out.present[static_cast<size_t>(i) * nb + k] =
                v.present[static_cast<size_t>(i) * v.n_bins + k_lo + k];
            out.patch[static_cast<size_t>(i) * nb + k] =
                v.patch[static_cast<size_t>(i) * v.n_bins + k_lo + k];
        }
    }
    return out;
}

View reflect_time(const View& v) {
    View out = v;
    for (int i = 0; i < v.n_pings; ++i) {
        const int j = v.n_pings - 1 - i;
        for (int k = 0; k < v.n_bins; ++k) {
            out.image[static_cast<size_t>(i) * v.n_bins + k] =
                v.image[static_cast<size_t>(j) * v.n_bins + k];
            out.present[static_cast<size_t>(i) * v.n_bins + k] =
                v.present[static_cast<size_t>(j) * v.n_bins + k];
            out.patch[static_cast<size_t>(i) * v.n_bins + k] =
                v.patch[static_cast<size_t>(j) * v.n_bins + k];
        }
        out.surface_anomalous[i] = v.surface_anomalous[j];
        out.passive[i] = v.passive[j];
        out.bad_period[i] = v.bad_period[j];
        for (int s = 0; s < kNumLines; ++s) {
            out.lines[s].depths[i] = v.lines[s].depths[j];
            out.lines[s].valid[i] = v.lines[s].valid[j];
        }
    }
    return out;
}

void color_jitter(View& v, double offset, double gain, bool brightness_first) {
    for (auto& px : v.image) {
        if (brightness_first)
            px = static_cast<float>((px + offset) * gain);
        else
            px = static_cast<float>(px * gain + offset);
    }
}

View elastic_deform(const View& v, double sigma_time, double sigma_depth, double alpha,
                    int order, Rng& rng) {
    if (order < 1 || order > 3) throw DomainError("interpolation order must be 1, 2 or 3");
    std::normal_distribution<float> gauss(0.0f, 1.0f);

    auto make_field = [&](int n, double sigma, double scale) {
        std::vector<float> noise(n);
        for (auto& x : noise) x = gauss(rng);
        auto field = gaussian_smooth_1d(noise, sigma);
        for (auto& x : field) x *= static_cast<float>(scale);
        return field;
    };
    const auto disp_t = make_field(v.n_pings, sigma_time, alpha * v.n_pings);
    const auto disp_d = make_field(v.n_bins, sigma_depth, alpha * v.n_bins);

    // Source maps; content at src(i) lands at output index i.
    std::vector<double> src_t(v.n_pings), src_d(v.n_bins);
    for (int i = 0; i < v.n_pings; ++i) src_t[i] = i - disp_t[i];
    for (int k = 0; k < v.n_bins; ++k) src_d[k] = k - disp_d[k];
    // Monotone depth map so line positions can be inverted.
    for (int k = 1; k < v.n_bins; ++k) src_d[k] = std::max(src_d[k], src_d[k - 1]);

    View out = v;
    // time warp
    std::vector<float> column(v.n_pings);
    View mid = v;
    for (int k = 0; k < v.n_bins; ++k) {
        for (int i = 0; i < v.n_pings; ++i)
            column[i] = v.image[static_cast<size_t>(i) * v.n_bins + k];
        for (int i = 0; i < v.n_pings; ++i)
            mid.image[static_cast<size_t>(i) * v.n_bins + k] =
                interp1(column.data(), v.n_pings, src_t[i], order);
    }
    for (int i = 0; i < v.n_pings; ++i) {
        const int near = clamp_idx(std::lround(src_t[i]), v.n_pings);
        for (int k = 0; k < v.n_bins; ++k) {
            mid.present[static_cast<size_t>(i) * v.n_bins + k] =
                v.present[static_cast<size_t>(near) * v.n_bins + k];
            mid.patch[static_cast<size_t>(i) * v.n_bins + k] =
                v.patch[static_cast<size_t>(near) * v.n_bins + k];
        }
        mid.surface_anomalous[i] = v.surface_anomalous[near];
        mid.passive[i] = v.passive[near];
        mid.bad_period[i] = v.bad_period[near];
        for (int s = 0; s < kNumLines; ++s) {
            mid.lines[s].valid[i] = v.lines[s].valid[near];
            if (!mid.lines[s].valid[i]) continue;
            const double pos = std::clamp(src_t[i], 0.0, static_cast<double>(v.n_pings - 1));
            const int lo = std::min(static_cast<int>(std::floor(pos)), v.n_pings - 1);
            const int hi = std::min(lo + 1, v.n_pings - 1);
            const double f = pos - lo;
            if (v.lines[s].valid[lo] && v.lines[s].valid[hi])
                mid.lines[s].depths[i] =
                    (1.0 - f) * v.lines[s].depths[lo] + f * v.lines[s].depths[hi];
            else
                mid.lines[s].depths[i] = v.lines[s].depths[near];
        }
    }

    // depth warp
    out = mid;
    std::vector<float> row(v.n_bins);
    for (int i = 0; i < v.n_pings; ++i) {
        const float* src_row = mid.image.data() + static_cast<size_t>(i) * v.n_bins;
        std::copy_n(src_row, v.n_bins, row.data());
        float* dst = out.image.data() + static_cast<size_t>(i) * v.n_bins;
        for (int k = 0; k < v.n_bins; ++k) dst[k] = interp1(row.data(), v.n_bins, src_d[k], order);
        for (int k = 0; k < v.n_bins; ++k) {
            const int near = clamp_idx(std::lround(src_d[k]), v.n_bins);
            out.present[static_cast<size_t>(i) * v.n_bins + k] =
                mid.present[static_cast<size_t>(i) * v.n_bins + near];
            out.patch[static_cast<size_t>(i) * v.n_bins + k] =
                mid.patch[static_cast<size_t>(i) * v.n_bins + near];
        }
    }
    // lines through the inverse depth map: find where the source bin lands
    for (int s = 0; s < kNumLines; ++s) {
        for (int i = 0; i < v.n_pings; ++i) {
            if (!out.lines[s].valid[i]) continue;
            const double old_bin =
                std::clamp((mid.lines[s].depths[i] - v.depth0) / v.depth_step, src_d.front(),
                           src_d.back());
            auto it = std::lower_bound(src_d.begin(), src_d.end(), old_bin);
            int hi = static_cast<int>(it - src_d.begin());
            double new_bin;
            if (hi <= 0) {
                new_bin = 0.0;
            } else {
                const int lo = hi - 1;
                const double span = src_d[hi] - src_d[lo];
                const double f = span > 1e-12 ? (old_bin - src_d[lo]) / span : 0.0;
                new_bin = lo + f;
            }
            out.lines[s].depths[i] = v.depth0 + new_bin * v.depth_step;
        }
    }
    return out;
}

TrainingView finalize_view(const View& v, int out_pings, int out_bins) {
    if (v.n_pings < 1 || v.n_bins < 1) throw DomainError("empty view");
    TrainingView tv;
    tv.n_pings = out_pings;
    tv.n_bins = out_bins;
    tv.orientation = v.orientation;
    tv.image.assign(static_cast<size_t>(out_pings) * out_bins, 0.0f);
    tv.patch.assign(static_cast<size_t>(out_pings) * out_bins, 0);
    tv.surface_anomalous.assign(out_pings, 0);
    tv.passive.assign(out_pings, 0);
    tv.bad_period.assign(out_pings, 0);
    for (auto& lb : tv.line_bins) lb.assign(out_pings, -1);

    const double span = v.depth_step * std::max(v.n_bins - 1, 1);
    for (int i = 0; i < out_pings; ++i) {
        const int si = clamp_idx(nearest_src(i, out_pings, v.n_pings), v.n_pings);
        for (int k = 0; k < out_bins; ++k) {
            const int sk = clamp_idx(nearest_src(k, out_bins, v.n_bins), v.n_bins);
            tv.image[static_cast<size_t>(i) * out_bins + k] =
                v.image[static_cast<size_t>(si) * v.n_bins + sk];
            tv.patch[static_cast<size_t>(i) * out_bins + k] =
                v.patch[static_cast<size_t>(si) * v.n_bins + sk];
        }
        tv.surface_anomalous[i] = v.surface_anomalous[si];
        tv.passive[i] = v.passive[si];
        tv.bad_period[i] = v.bad_period[si];
        for (int s = 0; s < kNumLines; ++s) {
            if (!v.lines[s].valid[si]) continue;
            const double pos = (v.lines[s].depths[si] - v.depth0) / span;
            const int bin = std::clamp(static_cast<int>(std::floor(pos * out_bins)), 0,
                                       out_bins - 1);
            tv.line_bins[s][i] = bin;
        }
    }
    return tv;
}

TrainingView build_training_view(const View& source, uint64_t seed, bool augment,
                                 int out_pings, int out_bins, AugmentDraw* draw_out) {
    Rng rng(seed);
    AugmentDraw draw;
    View v = source;
    normalize_sv(v.image, v.present);
    if (augment) {
        std::uniform_real_distribution<double> log_stretch(std::log(0.5), std::log(2.0));
        draw.stretch_factor = std::exp(log_stretch(rng));
        v = stretch_time(v, draw.stretch_factor);

        const CropWindow w = choose_depth_crop(v, rng);
        draw.crop_branch = w.branch;
        draw.crop_lo = w.lo;
        draw.crop_hi = w.hi;
        v = apply_depth_crop(v, w.lo, w.hi);

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        draw.reflected = unit(rng) < 0.5;
        if (draw.reflected) v = reflect_time(v);

        std::uniform_real_distribution<double> off(-0.5, 0.5);
        std::uniform_real_distribution<double> gain(0.7, 1.3);
        draw.jitter_offset = off(rng);
        draw.jitter_gain = gain(rng);
        draw.brightness_first = unit(rng) < 0.5;
        color_jitter(v, draw.jitter_offset, draw.jitter_gain, draw.brightness_first);

        draw.elastic = unit(rng) < 0.5;
        if (draw.elastic) {
            std::uniform_int_distribution<int> order_draw(1, 3);
            draw.interp_order = order_draw(rng);
            v = elastic_deform(v, 8.0, 16.0, 0.1, draw.interp_order, rng);
        }
    }
    TrainingView tv = finalize_view(v, out_pings, out_bins);
    tv.seed = seed;
    tv.augmented = augment;
    if (draw_out) *draw_out = draw;
    return tv;
}

}  // namespace echofilter::augment
