#include "core/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "support/errors.hpp"

namespace echofilter::core {

namespace {

constexpr double kGridTol = 1e-9;

double ping_resolution(const formats::SvPing& ping) {
    if (ping.sample_count() < 2)
        throw DomainError("single-sample ping: depth interpolation impossible");
    return (ping.range_stop - ping.range_start) / (ping.sample_count() - 1);
}

// Most common per-ping resolution; ties broken toward the finer grid.
double modal_resolution(const formats::SvCsvRecording& raw) {
    std::map<int64_t, int> counts;  // keyed on resolution quantized to 1e-9 m
    for (const auto& ping : raw.pings) {
        const double res = ping_resolution(ping);
        counts[static_cast<int64_t>(std::llround(res * 1e9))] += 1;
    }
    int64_t best_key = 0;
    int best_count = -1;
    for (const auto& [key, count] : counts) {
        if (count > best_count) {
            best_key = key;
            best_count = count;
        }
    }
    return static_cast<double>(best_key) * 1e-9;
}

}  // namespace

Echogram regrid_depth(const formats::SvCsvRecording& raw, Orientation orientation) {
    if (raw.pings.empty()) throw DomainError("cannot regrid an empty recording");
    const double step = modal_resolution(raw);

    double grid_start = raw.pings[0].range_start;
    double grid_stop = raw.pings[0].range_stop;
    for (const auto& ping : raw.pings) {
        grid_start = std::min(grid_start, ping.range_start);
        grid_stop = std::max(grid_stop, ping.range_stop);
    }
    const int n_depths = static_cast<int>(std::floor((grid_stop - grid_start) / step + kGridTol)) + 1;

    Echogram eg;
    eg.orientation = orientation;
    eg.depths.resize(n_depths);
    for (int k = 0; k < n_depths; ++k) eg.depths[k] = grid_start + k * step;
    const int n = raw.n_pings();
    eg.timestamps.resize(n);
    eg.sv.assign(static_cast<size_t>(n) * n_depths, 0.0f);
    eg.present.assign(static_cast<size_t>(n) * n_depths, 0);

    for (int i = 0; i < n; ++i) {
        const auto& ping = raw.pings[i];
        eg.timestamps[i] = ping.timestamp();
        const double res = ping_resolution(ping);
        const int count = ping.sample_count();
        const bool on_grid = std::abs(res - step) < kGridTol;
        for (int k = 0; k < n_depths; ++k) {
            const double depth = eg.depths[k];
            // Position of this grid depth in the ping's own sample axis.
            const double pos = (depth - ping.range_start) / res;
            if (pos < -kGridTol || pos > count - 1 + kGridTol) continue;
            const double nearest = std::round(pos);
            if (on_grid && std::abs(pos - nearest) < 1e-6 && nearest >= 0 && nearest < count) {
                const int j = static_cast<int>(nearest);
                eg.at(i, k) = ping.samples[j];
                eg.set_present(i, k, ping.present[j]);
                continue;
            }
            const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, count - 2);
            const int hi = lo + 1;
            if (!ping.present[lo] || !ping.present[hi]) continue;
            const double frac = std::clamp(pos - lo, 0.0, 1.0);
            eg.at(i, k) = static_cast<float>((1.0 - frac) * ping.samples[lo] +
                                             frac * ping.samples[hi]);
            eg.set_present(i, k, 1);
        }
    }
    return eg;
}

Echogram standardize_orientation(const Echogram& eg) {
    if (eg.orientation == Orientation::kDownfacing) return eg;
    Echogram out = eg;
    const int n = eg.n_pings();
    const int d = eg.n_depths();
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            out.at(i, k) = eg.at(i, d - 1 - k);
            out.set_present(i, k, eg.present_at(i, d - 1 - k));
        }
    }
    return out;
}

BoundaryLine line_on_timestamps(const formats::LineFile& line,
                                const std::vector<double>& timestamps) {
    BoundaryLine out;
    const int n = static_cast<int>(timestamps.size());
    out.depths.assign(n, 0.0);
    out.valid.assign(n, 0);
    if (line.points.empty()) return out;
    const auto& pts = line.points;
    for (int i = 0; i < n; ++i) {
        const double t = timestamps[i];
        if (t < pts.front().timestamp - 1e-6 || t > pts.back().timestamp + 1e-6) continue;
        auto it = std::lower_bound(pts.begin(), pts.end(), t,
                                   [](const formats::LinePoint& p, double v) {
                                       return p.timestamp < v;
                                   });
        if (it == pts.begin()) {
            out.depths[i] = it->depth;
        } else if (it == pts.end()) {
            out.depths[i] = pts.back().depth;
        } else {
            const auto& b = *it;
            const auto& a = *(it - 1);
            const double span = b.timestamp - a.timestamp;
            const double frac = span > 0.0 ? (t - a.timestamp) / span : 0.0;
            out.depths[i] = a.depth + frac * (b.depth - a.depth);
        }
        out.valid[i] = 1;
    }
    return out;
}

int depth_to_bin(const Echogram& eg, double depth) {
    const double step = eg.depth_step();
    if (step <= 0.0) return 0;
    const int bin = static_cast<int>(std::lround((depth - eg.depths[0]) / step));
    return std::clamp(bin, 0, eg.n_depths() - 1);
}

}  // namespace echofilter::core
