#include "core/targets.hpp"

#include <algorithm>
#include <cmath>

#include "core/preprocess.hpp"
#include "core/stats.hpp"
#include "support/errors.hpp"

namespace echofilter::core {

namespace {

bool ping_fully_masked(const std::vector<uint8_t>& mask, int ping, int d) {
    const size_t base = static_cast<size_t>(ping) * d;
    for (int k = 0; k < d; ++k)
        if (mask[base + k]) return false;
    return true;
}

std::vector<uint8_t> interval_flags(const std::vector<PingInterval>& ivals, int n) {
    std::vector<uint8_t> flags(n, 0);
    for (const auto& iv : ivals)
        for (int i = std::max(0, iv.first); i <= std::min(n - 1, iv.last); ++i) flags[i] = 1;
    return flags;
}

}  // namespace

BoundaryLine clean_surface_line(const BoundaryLine& line, const BoundaryLine* entrained_air,
                                Orientation orientation,
                                std::vector<uint8_t>* anomalous_out) {
    const int n = line.n_pings();
    if (anomalous_out) anomalous_out->assign(n, 0);

    if (orientation == Orientation::kDownfacing) {
        BoundaryLine out;
        out.depths.assign(n, 0.0);
        out.valid.assign(n, 1);
        return out;
    }

    BoundaryLine out = line;
    int n_valid = 0;
    for (auto v : out.valid) n_valid += v;
    if (n_valid < 1) throw DomainError("surface line has no valid points");

    auto mark = [&](int i) {
        if (anomalous_out) (*anomalous_out)[i] = 1;
    };

    // Pass 1: coarse outliers replaced by the local median value.
    {
        const auto med = median_filter(out.depths, out.valid, 201);
        std::vector<double> residuals;
        for (int i = 0; i < n; ++i)
            if (out.valid[i]) residuals.push_back(out.depths[i] - med[i]);
        const double sigma = iqr(residuals) / 1.35;
        if (sigma > 0.0) {
            for (int i = 0; i < n; ++i) {
                if (out.valid[i] && std::abs(out.depths[i] - med[i]) > 5.0 * sigma) {
                    out.depths[i] = med[i];
                    mark(i);
                }
            }
        }
    }

    // Pass 2, repeated to fixpoint: finer anomalies dropped from the line.
    for (;;) {
        const auto med = median_filter(out.depths, out.valid, 31);
        std::vector<double> residuals;
        for (int i = 0; i < n; ++i)
            if (out.valid[i]) residuals.push_back(out.depths[i] - med[i]);
        if (residuals.empty()) throw DomainError("surface line fully anomalous");
        const double sigma = idr(residuals) / 2.56;
        if (sigma <= 0.0) break;
        int removed = 0;
        for (int i = 0; i < n; ++i) {
            if (out.valid[i] && std::abs(out.depths[i] - med[i]) > 4.0 * sigma) {
                out.valid[i] = 0;
                mark(i);
                ++removed;
            }
        }
        if (removed == 0) break;
    }
    int remaining = 0;
    for (auto v : out.valid) remaining += v;
    if (remaining == 0) throw DomainError("surface line fully anomalous");

    if (entrained_air) {
        for (int i = 0; i < n; ++i) {
            if (out.valid[i] && i < entrained_air->n_pings() && entrained_air->valid[i] &&
                out.depths[i] > entrained_air->depths[i]) {
                out.depths[i] = entrained_air->depths[i];
            }
        }
    }
    return out;
}

std::vector<PingInterval> detect_passive_periods(const Echogram& eg, int n_samples,
                                                 double threshold_db) {
    const int n = eg.n_pings();
    const int d = eg.n_depths();
    if (n < 2) throw DomainError("passive detection needs at least 2 pings");
    const int m = std::min(n_samples, d);  // short recordings use all samples

    std::vector<PingInterval> intervals;
    int open_start = -1;
    bool saw_boundary = false;
    std::vector<double> diffs;
    for (int i = 0; i + 1 < n; ++i) {
        diffs.clear();
        for (int k = 0; k < m; ++k) {
            if (eg.present_at(i, k) && eg.present_at(i + 1, k))
                diffs.push_back(static_cast<double>(eg.at(i + 1, k)) - eg.at(i, k));
        }
        if (diffs.empty()) continue;
        const double med = median(diffs);
        if (med < -threshold_db) {  // strict: ties at the threshold are not boundaries
            if (open_start < 0) open_start = i + 1;
            saw_boundary = true;
        } else if (med > threshold_db) {
            if (open_start >= 0) {
                intervals.push_back({open_start, i});
                open_start = -1;
            } else if (!saw_boundary) {
                // Rising edge with no preceding drop: recording began passive.
                intervals.push_back({0, i});
            }
            saw_boundary = true;
        }
    }
    if (open_start >= 0) intervals.push_back({open_start, n - 1});
    return intervals;
}

BadRegions detect_bad_regions(const std::vector<uint8_t>& good_mask, const Echogram& eg,
                              const BoundaryLine& entrained_air, const BoundaryLine& seafloor,
                              const std::vector<PingInterval>& passive_periods) {
    const int n = eg.n_pings();
    const int d = eg.n_depths();
    const auto passive = interval_flags(passive_periods, n);

    auto lines_meet = [&](int i) {
        return entrained_air.valid.size() == static_cast<size_t>(n) && entrained_air.valid[i] &&
               seafloor.valid.size() == static_cast<size_t>(n) && seafloor.valid[i] &&
               entrained_air.depths[i] >= seafloor.depths[i];
    };

    BadRegions out;
    int run_start = -1;
    bool run_explained = true;
    auto flush = [&](int run_end) {
        if (run_start >= 0 && !run_explained) out.periods.push_back({run_start, run_end});
        run_start = -1;
        run_explained = true;
    };
    for (int i = 0; i < n; ++i) {
        const bool bad = !passive[i] && ping_fully_masked(good_mask, i, d);
        if (bad) {
            if (run_start < 0) {
                run_start = i;
                run_explained = true;
            }
            // A run is dropped only if the lines meet throughout the period.
            if (!lines_meet(i)) run_explained = false;
        } else {
            flush(i - 1);
        }
    }
    flush(n - 1);

    const auto bad_flags = interval_flags(out.periods, n);
    out.patch_mask.assign(static_cast<size_t>(n) * d, 0);
    for (int i = 0; i < n; ++i) {
        if (passive[i] || bad_flags[i]) continue;
        const int top = (entrained_air.valid.size() == static_cast<size_t>(n) &&
                         entrained_air.valid[i])
                            ? depth_to_bin(eg, entrained_air.depths[i])
                            : 0;
        const int floor_bin = (eg.orientation == Orientation::kDownfacing &&
                               seafloor.valid.size() == static_cast<size_t>(n) &&
                               seafloor.valid[i])
                                  ? depth_to_bin(eg, seafloor.depths[i])
                                  : d;
        for (int k = top; k < floor_bin; ++k) {
            if (!good_mask[static_cast<size_t>(i) * d + k])
                out.patch_mask[static_cast<size_t>(i) * d + k] = 1;
        }
    }
    return out;
}

SegmentationTargets build_targets(const Echogram& raw, const Echogram& clean,
                                  const LineInputs& lines,
                                  const std::vector<PingInterval>* passive_override) {
    const int n = raw.n_pings();
    const int d = raw.n_depths();
    if (clean.n_pings() != n || clean.n_depths() != d || clean.depths != raw.depths)
        throw DomainError("raw/clean grid mismatch");

    SegmentationTargets tg;
    tg.good_mask = clean.present;

    // Entrained air: deeper of the line annotation and the mask's upper extent.
    tg.entrained_air_original = lines.entrained_air;
    tg.entrained_air.depths.assign(n, 0.0);
    tg.entrained_air.valid.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        const bool fully_masked = ping_fully_masked(tg.good_mask, i, d);
        double depth = 0.0;
        bool valid = false;
        if (lines.entrained_air.n_pings() == n && lines.entrained_air.valid[i]) {
            depth = lines.entrained_air.depths[i];
            valid = true;
        }
        if (!fully_masked) {
            int k = 0;
            while (k < d && !tg.good_mask[static_cast<size_t>(i) * d + k]) ++k;
            if (k > 0) {
                depth = valid ? std::max(depth, raw.depths[k]) : raw.depths[k];
                valid = true;
            } else if (!valid) {
                depth = raw.depths[0];  // nothing excluded at the top
                valid = true;
            }
        }
        tg.entrained_air.depths[i] = depth;
        tg.entrained_air.valid[i] = valid;
    }

    // Seafloor: original annotation kept, plus an aggressive variant swallowing
    // the masked area adjacent to the bottom.
    tg.seafloor = lines.seafloor;
    tg.seafloor_aggressive = lines.seafloor;
    if (raw.orientation == Orientation::kDownfacing) {
        tg.seafloor_aggressive.depths.assign(n, 0.0);
        tg.seafloor_aggressive.valid.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            double depth = 0.0;
            bool valid = false;
            if (lines.seafloor.n_pings() == n && lines.seafloor.valid[i]) {
                depth = lines.seafloor.depths[i];
                valid = true;
            }
            if (!ping_fully_masked(tg.good_mask, i, d)) {
                int k = d;
                while (k > 0 && !tg.good_mask[static_cast<size_t>(i) * d + (k - 1)]) --k;
                if (k < d) {
                    depth = valid ? std::min(depth, raw.depths[k]) : raw.depths[k];
                    valid = true;
                }
            }
            tg.seafloor_aggressive.depths[i] = depth;
            tg.seafloor_aggressive.valid[i] = valid;
        }
    }

    tg.surface = clean_surface_line(lines.surface, &tg.entrained_air, raw.orientation,
                                    &tg.surface_anomalous);

    if (passive_override) {
        tg.passive_periods = *passive_override;
    } else {
        // Passive detection reads the samples nearest the transducer, so it
        // runs in instrument sample order.
        tg.passive_periods = detect_passive_periods(
            raw.orientation == Orientation::kUpfacing ? standardize_orientation(raw) : raw);
    }

    auto bad = detect_bad_regions(tg.good_mask, raw, tg.entrained_air, tg.seafloor_aggressive,
                                  tg.passive_periods);
    tg.bad_periods = std::move(bad.periods);
    tg.patch_mask = std::move(bad.patch_mask);
    return tg;
}

std::vector<uint8_t> reconstruct_good_mask(const Echogram& eg,
                                           const BoundaryLine& entrained_air,
                                           const BoundaryLine& seafloor,
                                           const std::vector<PingInterval>& passive,
                                           const std::vector<PingInterval>& bad_periods,
                                           const std::vector<uint8_t>* patch_mask) {
    const int n = eg.n_pings();
    const int d = eg.n_depths();
    std::vector<uint8_t> mask(static_cast<size_t>(n) * d, 1);
    const auto passive_flags = interval_flags(passive, n);
    const auto bad_flags = interval_flags(bad_periods, n);
    for (int i = 0; i < n; ++i) {
        const size_t base = static_cast<size_t>(i) * d;
        if (passive_flags[i] || bad_flags[i]) {
            std::fill(mask.begin() + base, mask.begin() + base + d, 0);
            continue;
        }
        if (entrained_air.n_pings() == n && entrained_air.valid[i]) {
            const int top = depth_to_bin(eg, entrained_air.depths[i]);
            for (int k = 0; k < top; ++k) mask[base + k] = 0;
        }
        if (eg.orientation == Orientation::kDownfacing && seafloor.n_pings() == n &&
            seafloor.valid[i]) {
            const int floor_bin = depth_to_bin(eg, seafloor.depths[i]);
            for (int k = floor_bin; k < d; ++k) mask[base + k] = 0;
        }
        if (patch_mask) {
            for (int k = 0; k < d; ++k)
                if ((*patch_mask)[base + k]) mask[base + k] = 0;
        }
    }
    return mask;
}

}  // namespace echofilter::core
