#include "infer/postprocess.hpp"

#include <algorithm>

namespace echofilter::infer {

namespace {

std::vector<core::PingInterval> merge_and_filter(std::vector<core::PingInterval> spans,
                                                 int merge_gap, int min_length) {
    std::sort(spans.begin(), spans.end(),
              [](const core::PingInterval& a, const core::PingInterval& b) {
                  return a.first < b.first;
              });
    std::vector<core::PingInterval> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.first - merged.back().last < merge_gap)
            merged.back().last = std::max(merged.back().last, s.last);
        else
            merged.push_back(s);
    }
    std::vector<core::PingInterval> kept;
    for (const auto& s : merged)
        if (s.last - s.first + 1 >= min_length) kept.push_back(s);
    return kept;
}

}  // namespace

std::vector<core::PingInterval> intervals_from_flags(const std::vector<uint8_t>& flags) {
    std::vector<core::PingInterval> out;
    const int n = static_cast<int>(flags.size());
    for (int i = 0; i < n;) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < n && flags[j + 1]) ++j;
        out.push_back({i, j});
        i = j + 1;
    }
    return out;
}

std::vector<Patch> patches_from_mask(const std::vector<uint8_t>& mask, int n_pings,
                                     int n_bins, double depth0, double depth_step) {
    std::vector<int> label(static_cast<size_t>(n_pings) * n_bins, -1);
    std::vector<Patch> patches;
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < n_pings; ++i) {
        for (int k = 0; k < n_bins; ++k) {
            const size_t idx = static_cast<size_t>(i) * n_bins + k;
            if (!mask[idx] || label[idx] >= 0) continue;
            const int id = static_cast<int>(patches.size());
            Patch p{i, i, depth0 + k * depth_step, depth0 + k * depth_step, 0.0};
            stack.push_back({i, k});
            label[idx] = id;
            int count = 0;
            while (!stack.empty()) {
                auto [pi, pk] = stack.back();
                stack.pop_back();
                ++count;
                p.ping_lo = std::min(p.ping_lo, pi);
                p.ping_hi = std::max(p.ping_hi, pi);
                p.depth_lo = std::min(p.depth_lo, depth0 + pk * depth_step);
                p.depth_hi = std::max(p.depth_hi, depth0 + pk * depth_step);
                const int di[4] = {-1, 1, 0, 0};
                const int dk[4] = {0, 0, -1, 1};
                for (int a = 0; a < 4; ++a) {
                    const int ni = pi + di[a], nk = pk + dk[a];
                    if (ni < 0 || ni >= n_pings || nk < 0 || nk >= n_bins) continue;
                    const size_t nidx = static_cast<size_t>(ni) * n_bins + nk;
                    if (!mask[nidx] || label[nidx] >= 0) continue;
                    label[nidx] = id;
                    stack.push_back({ni, nk});
                }
            }
            p.area = count * depth_step;  // one ping wide, depth_step metres tall per pixel
            patches.push_back(p);
        }
    }
    return patches;
}

RegionSet postprocess_regions(const RegionSet& raw, const PostprocessConfig& cfg) {
    RegionSet out;
    out.passive = merge_and_filter(raw.passive, cfg.merge_gap, cfg.min_length);
    if (!cfg.drop_all_bad) {
        out.bad_periods = merge_and_filter(raw.bad_periods, cfg.merge_gap, cfg.min_length);
        for (const auto& p : raw.patches)
            if (p.area >= cfg.min_patch_area) out.patches.push_back(p);
    }
    return out;
}

}  // namespace echofilter::infer
