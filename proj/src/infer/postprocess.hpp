#pragma once

#include <vector>

#include "core/echogram.hpp"

namespace echofilter::infer {

struct Patch {
    int ping_lo = 0, ping_hi = 0;     // inclusive
    double depth_lo = 0.0, depth_hi = 0.0;
    double area = 0.0;                // ping-metres
};

struct RegionSet {
    std::vector<core::PingInterval> passive;
    std::vector<core::PingInterval> bad_periods;
    std::vector<Patch> patches;
};

struct PostprocessConfig {
    int merge_gap = 10;        // same-class period gaps smaller than this merge
    int min_length = 10;       // shorter periods are dropped
    double min_patch_area = 25.0;  // ping-metres
    bool drop_all_bad = false; // empty bad periods/patches, keep passive
};

// Merge nearby period regions, drop short ones and small patches. Idempotent.
RegionSet postprocess_regions(const RegionSet& raw, const PostprocessConfig& cfg);

// Connected components (4-connectivity) of a ping x bin mask, as patches with
// area pixels * depth_step ping-metres.
std::vector<Patch> patches_from_mask(const std::vector<uint8_t>& mask, int n_pings,
                                     int n_bins, double depth0, double depth_step);

// Maximal runs of set flags as inclusive ping intervals.
std::vector<core::PingInterval> intervals_from_flags(const std::vector<uint8_t>& flags);

}  // namespace echofilter::infer
