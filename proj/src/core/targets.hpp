#pragma once

#include <optional>

#include "core/echogram.hpp"

namespace echofilter::core {

struct LineInputs {
    BoundaryLine surface;
    BoundaryLine seafloor;
    BoundaryLine entrained_air;
};

// Remove outliers from a surface trace: a coarse 201-point median-filter pass
// replacing residuals past 5 sigma (iqr/1.35), then repeated 31-point passes
// invalidating residuals past 4 sigma (idr/2.56) until a fixpoint, then a
// clamp so the surface is never deeper than the entrained-air line. For
// downfacing data the surface sits at the transducer face (0 m).
// `anomalous_out`, when non-null, is set to 1 for every ping whose value was
// replaced or invalidated.
BoundaryLine clean_surface_line(const BoundaryLine& line,
                                const BoundaryLine* entrained_air, Orientation orientation,
                                std::vector<uint8_t>* anomalous_out = nullptr);

// Passive-period detection from the attenuation of the first depth samples.
// `eg` must be in instrument sample order (closest-to-transducer first).
std::vector<PingInterval> detect_passive_periods(const Echogram& eg,
                                                 int n_samples = 38,
                                                 double threshold_db = 25.0);

struct BadRegions {
    std::vector<PingInterval> periods;
    std::vector<uint8_t> patch_mask;  // (n_pings x n_depths)
};

// Fully-masked ping runs (outside passive periods, and not explained by the
// entrained-air line meeting the seafloor) become bad periods; remaining
// unexplained masked pixels become the patch mask.
BadRegions detect_bad_regions(const std::vector<uint8_t>& good_mask, const Echogram& eg,
                              const BoundaryLine& entrained_air, const BoundaryLine& seafloor,
                              const std::vector<PingInterval>& passive_periods);

// Reconcile the clean-CSV mask with the line annotations into training targets.
SegmentationTargets build_targets(const Echogram& raw, const Echogram& clean,
                                  const LineInputs& lines,
                                  const std::vector<PingInterval>* passive_override = nullptr);

// Rebuild the good-data mask from its constituent annotations. Used both as a
// consistency oracle and to turn predictions into an analyzable-data mask.
std::vector<uint8_t> reconstruct_good_mask(const Echogram& eg,
                                           const BoundaryLine& entrained_air,
                                           const BoundaryLine& seafloor,
                                           const std::vector<PingInterval>& passive,
                                           const std::vector<PingInterval>& bad_periods,
                                           const std::vector<uint8_t>* patch_mask);

}  // namespace echofilter::core
