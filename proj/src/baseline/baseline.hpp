#pragma once

#include "core/echogram.hpp"

namespace echofilter::baseline {

struct BaselineConfig {
    int blur_kernel = 13;
    double blur_sigma = 2.0;
    double threshold_min_db = -80.0;       // entrained-air threshold-offset operator
    double invert_gain = -1.0;             // inversion: gain * Sv + offset
    double invert_offset = -150.0;
    double good_pick_db = -70.0;           // minimum Sv for a good pick
    double discrimination_db = -70.0;      // sustained-layer qualification level
    double backstep_db = -70.0;            // backstep discrimination (seafloor)
    double surface_backstep_db = -25.0;    // halved level for the sea surface
    double bottom_offset = 0.5;            // metres added below the seafloor pick
};

// Mask-weighted 2-D Gaussian blur over (ping, depth); missing cells carry no
// weight and stay missing where no neighbourhood support exists.
core::Echogram gaussian_blur_2d(const core::Echogram& eg, int kernel, double sigma);

// First depth at or below the surface line where Sv drops under min_db.
// Pings with no crossing get the deepest sample and valid=0.
core::BoundaryLine threshold_offset_pick(const core::Echogram& blurred,
                                         const core::BoundaryLine& surface,
                                         double min_db);

// Shallowest onset of a sustained (>=3 sample) strong layer, then a backstep
// walk toward the echosounder until the signal falls below backstep_db.
// With invert set the pick runs on -Sv - 150.
core::BoundaryLine best_bottom_candidate(const core::Echogram& eg, double good_pick_db,
                                         double discrimination_db, double backstep_db,
                                         bool invert);

struct BaselineLines {
    core::BoundaryLine entrained_air;  // threshold-offset pick below the surface
    core::BoundaryLine seafloor;       // downfacing only; includes bottom offset
    core::BoundaryLine surface;        // upfacing only
};

// The classical picking stack: blur, then the per-boundary operators.
BaselineLines baseline_annotate(const core::Echogram& eg, const BaselineConfig& cfg = {});

}  // namespace echofilter::baseline
