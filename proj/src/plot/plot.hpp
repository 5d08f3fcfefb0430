#pragma once

#include <string>
#include <vector>

#include "core/echogram.hpp"
#include "metrics/metrics.hpp"

namespace echofilter::plot {

struct LineOverlay {
    const core::BoundaryLine* line = nullptr;
    uint8_t r = 255, g = 255, b = 0;
};

// Binary PPM (P6) echogram render: Sv mapped to a blue-to-yellow ramp over
// [db_lo, db_hi], missing cells dark grey, one pixel per (ping, bin),
// overlays drawn on top.
void render_echogram(const core::Echogram& eg, const std::vector<LineOverlay>& overlays,
                     const std::string& path, double db_lo = -100.0, double db_hi = -30.0);

struct CdfSeries {
    std::string label;
    std::vector<metrics::CdfPoint> curve;
    uint8_t r = 0, g = 0, b = 0;
};

// Error-CDF chart (threshold on x, fraction on y) as a PPM raster.
void render_error_cdf(const std::vector<CdfSeries>& series, const std::string& path,
                      int width = 640, int height = 480);

}  // namespace echofilter::plot
