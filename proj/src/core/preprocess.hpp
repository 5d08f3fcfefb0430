#pragma once

#include "core/echogram.hpp"
#include "formats/evl.hpp"
#include "formats/sv_csv.hpp"

namespace echofilter::core {

// Interpolate every ping onto the modal-resolution depth grid. Pings already
// on the grid are copied through bitwise.
Echogram regrid_depth(const formats::SvCsvRecording& raw, Orientation orientation);

// Flip upfacing data so increasing depth index means increasing water-column
// depth. Downfacing data passes through unchanged. Involution.
Echogram standardize_orientation(const Echogram& eg);

// Linearly interpolate an EVL trace onto the echogram's ping timestamps.
// Pings outside the trace's time span are flagged invalid.
BoundaryLine line_on_timestamps(const formats::LineFile& line,
                                const std::vector<double>& timestamps);

// Nearest depth-grid bin for a line depth; clamped to [0, n_depths-1].
int depth_to_bin(const Echogram& eg, double depth);

}  // namespace echofilter::core
