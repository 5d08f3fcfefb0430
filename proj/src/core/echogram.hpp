#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace echofilter::core {

enum class Orientation : int {
    kDownfacing = 0,
    kUpfacing = 1,
};

inline const char* orientation_name(Orientation o) {
    return o == Orientation::kDownfacing ? "downfacing" : "upfacing";
}

// Ping-by-depth Sv matrix on a uniform depth grid.
//
// After standardize_orientation the depth axis always runs from the sea
// surface downwards, regardless of where the echosounder sits.
struct Echogram {
    std::vector<double> timestamps;  // epoch seconds, one per ping
    std::vector<double> depths;      // metres, strictly monotonic, uniform step
    std::vector<float> sv;           // row-major (n_pings x n_depths), dB
    std::vector<uint8_t> present;    // same shape; 1 where sv holds a real sample
    Orientation orientation = Orientation::kDownfacing;

    int n_pings() const { return static_cast<int>(timestamps.size()); }
    int n_depths() const { return static_cast<int>(depths.size()); }

    float& at(int ping, int depth) { return sv[static_cast<size_t>(ping) * depths.size() + depth]; }
    float at(int ping, int depth) const {
        return sv[static_cast<size_t>(ping) * depths.size() + depth];
    }
    uint8_t present_at(int ping, int depth) const {
        return present[static_cast<size_t>(ping) * depths.size() + depth];
    }
    void set_present(int ping, int depth, uint8_t v) {
        present[static_cast<size_t>(ping) * depths.size() + depth] = v;
    }

    double depth_step() const {
        return n_depths() > 1 ? depths[1] - depths[0] : 0.0;
    }
};

// Per-ping depth trace with validity flags.
struct BoundaryLine {
    std::vector<double> depths;     // metres, one per ping
    std::vector<uint8_t> valid;     // 1 where the trace is usable

    int n_pings() const { return static_cast<int>(depths.size()); }
    bool empty() const { return depths.empty(); }
};

// Inclusive ping interval [first, last].
struct PingInterval {
    int first = 0;
    int last = 0;

    int length() const { return last - first + 1; }
    bool operator==(const PingInterval&) const = default;
};

// Everything the network is trained to reproduce for one recording.
struct SegmentationTargets {
    BoundaryLine entrained_air;          // deepest-extent variant (primary target)
    BoundaryLine entrained_air_original; // line annotation as given
    BoundaryLine seafloor;               // original line annotation
    BoundaryLine seafloor_aggressive;    // extended to swallow adjacent masked area
    BoundaryLine surface;
    std::vector<uint8_t> surface_anomalous;  // pings whose surface value was rejected
    std::vector<PingInterval> passive_periods;
    std::vector<PingInterval> bad_periods;
    std::vector<uint8_t> patch_mask;     // (n_pings x n_depths), 1 = bad patch pixel
    std::vector<uint8_t> good_mask;      // (n_pings x n_depths), 1 = analyzable
};

}  // namespace echofilter::core
