#pragma once

#include <string>
#include <vector>

#include "core/echogram.hpp"

namespace echofilter::formats {

constexpr int kShardLength = 128;  // pings per shard (last shard may be shorter)

// One training window: raw Sv plus targets aligned ping-for-ping.
struct Shard {
    std::string recording_id;
    int window_offset = 0;  // ping offset into the source recording
    core::Echogram sv;      // window of the preprocessed recording
    // Per-ping targets, window-local.
    core::BoundaryLine entrained_air;
    core::BoundaryLine entrained_air_original;
    core::BoundaryLine seafloor;
    core::BoundaryLine seafloor_aggressive;
    core::BoundaryLine surface;
    std::vector<uint8_t> surface_anomalous;
    std::vector<uint8_t> passive;     // 1 where the ping is in a passive period
    std::vector<uint8_t> bad_period;  // 1 where the ping is in a bad-data period
    std::vector<uint8_t> patch_mask;  // (n x d)

    int n_pings() const { return sv.n_pings(); }
};

struct ShardManifest {
    std::string recording_id;
    int n_shards = 0;
    int n_pings = 0;
    int n_depths = 0;
    double depth0 = 0.0;
    double depth_step = 0.0;
    core::Orientation orientation = core::Orientation::kDownfacing;
};

// Payloads are flat little-endian float32/uint8 arrays; the manifest is plain text.
void write_shards(const core::Echogram& recording, const core::SegmentationTargets& targets,
                  const std::string& recording_id, const std::string& dir);
ShardManifest read_manifest(const std::string& dir);
Shard read_shard(const std::string& dir, int idx);

}  // namespace echofilter::formats
