#include "formats/shards.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support/errors.hpp"

namespace echofilter::formats {

static_assert(std::endian::native == std::endian::little,
              "shard payloads are little-endian");

namespace {

namespace fs = std::filesystem;

std::string shard_path(const std::string& dir, int idx) {
    char name[32];
    std::snprintf(name, sizeof(name), "shard_%04d.bin", idx);
    return (fs::path(dir) / name).string();
}

template <typename T>
void write_vec(std::ofstream& out, const std::vector<T>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::ifstream& in, std::vector<T>& v, size_t n, const std::string& path) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
    if (!in) throw StructuralError("truncated shard payload: " + path);
}

void write_line(std::ofstream& out, const core::BoundaryLine& line) {
    write_vec(out, line.depths);
    write_vec(out, line.valid);
}

void read_line(std::ifstream& in, core::BoundaryLine& line, size_t n, const std::string& p) {
    read_vec(in, line.depths, n, p);
    read_vec(in, line.valid, n, p);
}

std::vector<uint8_t> intervals_to_flags(const std::vector<core::PingInterval>& ivals, int n) {
    std::vector<uint8_t> flags(n, 0);
    for (const auto& iv : ivals)
        for (int i = std::max(0, iv.first); i <= std::min(n - 1, iv.last); ++i) flags[i] = 1;
    return flags;
}

template <typename T>
std::vector<T> slice(const std::vector<T>& v, int first, int count) {
    return std::vector<T>(v.begin() + first, v.begin() + first + count);
}

core::BoundaryLine slice_line(const core::BoundaryLine& line, int first, int count) {
    core::BoundaryLine out;
    out.depths = slice(line.depths, first, count);
    out.valid = slice(line.valid, first, count);
    return out;
}

}  // namespace

void write_shards(const core::Echogram& recording, const core::SegmentationTargets& targets,
                  const std::string& recording_id, const std::string& dir) {
    const int n = recording.n_pings();
    const int d = recording.n_depths();
    if (n < 1) throw DomainError("cannot shard an empty recording");
    fs::create_directories(dir);

    const auto passive = intervals_to_flags(targets.passive_periods, n);
    const auto bad = intervals_to_flags(targets.bad_periods, n);
    const int n_shards = (n + kShardLength - 1) / kShardLength;

    for (int s = 0; s < n_shards; ++s) {
        const int first = s * kShardLength;
        const int len = std::min(kShardLength, n - first);
        std::ofstream out(shard_path(dir, s), std::ios::binary);
        if (!out) throw IoError("cannot write shard " + shard_path(dir, s));

        write_vec(out, slice(recording.timestamps, first, len));
        write_vec(out, slice(recording.sv, first * d, len * d));
        write_vec(out, slice(recording.present, first * d, len * d));
        write_line(out, slice_line(targets.entrained_air, first, len));
        write_line(out, slice_line(targets.entrained_air_original, first, len));
        write_line(out, slice_line(targets.seafloor, first, len));
        write_line(out, slice_line(targets.seafloor_aggressive, first, len));
        write_line(out, slice_line(targets.surface, first, len));
        write_vec(out, slice(targets.surface_anomalous, first, len));
        write_vec(out, slice(passive, first, len));
        write_vec(out, slice(bad, first, len));
        write_vec(out, slice(targets.patch_mask, first * d, len * d));
        if (!out) throw IoError("write failed: " + shard_path(dir, s));
    }

    std::ofstream man((fs::path(dir) / "manifest.txt").string());
    if (!man) throw IoError("cannot write shard manifest in " + dir);
    char buf[64];
    man << "recording_id " << recording_id << "\n";
    man << "n_shards " << n_shards << "\n";
    man << "n_pings " << n << "\n";
    man << "n_depths " << d << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", recording.depths.empty() ? 0.0 : recording.depths[0]);
    man << "depth0 " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", recording.depth_step());
    man << "depth_step " << buf << "\n";
    man << "orientation " << core::orientation_name(recording.orientation) << "\n";
}

ShardManifest read_manifest(const std::string& dir) {
    std::ifstream in((fs::path(dir) / "manifest.txt").string());
    if (!in) throw StructuralError("shard manifest missing in " + dir);
    ShardManifest m;
    std::string key;
    while (in >> key) {
        if (key == "recording_id") in >> m.recording_id;
        else if (key == "n_shards") in >> m.n_shards;
        else if (key == "n_pings") in >> m.n_pings;
        else if (key == "n_depths") in >> m.n_depths;
        else if (key == "depth0") in >> m.depth0;
        else if (key == "depth_step") in >> m.depth_step;
        else if (key == "orientation") {
            std::string o;
            in >> o;
            m.orientation = (o == "upfacing") ? core::Orientation::kUpfacing
                                              : core::Orientation::kDownfacing;
        } else {
            std::string skip;
            std::getline(in, skip);
        }
    }
    if (m.n_shards < 1 || m.n_depths < 1)
        throw StructuralError("malformed shard manifest in " + dir);
    return m;
}

Shard read_shard(const std::string& dir, int idx) {
    const ShardManifest m = read_manifest(dir);
    if (idx < 0 || idx >= m.n_shards)
        throw DomainError("shard index " + std::to_string(idx) + " out of range [0," +
                          std::to_string(m.n_shards) + ")");
    const std::string path = shard_path(dir, idx);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("shard payload missing: " + path);

    const int first = idx * kShardLength;
    const size_t len = static_cast<size_t>(std::min(kShardLength, m.n_pings - first));
    const size_t d = static_cast<size_t>(m.n_depths);

    Shard s;
    s.recording_id = m.recording_id;
    s.window_offset = first;
    s.sv.orientation = m.orientation;
    s.sv.depths.resize(d);
    for (size_t k = 0; k < d; ++k) s.sv.depths[k] = m.depth0 + static_cast<double>(k) * m.depth_step;
    read_vec(in, s.sv.timestamps, len, path);
    read_vec(in, s.sv.sv, len * d, path);
    read_vec(in, s.sv.present, len * d, path);
    read_line(in, s.entrained_air, len, path);
    read_line(in, s.entrained_air_original, len, path);
    read_line(in, s.seafloor, len, path);
    read_line(in, s.seafloor_aggressive, len, path);
    read_line(in, s.surface, len, path);
    read_vec(in, s.surface_anomalous, len, path);
    read_vec(in, s.passive, len, path);
    read_vec(in, s.bad_period, len, path);
    read_vec(in, s.patch_mask, len * d, path);
    return s;
}

}  // namespace echofilter::formats
