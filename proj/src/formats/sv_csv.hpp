#pragma once

#include <string>
#include <vector>

#include "support/timeutil.hpp"

namespace echofilter::formats {

// Echoview-style special export value marking excluded cells.
constexpr double kMissingIndicator = -9.9e37;

inline bool is_missing_value(double v) { return v < -1.0e37; }

struct SvPing {
    int ping_index = 0;
    CivilTime datetime;
    double range_start = 0.0;  // metres
    double range_stop = 0.0;   // metres
    std::vector<float> samples;        // Sv, dB; value at missing cells is unspecified
    std::vector<uint8_t> present;      // 1 where a real sample exists

    int sample_count() const { return static_cast<int>(samples.size()); }
    double timestamp() const { return civil_to_epoch(datetime); }
};

struct SvCsvRecording {
    std::vector<SvPing> pings;

    int n_pings() const { return static_cast<int>(pings.size()); }
};

// Column layout (documented in docs/file-formats.md):
//   Ping_index, Ping_date, Ping_time, Range_start, Range_stop, Sample_count, Sv...
SvCsvRecording read_sv_csv(const std::string& path);
void write_sv_csv(const SvCsvRecording& rec, const std::string& path);

}  // namespace echofilter::formats
