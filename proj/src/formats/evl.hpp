#pragma once

#include <string>
#include <vector>

namespace echofilter::formats {

enum class LineStatus : int {
    kNone = 0,
    kUnverified = 1,
    kBad = 2,
    kGood = 3,
};

struct LinePoint {
    double timestamp = 0.0;  // epoch seconds (ms precision)
    double depth = 0.0;      // metres
    LineStatus status = LineStatus::kGood;
};

struct LineFile {
    std::vector<LinePoint> points;

    int n_points() const { return static_cast<int>(points.size()); }
};

// Line-oriented text: "EVBD 1 <tool version>" header, point count, then one
// "CCYYMMDD HHMMSSssss depth status" record per point.
LineFile read_evl(const std::string& path);
void write_evl(const LineFile& line, const std::string& path);

}  // namespace echofilter::formats
