#pragma once

#include <string>
#include <vector>

namespace echofilter::formats {

enum class RegionClass : int {
    kPassive = 0,
    kBadPeriod = 1,
    kBadPatch = 2,
};

struct Region {
    int id = 0;
    RegionClass classification = RegionClass::kPassive;
    double start_time = 0.0;  // epoch seconds
    double end_time = 0.0;
    // Period regions span the full water column via [depth_min, depth_max].
    double depth_min = 0.0;
    double depth_max = 0.0;
    // Patch regions may carry a polygon (time, depth) outline instead.
    std::vector<std::pair<double, double>> polygon;
};

struct RegionFile {
    std::vector<Region> regions;

    int n_regions() const { return static_cast<int>(regions.size()); }
};

const char* region_class_name(RegionClass c);
RegionClass region_class_from_name(const std::string& name);

// "EVRG 1 <tool version>" header, region count, then one block per region.
RegionFile read_evr(const std::string& path);
void write_evr(const RegionFile& regions, const std::string& path);

}  // namespace echofilter::formats
