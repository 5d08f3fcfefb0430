#include "formats/evr.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "support/errors.hpp"
#include "support/timeutil.hpp"

namespace echofilter::formats {

namespace {

const char* kEvrHeader = "EVRG 1 echofilter";

std::string fmt_ts(double ts) {
    CivilTime t = epoch_to_civil(ts);
    return format_evl_date(t) + " " + format_evl_time(t);
}

double parse_ts(std::istream& ss, const std::string& ctx) {
    std::string date, time;
    if (!(ss >> date >> time)) throw ParseError(ctx + ": missing timestamp");
    return civil_to_epoch(parse_evl_datetime(date, time));
}

void validate(const RegionFile& file) {
    std::set<int> ids;
    for (const auto& r : file.regions) {
        if (!ids.insert(r.id).second)
            throw DomainError("duplicate region id " + std::to_string(r.id));
        if (r.end_time <= r.start_time)
            throw DomainError("region " + std::to_string(r.id) + " is empty in time");
    }
}

}  // namespace

const char* region_class_name(RegionClass c) {
    switch (c) {
        case RegionClass::kPassive: return "passive";
        case RegionClass::kBadPeriod: return "bad-period";
        case RegionClass::kBadPatch: return "bad-patch";
    }
    return "unknown";
}

RegionClass region_class_from_name(const std::string& name) {
    if (name == "passive") return RegionClass::kPassive;
    if (name == "bad-period") return RegionClass::kBadPeriod;
    if (name == "bad-patch") return RegionClass::kBadPatch;
    throw ParseError("unknown region classification '" + name + "'");
}

RegionFile read_evr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open EVR: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("EVRG", 0) != 0)
        throw StructuralError("missing EVRG header in " + path);
    if (!std::getline(in, line)) throw StructuralError("missing region count in " + path);
    int count = 0;
    try {
        count = std::stoi(line);
    } catch (const std::exception&) {
        throw ParseError("bad region count '" + line + "' in " + path);
    }

    RegionFile out;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        // REGION <id> <class> <start ts> <end ts> <depth_min> <depth_max> <n_poly>
        std::istringstream ss(line);
        std::string tag, cls;
        Region r;
        int n_poly = 0;
        if (!(ss >> tag) || tag != "REGION")
            throw ParseError(path + ": expected REGION record, got '" + line + "'");
        if (!(ss >> r.id >> cls)) throw ParseError(path + ": bad REGION record");
        r.classification = region_class_from_name(cls);
        r.start_time = parse_ts(ss, path);
        r.end_time = parse_ts(ss, path);
        if (!(ss >> r.depth_min >> r.depth_max >> n_poly))
            throw ParseError(path + ": bad REGION record");
        for (int i = 0; i < n_poly; ++i) {
            if (!std::getline(in, line)) throw StructuralError(path + ": truncated polygon");
            std::istringstream ps(line);
            double ts = parse_ts(ps, path);
            double depth = 0.0;
            if (!(ps >> depth)) throw ParseError(path + ": bad polygon vertex");
            r.polygon.emplace_back(ts, depth);
        }
        out.regions.push_back(std::move(r));
    }
    if (out.n_regions() != count)
        throw StructuralError(path + ": region count " + std::to_string(count) +
                              " does not match " + std::to_string(out.n_regions()) +
                              " records");
    validate(out);
    return out;
}

void write_evr(const RegionFile& regions, const std::string& path) {
    validate(regions);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write EVR: " + path);
    out << kEvrHeader << "\n" << regions.n_regions() << "\n";
    char buf[96];
    for (const auto& r : regions.regions) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g", r.depth_min, r.depth_max);
        out << "REGION " << r.id << ' ' << region_class_name(r.classification) << ' '
            << fmt_ts(r.start_time) << ' ' << fmt_ts(r.end_time) << ' ' << buf << ' '
            << r.polygon.size() << "\n";
        for (const auto& [ts, depth] : r.polygon) {
            std::snprintf(buf, sizeof(buf), "%.17g", depth);
            out << fmt_ts(ts) << ' ' << buf << "\n";
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace echofilter::formats
