#include "formats/evl.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support/errors.hpp"
#include "support/timeutil.hpp"

namespace echofilter::formats {

namespace {
const char* kEvlHeader = "EVBD 1 echofilter";
}

LineFile read_evl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open EVL: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("EVBD", 0) != 0)
        throw StructuralError("missing EVBD header in " + path);
    if (!std::getline(in, line))
        throw StructuralError("missing point count in " + path);
    int count = 0;
    try {
        count = std::stoi(line);
    } catch (const std::exception&) {
        throw ParseError("bad point count '" + line + "' in " + path);
    }

    LineFile out;
    int row = 2;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string date, time, depth_str;
        int status_val = -1;
        if (!(ss >> date >> time >> depth_str >> status_val))
            throw ParseError(path + ":" + std::to_string(row) + ": bad point record");
        LinePoint pt;
        pt.timestamp = civil_to_epoch(parse_evl_datetime(date, time));
        try {
            size_t pos = 0;
            pt.depth = std::stod(depth_str, &pos);
            if (pos != depth_str.size()) throw ParseError("trailing junk");
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(row) + ": unparseable depth '" +
                             depth_str + "'");
        }
        if (status_val < 0 || status_val > 3)
            throw ParseError(path + ":" + std::to_string(row) + ": invalid status " +
                             std::to_string(status_val));
        pt.status = static_cast<LineStatus>(status_val);
        out.points.push_back(pt);
    }
    if (out.n_points() != count)
        throw StructuralError(path + ": point count " + std::to_string(count) +
                              " does not match " + std::to_string(out.n_points()) +
                              " records");
    return out;
}

void write_evl(const LineFile& line, const std::string& path) {
    if (line.points.empty()) throw DomainError("refusing to write EVL with no points");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write EVL: " + path);
    out << kEvlHeader << "\n" << line.n_points() << "\n";
    char buf[64];
    for (const auto& pt : line.points) {
        CivilTime t = epoch_to_civil(pt.timestamp);
        std::snprintf(buf, sizeof(buf), "%.17g", pt.depth);
        out << format_evl_date(t) << ' ' << format_evl_time(t) << ' ' << buf << ' '
            << static_cast<int>(pt.status) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace echofilter::formats
