#include "formats/sv_csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "support/errors.hpp"

namespace echofilter::formats {

namespace {

const char* kHeader =
    "Ping_index,Ping_date,Ping_time,Range_start,Range_stop,Sample_count";

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding spaces
        size_t b = field.find_first_not_of(" \t\r");
        size_t e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

SvCsvRecording read_sv_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open Sv CSV: " + path);

    std::string line;
    if (!std::getline(in, line)) throw StructuralError("empty Sv CSV: " + path);
    if (line.rfind("Ping_index", 0) != 0)
        throw StructuralError("missing header row in " + path);

    SvCsvRecording rec;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv(line);
        if (fields.size() < 7)
            throw StructuralError(path + ":" + std::to_string(row) +
                                  ": expected at least 7 columns, got " +
                                  std::to_string(fields.size()));
        SvPing ping;
        try {
            ping.ping_index = std::stoi(fields[0]);
            ping.datetime = parse_csv_datetime(fields[1], fields[2]);
            ping.range_start = std::stod(fields[3]);
            ping.range_stop = std::stod(fields[4]);
            int count = std::stoi(fields[5]);
            if (count < 1)
                throw ParseError("sample_count < 1");
            if (static_cast<int>(fields.size()) != 6 + count)
                throw StructuralError(path + ":" + std::to_string(row) +
                                      ": sample_count " + std::to_string(count) +
                                      " does not match " +
                                      std::to_string(fields.size() - 6) + " sample columns");
            if (ping.range_stop <= ping.range_start)
                throw ParseError("range_stop <= range_start");
            ping.samples.resize(count);
            ping.present.resize(count);
            for (int i = 0; i < count; ++i) {
                double v = std::stod(fields[6 + i]);
                if (is_missing_value(v)) {
                    ping.samples[i] = 0.0f;
                    ping.present[i] = 0;
                } else {
                    ping.samples[i] = static_cast<float>(v);
                    ping.present[i] = 1;
                }
            }
        } catch (const StructuralError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(path + ":" + std::to_string(row) + ": " + e.what());
        }
        rec.pings.push_back(std::move(ping));
    }
    if (rec.pings.empty())
        throw StructuralError("no ping rows in " + path);
    return rec;
}

void write_sv_csv(const SvCsvRecording& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write Sv CSV: " + path);
    out << kHeader << "\n";
    char buf[64];
    for (const auto& ping : rec.pings) {
        out << ping.ping_index << ',' << format_csv_date(ping.datetime) << ','
            << format_csv_time(ping.datetime) << ',';
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", ping.range_start, ping.range_stop);
        out << buf << ping.sample_count();
        for (int i = 0; i < ping.sample_count(); ++i) {
            if (ping.present[i]) {
                std::snprintf(buf, sizeof(buf), ",%.9g", ping.samples[i]);
                out << buf;
            } else {
                out << ",-9.9e+37";
            }
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace echofilter::formats
