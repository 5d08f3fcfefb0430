#pragma once

#include <cstdint>
#include <string>

namespace echofilter {

// Calendar timestamp split into the fields the text formats carry.
struct CivilTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
    int millisecond = 0;
};

// UTC epoch seconds <-> civil fields (proleptic Gregorian, no leap seconds).
double civil_to_epoch(const CivilTime& t);
CivilTime epoch_to_civil(double epoch_seconds);

// "CCYYMMDD" and "HHMMSSssss" as used by the line/region files.
std::string format_evl_date(const CivilTime& t);
std::string format_evl_time(const CivilTime& t);
CivilTime parse_evl_datetime(const std::string& date, const std::string& time);

// "YYYY-MM-DD" and "HH:MM:SS.mmm" as used by the Sv CSV export.
std::string format_csv_date(const CivilTime& t);
std::string format_csv_time(const CivilTime& t);
CivilTime parse_csv_datetime(const std::string& date, const std::string& time);

}  // namespace echofilter
