#include "support/timeutil.hpp"

#include <cmath>
#include <cstdio>

#include "support/errors.hpp"

namespace echofilter {

namespace {

// Days from 1970-01-01 to year/month/day (Gregorian).
int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

}  // namespace

double civil_to_epoch(const CivilTime& t) {
    const int64_t days = days_from_civil(t.year, t.month, t.day);
    return static_cast<double>(days) * 86400.0 + t.hour * 3600.0 + t.minute * 60.0 +
           t.second + t.millisecond / 1000.0;
}

CivilTime epoch_to_civil(double epoch_seconds) {
    // Round to the nearest millisecond so round-trips are stable.
    int64_t total_ms = static_cast<int64_t>(std::llround(epoch_seconds * 1000.0));
    int64_t days = total_ms / 86400000;
    int64_t rem = total_ms % 86400000;
    if (rem < 0) {
        rem += 86400000;
        days -= 1;
    }
    CivilTime t;
    civil_from_days(days, t.year, t.month, t.day);
    t.hour = static_cast<int>(rem / 3600000);
    rem %= 3600000;
    t.minute = static_cast<int>(rem / 60000);
    rem %= 60000;
    t.second = static_cast<int>(rem / 1000);
    t.millisecond = static_cast<int>(rem % 1000);
    return t;
}

std::string format_evl_date(const CivilTime& t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d%02d%02d", t.year, t.month, t.day);
    return buf;
}

std::string format_evl_time(const CivilTime& t) {
    // HHMMSSssss: fourth fractional digit is always 0 at ms precision.
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d%02d%02d%03d0", t.hour, t.minute, t.second,
                  t.millisecond);
    return buf;
}

CivilTime parse_evl_datetime(const std::string& date, const std::string& time) {
    if (date.size() != 8 || time.size() != 10)
        throw ParseError("bad timestamp fields '" + date + " " + time + "'");
    CivilTime t;
    try {
        t.year = std::stoi(date.substr(0, 4));
        t.month = std::stoi(date.substr(4, 2));
        t.day = std::stoi(date.substr(6, 2));
        t.hour = std::stoi(time.substr(0, 2));
        t.minute = std::stoi(time.substr(2, 2));
        t.second = std::stoi(time.substr(4, 2));
        t.millisecond = std::stoi(time.substr(6, 3));
    } catch (const std::exception&) {
        throw ParseError("unparseable timestamp '" + date + " " + time + "'");
    }
    return t;
}

std::string format_csv_date(const CivilTime& t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", t.year, t.month, t.day);
    return buf;
}

std::string format_csv_time(const CivilTime& t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d.%03d", t.hour, t.minute, t.second,
                  t.millisecond);
    return buf;
}

CivilTime parse_csv_datetime(const std::string& date, const std::string& time) {
    CivilTime t;
    int n1 = std::sscanf(date.c_str(), "%d-%d-%d", &t.year, &t.month, &t.day);
    int n2 = std::sscanf(time.c_str(), "%d:%d:%d.%d", &t.hour, &t.minute, &t.second,
                         &t.millisecond);
    if (n1 != 3 || n2 != 4)
        throw ParseError("unparseable timestamp '" + date + " " + time + "'");
    return t;
}

}  // namespace echofilter
