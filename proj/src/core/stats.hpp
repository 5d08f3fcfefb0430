#pragma once

#include <vector>

namespace echofilter::core {

// Linear-interpolation (type-7) quantile; q in [0, 1]. Input need not be sorted.
double quantile(std::vector<double> values, double q);

double median(std::vector<double> values);

// Interquartile range (q75 - q25).
double iqr(const std::vector<double>& values);

// Interdecile range (q90 - q10).
double idr(const std::vector<double>& values);

// Running median with a centred window of `kernel` points. Windows shrink at
// the sequence edges. `valid` may be empty (all points valid); invalid points
// are skipped both as outputs and as window members.
std::vector<double> median_filter(const std::vector<double>& values,
                                  const std::vector<unsigned char>& valid, int kernel);

}  // namespace echofilter::core
