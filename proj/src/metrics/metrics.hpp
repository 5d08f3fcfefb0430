#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/echogram.hpp"

namespace echofilter::metrics {

struct IouResult {
    double value = 0.0;
    bool both_empty = false;  // value is the defined-as-1 sentinel
    int64_t intersection = 0;
    int64_t union_ = 0;
};

IouResult iou(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b);

struct LineErrorStats {
    double mae = 0.0;
    double rmse = 0.0;
    double within_half = 0.0;  // fraction of included pings with |err| < 0.5 m
    double within_one = 0.0;
    double within_two = 0.0;
    int64_t n_pings = 0;
    double sum_abs = 0.0;      // pooled-aggregation ingredients
    double sum_sq = 0.0;
    std::vector<double> abs_errors;
};

// excluded[i] nonzero drops ping i (passive and bad-period pings).
LineErrorStats line_error_stats(const core::BoundaryLine& target,
                                const core::BoundaryLine& predicted,
                                const std::vector<uint8_t>& excluded);

struct CdfPoint {
    double threshold = 0.0;
    double fraction = 0.0;  // share of errors <= threshold
};

std::vector<CdfPoint> error_cdf(const std::vector<double>& abs_errors,
                                const std::vector<double>& thresholds);

// Exact area above the empirical step CDF; equals the MAE.
double area_above_cdf(const std::vector<double>& abs_errors);

enum class AggregateMode { kPooled, kPerFile };

struct FileStats {
    IouResult iou;
    LineErrorStats line;
    bool target_empty = false;  // empty target mask; excluded from SEM
};

struct MetricsReport {
    double iou = 0.0;
    double mae = 0.0;
    double rmse = 0.0;
    double within_half = 0.0, within_one = 0.0, within_two = 0.0;
    std::optional<double> iou_sem, mae_sem, rmse_sem;
    int n_files = 0;
    int n_files_sem = 0;
    AggregateMode mode = AggregateMode::kPooled;
};

MetricsReport aggregate(const std::vector<FileStats>& files, AggregateMode mode);

// Two-sided Wilcoxon signed-rank test over paired per-file statistics.
// Normal approximation with tie correction; zero differences dropped.
struct WilcoxonResult {
    double statistic = 0.0;  // W = min(W+, W-)
    double p_value = 1.0;
    int n_effective = 0;
};

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

}  // namespace echofilter::metrics
