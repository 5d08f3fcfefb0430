#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support/errors.hpp"

namespace echofilter::metrics {

IouResult iou(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    if (a.size() != b.size()) throw DomainError("iou mask shape mismatch");
    IouResult r;
    for (size_t i = 0; i < a.size(); ++i) {
        const bool pa = a[i] != 0, pb = b[i] != 0;
        r.intersection += pa && pb;
        r.union_ += pa || pb;
    }
    if (r.union_ == 0) {
        r.value = 1.0;
        r.both_empty = true;
    } else {
        r.value = static_cast<double>(r.intersection) / static_cast<double>(r.union_);
    }
    return r;
}

LineErrorStats line_error_stats(const core::BoundaryLine& target,
                                const core::BoundaryLine& predicted,
                                const std::vector<uint8_t>& excluded) {
    const size_t n = target.depths.size();
    if (predicted.depths.size() != n) throw DomainError("line length mismatch");
    LineErrorStats s;
    int64_t w_half = 0, w_one = 0, w_two = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!excluded.empty() && excluded[i]) continue;
        if (!target.valid.empty() && !target.valid[i]) continue;
        if (!predicted.valid.empty() && !predicted.valid[i]) continue;
        const double e = std::abs(predicted.depths[i] - target.depths[i]);
        s.abs_errors.push_back(e);
        s.sum_abs += e;
        s.sum_sq += e * e;
        ++s.n_pings;
        w_half += e < 0.5;
        w_one += e < 1.0;
        w_two += e < 2.0;
    }
    if (s.n_pings == 0) throw DomainError("no included pings for line statistics");
    s.mae = s.sum_abs / s.n_pings;
    s.rmse = std::sqrt(s.sum_sq / s.n_pings);
    s.within_half = static_cast<double>(w_half) / s.n_pings;
    s.within_one = static_cast<double>(w_one) / s.n_pings;
    s.within_two = static_cast<double>(w_two) / s.n_pings;
    return s;
}

std::vector<CdfPoint> error_cdf(const std::vector<double>& abs_errors,
                                const std::vector<double>& thresholds) {
    std::vector<double> sorted = abs_errors;
    std::sort(sorted.begin(), sorted.end());
    std::vector<CdfPoint> curve;
    curve.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
        const double frac = sorted.empty()
                                ? 0.0
                                : static_cast<double>(it - sorted.begin()) / sorted.size();
        curve.push_back({t, frac});
    }
    return curve;
}

double area_above_cdf(const std::vector<double>& abs_errors) {
    // integral of (1 - F(t)) dt over the empirical step CDF is the mean
    double acc = 0.0;
    for (double e : abs_errors) acc += e;
    return abs_errors.empty() ? 0.0 : acc / abs_errors.size();
}

MetricsReport aggregate(const std::vector<FileStats>& files, AggregateMode mode) {
    if (files.empty()) throw DomainError("aggregate needs at least one file");
    MetricsReport rep;
    rep.mode = mode;
    rep.n_files = static_cast<int>(files.size());

    if (mode == AggregateMode::kPooled) {
        int64_t inter = 0, uni = 0, pings = 0;
        double sum_abs = 0.0, sum_sq = 0.0;
        int64_t w_half = 0, w_one = 0, w_two = 0;
        for (const auto& f : files) {
            inter += f.iou.intersection;
            uni += f.iou.union_;
            pings += f.line.n_pings;
            sum_abs += f.line.sum_abs;
            sum_sq += f.line.sum_sq;
            w_half += static_cast<int64_t>(std::llround(f.line.within_half * f.line.n_pings));
            w_one += static_cast<int64_t>(std::llround(f.line.within_one * f.line.n_pings));
            w_two += static_cast<int64_t>(std::llround(f.line.within_two * f.line.n_pings));
        }
        rep.iou = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
        if (pings > 0) {
            rep.mae = sum_abs / pings;
            rep.rmse = std::sqrt(sum_sq / pings);
            rep.within_half = static_cast<double>(w_half) / pings;
            rep.within_one = static_cast<double>(w_one) / pings;
            rep.within_two = static_cast<double>(w_two) / pings;
        }
    } else {
        double iou_acc = 0.0, mae_acc = 0.0, mse_acc = 0.0;
        double wh = 0.0, w1 = 0.0, w2 = 0.0;
        for (const auto& f : files) {
            iou_acc += f.iou.value;
            mae_acc += f.line.mae;
            mse_acc += f.line.rmse * f.line.rmse;
            wh += f.line.within_half;
            w1 += f.line.within_one;
            w2 += f.line.within_two;
        }
        const double n = static_cast<double>(files.size());
        rep.iou = iou_acc / n;
        rep.mae = mae_acc / n;
        rep.rmse = std::sqrt(mse_acc / n);  // average MSE first, then the root
        rep.within_half = wh / n;
        rep.within_one = w1 / n;
        rep.within_two = w2 / n;
    }

    // SEM over the per-file distribution, empty-target files excluded
    auto sem_of = [&](auto pick) -> std::optional<double> {
        std::vector<double> vals;
        for (const auto& f : files)
            if (!f.target_empty) vals.push_back(pick(f));
        rep.n_files_sem = static_cast<int>(vals.size());
        if (vals.size() < 2) return std::nullopt;
        double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        var /= static_cast<double>(vals.size() - 1);
        return std::sqrt(var / vals.size());
    };
    rep.iou_sem = sem_of([](const FileStats& f) { return f.iou.value; });
    rep.mae_sem = sem_of([](const FileStats& f) { return f.line.mae; });
    rep.rmse_sem = sem_of([](const FileStats& f) { return f.line.rmse; });
    return rep;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("wilcoxon needs paired samples");
    std::vector<double> diffs;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }
    WilcoxonResult r;
    r.n_effective = static_cast<int>(diffs.size());
    if (diffs.empty()) return r;

    std::vector<size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        return std::abs(diffs[i]) < std::abs(diffs[j]);
    });
    std::vector<double> ranks(diffs.size());
    double tie_correction = 0.0;
    for (size_t i = 0; i < order.size();) {
        size_t j = i;
        while (j + 1 < order.size() &&
               std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]]))
            ++j;
        const double rank = 0.5 * (i + j) + 1.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_correction += t * t * t - t;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }

    double w_plus = 0.0, w_minus = 0.0;
    for (size_t i = 0; i < diffs.size(); ++i)
        (diffs[i] > 0 ? w_plus : w_minus) += ranks[i];
    r.statistic = std::min(w_plus, w_minus);

    const double n = static_cast<double>(diffs.size());
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_correction / 48.0;
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    // continuity-corrected normal approximation, two-sided
    const double z = (r.statistic - mean + 0.5) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    return r;
}

}  // namespace echofilter::metrics
