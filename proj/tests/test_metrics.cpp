#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "metrics/metrics.hpp"
#include "support/errors.hpp"

using namespace echofilter;

namespace {

core::BoundaryLine line_of(std::vector<double> depths) {
    core::BoundaryLine l;
    l.valid.assign(depths.size(), 1);
    l.depths = std::move(depths);
    return l;
}

}  // namespace

TEST_CASE("iou hand cases") {
    const std::vector<uint8_t> a{1, 1, 0, 0};
    const std::vector<uint8_t> b{1, 0, 0, 0};
    const metrics::IouResult r = metrics::iou(a, b);
    CHECK(r.value == doctest::Approx(0.5));
    CHECK(r.intersection == 1);
    CHECK(r.union_ == 2);
    CHECK_FALSE(r.both_empty);

    CHECK(metrics::iou(a, a).value == doctest::Approx(1.0));
    const std::vector<uint8_t> c{0, 0, 1, 1};
    CHECK(metrics::iou(a, c).value == doctest::Approx(0.0));
    const std::vector<uint8_t> empty(4, 0);
    CHECK(metrics::iou(a, empty).value == doctest::Approx(0.0));
    const metrics::IouResult both = metrics::iou(empty, empty);
    CHECK(both.value == doctest::Approx(1.0));
    CHECK(both.both_empty);
}

TEST_CASE("iou is symmetric and rejects shape mismatches") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 30; ++t) {
        std::vector<uint8_t> a(50), b(50);
        for (int i = 0; i < 50; ++i) {
            a[i] = rng() % 2;
            b[i] = rng() % 2;
        }
        CHECK(metrics::iou(a, b).value == doctest::Approx(metrics::iou(b, a).value));
    }
    CHECK_THROWS_AS(metrics::iou(std::vector<uint8_t>(3), std::vector<uint8_t>(4)),
                    DomainError);
}

TEST_CASE("iou matches brute-force enumeration on random masks") {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 50; ++t) {
        std::vector<uint8_t> a(100), b(100);
        for (int i = 0; i < 100; ++i) {
            a[i] = rng() % 2;
            b[i] = rng() % 2;
        }
        int64_t inter = 0, uni = 0;
        for (int i = 0; i < 100; ++i) {
            inter += a[i] && b[i];
            uni += a[i] || b[i];
        }
        const metrics::IouResult r = metrics::iou(a, b);
        if (uni == 0) {
            CHECK(r.both_empty);
        } else {
            CHECK(r.value == doctest::Approx(static_cast<double>(inter) / uni));
        }
    }
}

TEST_CASE("line error statistics on hand values") {
    const core::BoundaryLine target = line_of({10.0, 10.0, 10.0});
    const core::BoundaryLine predicted = line_of({11.0, 12.0, 13.0});
    const metrics::LineErrorStats s =
        metrics::line_error_stats(target, predicted, std::vector<uint8_t>(3, 0));
    CHECK(s.mae == doctest::Approx(2.0));
    CHECK(s.rmse == doctest::Approx(std::sqrt(14.0 / 3.0)));
    CHECK(s.n_pings == 3);
    CHECK(s.within_half == doctest::Approx(0.0));
    CHECK(s.within_two == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("identical lines give zero error and full within fractions") {
    const core::BoundaryLine l = line_of({3.0, 4.0, 5.0, 6.0});
    const metrics::LineErrorStats s =
        metrics::line_error_stats(l, l, std::vector<uint8_t>(4, 0));
    CHECK(s.mae == 0.0);
    CHECK(s.rmse == 0.0);
    CHECK(s.within_half == doctest::Approx(1.0));
    CHECK(s.within_one == doctest::Approx(1.0));
    CHECK(s.within_two == doctest::Approx(1.0));
}

TEST_CASE("excluded pings are dropped; excluding all is an error") {
    const core::BoundaryLine target = line_of({10.0, 10.0});
    const core::BoundaryLine predicted = line_of({10.0, 90.0});
    const metrics::LineErrorStats s =
        metrics::line_error_stats(target, predicted, {0, 1});
    CHECK(s.mae == doctest::Approx(0.0));
    CHECK(s.n_pings == 1);
    CHECK_THROWS_AS(metrics::line_error_stats(target, predicted, {1, 1}), DomainError);
}

TEST_CASE("rmse never falls below mae") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 20.0);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> td(10), pd(10);
        for (int i = 0; i < 10; ++i) {
            td[i] = dist(rng);
            pd[i] = dist(rng);
        }
        const metrics::LineErrorStats s = metrics::line_error_stats(
            line_of(td), line_of(pd), std::vector<uint8_t>(10, 0));
        CHECK(s.rmse >= s.mae - 1e-12);
        CHECK(s.within_half <= s.within_one + 1e-12);
        CHECK(s.within_one <= s.within_two + 1e-12);
    }
    // equality iff all errors equal
    const metrics::LineErrorStats eq = metrics::line_error_stats(
        line_of({1.0, 5.0}), line_of({3.0, 7.0}), std::vector<uint8_t>(2, 0));
    CHECK(eq.rmse == doctest::Approx(eq.mae));
}

TEST_CASE("error cdf steps and the area identity on hand cases") {
    const auto curve = metrics::error_cdf({1.0}, {0.5, 1.0, 1.5});
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].fraction == doctest::Approx(0.0));
    CHECK(curve[1].fraction == doctest::Approx(1.0));
    CHECK(curve[2].fraction == doctest::Approx(1.0));
    CHECK(metrics::area_above_cdf({1.0}) == doctest::Approx(1.0));
    CHECK(metrics::area_above_cdf({0.0, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(metrics::area_above_cdf({0.5, 1.5}) == doctest::Approx(1.0));
}

TEST_CASE("area above the cdf equals the mae on random vectors") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> dist(0.0, 5.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> errors(1 + rng() % 50);
        double mean = 0.0;
        for (auto& e : errors) mean += (e = dist(rng));
        mean /= errors.size();
        CHECK(metrics::area_above_cdf(errors) == doctest::Approx(mean).epsilon(1e-9));
    }
}

namespace {

metrics::FileStats file_from_counts(int64_t inter, int64_t uni, std::vector<double> errors,
                                    bool empty_target = false) {
    metrics::FileStats f;
    f.iou.intersection = inter;
    f.iou.union_ = uni;
    f.iou.value = uni ? static_cast<double>(inter) / uni : 1.0;
    f.iou.both_empty = uni == 0;
    f.target_empty = empty_target;
    f.line.n_pings = static_cast<int64_t>(errors.size());
    for (double e : errors) {
        f.line.sum_abs += e;
        f.line.sum_sq += e * e;
        f.line.abs_errors.push_back(e);
        f.line.within_half += e < 0.5;
        f.line.within_one += e < 1.0;
        f.line.within_two += e < 2.0;
    }
    if (!errors.empty()) {
        f.line.mae = f.line.sum_abs / errors.size();
        f.line.rmse = std::sqrt(f.line.sum_sq / errors.size());
        f.line.within_half /= errors.size();
        f.line.within_one /= errors.size();
        f.line.within_two /= errors.size();
    }
    return f;
}

}  // namespace

TEST_CASE("pooled and per-file aggregation differ exactly as the counts say") {
    // IoUs 3/4 and 1/4: both modes agree at 0.5
    std::vector<metrics::FileStats> even{file_from_counts(3, 4, {1.0}),
                                         file_from_counts(1, 4, {1.0})};
    CHECK(metrics::aggregate(even, metrics::AggregateMode::kPooled).iou ==
          doctest::Approx(0.5));
    CHECK(metrics::aggregate(even, metrics::AggregateMode::kPerFile).iou ==
          doctest::Approx(0.5));
    // IoUs 3/4 and 2/8: pooled 5/12, per-file mean 0.5
    std::vector<metrics::FileStats> skew{file_from_counts(3, 4, {1.0}),
                                         file_from_counts(2, 8, {1.0})};
    CHECK(metrics::aggregate(skew, metrics::AggregateMode::kPooled).iou ==
          doctest::Approx(5.0 / 12.0));
    CHECK(metrics::aggregate(skew, metrics::AggregateMode::kPerFile).iou ==
          doctest::Approx(0.5));
}

TEST_CASE("single-file aggregation agrees across modes") {
    std::vector<metrics::FileStats> one{file_from_counts(7, 10, {0.4, 1.2, 2.5})};
    const auto pooled = metrics::aggregate(one, metrics::AggregateMode::kPooled);
    const auto per_file = metrics::aggregate(one, metrics::AggregateMode::kPerFile);
    CHECK(pooled.iou == doctest::Approx(per_file.iou));
    CHECK(pooled.mae == doctest::Approx(per_file.mae));
    CHECK(pooled.rmse == doctest::Approx(per_file.rmse));
    CHECK(pooled.n_files == 1);
}

TEST_CASE("pooled mae pools pings; per-file averages files") {
    std::vector<metrics::FileStats> files{file_from_counts(1, 2, {1.0, 1.0, 1.0, 1.0}),
                                          file_from_counts(1, 2, {3.0})};
    const auto pooled = metrics::aggregate(files, metrics::AggregateMode::kPooled);
    CHECK(pooled.mae == doctest::Approx(7.0 / 5.0));
    const auto per_file = metrics::aggregate(files, metrics::AggregateMode::kPerFile);
    CHECK(per_file.mae == doctest::Approx(2.0));
    // pooled RMSE is the root of the pooled MSE
    CHECK(pooled.rmse == doctest::Approx(std::sqrt((4.0 + 9.0) / 5.0)));
}

TEST_CASE("empty-target files count in pooling but not in the SEM") {
    std::vector<metrics::FileStats> files{
        file_from_counts(3, 4, {1.0}), file_from_counts(1, 4, {2.0}),
        file_from_counts(0, 5, {0.5}, /*empty_target=*/true)};
    const auto rep = metrics::aggregate(files, metrics::AggregateMode::kPooled);
    CHECK(rep.iou == doctest::Approx(4.0 / 13.0));
    CHECK(rep.n_files == 3);
    CHECK(rep.n_files_sem == 2);
    REQUIRE(rep.iou_sem.has_value());
    // SEM over {0.75, 0.25}: sd = 0.3536, sem = 0.25
    CHECK(*rep.iou_sem == doctest::Approx(0.25).epsilon(1e-6));
    // fewer than two eligible files -> no SEM
    std::vector<metrics::FileStats> lone{file_from_counts(3, 4, {1.0})};
    CHECK_FALSE(metrics::aggregate(lone, metrics::AggregateMode::kPooled).iou_sem.has_value());
}

TEST_CASE("aggregation requires at least one file") {
    CHECK_THROWS_AS(metrics::aggregate({}, metrics::AggregateMode::kPooled), DomainError);
}

TEST_CASE("wilcoxon detects a consistent shift") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.1);
    std::vector<double> a(30), b(30);
    for (int i = 0; i < 30; ++i) {
        a[i] = 1.0 + noise(rng);
        b[i] = a[i] + 0.5 + noise(rng);
    }
    const metrics::WilcoxonResult r = metrics::wilcoxon_signed_rank(a, b);
    CHECK(r.p_value < 0.001);
    CHECK(r.n_effective == 30);
    CHECK(r.statistic >= 0.0);
}

TEST_CASE("wilcoxon finds nothing when comparing noise to itself") {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> a(40), b(40);
    for (int i = 0; i < 40; ++i) {
        a[i] = noise(rng);
        b[i] = a[i] + noise(rng);  // symmetric differences
    }
    const metrics::WilcoxonResult r = metrics::wilcoxon_signed_rank(a, b);
    CHECK(r.p_value > 0.01);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("wilcoxon drops zero differences and is symmetric in its arguments") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    std::vector<double> b{1.0, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5};
    const metrics::WilcoxonResult ab = metrics::wilcoxon_signed_rank(a, b);
    const metrics::WilcoxonResult ba = metrics::wilcoxon_signed_rank(b, a);
    CHECK(ab.n_effective == 7);  // one zero difference dropped
    CHECK(ab.p_value == doctest::Approx(ba.p_value));
    CHECK(ab.statistic == doctest::Approx(ba.statistic));
    CHECK_THROWS_AS(
        metrics::wilcoxon_signed_rank(std::vector<double>(3), std::vector<double>(4)),
        DomainError);
}
