#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "augment/augment.hpp"

using namespace echofilter;
using augment::View;

namespace {

View make_view(int n_pings, int n_bins, float value = -70.0f, double step = 0.25) {
    View v;
    v.n_pings = n_pings;
    v.n_bins = n_bins;
    v.depth0 = 0.0;
    v.depth_step = step;
    v.image.assign(static_cast<size_t>(n_pings) * n_bins, value);
    v.present.assign(v.image.size(), 1);
    for (auto& line : v.lines) {
        line.depths.assign(n_pings, 0.0);
        line.valid.assign(n_pings, 1);
    }
    const double depth_max = step * (n_bins - 1);
    for (int i = 0; i < n_pings; ++i) {
        v.lines[augment::kEntrained].depths[i] = 0.1 * depth_max;
        v.lines[augment::kEntrainedOriginal].depths[i] = 0.1 * depth_max;
        v.lines[augment::kSeafloor].depths[i] = 0.8 * depth_max;
        v.lines[augment::kSeafloorAggressive].depths[i] = 0.8 * depth_max;
        v.lines[augment::kSurface].depths[i] = 0.0;
    }
    v.surface_anomalous.assign(n_pings, 0);
    v.passive.assign(n_pings, 0);
    v.bad_period.assign(n_pings, 0);
    v.patch.assign(v.image.size(), 0);
    return v;
}

}  // namespace

TEST_CASE("normalization centres the median and scales by the decile range") {
    // deciles of 0..10 are 1 and 9, so idr/2.56 = 8/2.56 = 3.125
    std::vector<float> image;
    for (int i = 0; i <= 10; ++i) image.push_back(static_cast<float>(i));
    std::vector<uint8_t> present(image.size(), 1);
    augment::normalize_sv(image, present);
    CHECK(image[5] == doctest::Approx(0.0));
    CHECK(image[10] == doctest::Approx(5.0 / 3.125));
    CHECK(image[0] == doctest::Approx(-5.0 / 3.125));
}

TEST_CASE("normalization falls back to unit scale and fills missing cells") {
    std::vector<float> image{4.0f, 4.0f, 4.0f, 99.0f};
    std::vector<uint8_t> present{1, 1, 1, 0};
    augment::normalize_sv(image, present);
    CHECK(image[0] == doctest::Approx(0.0));  // idr 0 -> divide by 1
    CHECK(image[3] == doctest::Approx(-3.0));
}

TEST_CASE("normalization ignores missing cells when computing statistics") {
    std::vector<float> image{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 1000.0f};
    std::vector<uint8_t> present(12, 1);
    present[11] = 0;
    augment::normalize_sv(image, present);
    CHECK(image[5] == doctest::Approx(0.0));
    CHECK(image[10] == doctest::Approx(5.0 / 3.125));
}

TEST_CASE("brightness-then-contrast differs from contrast-then-brightness") {
    View a = make_view(4, 8, 1.0f);
    View b = make_view(4, 8, 1.0f);
    augment::color_jitter(a, 0.5, 1.3, true);
    augment::color_jitter(b, 0.5, 1.3, false);
    CHECK(a.image[0] == doctest::Approx(1.95));  // (1 + 0.5) * 1.3
    CHECK(b.image[0] == doctest::Approx(1.8));   // 1 * 1.3 + 0.5
}

TEST_CASE("time stretch by a factor of two keeps a linear line exact") {
    View v = make_view(16, 32);
    for (int i = 0; i < 16; ++i)
        v.lines[augment::kSeafloor].depths[i] = 2.0 + 0.2 * i;
    const View s = augment::stretch_time(v, 2.0);
    CHECK(s.n_pings == 32);
    CHECK(s.n_bins == v.n_bins);
    // endpoints preserved, interior linear
    CHECK(s.lines[augment::kSeafloor].depths.front() == doctest::Approx(2.0));
    CHECK(s.lines[augment::kSeafloor].depths.back() == doctest::Approx(2.0 + 0.2 * 15));
    for (int j = 1; j + 1 < 32; ++j) {
        const double pos = j * 15.0 / 31.0;
        CHECK(s.lines[augment::kSeafloor].depths[j] == doctest::Approx(2.0 + 0.2 * pos));
    }
}

TEST_CASE("unit stretch is the identity") {
    View v = make_view(16, 32);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<float> val(-3.0f, 3.0f);
    for (auto& x : v.image) x = val(rng);
    const View s = augment::stretch_time(v, 1.0);
    CHECK(s.n_pings == v.n_pings);
    CHECK(s.image == v.image);
    CHECK(s.lines[augment::kSeafloor].depths == v.lines[augment::kSeafloor].depths);
}

TEST_CASE("depth crop keeps bins inside the window and shifts the origin") {
    View v = make_view(8, 40);  // depths 0 .. 9.75
    for (int k = 0; k < 40; ++k)
        for (int i = 0; i < 8; ++i) v.image[static_cast<size_t>(i) * 40 + k] = static_cast<float>(k);
    const View c = augment::apply_depth_crop(v, 1.0, 5.0);
    CHECK(c.depth0 == doctest::Approx(1.0));
    CHECK(c.depth_step == doctest::Approx(0.25));
    CHECK(c.n_bins == 17);  // bins 4..20
    CHECK(c.image[0] == 4.0f);
    CHECK(c.image[16] == 20.0f);
    CHECK(c.n_pings == 8);
}

TEST_CASE("crop branch frequencies match 0.1 / 0.1 / 0.4 / 0.4") {
    View v = make_view(8, 64);
    augment::Rng rng(99);
    std::array<int, 4> counts{0, 0, 0, 0};
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        const augment::CropWindow w = augment::choose_depth_crop(v, rng);
        REQUIRE(w.branch >= 0);
        REQUIRE(w.branch <= 3);
        ++counts[w.branch];
        CHECK(w.lo < w.hi);
        CHECK(w.lo >= v.depth0 - 1e-9);
        CHECK(w.hi <= v.depth_max() + 1e-9);
    }
    CHECK(counts[0] / static_cast<double>(trials) == doctest::Approx(0.1).epsilon(0.25));
    CHECK(counts[1] / static_cast<double>(trials) == doctest::Approx(0.1).epsilon(0.25));
    CHECK(counts[2] / static_cast<double>(trials) == doctest::Approx(0.4).epsilon(0.15));
    CHECK(counts[3] / static_cast<double>(trials) == doctest::Approx(0.4).epsilon(0.15));
}

TEST_CASE("full-extent crop branch covers the whole column") {
    View v = make_view(8, 64);
    augment::Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const augment::CropWindow w = augment::choose_depth_crop(v, rng);
        if (w.branch != 0) continue;
        CHECK(w.lo == doctest::Approx(v.depth0));
        CHECK(w.hi == doctest::Approx(v.depth_max()));
    }
}

TEST_CASE("time reflection is an involution and flips ping targets") {
    View v = make_view(10, 16);
    for (int i = 0; i < 10; ++i) {
        v.lines[augment::kSeafloor].depths[i] = 1.0 + 0.1 * i;
        for (int k = 0; k < 16; ++k)
            v.image[static_cast<size_t>(i) * 16 + k] = static_cast<float>(i * 100 + k);
    }
    v.passive[2] = 1;
    const View r = augment::reflect_time(v);
    CHECK(r.image[0] == v.image[static_cast<size_t>(9) * 16]);
    CHECK(r.lines[augment::kSeafloor].depths[0] == doctest::Approx(1.9));
    CHECK(r.passive[7] == 1);
    CHECK(r.passive[2] == 0);
    const View rr = augment::reflect_time(r);
    CHECK(rr.image == v.image);
    CHECK(rr.passive == v.passive);
    CHECK(rr.lines[augment::kSeafloor].depths == v.lines[augment::kSeafloor].depths);
}

TEST_CASE("elastic deformation with zero magnitude is the identity") {
    View v = make_view(32, 64);
    std::mt19937_64 fill(4);
    std::uniform_real_distribution<float> val(-3.0f, 3.0f);
    for (auto& x : v.image) x = val(fill);
    augment::Rng rng(11);
    const View d = augment::elastic_deform(v, 8.0, 16.0, 0.0, 1, rng);
    CHECK(d.n_pings == v.n_pings);
    CHECK(d.n_bins == v.n_bins);
    for (size_t i = 0; i < v.image.size(); ++i)
        CHECK(d.image[i] == doctest::Approx(v.image[i]).epsilon(1e-5));
    for (int i = 0; i < v.n_pings; ++i)
        CHECK(d.lines[augment::kSeafloor].depths[i] ==
              doctest::Approx(v.lines[augment::kSeafloor].depths[i]).epsilon(1e-6));
}

TEST_CASE("elastic deformation keeps lines consistent with the warped image") {
    // paint the seafloor row bright; after warping, the line should still sit
    // on the bright ridge
    View v = make_view(64, 128);
    const int floor_bin = 90;
    const double floor_depth = floor_bin * v.depth_step;
    for (int i = 0; i < 64; ++i) {
        v.lines[augment::kSeafloor].depths[i] = floor_depth;
        v.image[static_cast<size_t>(i) * 128 + floor_bin] = 50.0f;
    }
    augment::Rng rng(21);
    const View d = augment::elastic_deform(v, 8.0, 16.0, 0.05, 1, rng);
    int checked = 0;
    for (int i = 4; i < 60; ++i) {
        if (!d.lines[augment::kSeafloor].valid[i]) continue;
        // find the brightest bin of this ping
        int best = 0;
        for (int k = 1; k < 128; ++k)
            if (d.image[static_cast<size_t>(i) * 128 + k] >
                d.image[static_cast<size_t>(i) * 128 + best])
                best = k;
        const double line_bin = (d.lines[augment::kSeafloor].depths[i] - d.depth0) / d.depth_step;
        CHECK(std::abs(line_bin - best) <= 2.0);
        ++checked;
    }
    CHECK(checked > 40);
}

TEST_CASE("finalize maps a mid-column line to bin 256 of 512") {
    View v = make_view(16, 100);
    const double mid = v.depth0 + 0.5 * (v.depth_step * (v.n_bins - 1));
    for (int i = 0; i < 16; ++i) v.lines[augment::kSeafloor].depths[i] = mid;
    const augment::TrainingView tv = augment::finalize_view(v, 128, 512);
    CHECK(tv.n_pings == 128);
    CHECK(tv.n_bins == 512);
    for (int i = 0; i < 128; ++i) CHECK(tv.line_bins[augment::kSeafloor][i] == 256);
}

TEST_CASE("finalize clamps lines at the column edges and keeps invalid pings") {
    View v = make_view(16, 100);
    for (int i = 0; i < 16; ++i) {
        v.lines[augment::kSeafloor].depths[i] = v.depth_max() + 5.0;
        v.lines[augment::kEntrained].valid[i] = 0;
    }
    const augment::TrainingView tv = augment::finalize_view(v, 128, 512);
    for (int i = 0; i < 128; ++i) {
        CHECK(tv.line_bins[augment::kSeafloor][i] == 511);
        CHECK(tv.line_bins[augment::kEntrained][i] == -1);
    }
}

TEST_CASE("finalize uses nearest-neighbour resampling of the image") {
    View v = make_view(4, 8);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 8; ++k)
            v.image[static_cast<size_t>(i) * 8 + k] = static_cast<float>(i * 10 + k);
    const augment::TrainingView tv = augment::finalize_view(v, 8, 16);
    // output ping 0 samples input ping floor(0.5*4/8)=0; output bin 3 samples
    // input bin floor(3.5*8/16)=1
    CHECK(tv.image[3] == 1.0f);
    CHECK(tv.image[static_cast<size_t>(7) * 16 + 15] == 37.0f);
}

TEST_CASE("interpolation orders agree on linear data and clamp at the edges") {
    const float data[5] = {0.0f, 1.0f, 2.0f, 3.0f, 4.0f};
    for (int order = 1; order <= 3; ++order) {
        CHECK(augment::interp1(data, 5, 2.5, order) == doctest::Approx(2.5));
        CHECK(augment::interp1(data, 5, -1.0, order) == doctest::Approx(0.0));
        CHECK(augment::interp1(data, 5, 9.0, order) == doctest::Approx(4.0));
    }
    // quadratic reproduces a parabola exactly
    const float sq[5] = {0.0f, 1.0f, 4.0f, 9.0f, 16.0f};
    CHECK(augment::interp1(sq, 5, 1.5, 2) == doctest::Approx(2.25));
    CHECK(augment::interp1(sq, 5, 2.5, 3) == doctest::Approx(6.25));
}

TEST_CASE("building a view twice with one seed replays bit-exactly") {
    View v = make_view(96, 200);
    std::mt19937_64 fill(8);
    std::uniform_real_distribution<float> val(-100.0f, -40.0f);
    for (auto& x : v.image) x = val(fill);
    v.passive[10] = v.passive[11] = 1;
    for (uint64_t seed : {1ull, 77ull, 123456789ull}) {
        augment::AugmentDraw draw_a, draw_b;
        const augment::TrainingView a = augment::build_training_view(v, seed, true, 128, 512, &draw_a);
        const augment::TrainingView b = augment::build_training_view(v, seed, true, 128, 512, &draw_b);
        CHECK(a.image == b.image);
        CHECK(a.passive == b.passive);
        CHECK(draw_a.stretch_factor == draw_b.stretch_factor);
        CHECK(draw_a.crop_branch == draw_b.crop_branch);
        for (int s = 0; s < augment::kNumLines; ++s) CHECK(a.line_bins[s] == b.line_bins[s]);
        CHECK(a.seed == seed);
        CHECK(a.augmented);
    }
}

TEST_CASE("different seeds give different augmented views") {
    View v = make_view(96, 200);
    std::mt19937_64 fill(9);
    std::uniform_real_distribution<float> val(-100.0f, -40.0f);
    for (auto& x : v.image) x = val(fill);
    const augment::TrainingView a = augment::build_training_view(v, 1, true);
    const augment::TrainingView b = augment::build_training_view(v, 2, true);
    CHECK(a.image != b.image);
}

TEST_CASE("without augmentation only normalization and rescale happen") {
    View v = make_view(96, 200);
    std::mt19937_64 fill(10);
    std::uniform_real_distribution<float> val(-100.0f, -40.0f);
    for (auto& x : v.image) x = val(fill);
    const augment::TrainingView a = augment::build_training_view(v, 1, false);
    const augment::TrainingView b = augment::build_training_view(v, 999, false);
    CHECK(a.image == b.image);
    CHECK_FALSE(a.augmented);
    // reference: normalize a copy, then finalize
    View ref = v;
    augment::normalize_sv(ref.image, ref.present);
    const augment::TrainingView c = augment::finalize_view(ref, 128, 512);
    CHECK(a.image == c.image);
}

TEST_CASE("stretch factors stay within the sampled range") {
    View v = make_view(96, 200);
    for (uint64_t seed = 0; seed < 40; ++seed) {
        augment::AugmentDraw draw;
        augment::build_training_view(v, seed, true, 128, 512, &draw);
        CHECK(draw.stretch_factor >= 0.5 - 1e-9);
        CHECK(draw.stretch_factor <= 2.0 + 1e-9);
        CHECK(draw.jitter_gain >= 0.7 - 1e-9);
        CHECK(draw.jitter_gain <= 1.3 + 1e-9);
        CHECK(std::abs(draw.jitter_offset) <= 0.5 + 1e-9);
    }
}
