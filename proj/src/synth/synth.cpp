#include "synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "formats/evl.hpp"
#include "formats/evr.hpp"
#include "formats/sv_csv.hpp"
#include "support/errors.hpp"
#include "support/timeutil.hpp"

namespace echofilter::synth {

namespace {

void validate(const SynthConfig& cfg) {
    if (cfg.n_pings < 2) throw DomainError("synth needs at least 2 pings");
    if (cfg.depth_step <= 0.0 || cfg.depth_max <= cfg.depth_step)
        throw DomainError("invalid depth grid");
    const double peak = cfg.air_base + cfg.air_amplitude;
    if (cfg.air_base <= 0.0 || peak >= 0.9)
        throw DomainError("air penetration fraction must stay in (0, 0.9)");
    if (cfg.passive_every > 0 && cfg.passive_attenuation_db <= 25.0)
        throw DomainError("passive attenuation must exceed the 25 dB detection threshold");
    if (cfg.extra_range_fraction < 0.0 || cfg.extra_range_fraction >= 0.8)
        throw DomainError("extra range fraction out of range");
    if (cfg.tide_period <= 0.0) throw DomainError("tide period must be positive");
}

std::vector<double> smoothed_noise(int n, double sigma_out, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> noise(n);
    for (auto& x : noise) x = gauss(rng);
    const double sigma_t = 6.0;  // smoothing span, pings
    const int radius = 18;
    std::vector<double> kernel(2 * radius + 1);
    double mass = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma_t * sigma_t));
        mass += kernel[i + radius];
    }
    for (auto& k : kernel) k /= mass;
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int r = -radius; r <= radius; ++r)
            out[i] += kernel[r + radius] * noise[std::clamp(i + r, 0, n - 1)];
    // renormalize so the requested sigma survives the smoothing
    double var = 0.0, mean = 0.0;
    for (double v : out) mean += v;
    mean /= n;
    for (double v : out) var += (v - mean) * (v - mean);
    var /= n;
    const double scale = var > 1e-12 ? sigma_out / std::sqrt(var) : 0.0;
    for (auto& v : out) v = (v - mean) * scale;
    return out;
}

}  // namespace

SynthRecording generate_recording(const SynthConfig& cfg) {
    validate(cfg);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = cfg.n_pings;
    const int nd = static_cast<int>(std::lround(cfg.depth_max / cfg.depth_step)) + 1;
    const bool down = cfg.orientation == core::Orientation::kDownfacing;

    SynthRecording rec;
    core::Echogram& raw = rec.raw;
    raw.orientation = cfg.orientation;
    raw.timestamps.resize(n);
    for (int i = 0; i < n; ++i) raw.timestamps[i] = cfg.start_timestamp + i * cfg.ping_interval;
    raw.depths.resize(nd);
    for (int k = 0; k < nd; ++k) raw.depths[k] = k * cfg.depth_step;
    raw.sv.assign(static_cast<size_t>(n) * nd, 0.0f);
    raw.present.assign(static_cast<size_t>(n) * nd, 1);

    // empty range: shallow for upfacing, deep for downfacing
    const double extra = cfg.extra_range_fraction * cfg.depth_max;
    const int k_off = down ? 0 : static_cast<int>(std::lround(extra / cfg.depth_step));
    const int k_end = down ? nd - static_cast<int>(std::lround(extra / cfg.depth_step)) : nd;

    // boundary and seafloor bins per ping
    const auto noise = smoothed_noise(n, cfg.boundary_noise_sigma, rng);
    std::vector<int> kb(n), kf(n);
    const double usable_top = k_off * cfg.depth_step;
    for (int i = 0; i < n; ++i) {
        double floor_frac = cfg.seafloor_fraction +
                            cfg.seafloor_ramp * (static_cast<double>(i) / (n - 1) - 0.5);
        const double usable_bottom = down ? (k_end - 1) * cfg.depth_step : cfg.depth_max;
        const double floor_depth = down ? usable_top + floor_frac * (usable_bottom - usable_top)
                                        : usable_bottom;
        kf[i] = down ? std::clamp(static_cast<int>(std::lround(floor_depth / cfg.depth_step)),
                                  k_off + 4, k_end - 1)
                     : nd;
        const double t = raw.timestamps[i] - cfg.start_timestamp;
        const double frac =
            cfg.air_base +
            cfg.air_amplitude * std::abs(std::sin(2.0 * M_PI * t / cfg.tide_period));
        const double column = kf[i] * cfg.depth_step - usable_top;
        double b = usable_top + frac * column + noise[i];
        kb[i] = std::clamp(static_cast<int>(std::lround(b / cfg.depth_step)), k_off + 1,
                           kf[i] - 2);
    }

    // Sv field: porous loud air, quiet water, seafloor, missing extra range
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < nd; ++k) {
            const size_t idx = static_cast<size_t>(i) * nd + k;
            double v;
            if (k < k_off || k >= k_end) {
                raw.present[idx] = 0;
                continue;
            }
            if (k < kb[i]) {
                const double toward = kb[i] > k_off
                                          ? static_cast<double>(k - k_off) / (kb[i] - k_off)
                                          : 1.0;
                if (unit(rng) < cfg.porosity * toward * toward)
                    v = cfg.water_db + cfg.water_sigma_db * gauss(rng);
                else
                    v = cfg.air_mean_db + cfg.air_sigma_db * gauss(rng);
            } else if (down && k >= kf[i]) {
                v = cfg.seafloor_db + 2.0 * gauss(rng);
            } else {
                v = cfg.water_db + cfg.water_sigma_db * gauss(rng);
            }
            raw.sv[idx] = static_cast<float>(v);
        }
    }
    // sparse fish blobs in the water column
    for (int i = 0; i < n; ++i) {
        for (int k = kb[i]; k < (down ? kf[i] : k_end); ++k) {
            if (unit(rng) >= cfg.fish_rate) continue;
            for (int di = -2; di <= 2; ++di) {
                for (int dk = -2; dk <= 2; ++dk) {
                    const int fi = i + di, fk = k + dk;
                    if (fi < 0 || fi >= n || fk < kb[fi] || fk >= (down ? kf[fi] : k_end))
                        continue;
                    const double bump = 30.0 * std::exp(-0.5 * (di * di + dk * dk) / 1.5);
                    raw.sv[static_cast<size_t>(fi) * nd + fk] += static_cast<float>(bump);
                }
            }
        }
    }

    // schedules: passive bursts and bad periods, kept >= 3 pings apart
    std::vector<uint8_t> passive_flag(n, 0), bad_flag(n, 0);
    std::vector<core::PingInterval> passive_iv, bad_iv;
    if (cfg.passive_every > 0) {
        for (int s = cfg.passive_every; s + cfg.passive_length + 1 < n;
             s += 2 * cfg.passive_every) {
            passive_iv.push_back({s, s + cfg.passive_length - 1});
            for (int i = s; i < s + cfg.passive_length; ++i) passive_flag[i] = 1;
        }
    }
    if (cfg.bad_period_every > 0) {
        for (int s = cfg.bad_period_every + cfg.bad_period_every / 2;
             s + cfg.bad_period_length + 1 < n; s += 2 * cfg.bad_period_every) {
            bool clash = false;
            for (int i = std::max(0, s - 3);
                 i < std::min(n, s + cfg.bad_period_length + 3) && !clash; ++i)
                clash = passive_flag[i] != 0;
            if (clash) continue;
            bad_iv.push_back({s, s + cfg.bad_period_length - 1});
            for (int i = s; i < s + cfg.bad_period_length; ++i) bad_flag[i] = 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (passive_flag[i]) {
            for (int k = 0; k < nd; ++k)
                raw.sv[static_cast<size_t>(i) * nd + k] -=
                    static_cast<float>(cfg.passive_attenuation_db);
        }
        if (bad_flag[i]) {
            for (int k = 0; k < nd; ++k)
                raw.present[static_cast<size_t>(i) * nd + k] = 0;
        }
    }

    // patch blobs strictly inside the analyzable region of normal pings
    std::vector<uint8_t> patch(static_cast<size_t>(n) * nd, 0);
    int kb_max = 0, kf_min = nd;
    for (int i = 0; i < n; ++i) {
        kb_max = std::max(kb_max, kb[i]);
        kf_min = std::min(kf_min, down ? kf[i] : k_end);
    }
    for (int p = 0; p < cfg.n_patches; ++p) {
        for (int attempt = 0; attempt < 50; ++attempt) {
            const int pi = static_cast<int>(unit(rng) * (n - cfg.patch_size));
            const int lo_k = kb_max + 2;
            const int hi_k = kf_min - 2 - cfg.patch_size;
            if (hi_k <= lo_k) break;
            const int pk = lo_k + static_cast<int>(unit(rng) * (hi_k - lo_k));
            bool clash = false;
            for (int i = pi; i < pi + cfg.patch_size && !clash; ++i)
                clash = passive_flag[i] || bad_flag[i];
            if (clash) continue;
            for (int i = pi; i < pi + cfg.patch_size; ++i) {
                for (int k = pk; k < pk + cfg.patch_size; ++k) {
                    patch[static_cast<size_t>(i) * nd + k] = 1;
                    raw.present[static_cast<size_t>(i) * nd + k] = 0;
                }
            }
            break;
        }
    }

    // ground-truth lines
    core::SegmentationTargets& tg = rec.targets;
    auto make_line = [&](auto depth_of, bool valid) {
        core::BoundaryLine l;
        l.depths.resize(n);
        l.valid.assign(n, valid ? 1 : 0);
        for (int i = 0; i < n; ++i) l.depths[i] = depth_of(i);
        return l;
    };
    tg.entrained_air = make_line([&](int i) { return kb[i] * cfg.depth_step; }, true);
    tg.entrained_air_original = tg.entrained_air;
    if (down) {
        tg.seafloor = make_line([&](int i) { return kf[i] * cfg.depth_step; }, true);
        tg.surface = make_line([](int) { return 0.0; }, true);
    } else {
        tg.seafloor = make_line([](int) { return 0.0; }, false);
        tg.surface = make_line([&](int) { return k_off * cfg.depth_step; }, true);
    }
    tg.seafloor_aggressive = tg.seafloor;
    tg.surface_anomalous.assign(n, 0);
    tg.passive_periods = passive_iv;
    tg.bad_periods = bad_iv;
    tg.patch_mask = patch;

    // good mask and the clean (masked) echogram
    tg.good_mask.assign(static_cast<size_t>(n) * nd, 0);
    for (int i = 0; i < n; ++i) {
        if (passive_flag[i] || bad_flag[i]) continue;
        for (int k = kb[i]; k < (down ? kf[i] : k_end); ++k) {
            const size_t idx = static_cast<size_t>(i) * nd + k;
            if (!patch[idx]) tg.good_mask[idx] = 1;
        }
    }
    rec.clean = raw;
    rec.clean.present = tg.good_mask;

    rec.lines.entrained_air = tg.entrained_air;
    rec.lines.seafloor = tg.seafloor;
    rec.lines.surface = tg.surface;
    return rec;
}

std::string write_recording(const SynthRecording& rec, const std::string& dir,
                            const std::string& base) {
    const std::string stem = dir + "/" + base;
    const core::Echogram& raw = rec.raw;
    const int n = raw.n_pings(), nd = raw.n_depths();

    auto to_csv = [&](const core::Echogram& eg) {
        formats::SvCsvRecording csv;
        csv.pings.resize(n);
        for (int i = 0; i < n; ++i) {
            auto& p = csv.pings[i];
            p.ping_index = i;
            p.datetime = epoch_to_civil(eg.timestamps[i]);
            p.range_start = eg.depths.front();
            p.range_stop = eg.depths.back();
            p.samples.resize(nd);
            p.present.resize(nd);
            for (int k = 0; k < nd; ++k) {
                p.samples[k] = eg.at(i, k);
                p.present[k] = eg.present_at(i, k);
            }
        }
        return csv;
    };
    formats::write_sv_csv(to_csv(raw), stem + "_raw.csv");
    formats::write_sv_csv(to_csv(rec.clean), stem + "_clean.csv");

    auto to_evl = [&](const core::BoundaryLine& line) {
        formats::LineFile f;
        for (int i = 0; i < n; ++i) {
            if (!line.valid.empty() && !line.valid[i]) continue;
            f.points.push_back({raw.timestamps[i], line.depths[i],
                                formats::LineStatus::kGood});
        }
        return f;
    };
    formats::write_evl(to_evl(rec.lines.entrained_air), stem + "_entrained.evl");
    if (!rec.lines.seafloor.valid.empty() && rec.lines.seafloor.valid[0])
        formats::write_evl(to_evl(rec.lines.seafloor), stem + "_seafloor.evl");
    formats::write_evl(to_evl(rec.lines.surface), stem + "_surface.evl");

    formats::RegionFile regions;
    int next_id = 1;
    auto add_periods = [&](const std::vector<core::PingInterval>& ivs,
                           formats::RegionClass cls) {
        for (const auto& iv : ivs) {
            formats::Region r;
            r.id = next_id++;
            r.classification = cls;
            r.start_time = raw.timestamps[iv.first];
            r.end_time = raw.timestamps[iv.last];
            r.depth_min = raw.depths.front();
            r.depth_max = raw.depths.back();
            regions.regions.push_back(r);
        }
    };
    add_periods(rec.targets.passive_periods, formats::RegionClass::kPassive);
    add_periods(rec.targets.bad_periods, formats::RegionClass::kBadPeriod);
    if (!regions.regions.empty()) formats::write_evr(regions, stem + ".evr");
    return stem;
}

}  // namespace echofilter::synth
