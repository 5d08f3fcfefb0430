#include "echofilter.h"

#include <cstring>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <sstream>

#include "augment/augment.hpp"
#include "baseline/baseline.hpp"
#include "core/preprocess.hpp"
#include "core/targets.hpp"
#include "formats/evl.hpp"
#include "formats/evr.hpp"
#include "formats/shards.hpp"
#include "formats/sv_csv.hpp"
#include "infer/inference.hpp"
#include "metrics/metrics.hpp"
#include "nn/checkpoint.hpp"
#include "plot/plot.hpp"
#include "support/errors.hpp"
#include "synth/synth.hpp"
#include "train/trainer.hpp"

#include "json.hpp"

using json = nlohmann::json;
using namespace echofilter;

namespace {

thread_local std::string g_last_error = "no error";

ef_status fail(ef_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

template <typename Fn>
ef_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        return fail(EF_ERR_INVALID_ARG, std::string("bad options: ") + e.what());
    } catch (const std::invalid_argument& e) {
        return fail(EF_ERR_INVALID_ARG, e.what());
    } catch (const ParseError& e) {
        return fail(EF_ERR_PARSE, e.what());
    } catch (const StructuralError& e) {
        return fail(EF_ERR_STRUCTURE, e.what());
    } catch (const DomainError& e) {
        return fail(EF_ERR_DOMAIN, e.what());
    } catch (const IoError& e) {
        return fail(EF_ERR_IO, e.what());
    } catch (const std::exception& e) {
        return fail(EF_ERR_INTERNAL, e.what());
    }
}

json parse_options(const char* options_json) {
    if (!options_json) throw std::invalid_argument("options must not be null");
    return json::parse(options_json);
}

core::Orientation orientation_of(const json& opt) {
    return opt.value("upfacing", false) ? core::Orientation::kUpfacing
                                        : core::Orientation::kDownfacing;
}

core::Echogram load_standardized(const std::string& csv_path, core::Orientation orientation) {
    const formats::SvCsvRecording rec = formats::read_sv_csv(csv_path);
    core::Echogram eg = core::regrid_depth(rec, orientation);
    return core::standardize_orientation(eg);
}

formats::LineFile line_to_evl(const core::BoundaryLine& line,
                              const std::vector<double>& timestamps) {
    formats::LineFile f;
    for (size_t i = 0; i < line.depths.size() && i < timestamps.size(); ++i) {
        if (!line.valid.empty() && !line.valid[i]) continue;
        f.points.push_back({timestamps[i], line.depths[i], formats::LineStatus::kGood});
    }
    return f;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* ef_last_error(void) { return g_last_error.c_str(); }

const char* ef_version(void) { return "1.0.0"; }

void ef_string_free(char* s) { std::free(s); }

ef_status ef_generate_shards(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);
        const core::Orientation orientation = orientation_of(opt);
        const core::Echogram raw = load_standardized(opt.at("raw_csv"), orientation);
        const core::Echogram clean = load_standardized(opt.at("clean_csv"), orientation);

        core::LineInputs lines;
        lines.entrained_air =
            core::line_on_timestamps(formats::read_evl(opt.at("entrained_evl")), raw.timestamps);
        if (opt.contains("seafloor_evl"))
            lines.seafloor = core::line_on_timestamps(formats::read_evl(opt.at("seafloor_evl")),
                                                      raw.timestamps);
        else
            lines.seafloor = core::BoundaryLine{
                std::vector<double>(raw.n_pings(), 0.0),
                std::vector<uint8_t>(raw.n_pings(), 0)};
        if (opt.contains("surface_evl"))
            lines.surface = core::line_on_timestamps(formats::read_evl(opt.at("surface_evl")),
                                                     raw.timestamps);
        else
            lines.surface = core::BoundaryLine{
                std::vector<double>(raw.n_pings(), raw.depths.front()),
                std::vector<uint8_t>(raw.n_pings(), 1)};

        const core::SegmentationTargets targets = core::build_targets(raw, clean, lines);
        const std::string dir = opt.at("output_dir");
        std::filesystem::create_directories(dir);
        const std::string recording_id =
            opt.value("recording_id",
                      std::filesystem::path(std::string(opt.at("raw_csv"))).stem().string());
        formats::write_shards(raw, targets, recording_id, dir);
        return EF_OK;
    });
}

ef_status ef_train(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);

        nn::ModelConfig mc;
        mc.width = opt.value("width", 32);
        mc.n_blocks = opt.value("n_blocks", 6);
        mc.groups = opt.value("groups", 1);
        mc.input_w = opt.value("input_w", 128);
        mc.input_h = opt.value("input_h", 512);

        train::TrainConfig tc;
        tc.batch_size = opt.value("batch_size", 12);
        tc.epochs = opt.value("epochs", 100);
        tc.cycles = opt.value("cycles", 1);
        tc.schedule.max_lr = opt.value("max_lr", 0.012);
        tc.augment = opt.value("augment", true);
        tc.input_w = mc.input_w;
        tc.input_h = mc.input_h;
        tc.checkpoint_dir = opt.at("output_dir");

        const uint64_t seed = opt.value("seed", 0ull);

        std::vector<train::TrainDataset> datasets;
        const auto dirs = opt.at("shard_dirs");
        std::vector<int> upsample(dirs.size(), 1);
        if (opt.contains("upsample"))
            upsample = opt.at("upsample").get<std::vector<int>>();
        if (upsample.size() != dirs.size())
            throw DomainError("upsample list must match shard_dirs");
        for (size_t d = 0; d < dirs.size(); ++d) {
            train::TrainDataset ds;
            ds.name = dirs[d];
            ds.upsample = upsample[d];
            const formats::ShardManifest manifest = formats::read_manifest(dirs[d]);
            for (int s = 0; s < manifest.n_shards; ++s)
                ds.views.push_back(
                    augment::view_from_shard(formats::read_shard(dirs[d], s)));
            datasets.push_back(std::move(ds));
        }

        nn::UNet model(mc, seed);
        std::ofstream log;
        const std::string log_path =
            opt.value("log_path", tc.checkpoint_dir + "/train.log");
        std::filesystem::create_directories(tc.checkpoint_dir);
        log.open(log_path);
        if (!log) throw IoError("cannot write " + log_path);
        train::train(model, datasets, tc, seed, &log);
        return EF_OK;
    });
}

ef_status ef_infer(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);
        const std::string csv = opt.at("csv");
        const core::Orientation orientation = orientation_of(opt);
        const core::Echogram eg = load_standardized(csv, orientation);

        nn::UNet model = nn::load_checkpoint(opt.at("checkpoint"));

        infer::InferenceConfig cfg;
        cfg.autozoom_threshold = opt.value("autozoom_threshold", 0.35);
        cfg.line_offset = opt.value("offset", 1.0);
        cfg.logit_smoothing_sigma = opt.value("logit_smoothing", 0.0);
        cfg.postprocess.drop_all_bad = opt.value("drop_bad", false);

        infer::AnnotationResult result = infer::infer_recording(model, eg, cfg);

        const std::string stem =
            opt.value("output_stem",
                      (std::filesystem::path(csv).parent_path() /
                       std::filesystem::path(csv).stem())
                          .string());
        formats::write_evl(line_to_evl(result.entrained_air_offset, eg.timestamps),
                           stem + "_entrained.evl");
        if (orientation == core::Orientation::kDownfacing)
            formats::write_evl(line_to_evl(result.seafloor_offset, eg.timestamps),
                               stem + "_seafloor.evl");
        else
            formats::write_evl(line_to_evl(result.surface_offset, eg.timestamps),
                               stem + "_surface.evl");

        formats::RegionFile regions;
        int next_id = 1;
        auto add = [&](const std::vector<core::PingInterval>& ivs, formats::RegionClass cls) {
            for (const auto& iv : ivs) {
                formats::Region r;
                r.id = next_id++;
                r.classification = cls;
                r.start_time = eg.timestamps[iv.first];
                r.end_time = eg.timestamps[iv.last];
                r.depth_min = eg.depths.front();
                r.depth_max = eg.depths.back();
                regions.regions.push_back(r);
            }
        };
        add(result.regions.passive, formats::RegionClass::kPassive);
        add(result.regions.bad_periods, formats::RegionClass::kBadPeriod);
        for (const auto& p : result.regions.patches) {
            formats::Region r;
            r.id = next_id++;
            r.classification = formats::RegionClass::kBadPatch;
            r.start_time = eg.timestamps[p.ping_lo];
            r.end_time = eg.timestamps[p.ping_hi];
            r.depth_min = p.depth_lo;
            r.depth_max = p.depth_hi;
            regions.regions.push_back(r);
        }
        if (!regions.regions.empty()) formats::write_evr(regions, stem + ".evr");
        return EF_OK;
    });
}

ef_status ef_baseline(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);
        const std::string csv = opt.at("csv");
        const core::Orientation orientation = orientation_of(opt);
        const core::Echogram eg = load_standardized(csv, orientation);
        const baseline::BaselineLines lines = baseline::baseline_annotate(eg);
        const std::string stem =
            opt.value("output_stem",
                      (std::filesystem::path(csv).parent_path() /
                       std::filesystem::path(csv).stem())
                          .string() +
                          "_baseline");
        formats::write_evl(line_to_evl(lines.entrained_air, eg.timestamps),
                           stem + "_entrained.evl");
        if (orientation == core::Orientation::kDownfacing)
            formats::write_evl(line_to_evl(lines.seafloor, eg.timestamps),
                               stem + "_seafloor.evl");
        else
            formats::write_evl(line_to_evl(lines.surface, eg.timestamps),
                               stem + "_surface.evl");
        return EF_OK;
    });
}

ef_status ef_evaluate(const char* options_json, char** report_out) {
    return guarded([&]() -> ef_status {
        if (!report_out) throw std::invalid_argument("report_out must not be null");
        const json opt = parse_options(options_json);
        const metrics::AggregateMode mode = opt.value("mode", std::string("pooled")) ==
                                                    "per-file"
                                                ? metrics::AggregateMode::kPerFile
                                                : metrics::AggregateMode::kPooled;
        std::vector<metrics::FileStats> stats;
        for (const auto& f : opt.at("files")) {
            const core::Orientation orientation =
                f.value("upfacing", false) ? core::Orientation::kUpfacing
                                           : core::Orientation::kDownfacing;
            const core::Echogram eg = load_standardized(f.at("csv"), orientation);
            const core::BoundaryLine target = core::line_on_timestamps(
                formats::read_evl(f.at("target_evl")), eg.timestamps);
            const core::BoundaryLine predicted = core::line_on_timestamps(
                formats::read_evl(f.at("predicted_evl")), eg.timestamps);

            metrics::FileStats fs;
            fs.line = metrics::line_error_stats(target, predicted, {});
            // mask comparison: analyzable region below each entrained-air line
            auto mask_of = [&](const core::BoundaryLine& line) {
                std::vector<uint8_t> m(static_cast<size_t>(eg.n_pings()) * eg.n_depths(), 0);
                for (int i = 0; i < eg.n_pings(); ++i) {
                    if (!line.valid.empty() && !line.valid[i]) continue;
                    const int kb = core::depth_to_bin(eg, line.depths[i]);
                    for (int k = kb; k < eg.n_depths(); ++k)
                        m[static_cast<size_t>(i) * eg.n_depths() + k] = 1;
                }
                return m;
            };
            const auto target_mask = mask_of(target);
            fs.iou = metrics::iou(target_mask, mask_of(predicted));
            fs.target_empty =
                std::all_of(target_mask.begin(), target_mask.end(),
                            [](uint8_t v) { return v == 0; });
            stats.push_back(std::move(fs));
        }
        const metrics::MetricsReport rep = metrics::aggregate(stats, mode);
        std::ostringstream out;
        out << std::fixed << std::setprecision(4);
        out << "files\t" << rep.n_files << "\n";
        out << "mode\t"
            << (rep.mode == metrics::AggregateMode::kPooled ? "pooled" : "per-file") << "\n";
        auto emit = [&](const char* name, double v, const std::optional<double>& sem) {
            out << name << "\t" << v;
            if (sem) out << "\t+/-\t" << *sem;
            out << "\n";
        };
        emit("iou", rep.iou, rep.iou_sem);
        emit("mae_m", rep.mae, rep.mae_sem);
        emit("rmse_m", rep.rmse, rep.rmse_sem);
        emit("within_0.5m", rep.within_half, std::nullopt);
        emit("within_1.0m", rep.within_one, std::nullopt);
        emit("within_2.0m", rep.within_two, std::nullopt);
        *report_out = dup_string(out.str());
        return EF_OK;
    });
}

ef_status ef_synth(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);
        synth::SynthConfig cfg;
        std::string dir, base = "synth";
        for (const auto& [key, value] : opt.items()) {
            if (key == "dir") dir = value;
            else if (key == "base") base = value;
            else if (key == "seed") cfg.seed = value;
            else if (key == "upfacing")
                cfg.orientation = value.get<bool>() ? core::Orientation::kUpfacing
                                                    : core::Orientation::kDownfacing;
            else if (key == "n_pings") cfg.n_pings = value;
            else if (key == "depth_max") cfg.depth_max = value;
            else if (key == "depth_step") cfg.depth_step = value;
            else if (key == "tide_period") cfg.tide_period = value;
            else if (key == "air_base") cfg.air_base = value;
            else if (key == "air_amplitude") cfg.air_amplitude = value;
            else if (key == "boundary_noise_sigma") cfg.boundary_noise_sigma = value;
            else if (key == "passive_attenuation_db") cfg.passive_attenuation_db = value;
            else if (key == "passive_every") cfg.passive_every = value;
            else if (key == "passive_length") cfg.passive_length = value;
            else if (key == "bad_period_every") cfg.bad_period_every = value;
            else if (key == "bad_period_length") cfg.bad_period_length = value;
            else if (key == "n_patches") cfg.n_patches = value;
            else if (key == "patch_size") cfg.patch_size = value;
            else if (key == "extra_range_fraction") cfg.extra_range_fraction = value;
            else if (key == "seafloor_fraction") cfg.seafloor_fraction = value;
            else throw DomainError("unknown synth option: " + key);
        }
        if (dir.empty()) throw DomainError("synth options need \"dir\"");
        std::filesystem::create_directories(dir);
        const synth::SynthRecording rec = synth::generate_recording(cfg);
        synth::write_recording(rec, dir, base);
        return EF_OK;
    });
}

ef_status ef_plot(const char* options_json) {
    return guarded([&]() -> ef_status {
        const json opt = parse_options(options_json);
        const std::string mode = opt.at("mode");
        const std::string output = opt.at("output");
        if (mode == "echogram") {
            const core::Orientation orientation = orientation_of(opt);
            const core::Echogram eg = load_standardized(opt.at("csv"), orientation);
            std::vector<core::BoundaryLine> lines;
            if (opt.contains("evl"))
                for (const auto& path : opt.at("evl"))
                    lines.push_back(core::line_on_timestamps(formats::read_evl(path),
                                                             eg.timestamps));
            const uint8_t palette[][3] = {{255, 255, 0}, {255, 0, 0}, {255, 0, 255}};
            std::vector<plot::LineOverlay> overlays;
            for (size_t i = 0; i < lines.size(); ++i)
                overlays.push_back({&lines[i], palette[i % 3][0], palette[i % 3][1],
                                    palette[i % 3][2]});
            plot::render_echogram(eg, overlays, output);
        } else if (mode == "cdf") {
            std::vector<plot::CdfSeries> series;
            const uint8_t palette[][3] = {{0, 0, 255}, {255, 0, 0}, {0, 160, 0}};
            double t_max = 0.0;
            std::vector<std::vector<double>> all_errors;
            for (const auto& s : opt.at("series")) {
                auto errs = s.at("errors").get<std::vector<double>>();
                for (double e : errs) t_max = std::max(t_max, e);
                all_errors.push_back(std::move(errs));
            }
            std::vector<double> thresholds;
            for (int i = 0; i <= 100; ++i) thresholds.push_back(t_max * i / 100.0);
            size_t idx = 0;
            for (const auto& s : opt.at("series")) {
                plot::CdfSeries cs;
                cs.label = s.at("label");
                cs.curve = metrics::error_cdf(all_errors[idx], thresholds);
                cs.r = palette[idx % 3][0];
                cs.g = palette[idx % 3][1];
                cs.b = palette[idx % 3][2];
                series.push_back(std::move(cs));
                ++idx;
            }
            plot::render_error_cdf(series, output);
        } else {
            throw DomainError("unknown plot mode: " + mode);
        }
        return EF_OK;
    });
}

}  // extern "C"
