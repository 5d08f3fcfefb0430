// Command-line front end; all work goes through the public C API.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "echofilter.h"
#include "json.hpp"

using json = nlohmann::json;

namespace {

int run(ef_status status) {
    if (status == EF_OK) return 0;
    std::cerr << "error: " << ef_last_error() << "\n";
    return status == EF_ERR_INVALID_ARG ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"echofilter: echogram segmentation pipeline"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // generate-shards
    auto* shards = app.add_subcommand("generate-shards",
                                      "Convert CSV + EVL exports into training shards");
    shards->alias("echofilter-generate-shards");
    std::string raw_csv, clean_csv, entrained_evl, seafloor_evl, surface_evl;
    std::string shards_out = "shards", recording_id;
    bool shards_upfacing = false;
    shards->add_option("raw_csv", raw_csv, "Full Sv export")->required();
    shards->add_option("clean_csv", clean_csv, "Masked Sv export")->required();
    shards->add_option("--entrained", entrained_evl, "Entrained-air EVL")->required();
    shards->add_option("--seafloor", seafloor_evl, "Seafloor EVL");
    shards->add_option("--surface", surface_evl, "Surface EVL");
    shards->add_option("--output-dir", shards_out, "Shard store directory");
    shards->add_option("--recording-id", recording_id, "Identifier stored in the manifest");
    shards->add_flag("--upfacing", shards_upfacing, "Upfacing recording");

    // train
    auto* train = app.add_subcommand("train", "Train the segmentation model on shards");
    train->alias("echofilter-train");
    std::vector<std::string> shard_dirs;
    std::vector<int> upsample;
    std::string train_out = "run";
    uint64_t train_seed = 0;
    int epochs = 100, cycles = 1, batch_size = 12;
    int width = 32, n_blocks = 6, groups = 1, input_w = 128, input_h = 512;
    double max_lr = 0.012;
    bool no_augment = false;
    train->add_option("shards", shard_dirs, "Shard store directories")->required();
    train->add_option("--upsample", upsample, "Per-store occurrences per epoch");
    train->add_option("--output-dir", train_out, "Checkpoint/log directory");
    train->add_option("--seed", train_seed, "Run seed");
    train->add_option("--epochs", epochs, "Epochs in the first cycle");
    train->add_option("--cycles", cycles, "Training cycles");
    train->add_option("--batch-size", batch_size, "Samples per batch");
    train->add_option("--max-lr", max_lr, "Peak learning rate of the first cycle");
    train->add_option("--width", width, "Backbone channels");
    train->add_option("--n-blocks", n_blocks, "Encoder/decoder depth");
    train->add_option("--groups", groups, "Output groups (1 or 3)");
    train->add_option("--input-w", input_w, "Model input pings");
    train->add_option("--input-h", input_h, "Model input depth bins");
    train->add_flag("--no-augment", no_augment, "Disable augmentation");

    // infer
    auto* infer = app.add_subcommand("infer", "Annotate a CSV recording with the model");
    infer->alias("echofilter");
    std::string infer_csv, checkpoint, infer_stem;
    const char* env_model = std::getenv("ECHOFILTER_MODEL");
    if (env_model) checkpoint = env_model;
    bool infer_upfacing = false, drop_bad = false;
    double autozoom = 0.35, offset = 1.0, smoothing = 0.0;
    infer->add_option("csv", infer_csv, "Sv CSV export")->required();
    auto* ckpt_opt = infer->add_option("--checkpoint,-m", checkpoint, "Model checkpoint");
    if (checkpoint.empty()) ckpt_opt->required();
    infer->add_option("--output-stem", infer_stem, "Output path stem");
    infer->add_option("--autozoom-threshold", autozoom,
                      "Cropped fraction that triggers the zoomed second pass");
    infer->add_option("--offset", offset, "Line offset in metres");
    infer->add_option("--logit-smoothing", smoothing, "Gaussian sigma; 0 disables");
    infer->add_flag("--upfacing", infer_upfacing, "Upfacing recording");
    infer->add_flag("--drop-bad-data", drop_bad, "Suppress bad-data region output");

    // baseline
    auto* base = app.add_subcommand("baseline", "Classical line picking");
    std::string base_csv, base_stem;
    bool base_upfacing = false;
    base->add_option("csv", base_csv, "Sv CSV export")->required();
    base->add_option("--output-stem", base_stem, "Output path stem");
    base->add_flag("--upfacing", base_upfacing, "Upfacing recording");

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Compare predicted lines against targets");
    std::vector<std::string> eval_csvs, eval_targets, eval_preds;
    std::string eval_mode = "pooled";
    bool eval_upfacing = false;
    eval->add_option("--csv", eval_csvs, "Recording CSVs")->required();
    eval->add_option("--target", eval_targets, "Target EVLs (aligned with --csv)")->required();
    eval->add_option("--predicted", eval_preds, "Predicted EVLs (aligned)")->required();
    eval->add_option("--mode", eval_mode, "pooled or per-file")
        ->check(CLI::IsMember({"pooled", "per-file"}));
    eval->add_flag("--upfacing", eval_upfacing, "Upfacing recordings");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic recording corpus");
    std::string synth_dir = ".", synth_base = "synth";
    uint64_t synth_seed = 0;
    int n_pings = 256, passive_every = 0, passive_length = 12;
    int bad_every = 0, n_patches = 0;
    double depth_max = 50.0, depth_step = 0.25, extra_range = 0.0;
    bool synth_upfacing = false;
    synth->add_option("--dir", synth_dir, "Output directory");
    synth->add_option("--base", synth_base, "File name stem");
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--n-pings", n_pings, "Recording length");
    synth->add_option("--depth-max", depth_max, "Range extent, metres");
    synth->add_option("--depth-step", depth_step, "Depth resolution, metres");
    synth->add_option("--passive-every", passive_every, "Ping gap between passive bursts");
    synth->add_option("--passive-length", passive_length, "Passive burst length");
    synth->add_option("--bad-period-every", bad_every, "Ping gap between bad periods");
    synth->add_option("--n-patches", n_patches, "Injected bad patches");
    synth->add_option("--extra-range-fraction", extra_range, "Empty range fraction");
    synth->add_flag("--upfacing", synth_upfacing, "Upfacing recording");

    // plot
    auto* plot = app.add_subcommand("plot", "Render echogram overlays or error CDFs");
    std::string plot_csv, plot_out = "plot.ppm", series_json;
    std::vector<std::string> plot_evls;
    bool plot_upfacing = false;
    plot->add_option("--csv", plot_csv, "Echogram CSV (echogram mode)");
    plot->add_option("--evl", plot_evls, "Overlay EVL files");
    plot->add_option("--series-json", series_json,
                     "CDF mode: [{\"label\":..,\"errors\":[..]}]");
    plot->add_option("--output", plot_out, "Output PPM path");
    plot->add_flag("--upfacing", plot_upfacing, "Upfacing recording");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (shards->parsed()) {
        json opt{{"raw_csv", raw_csv},
                 {"clean_csv", clean_csv},
                 {"entrained_evl", entrained_evl},
                 {"output_dir", shards_out},
                 {"upfacing", shards_upfacing}};
        if (!seafloor_evl.empty()) opt["seafloor_evl"] = seafloor_evl;
        if (!surface_evl.empty()) opt["surface_evl"] = surface_evl;
        if (!recording_id.empty()) opt["recording_id"] = recording_id;
        return run(ef_generate_shards(opt.dump().c_str()));
    }
    if (train->parsed()) {
        json opt{{"shard_dirs", shard_dirs}, {"output_dir", train_out},
                 {"seed", train_seed},       {"epochs", epochs},
                 {"cycles", cycles},         {"batch_size", batch_size},
                 {"max_lr", max_lr},         {"augment", !no_augment},
                 {"width", width},           {"n_blocks", n_blocks},
                 {"groups", groups},         {"input_w", input_w},
                 {"input_h", input_h}};
        if (!upsample.empty()) opt["upsample"] = upsample;
        return run(ef_train(opt.dump().c_str()));
    }
    if (infer->parsed()) {
        json opt{{"csv", infer_csv},
                 {"checkpoint", checkpoint},
                 {"upfacing", infer_upfacing},
                 {"autozoom_threshold", autozoom},
                 {"offset", offset},
                 {"logit_smoothing", smoothing},
                 {"drop_bad", drop_bad}};
        if (!infer_stem.empty()) opt["output_stem"] = infer_stem;
        return run(ef_infer(opt.dump().c_str()));
    }
    if (base->parsed()) {
        json opt{{"csv", base_csv}, {"upfacing", base_upfacing}};
        if (!base_stem.empty()) opt["output_stem"] = base_stem;
        return run(ef_baseline(opt.dump().c_str()));
    }
    if (eval->parsed()) {
        if (eval_csvs.size() != eval_targets.size() ||
            eval_csvs.size() != eval_preds.size()) {
            std::cerr << "error: --csv, --target and --predicted must align\n";
            return 2;
        }
        json files = json::array();
        for (size_t i = 0; i < eval_csvs.size(); ++i)
            files.push_back({{"csv", eval_csvs[i]},
                             {"target_evl", eval_targets[i]},
                             {"predicted_evl", eval_preds[i]},
                             {"upfacing", eval_upfacing}});
        const json opt{{"files", files}, {"mode", eval_mode}};
        char* report = nullptr;
        const int code = run(ef_evaluate(opt.dump().c_str(), &report));
        if (code == 0 && report) std::cout << report;
        ef_string_free(report);
        return code;
    }
    if (synth->parsed()) {
        json opt{{"dir", synth_dir},
                 {"base", synth_base},
                 {"seed", synth_seed},
                 {"n_pings", n_pings},
                 {"depth_max", depth_max},
                 {"depth_step", depth_step},
                 {"upfacing", synth_upfacing},
                 {"extra_range_fraction", extra_range}};
        if (passive_every > 0) {
            opt["passive_every"] = passive_every;
            opt["passive_length"] = passive_length;
        }
        if (bad_every > 0) opt["bad_period_every"] = bad_every;
        if (n_patches > 0) opt["n_patches"] = n_patches;
        return run(ef_synth(opt.dump().c_str()));
    }
    if (plot->parsed()) {
        json opt{{"output", plot_out}};
        if (!series_json.empty()) {
            opt["mode"] = "cdf";
            opt["series"] = json::parse(series_json, nullptr, false);
            if (opt["series"].is_discarded()) {
                std::cerr << "error: --series-json is not valid JSON\n";
                return 2;
            }
        } else {
            opt["mode"] = "echogram";
            opt["csv"] = plot_csv;
            opt["evl"] = plot_evls;
            opt["upfacing"] = plot_upfacing;
        }
        return run(ef_plot(opt.dump().c_str()));
    }
    return 2;
}
