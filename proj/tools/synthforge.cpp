#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "synthforge/errors.hpp"
#include "synthforge/evaluation.hpp"
#include "synthforge/log.hpp"
#include "synthforge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace synthforge;

namespace {

int cmd_generate(const std::string& config_path, int workers, bool resume) {
    GeneratorConfig config = load_generator_config(config_path);
    if (workers > 0) config.workers = workers;
    RunReport report;
    const DatasetManifest manifest = generate_dataset(config, {resume}, &report);
    std::printf("generated %zu samples across %zu classes (%zu resumed, %zu redraws) in %.1fs\n",
                manifest.samples.size(), manifest.classes.size(), report.skipped,
                report.rejections, report.elapsed_seconds);
    std::printf("manifest: %s\n", (config.output_root / "manifest.json").string().c_str());
    return 0;
}

int cmd_split(const std::string& manifest_path, double val_fraction, std::uint64_t seed,
              const std::string& out_path) {
    DatasetManifest manifest = read_manifest(manifest_path);
    manifest = split_train_val(std::move(manifest), val_fraction, seed);
    const fs::path out = out_path.empty() ? fs::path(manifest_path) : fs::path(out_path);
    write_manifest(manifest, out);
    std::size_t n_val = 0;
    for (const AnnotatedSample& s : manifest.samples)
        if (s.split == Split::Val) ++n_val;
    std::printf("split %zu samples: %zu train, %zu val -> %s\n", manifest.samples.size(),
                manifest.samples.size() - n_val, n_val, out.string().c_str());
    return 0;
}

int cmd_inspect(const std::string& manifest_path) {
    const DatasetManifest manifest = read_manifest(manifest_path);
    std::printf("manifest: %s\n", manifest_path.c_str());
    std::printf("config hash: %s\n", manifest.generator_config_hash.c_str());
    std::printf("classes: %zu, samples: %zu\n", manifest.classes.size(), manifest.samples.size());
    for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
        std::size_t count = 0, train = 0, val = 0;
        double w_sum = 0, h_sum = 0;
        int w_min = 1 << 30, w_max = 0, h_min = 1 << 30, h_max = 0;
        for (const AnnotatedSample& s : manifest.samples) {
            if (s.class_id != static_cast<int>(c)) continue;
            ++count;
            if (s.split == Split::Train) ++train;
            if (s.split == Split::Val) ++val;
            const int w = s.bbox.width(), h = s.bbox.height();
            w_sum += w;
            h_sum += h;
            w_min = std::min(w_min, w);
            w_max = std::max(w_max, w);
            h_min = std::min(h_min, h);
            h_max = std::max(h_max, h);
        }
        if (count == 0) {
            std::printf("  [%zu] %-24s 0 samples\n", c, manifest.classes[c].c_str());
            continue;
        }
        std::printf("  [%zu] %-24s %zu samples", c, manifest.classes[c].c_str(), count);
        if (train + val > 0) std::printf(" (train %zu / val %zu)", train, val);
        std::printf("  bbox w %.1f [%d..%d], h %.1f [%d..%d]\n",
                    w_sum / static_cast<double>(count), w_min, w_max,
                    h_sum / static_cast<double>(count), h_min, h_max);
    }
    return 0;
}

int cmd_render_one(const std::string& config_path, int class_id, int index) {
    const GeneratorConfig config = load_generator_config(config_path);
    const AnnotatedSample sample = render_one(config, class_id, index);
    std::printf("class %d (%s), index %d: seed %llu\n", sample.class_id,
                sample.class_name.c_str(), index,
                static_cast<unsigned long long>(sample.seed));
    std::printf("image: %s\nmask:  %s\nbbox:  [%d, %d, %d, %d]\n",
                (config.output_root / sample.image_path).string().c_str(),
                (config.output_root / sample.mask_path).string().c_str(), sample.bbox.x_min,
                sample.bbox.y_min, sample.bbox.x_max, sample.bbox.y_max);
    return 0;
}

int cmd_evaluate(const std::string& manifest_path, const std::string& predictions_path, int dac_k,
                 const std::string& report_path) {
    const DatasetManifest manifest = read_manifest(manifest_path);
    const auto predictions = load_predictions_jsonl(predictions_path);
    const EvalReport report = evaluate(manifest, predictions, dac_k);

    std::printf("images: %zu (scored %zu, missing predictions %zu)\n", report.n_images,
                report.n_scored, report.n_missing_predictions);
    std::printf("accuracy: %.4f\n", report.accuracy);
    if (!std::isnan(report.macro_precision))
        std::printf("macro precision: %.4f, macro recall: %.4f\n", report.macro_precision,
                    report.macro_recall);
    if (report.dac) std::printf("DAC (k=%d): %.4f\n", report.dac_k, *report.dac);
    if (report.mean_iou) std::printf("mean IoU (top-1, diagnostic): %.4f\n", *report.mean_iou);
    if (!report_path.empty()) {
        write_report(report, manifest.classes, report_path);
        std::printf("report: %s\n", report_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthforge: synthetic training-image generator and evaluator"};
    app.require_subcommand(1);

    std::string config_path, manifest_path, predictions_path, report_path, out_path;
    int workers = 0, class_id = 0, index = 0, dac_k = 3;
    bool resume = false;
    double val_fraction = 0.1;
    std::uint64_t seed = 0;

    auto* generate = app.add_subcommand("generate", "Generate a dataset from a config file");
    generate->add_option("--config", config_path, "Generator config (TOML)")->required();
    generate->add_option("--workers", workers, "Worker thread count (overrides config)");
    generate->add_flag("--resume", resume, "Skip samples already on disk with valid checksums");

    auto* split = app.add_subcommand("split", "Assign a stratified train/val split");
    split->add_option("--manifest", manifest_path, "Manifest to split")->required();
    split->add_option("--val-fraction", val_fraction, "Validation fraction in [0,1)")->required();
    split->add_option("--seed", seed, "Split seed")->required();
    split->add_option("--out", out_path, "Output path (default: rewrite in place)");

    auto* inspect = app.add_subcommand("inspect", "Print class counts and bbox statistics");
    inspect->add_option("--manifest", manifest_path, "Manifest to inspect")->required();

    auto* render_one_cmd = app.add_subcommand("render-one", "Reproduce a single sample");
    render_one_cmd->add_option("--config", config_path, "Generator config (TOML)")->required();
    render_one_cmd->add_option("--class", class_id, "Class id")->required();
    render_one_cmd->add_option("--index", index, "Sample index")->required();

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a prediction file against a manifest");
    evaluate_cmd->add_option("--manifest", manifest_path, "Ground-truth manifest")->required();
    evaluate_cmd->add_option("--predictions", predictions_path, "JSONL predictions")->required();
    evaluate_cmd->add_option("--dac-k", dac_k, "Top-k for detection-as-classification");
    evaluate_cmd->add_option("--report", report_path, "Write the full report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(config_path, workers, resume);
        if (split->parsed()) return cmd_split(manifest_path, val_fraction, seed, out_path);
        if (inspect->parsed()) return cmd_inspect(manifest_path);
        if (render_one_cmd->parsed()) return cmd_render_one(config_path, class_id, index);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(manifest_path, predictions_path, dac_k, report_path);
    } catch (const config_error& e) {
        log_error(e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        log_error(e.what());
        return 1;
    } catch (const std::exception& e) {
        log_error(e.what());
        return 2;
    }
    return 0;
}
