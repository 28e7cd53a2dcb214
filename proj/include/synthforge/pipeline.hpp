#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "synthforge/annotation.hpp"
#include "synthforge/renderer.hpp"
#include "synthforge/sampling.hpp"

namespace synthforge {

struct ClassSpec {
    std::string name;
    std::filesystem::path mesh_path;
    std::filesystem::path texture_path;
};

/// Everything a dataset run depends on. The generated dataset is a pure
/// function of this struct.
struct GeneratorConfig {
    std::vector<ClassSpec> classes;
    int images_per_class = 1;
    RenderConfig render;
    std::vector<RingSpec> camera_rings;
    LampSpec lamps;
    std::filesystem::path background_root;
    std::uint64_t master_seed = 0;
    double val_fraction = 0.0;
    std::filesystem::path output_root;
    int workers = 0;  // 0 = hardware concurrency
    bool composite_linear = false;

    void validate() const;  // throws config_error
};

/// Reads the TOML config; relative paths resolve against the config file's
/// directory. CLI flags may override workers/output afterwards.
GeneratorConfig load_generator_config(const std::filesystem::path& path);

/// Stable fingerprint of every value that affects output bytes.
std::string config_fingerprint(const GeneratorConfig& config);

/// Stateless avalanche mix of (master, class, index, attempt); the sole
/// source of per-image randomness.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t class_id, std::uint64_t index,
                          std::uint64_t attempt);

struct GenerateOptions {
    bool resume = false;
};

struct RunReport {
    std::size_t generated = 0;  // rendered in this run
    std::size_t skipped = 0;    // satisfied by --resume
    std::size_t rejections = 0; // empty-frame redraws
    double elapsed_seconds = 0.0;
};

/// Renders, composites, annotates and persists the whole dataset under
/// config.output_root, then writes manifest.json. Deterministic for a fixed
/// config regardless of worker count; any hard failure aborts naming the
/// (class, index, seed) that caused it.
DatasetManifest generate_dataset(const GeneratorConfig& config, const GenerateOptions& options = {},
                                 RunReport* report = nullptr);

/// Re-runs a single (class, index) sample in isolation; byte-identical to the
/// full run's output for that sample.
AnnotatedSample render_one(const GeneratorConfig& config, int class_id, int index);

/// Per-class stratified split: round(val_fraction * n_class) validation
/// samples per class, assignment a pure function of seed.
DatasetManifest split_train_val(DatasetManifest manifest, double val_fraction, std::uint64_t seed);

}  // namespace synthforge
