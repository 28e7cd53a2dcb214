#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "synthforge/image.hpp"
#include "synthforge/sampling.hpp"

namespace synthforge {

/// Inclusive pixel coordinates, origin top-left.
struct BoundingBox {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const { return x_max - x_min + 1; }
    int height() const { return y_max - y_min + 1; }
    bool operator==(const BoundingBox&) const = default;
};

enum class Split { None, Train, Val };

/// One generated image with everything needed to score against it or
/// re-render it from scratch.
struct AnnotatedSample {
    std::string image_path;  // relative to the manifest's directory
    std::string mask_path;
    int class_id = 0;
    std::string class_name;
    int image_width = 0;
    int image_height = 0;
    BoundingBox bbox;
    SceneSample scene;
    std::uint64_t seed = 0;
    Split split = Split::None;

    bool operator==(const AnnotatedSample&) const = default;
};

struct DatasetManifest {
    std::vector<std::string> classes;
    std::vector<AnnotatedSample> samples;
    std::string generator_config_hash;

    bool operator==(const DatasetManifest&) const = default;
};

/// Binary coverage mask: 255 where alpha > threshold, 0 elsewhere.
/// The default threshold 0 counts any coverage at all.
ImageU8 alpha_mask(const RgbaImage& fg, double threshold = 0.0);

/// Smallest box containing every mask pixel > 0; nullopt for an empty mask.
std::optional<BoundingBox> tight_bbox(const ImageU8& mask);

/// Single-document JSON serialization, COCO-like (categories / images /
/// annotations with [x, y, w, h] boxes) plus a provenance block per
/// annotation. read(write(m)) == m field for field.
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace synthforge
