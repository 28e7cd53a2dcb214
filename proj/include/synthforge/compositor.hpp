#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "synthforge/image.hpp"

namespace synthforge {

/// Ordered index over a directory tree of background photos. Entries are
/// sorted lexicographically by relative path so a background_id means the
/// same file on every machine.
struct BackgroundCorpus {
    std::filesystem::path root;
    std::vector<std::filesystem::path> entries;  // relative to root

    std::size_t size() const { return entries.size(); }
    ImageU8 load(int id) const;
};

/// Recursively collects PNG/JPEG files under root. Errors on an empty result.
BackgroundCorpus scan_corpus(const std::filesystem::path& root);

/// Scale-to-fill then center-crop to exactly (width, height), bilinear.
/// An already-sized image passes through byte-identical.
ImageU8 fit_background(const ImageU8& img, int width, int height);

struct CompositeOptions {
    bool linear = false;   // blend in linear light instead of encoded bytes
    double gamma = 2.2;    // decode exponent when linear is set
};

/// Straight-alpha "over": out = a * fg + (1 - a) * bg per channel, computed
/// on encoded values (the default) and quantized round-half-up.
ImageU8 composite_over(const RgbaImage& fg, const ImageU8& bg, const CompositeOptions& opts = {});

}  // namespace synthforge
