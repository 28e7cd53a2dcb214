#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace synthforge {

/// Interleaved 8-bit raster; channels is 1 (gray), 3 (RGB) or 4 (RGBA).
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    ImageU8() = default;
    ImageU8(int w, int h, int c)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * h * c, 0) {}

    std::uint8_t* pixel(int x, int y) {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
    const std::uint8_t* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * channels;
    }
    bool empty() const { return width == 0 || height == 0; }
};

/// Render target: four floats per pixel. RGB channels hold gamma-encoded
/// values in [0,1]; alpha is the linear primary-ray hit fraction.
struct RgbaImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;  // r,g,b,a interleaved

    RgbaImage() = default;
    RgbaImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 4, 0.f) {}

    float* pixel(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 4; }
    const float* pixel(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 4;
    }
};

/// Final 8-bit quantization rule used everywhere: round half up on [0,1] input.
inline std::uint8_t quantize_channel(double v) {
    if (v <= 0.0) return 0;
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

/// RGBA floats -> straight-alpha 8-bit raster (the on-disk pose image).
ImageU8 quantize_rgba(const RgbaImage& img);

/// Decodes PNG or JPEG (sniffed by signature) into 8-bit; gray and palette
/// images are expanded. force_rgb strips alpha / expands gray to 3 channels.
ImageU8 load_image(const std::filesystem::path& path, bool force_rgb = false);

/// Deterministic PNG encoding (fixed filter and compression settings).
std::vector<std::uint8_t> encode_png(const ImageU8& img);

void save_png(const ImageU8& img, const std::filesystem::path& path);

/// FNV-1a 64-bit, used for output checksums and config fingerprints.
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

}  // namespace synthforge
