#include "synthforge/compositor.hpp"

#include <algorithm>
#include <cmath>

#include "synthforge/errors.hpp"
#include "synthforge/log.hpp"

namespace synthforge {

namespace fs = std::filesystem;

namespace {

bool is_raster_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace

ImageU8 BackgroundCorpus::load(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries.size())
        throw io_error("background id out of range: " + std::to_string(id));
    return load_image(root / entries[static_cast<std::size_t>(id)], /*force_rgb=*/true);
}

BackgroundCorpus scan_corpus(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec))
        throw io_error("background corpus is not a directory: " + root.string());

    BackgroundCorpus corpus;
    corpus.root = root;
    for (auto it = fs::recursive_directory_iterator(root, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw io_error("cannot read background corpus: " + ec.message());
        if (it->is_regular_file() && is_raster_file(it->path()))
            corpus.entries.push_back(fs::relative(it->path(), root));
    }
    std::sort(corpus.entries.begin(), corpus.entries.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    if (corpus.entries.empty()) throw io_error("empty background corpus: " + root.string());
    log_info("background corpus: " + std::to_string(corpus.entries.size()) + " images under " +
             root.string());
    return corpus;
}

ImageU8 fit_background(const ImageU8& img, int width, int height) {
    if (img.empty()) throw io_error("fit_background: empty input");
    if (width < 1 || height < 1) throw io_error("fit_background: bad target size");

    // uniform scale so the scaled image covers the target, then center-crop;
    // both are folded into one source-space mapping
    const double scale = std::max(static_cast<double>(width) / img.width,
                                  static_cast<double>(height) / img.height);
    const double src_w = width / scale;
    const double src_h = height / scale;
    const double x0 = (img.width - src_w) * 0.5;
    const double y0 = (img.height - src_h) * 0.5;

    ImageU8 out(width, height, 3);
    for (int y = 0; y < height; ++y) {
        const double sy = y0 + (y + 0.5) / scale - 0.5;
        const int iy0 = std::clamp(static_cast<int>(std::floor(sy)), 0, img.height - 1);
        const int iy1 = std::min(iy0 + 1, img.height - 1);
        const double fy = std::clamp(sy - iy0, 0.0, 1.0);
        for (int x = 0; x < width; ++x) {
            const double sx = x0 + (x + 0.5) / scale - 0.5;
            const int ix0 = std::clamp(static_cast<int>(std::floor(sx)), 0, img.width - 1);
            const int ix1 = std::min(ix0 + 1, img.width - 1);
            const double fx = std::clamp(sx - ix0, 0.0, 1.0);

            const std::uint8_t* p00 = img.pixel(ix0, iy0);
            const std::uint8_t* p10 = img.pixel(ix1, iy0);
            const std::uint8_t* p01 = img.pixel(ix0, iy1);
            const std::uint8_t* p11 = img.pixel(ix1, iy1);
            std::uint8_t* dst = out.pixel(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = (1.0 - fy) * ((1.0 - fx) * p00[c] + fx * p10[c]) +
                                 fy * ((1.0 - fx) * p01[c] + fx * p11[c]);
                dst[c] = static_cast<std::uint8_t>(std::floor(std::clamp(v, 0.0, 255.0) + 0.5));
            }
        }
    }
    return out;
}

ImageU8 composite_over(const RgbaImage& fg, const ImageU8& bg, const CompositeOptions& opts) {
    if (bg.channels != 3) throw io_error("composite_over: background must be RGB");
    if (fg.width != bg.width || fg.height != bg.height)
        throw io_error("composite_over: size mismatch (" + std::to_string(fg.width) + "x" +
                       std::to_string(fg.height) + " over " + std::to_string(bg.width) + "x" +
                       std::to_string(bg.height) + ")");

    ImageU8 out(fg.width, fg.height, 3);
    const double inv_gamma = 1.0 / opts.gamma;
    for (int y = 0; y < fg.height; ++y) {
        for (int x = 0; x < fg.width; ++x) {
            const float* f = fg.pixel(x, y);
            const std::uint8_t* b = bg.pixel(x, y);
            std::uint8_t* d = out.pixel(x, y);
            const double a = f[3];
            for (int c = 0; c < 3; ++c) {
                double v;
                if (opts.linear) {
                    const double fl = std::pow(static_cast<double>(f[c]), opts.gamma);
                    const double bl = std::pow(b[c] / 255.0, opts.gamma);
                    v = std::pow(a * fl + (1.0 - a) * bl, inv_gamma);
                } else {
                    v = a * f[c] + (1.0 - a) * (b[c] / 255.0);
                }
                d[c] = quantize_channel(v);
            }
        }
    }
    return out;
}

}  // namespace synthforge
