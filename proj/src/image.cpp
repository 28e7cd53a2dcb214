#include "synthforge/image.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "synthforge/errors.hpp"

// libjpeg's headers want stdio FILE before inclusion
#include <jpeglib.h>

namespace synthforge {

namespace fs = std::filesystem;

ImageU8 quantize_rgba(const RgbaImage& img) {
    ImageU8 out(img.width, img.height, 4);
    const float* src = img.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] = quantize_channel(src[i]);
    return out;
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

struct PngReadState {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t offset;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t count) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->offset + count > st->size) png_error(png, "png: unexpected end of data");
    std::memcpy(out, st->data + st->offset, count);
    st->offset += count;
}

void png_mem_write(png_structp png, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + count);
}

void png_mem_flush(png_structp) {}

ImageU8 decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw io_error("png: failed to create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw io_error("png: failed to create info struct");
    }
    ImageU8 img;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw io_error("png: decode failed for " + name);
    }
    PngReadState st{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &st, png_mem_read);
    png_read_info(png, info);

    png_set_expand(png);  // palette -> rgb, gray<8 -> 8, tRNS -> alpha
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    img.channels = static_cast<int>(png_get_channels(png, info));
    img.data.resize(static_cast<std::size_t>(img.width) * img.height * img.channels);
    rows.resize(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) rows[static_cast<std::size_t>(y)] = img.pixel(0, y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

struct JpegErrorMgr {
    jpeg_error_mgr mgr;
    std::jmp_buf jmp;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(err->jmp, 1);
}

ImageU8 decode_jpeg(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.mgr);
    err.mgr.error_exit = jpeg_error_exit;
    if (setjmp(err.jmp)) {
        jpeg_destroy_decompress(&cinfo);
        throw io_error("jpeg: decode failed for " + name);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    ImageU8 img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height),
                static_cast<int>(cinfo.output_components));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = img.pixel(0, static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

ImageU8 to_rgb(const ImageU8& img) {
    if (img.channels == 3) return img;
    ImageU8 out(img.width, img.height, 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* s = img.pixel(x, y);
            std::uint8_t* d = out.pixel(x, y);
            if (img.channels == 1) {
                d[0] = d[1] = d[2] = s[0];
            } else if (img.channels == 2) {  // gray + alpha
                d[0] = d[1] = d[2] = s[0];
            } else {  // rgba: drop alpha
                d[0] = s[0];
                d[1] = s[1];
                d[2] = s[2];
            }
        }
    }
    return out;
}

}  // namespace

ImageU8 load_image(const fs::path& path, bool force_rgb) {
    const auto bytes = read_file_bytes(path);
    ImageU8 img;
    static const std::uint8_t png_sig[4] = {0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), png_sig, 4) == 0) {
        img = decode_png(bytes, path.string());
    } else if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) {
        img = decode_jpeg(bytes, path.string());
    } else {
        throw io_error("unrecognized image format: " + path.string());
    }
    if (img.empty()) throw io_error("empty image: " + path.string());
    return force_rgb ? to_rgb(img) : img;
}

std::vector<std::uint8_t> encode_png(const ImageU8& img) {
    if (img.empty()) throw io_error("png: refusing to encode empty image");
    int color_type;
    switch (img.channels) {
        case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
        case 3: color_type = PNG_COLOR_TYPE_RGB; break;
        case 4: color_type = PNG_COLOR_TYPE_RGBA; break;
        default: throw io_error("png: unsupported channel count " + std::to_string(img.channels));
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw io_error("png: failed to create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw io_error("png: failed to create info struct");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw io_error("png: encode failed");
    }
    png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
    // pinned settings so identical pixels always give identical bytes
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(png, const_cast<png_bytep>(img.pixel(0, y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void save_png(const ImageU8& img, const fs::path& path) {
    const auto bytes = encode_png(img);
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf) throw io_error("cannot open for writing: " + path.string());
    outf.write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    if (!outf) throw io_error("write failed: " + path.string());
}

}  // namespace synthforge
