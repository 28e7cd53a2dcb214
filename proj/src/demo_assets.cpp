#include "synthforge/demo_assets.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "synthforge/errors.hpp"

namespace synthforge::demo {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::ofstream open_text(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot write: " + path.string());
    out.precision(9);
    return out;
}

}  // namespace

void write_box_obj(const fs::path& path, double sx, double sy, double sz) {
    auto out = open_text(path);
    const double hx = sx / 2, hy = sy / 2, hz = sz / 2;
    for (int i = 0; i < 8; ++i) {
        out << "v " << ((i & 1) ? hx : -hx) << " " << ((i & 2) ? hy : -hy) << " "
            << ((i & 4) ? hz : -hz) << "\n";
    }
    out << "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n";
    // quad faces, outward winding
    const int faces[6][4] = {{1, 3, 4, 2},  // -z
                             {5, 6, 8, 7},  // +z
                             {1, 2, 6, 5},  // -y
                             {3, 7, 8, 4},  // +y
                             {1, 5, 7, 3},  // -x
                             {2, 4, 8, 6}}; // +x
    for (const auto& f : faces) {
        out << "f";
        for (int k = 0; k < 4; ++k) out << " " << f[k] << "/" << k + 1;
        out << "\n";
    }
}

void write_uv_sphere_obj(const fs::path& path, double radius, int rings, int segments) {
    auto out = open_text(path);
    for (int r = 0; r <= rings; ++r) {
        const double phi = kPi * r / rings;  // 0 at +z pole
        for (int s = 0; s <= segments; ++s) {
            const double theta = 2.0 * kPi * s / segments;
            out << "v " << radius * std::sin(phi) * std::cos(theta) << " "
                << radius * std::sin(phi) * std::sin(theta) << " " << radius * std::cos(phi)
                << "\n";
        }
    }
    for (int r = 0; r <= rings; ++r)
        for (int s = 0; s <= segments; ++s)
            out << "vt " << static_cast<double>(s) / segments << " "
                << 1.0 - static_cast<double>(r) / rings << "\n";

    auto idx = [&](int r, int s) { return r * (segments + 1) + s + 1; };
    for (int r = 0; r < rings; ++r) {
        for (int s = 0; s < segments; ++s) {
            const int a = idx(r, s), b = idx(r + 1, s), c = idx(r + 1, s + 1), d = idx(r, s + 1);
            if (r > 0) out << "f " << a << "/" << a << " " << b << "/" << b << " " << d << "/" << d << "\n";
            if (r + 1 < rings)
                out << "f " << b << "/" << b << " " << c << "/" << c << " " << d << "/" << d << "\n";
        }
    }
}

void write_cylinder_obj(const fs::path& path, double radius, double height, int segments) {
    auto out = open_text(path);
    const double hz = height / 2;
    for (int s = 0; s <= segments; ++s) {
        const double theta = 2.0 * kPi * s / segments;
        const double x = radius * std::cos(theta), y = radius * std::sin(theta);
        out << "v " << x << " " << y << " " << -hz << "\n";
        out << "v " << x << " " << y << " " << hz << "\n";
    }
    out << "v 0 0 " << -hz << "\n";  // cap centers
    out << "v 0 0 " << hz << "\n";
    for (int s = 0; s <= segments; ++s) {
        const double u = static_cast<double>(s) / segments;
        out << "vt " << u << " 0\n";
        out << "vt " << u << " 1\n";
    }
    out << "vt 0.5 0\nvt 0.5 1\n";
    const int bottom_center = 2 * (segments + 1) + 1;
    const int top_center = bottom_center + 1;
    for (int s = 0; s < segments; ++s) {
        const int b0 = 2 * s + 1, t0 = 2 * s + 2, b1 = 2 * s + 3, t1 = 2 * s + 4;
        out << "f " << b0 << "/" << b0 << " " << b1 << "/" << b1 << " " << t1 << "/" << t1 << " "
            << t0 << "/" << t0 << "\n";  // side quad, outward
        out << "f " << bottom_center << "/" << bottom_center << " " << b1 << "/" << b1 << " " << b0
            << "/" << b0 << "\n";  // bottom cap (faces -z)
        out << "f " << top_center << "/" << top_center << " " << t0 << "/" << t0 << " " << t1 << "/"
            << t1 << "\n";  // top cap (faces +z)
    }
}

ImageU8 checker_texture(int width, int height, int cells, Rgb a, Rgb b) {
    ImageU8 img(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const bool odd = ((x * cells / width) + (y * cells / height)) % 2 != 0;
            const Rgb& c = odd ? b : a;
            std::uint8_t* p = img.pixel(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        }
    return img;
}

ImageU8 stripe_texture(int width, int height, int period, Rgb a, Rgb b) {
    ImageU8 img(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Rgb& c = (x / period) % 2 != 0 ? b : a;
            std::uint8_t* p = img.pixel(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        }
    return img;
}

ImageU8 gradient_image(int width, int height, Rgb top_left, Rgb bottom_right) {
    ImageU8 img(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const double t = (static_cast<double>(x) / width + static_cast<double>(y) / height) / 2;
            std::uint8_t* p = img.pixel(x, y);
            for (int c = 0; c < 3; ++c)
                p[c] = static_cast<std::uint8_t>(std::lround(top_left[c] * (1 - t) + bottom_right[c] * t));
        }
    return img;
}

fs::path write_demo_workspace(const fs::path& dir, int num_classes, int num_backgrounds,
                              int images_per_class) {
    fs::create_directories(dir / "meshes");
    fs::create_directories(dir / "textures");
    fs::create_directories(dir / "backgrounds");
    fs::create_directories(dir / "out");

    static const Rgb palette[] = {{200, 40, 40},  {40, 160, 220}, {240, 200, 40}, {40, 180, 80},
                                  {180, 60, 200}, {240, 130, 40}, {90, 90, 220},  {150, 220, 210},
                                  {220, 90, 140}, {130, 160, 60}};
    std::string classes_toml;
    for (int c = 0; c < num_classes; ++c) {
        const std::string name = "demo_" + std::to_string(c);
        const fs::path mesh = dir / "meshes" / (name + ".obj");
        const fs::path tex = dir / "textures" / (name + ".png");
        switch (c % 3) {
            case 0: write_box_obj(mesh, 1.0, 0.75, 0.5); break;
            case 1: write_uv_sphere_obj(mesh, 0.5, 12, 18); break;
            case 2: write_cylinder_obj(mesh, 0.35, 1.0, 20); break;
        }
        const Rgb a = palette[static_cast<std::size_t>(c) % 10];
        const Rgb b = palette[static_cast<std::size_t>(c + 3) % 10];
        save_png(c % 2 == 0 ? checker_texture(128, 128, 8, a, b) : stripe_texture(128, 128, 16, a, b),
                 tex);
        classes_toml += "[[classes]]\nname = \"" + name + "\"\nmesh = \"meshes/" + name +
                        ".obj\"\ntexture = \"textures/" + name + ".png\"\n\n";
    }

    for (int i = 0; i < num_backgrounds; ++i) {
        const Rgb a = palette[static_cast<std::size_t>(i * 2) % 10];
        const Rgb b = palette[static_cast<std::size_t>(i * 2 + 5) % 10];
        save_png(gradient_image(400, 320, a, b), dir / "backgrounds" / ("bg_" + std::to_string(i) + ".png"));
    }

    const fs::path config_path = dir / "config.toml";
    auto out = open_text(config_path);
    out << "# synthforge demo configuration\n"
        << "master_seed = 20260809\n"
        << "images_per_class = " << images_per_class << "\n"
        << "val_fraction = 0.1\n"
        << "output_root = \"out\"\n"
        << "background_root = \"backgrounds\"\n\n"
        << "[render]\n"
        << "width = 300\n"
        << "height = 300\n"
        << "samples_per_pixel = 16\n"
        << "ambient = 0.08\n"
        << "fov_y_deg = 40.0\n"
        << "gamma = 2.2\n\n"
        << "[[camera_rings]]\n"
        << "axis = \"Z\"\n"
        << "phi_sigma = 0.25\n"
        << "rho_mu = 2.5\nrho_sigma = 0.6\nrho_min = 1.2\nrho_max = 4.0\n\n"
        << "[[camera_rings]]\n"
        << "axis = \"Y\"\n"
        << "phi_sigma = 0.25\n"
        << "rho_mu = 2.5\nrho_sigma = 0.6\nrho_min = 1.2\nrho_max = 4.0\n\n"
        << "[lamps]\n"
        << "count_min = 1\ncount_max = 3\n"
        << "energy_mu = 15.0\nenergy_sigma = 7.0\n"
        << "rho_mu = 3.0\nrho_sigma = 0.5\nrho_min = 2.0\nrho_max = 5.0\n\n"
        << classes_toml;
    return config_path;
}

}  // namespace synthforge::demo
