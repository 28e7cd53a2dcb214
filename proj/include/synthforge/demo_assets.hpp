#pragma once

#include <array>
#include <filesystem>

#include "synthforge/image.hpp"

namespace synthforge::demo {

using Rgb = std::array<std::uint8_t, 3>;

/// Axis-aligned box written with quad faces (v/vt), centered on the origin.
void write_box_obj(const std::filesystem::path& path, double sx, double sy, double sz);

/// Latitude-longitude sphere, triangulated, with a wrap-around UV seam.
void write_uv_sphere_obj(const std::filesystem::path& path, double radius, int rings,
                         int segments);

/// Closed cylinder along Z with cap fans.
void write_cylinder_obj(const std::filesystem::path& path, double radius, double height,
                        int segments);

ImageU8 checker_texture(int width, int height, int cells, Rgb a, Rgb b);
ImageU8 stripe_texture(int width, int height, int period, Rgb a, Rgb b);
ImageU8 gradient_image(int width, int height, Rgb top_left, Rgb bottom_right);

/// Lays out a ready-to-run demo workspace: meshes/, textures/, backgrounds/
/// and a config.toml wired to them. Returns the config path.
std::filesystem::path write_demo_workspace(const std::filesystem::path& dir, int num_classes,
                                           int num_backgrounds, int images_per_class);

}  // namespace synthforge::demo
