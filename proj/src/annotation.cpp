#include "synthforge/annotation.hpp"

#include <fstream>

#include <json.hpp>

#include "synthforge/errors.hpp"

namespace synthforge {

using nlohmann::json;

ImageU8 alpha_mask(const RgbaImage& fg, double threshold) {
    ImageU8 mask(fg.width, fg.height, 1);
    for (int y = 0; y < fg.height; ++y) {
        for (int x = 0; x < fg.width; ++x) {
            mask.pixel(x, y)[0] = fg.pixel(x, y)[3] > threshold ? 255 : 0;
        }
    }
    return mask;
}

std::optional<BoundingBox> tight_bbox(const ImageU8& mask) {
    BoundingBox box{mask.width, mask.height, -1, -1};
    for (int y = 0; y < mask.height; ++y) {
        const std::uint8_t* row = mask.pixel(0, y);
        for (int x = 0; x < mask.width; ++x) {
            if (row[x * mask.channels] == 0) continue;
            box.x_min = std::min(box.x_min, x);
            box.x_max = std::max(box.x_max, x);
            box.y_min = std::min(box.y_min, y);
            box.y_max = std::max(box.y_max, y);
        }
    }
    if (box.x_max < 0) return std::nullopt;
    return box;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

json scene_to_json(const SceneSample& s) {
    json lamps = json::array();
    for (const Lamp& lamp : s.lamps)
        lamps.push_back({{"position", vec3_to_json(lamp.position)}, {"energy", lamp.energy}});
    return {{"camera_position", vec3_to_json(s.camera_position)},
            {"camera_target", vec3_to_json(s.camera_target)},
            {"camera_up", vec3_to_json(s.camera_up)},
            {"lamps", lamps},
            {"background_id", s.background_id},
            {"rng_seed", s.rng_seed}};
}

SceneSample scene_from_json(const json& j) {
    SceneSample s;
    s.camera_position = vec3_from_json(j.at("camera_position"));
    s.camera_target = vec3_from_json(j.at("camera_target"));
    s.camera_up = vec3_from_json(j.at("camera_up"));
    for (const json& lj : j.at("lamps"))
        s.lamps.push_back({vec3_from_json(lj.at("position")), lj.at("energy").get<double>()});
    s.background_id = j.at("background_id").get<int>();
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return s;
}

constexpr int kManifestVersion = 1;

}  // namespace

namespace detail {

json sample_to_json(const AnnotatedSample& s, int id) {
    json extra = {{"mask_path", s.mask_path}, {"seed", s.seed}, {"scene", scene_to_json(s.scene)}};
    if (s.split != Split::None) extra["split"] = s.split == Split::Train ? "train" : "val";
    return {{"id", id},
            {"image_id", id},
            {"category_id", s.class_id},
            {"bbox", json::array({s.bbox.x_min, s.bbox.y_min, s.bbox.width(), s.bbox.height()})},
            {"synthforge", extra}};
}

}  // namespace detail

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    json categories = json::array();
    for (std::size_t i = 0; i < manifest.classes.size(); ++i)
        categories.push_back({{"id", i}, {"name", manifest.classes[i]}});

    json images = json::array();
    json annotations = json::array();
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
        const AnnotatedSample& s = manifest.samples[i];
        images.push_back({{"id", i},
                          {"file_name", s.image_path},
                          {"width", s.image_width},
                          {"height", s.image_height}});
        annotations.push_back(detail::sample_to_json(s, static_cast<int>(i)));
    }
    const json doc = {{"version", kManifestVersion},
                      {"generator_config_hash", manifest.generator_config_hash},
                      {"categories", categories},
                      {"images", images},
                      {"annotations", annotations}};

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open manifest for writing: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw io_error("manifest write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open manifest: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw io_error("manifest parse error in " + path.string() + ": " + e.what());
    }
    try {
        const int version = doc.at("version").get<int>();
        if (version != kManifestVersion)
            throw io_error("manifest schema version mismatch: got " + std::to_string(version) +
                           ", expected " + std::to_string(kManifestVersion));

        DatasetManifest manifest;
        manifest.generator_config_hash = doc.at("generator_config_hash").get<std::string>();
        for (const json& c : doc.at("categories"))
            manifest.classes.push_back(c.at("name").get<std::string>());

        const json& images = doc.at("images");
        for (const json& a : doc.at("annotations")) {
            AnnotatedSample s;
            const auto image_id = a.at("image_id").get<std::size_t>();
            const json& img = images.at(image_id);
            s.image_path = img.at("file_name").get<std::string>();
            s.image_width = img.at("width").get<int>();
            s.image_height = img.at("height").get<int>();
            s.class_id = a.at("category_id").get<int>();
            if (s.class_id < 0 || static_cast<std::size_t>(s.class_id) >= manifest.classes.size())
                throw io_error("manifest: category_id out of range");
            s.class_name = manifest.classes[static_cast<std::size_t>(s.class_id)];
            const json& bb = a.at("bbox");
            s.bbox.x_min = bb.at(0).get<int>();
            s.bbox.y_min = bb.at(1).get<int>();
            s.bbox.x_max = s.bbox.x_min + bb.at(2).get<int>() - 1;
            s.bbox.y_max = s.bbox.y_min + bb.at(3).get<int>() - 1;
            const json& extra = a.at("synthforge");
            s.mask_path = extra.at("mask_path").get<std::string>();
            s.seed = extra.at("seed").get<std::uint64_t>();
            s.scene = scene_from_json(extra.at("scene"));
            if (extra.contains("split"))
                s.split = extra.at("split").get<std::string>() == "train" ? Split::Train : Split::Val;
            manifest.samples.push_back(std::move(s));
        }
        return manifest;
    } catch (const json::exception& e) {
        throw io_error("manifest field error in " + path.string() + ": " + e.what());
    }
}

}  // namespace synthforge
