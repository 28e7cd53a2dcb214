#include "synthforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "synthforge/compositor.hpp"
#include "synthforge/errors.hpp"
#include "synthforge/log.hpp"
#include "synthforge/toml.hpp"

namespace synthforge {

namespace fs = std::filesystem;
using nlohmann::json;

void GeneratorConfig::validate() const {
    if (classes.empty()) throw config_error("config: no classes defined");
    if (images_per_class < 1) throw config_error("config: images_per_class must be >= 1");
    if (camera_rings.empty()) throw config_error("config: no camera rings defined");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw config_error("config: val_fraction must be in [0, 1)");
    if (workers < 0) throw config_error("config: workers must be >= 1 (or omitted)");
    if (output_root.empty()) throw config_error("config: output_root is required");
    try {
        render.validate();
        for (const RingSpec& ring : camera_rings) {
            ring.validate();
            if (!(ring.radius_dist.a > 0.0))
                throw std::invalid_argument("camera ring radius lower limit must be > 0");
        }
        lamps.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].name.empty()) throw config_error("config: class name must be non-empty");
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (classes[i].name == classes[j].name)
                throw config_error("config: duplicate class name '" + classes[i].name + "'");
    }
}

namespace {

TruncatedNormalSpec truncnorm_from(const toml::Table& t, const std::string& prefix) {
    TruncatedNormalSpec spec;
    spec.mu = toml::get_double(t, prefix + "_mu");
    spec.sigma = toml::get_double(t, prefix + "_sigma");
    spec.a = toml::get_double(t, prefix + "_min");
    spec.b = toml::get_double(t, prefix + "_max");
    return spec;
}

Axis axis_from(const std::string& name) {
    if (name == "X" || name == "x") return Axis::X;
    if (name == "Y" || name == "y") return Axis::Y;
    if (name == "Z" || name == "z") return Axis::Z;
    throw config_error("config: ring axis must be X, Y or Z, got '" + name + "'");
}

std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
    return out;
}

std::string format_index(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d", index);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
    return buf;
}

}  // namespace

GeneratorConfig load_generator_config(const fs::path& path) {
    const toml::Table root = toml::parse_file(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

    GeneratorConfig cfg;
    cfg.master_seed = static_cast<std::uint64_t>(toml::get_int(root, "master_seed"));
    cfg.images_per_class = static_cast<int>(toml::get_int(root, "images_per_class"));
    cfg.val_fraction = toml::get_double_or(root, "val_fraction", 0.0);
    cfg.workers = static_cast<int>(toml::get_int_or(root, "workers", 0));
    cfg.output_root = resolve(toml::get_string(root, "output_root"));
    cfg.background_root = resolve(toml::get_string(root, "background_root"));
    cfg.composite_linear = toml::get_bool_or(root, "composite_linear", false);

    const toml::Table& render = toml::get_table(root, "render");
    cfg.render.width = static_cast<int>(toml::get_int(render, "width"));
    cfg.render.height = static_cast<int>(toml::get_int(render, "height"));
    cfg.render.samples_per_pixel = static_cast<int>(toml::get_int(render, "samples_per_pixel"));
    cfg.render.ambient = toml::get_double_or(render, "ambient", 0.08);
    cfg.render.fov_y = toml::get_double_or(render, "fov_y_deg", 40.0) * std::numbers::pi / 180.0;
    cfg.render.gamma = toml::get_double_or(render, "gamma", 2.2);

    for (const toml::Value& rv : toml::get_table_array(root, "camera_rings")) {
        const auto* rt = std::get_if<toml::Table>(&rv.data);
        if (!rt) throw config_error("config: camera_rings entries must be tables");
        RingSpec ring;
        ring.normal_axis = axis_from(toml::get_string(*rt, "axis"));
        ring.phi_sigma = toml::get_double(*rt, "phi_sigma");
        ring.radius_dist = truncnorm_from(*rt, "rho");
        cfg.camera_rings.push_back(ring);
    }

    const toml::Table& lamps = toml::get_table(root, "lamps");
    cfg.lamps.count_min = static_cast<int>(toml::get_int(lamps, "count_min"));
    cfg.lamps.count_max = static_cast<int>(toml::get_int(lamps, "count_max"));
    cfg.lamps.energy_dist = {toml::get_double(lamps, "energy_mu"),
                             toml::get_double(lamps, "energy_sigma"), 0.0,
                             std::numeric_limits<double>::infinity()};
    cfg.lamps.radius_dist = truncnorm_from(lamps, "rho");
    cfg.lamps.exact_sphere = toml::get_bool_or(lamps, "exact_sphere", false);

    for (const toml::Value& cv : toml::get_table_array(root, "classes")) {
        const auto* ct = std::get_if<toml::Table>(&cv.data);
        if (!ct) throw config_error("config: classes entries must be tables");
        ClassSpec spec;
        spec.name = toml::get_string(*ct, "name");
        spec.mesh_path = resolve(toml::get_string(*ct, "mesh"));
        spec.texture_path = resolve(toml::get_string(*ct, "texture"));
        cfg.classes.push_back(std::move(spec));
    }

    cfg.validate();
    return cfg;
}

std::string config_fingerprint(const GeneratorConfig& config) {
    std::ostringstream os;
    os.precision(17);
    auto tn = [&](const TruncatedNormalSpec& t) {
        os << t.mu << " " << t.sigma << " " << t.a << " " << t.b << ";";
    };
    os << "seed=" << config.master_seed << ";n=" << config.images_per_class << ";render="
       << config.render.width << "x" << config.render.height << "@" << config.render.samples_per_pixel
       << "," << config.render.ambient << "," << config.render.fov_y << "," << config.render.gamma
       << ";linear=" << config.composite_linear << ";rings=";
    for (const RingSpec& r : config.camera_rings) {
        os << static_cast<int>(r.normal_axis) << "," << r.phi_sigma << ",";
        tn(r.radius_dist);
    }
    os << ";lamps=" << config.lamps.count_min << "," << config.lamps.count_max << ","
       << config.lamps.exact_sphere << ",";
    tn(config.lamps.energy_dist);
    tn(config.lamps.radius_dist);
    os << ";classes=";
    for (const ClassSpec& c : config.classes) os << c.name << ",";
    const std::string repr = os.str();
    return hex64(fnv1a64(reinterpret_cast<const std::uint8_t*>(repr.data()), repr.size()));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t class_id, std::uint64_t index,
                          std::uint64_t attempt) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ class_id);
    h = mix64(h ^ index);
    h = mix64(h ^ attempt);
    return h;
}

namespace {

constexpr int kMaxAttempts = 100;

struct ClassAssets {
    std::unique_ptr<TexturedMesh> mesh;  // stable address; the Bvh points into it
    Bvh bvh;
    std::string dir_name;
};

struct SampleRecord {
    AnnotatedSample sample;
    int attempts = 0;
    std::uint64_t image_checksum = 0;
    std::uint64_t mask_checksum = 0;
};

json record_to_json(const SampleRecord& rec) {
    json j;
    j["attempts"] = rec.attempts;
    j["image_checksum"] = rec.image_checksum;
    j["mask_checksum"] = rec.mask_checksum;
    j["class_id"] = rec.sample.class_id;
    j["class_name"] = rec.sample.class_name;
    j["image_path"] = rec.sample.image_path;
    j["mask_path"] = rec.sample.mask_path;
    j["image_width"] = rec.sample.image_width;
    j["image_height"] = rec.sample.image_height;
    j["seed"] = rec.sample.seed;
    j["bbox"] = {rec.sample.bbox.x_min, rec.sample.bbox.y_min, rec.sample.bbox.x_max,
                 rec.sample.bbox.y_max};
    json scene;
    scene["camera_position"] = {rec.sample.scene.camera_position.x,
                                rec.sample.scene.camera_position.y,
                                rec.sample.scene.camera_position.z};
    scene["camera_target"] = {rec.sample.scene.camera_target.x, rec.sample.scene.camera_target.y,
                              rec.sample.scene.camera_target.z};
    scene["camera_up"] = {rec.sample.scene.camera_up.x, rec.sample.scene.camera_up.y,
                          rec.sample.scene.camera_up.z};
    json lamps = json::array();
    for (const Lamp& lamp : rec.sample.scene.lamps)
        lamps.push_back({{"position", {lamp.position.x, lamp.position.y, lamp.position.z}},
                         {"energy", lamp.energy}});
    scene["lamps"] = lamps;
    scene["background_id"] = rec.sample.scene.background_id;
    scene["rng_seed"] = rec.sample.scene.rng_seed;
    j["scene"] = scene;
    return j;
}

SampleRecord record_from_json(const json& j) {
    SampleRecord rec;
    rec.attempts = j.at("attempts").get<int>();
    rec.image_checksum = j.at("image_checksum").get<std::uint64_t>();
    rec.mask_checksum = j.at("mask_checksum").get<std::uint64_t>();
    AnnotatedSample& s = rec.sample;
    s.class_id = j.at("class_id").get<int>();
    s.class_name = j.at("class_name").get<std::string>();
    s.image_path = j.at("image_path").get<std::string>();
    s.mask_path = j.at("mask_path").get<std::string>();
    s.image_width = j.at("image_width").get<int>();
    s.image_height = j.at("image_height").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    const json& bb = j.at("bbox");
    s.bbox = {bb.at(0).get<int>(), bb.at(1).get<int>(), bb.at(2).get<int>(), bb.at(3).get<int>()};
    const json& scene = j.at("scene");
    auto vec3_of = [](const json& a) {
        return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    s.scene.camera_position = vec3_of(scene.at("camera_position"));
    s.scene.camera_target = vec3_of(scene.at("camera_target"));
    s.scene.camera_up = vec3_of(scene.at("camera_up"));
    for (const json& lj : scene.at("lamps"))
        s.scene.lamps.push_back({vec3_of(lj.at("position")), lj.at("energy").get<double>()});
    s.scene.background_id = scene.at("background_id").get<int>();
    s.scene.rng_seed = scene.at("rng_seed").get<std::uint64_t>();
    return rec;
}

std::uint64_t checksum_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return fnv1a64(bytes.data(), bytes.size());
}

/// Shared per-run immutable context plus the fitted-background cache.
struct RunContext {
    const GeneratorConfig* config;
    const BackgroundCorpus* corpus;
    const std::vector<ClassAssets>* assets;

    std::mutex bg_mutex;
    std::unordered_map<int, std::shared_ptr<const ImageU8>> fitted_backgrounds;

    std::shared_ptr<const ImageU8> fitted_background(int id) {
        {
            std::lock_guard lock(bg_mutex);
            auto it = fitted_backgrounds.find(id);
            if (it != fitted_backgrounds.end()) return it->second;
        }
        auto fitted = std::make_shared<const ImageU8>(
            fit_background(corpus->load(id), config->render.width, config->render.height));
        std::lock_guard lock(bg_mutex);
        return fitted_backgrounds.try_emplace(id, std::move(fitted)).first->second;
    }
};

void write_record(const SampleRecord& rec, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write record: " + path.string());
    out << record_to_json(rec).dump() << "\n";
    if (!out) throw io_error("record write failed: " + path.string());
}

bool try_load_record(const fs::path& rec_path, const fs::path& output_root, SampleRecord& out) {
    std::ifstream in(rec_path, std::ios::binary);
    if (!in) return false;
    json j;
    try {
        j = json::parse(in);
        out = record_from_json(j);
    } catch (const json::exception&) {
        return false;
    }
    if (checksum_file(output_root / out.sample.image_path) != out.image_checksum) return false;
    if (checksum_file(output_root / out.sample.mask_path) != out.mask_checksum) return false;
    return true;
}

SampleRecord generate_sample(RunContext& ctx, int class_id, int index,
                             std::atomic<std::size_t>* rejections) {
    const GeneratorConfig& cfg = *ctx.config;
    const ClassAssets& assets = (*ctx.assets)[static_cast<std::size_t>(class_id)];
    const fs::path image_rel =
        fs::path("images") / assets.dir_name / (format_index(index) + ".png");
    const fs::path mask_rel = fs::path("masks") / assets.dir_name / (format_index(index) + ".png");

    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t seed =
            derive_seed(cfg.master_seed, static_cast<std::uint64_t>(class_id),
                        static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(attempt));
        const SceneSample scene =
            sample_scene(cfg.camera_rings, cfg.lamps, static_cast<int>(ctx.corpus->size()), seed);
        const RgbaImage pose = render(*assets.mesh, assets.bvh, scene, cfg.render);
        const ImageU8 mask = alpha_mask(pose, 0.0);
        const auto bbox = tight_bbox(mask);
        if (!bbox) {
            // object missed the frame entirely; redraw with the next attempt seed
            rejections->fetch_add(1, std::memory_order_relaxed);
            continue;
        }
        const auto bg = ctx.fitted_background(scene.background_id);
        const ImageU8 composed =
            composite_over(pose, *bg, {cfg.composite_linear, cfg.render.gamma});

        const auto image_bytes = encode_png(composed);
        const auto mask_bytes = encode_png(mask);
        const fs::path image_abs = cfg.output_root / image_rel;
        const fs::path mask_abs = cfg.output_root / mask_rel;
        for (const auto& [bytes, path] : {std::pair{&image_bytes, &image_abs},
                                          std::pair{&mask_bytes, &mask_abs}}) {
            std::ofstream out(*path, std::ios::binary | std::ios::trunc);
            if (!out) throw io_error("cannot write: " + path->string());
            out.write(reinterpret_cast<const char*>(bytes->data()),
                      static_cast<std::streamsize>(bytes->size()));
            if (!out) throw io_error("write failed: " + path->string());
        }

        SampleRecord rec;
        rec.attempts = attempt + 1;
        rec.image_checksum = fnv1a64(image_bytes.data(), image_bytes.size());
        rec.mask_checksum = fnv1a64(mask_bytes.data(), mask_bytes.size());
        rec.sample.image_path = image_rel.generic_string();
        rec.sample.mask_path = mask_rel.generic_string();
        rec.sample.class_id = class_id;
        rec.sample.class_name = cfg.classes[static_cast<std::size_t>(class_id)].name;
        rec.sample.image_width = cfg.render.width;
        rec.sample.image_height = cfg.render.height;
        rec.sample.bbox = *bbox;
        rec.sample.scene = scene;
        rec.sample.seed = seed;
        return rec;
    }
    throw io_error("class " + cfg.classes[static_cast<std::size_t>(class_id)].name + " index " +
                   std::to_string(index) + ": object missed the frame in " +
                   std::to_string(kMaxAttempts) + " attempts (last seed " +
                   hex64(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(class_id),
                                     static_cast<std::uint64_t>(index), kMaxAttempts - 1)) +
                   "); widen the camera distance distribution");
}

std::vector<ClassAssets> load_assets(const GeneratorConfig& cfg) {
    std::vector<ClassAssets> assets;
    assets.reserve(cfg.classes.size());
    for (const ClassSpec& spec : cfg.classes) {
        ClassAssets a;
        a.mesh = std::make_unique<TexturedMesh>(normalize_mesh(load_mesh(spec.mesh_path, spec.texture_path)));
        a.bvh = build_bvh(*a.mesh);
        a.dir_name = sanitize_name(spec.name);
        assets.push_back(std::move(a));
    }
    for (std::size_t i = 0; i < assets.size(); ++i)
        for (std::size_t j = i + 1; j < assets.size(); ++j)
            if (assets[i].dir_name == assets[j].dir_name)
                throw config_error("config: class names '" + cfg.classes[i].name + "' and '" +
                                   cfg.classes[j].name + "' collide after sanitization");
    return assets;
}

}  // namespace

DatasetManifest generate_dataset(const GeneratorConfig& config, const GenerateOptions& options,
                                 RunReport* report) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const BackgroundCorpus corpus = scan_corpus(config.background_root);
    const std::vector<ClassAssets> assets = load_assets(config);

    std::error_code ec;
    fs::create_directories(config.output_root / "records", ec);
    for (const ClassAssets& a : assets) {
        fs::create_directories(config.output_root / "images" / a.dir_name, ec);
        fs::create_directories(config.output_root / "masks" / a.dir_name, ec);
        if (ec) throw io_error("cannot create output directories: " + ec.message());
    }

    RunContext ctx;
    ctx.config = &config;
    ctx.corpus = &corpus;
    ctx.assets = &assets;

    const std::size_t total =
        config.classes.size() * static_cast<std::size_t>(config.images_per_class);
    std::vector<SampleRecord> records(total);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> rejections{0};
    std::atomic<std::size_t> skipped{0};
    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total || failed.load()) break;
            const int class_id = static_cast<int>(k / static_cast<std::size_t>(config.images_per_class));
            const int index = static_cast<int>(k % static_cast<std::size_t>(config.images_per_class));
            try {
                const fs::path rec_path =
                    config.output_root / "records" /
                    (assets[static_cast<std::size_t>(class_id)].dir_name + "_" +
                     format_index(index) + ".json");
                SampleRecord rec;
                if (options.resume && try_load_record(rec_path, config.output_root, rec)) {
                    skipped.fetch_add(1, std::memory_order_relaxed);
                } else {
                    rec = generate_sample(ctx, class_id, index, &rejections);
                    write_record(rec, rec_path);
                }
                records[k] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                break;
            }
        }
    };

    int n_workers = config.workers > 0 ? config.workers
                                       : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n_workers), total));
    log_info("generating " + std::to_string(total) + " images (" +
             std::to_string(config.classes.size()) + " classes x " +
             std::to_string(config.images_per_class) + ") with " + std::to_string(n_workers) +
             " workers");

    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    DatasetManifest manifest;
    for (const ClassSpec& c : config.classes) manifest.classes.push_back(c.name);
    manifest.generator_config_hash = config_fingerprint(config);
    manifest.samples.reserve(total);
    for (const SampleRecord& rec : records) manifest.samples.push_back(rec.sample);
    write_manifest(manifest, config.output_root / "manifest.json");

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    if (report) {
        report->generated = total - skipped.load();
        report->skipped = skipped.load();
        report->rejections = rejections.load();
        report->elapsed_seconds = elapsed;
    }
    {
        std::ostringstream os;
        os.precision(3);
        os << "done: " << total << " samples (" << skipped.load() << " resumed, "
           << rejections.load() << " empty-frame redraws) in " << elapsed << "s";
        if (elapsed > 0) os << " (" << static_cast<double>(total - skipped.load()) / elapsed << " img/s)";
        log_info(os.str());
    }
    return manifest;
}

AnnotatedSample render_one(const GeneratorConfig& config, int class_id, int index) {
    config.validate();
    if (class_id < 0 || static_cast<std::size_t>(class_id) >= config.classes.size())
        throw config_error("render_one: class id out of range");
    if (index < 0 || index >= config.images_per_class)
        throw config_error("render_one: index out of range");

    const BackgroundCorpus corpus = scan_corpus(config.background_root);
    const ClassSpec& spec = config.classes[static_cast<std::size_t>(class_id)];

    // only the requested class is loaded; generate_sample indexes by class id
    std::vector<ClassAssets> assets(config.classes.size());
    ClassAssets& a = assets[static_cast<std::size_t>(class_id)];
    a.mesh = std::make_unique<TexturedMesh>(normalize_mesh(load_mesh(spec.mesh_path, spec.texture_path)));
    a.bvh = build_bvh(*a.mesh);
    a.dir_name = sanitize_name(spec.name);

    std::error_code ec;
    fs::create_directories(config.output_root / "images" / a.dir_name, ec);
    fs::create_directories(config.output_root / "masks" / a.dir_name, ec);
    fs::create_directories(config.output_root / "records", ec);
    if (ec) throw io_error("cannot create output directories: " + ec.message());

    RunContext ctx;
    ctx.config = &config;
    ctx.corpus = &corpus;
    ctx.assets = &assets;

    std::atomic<std::size_t> rejections{0};
    SampleRecord rec = generate_sample(ctx, class_id, index, &rejections);
    write_record(rec, config.output_root / "records" /
                          (a.dir_name + "_" + format_index(index) + ".json"));
    return rec.sample;
}

DatasetManifest split_train_val(DatasetManifest manifest, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw config_error("split: val_fraction must be in [0, 1)");

    for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < manifest.samples.size(); ++i)
            if (manifest.samples[i].class_id == static_cast<int>(c)) members.push_back(i);
        if (members.empty()) continue;

        // Fisher-Yates with an explicit stream; std::shuffle is not pinned
        Rng rng(mix64(seed ^ mix64(c)));
        for (std::size_t i = members.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
            std::swap(members[i], members[j]);
        }
        const auto n_val = static_cast<std::size_t>(
            std::llround(val_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < members.size(); ++i)
            manifest.samples[members[i]].split = i < n_val ? Split::Val : Split::Train;
    }
    return manifest;
}

}  // namespace synthforge
