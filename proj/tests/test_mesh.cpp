#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "support.hpp"
#include "synthforge/bvh.hpp"
#include "synthforge/errors.hpp"
#include "synthforge/mesh.hpp"

using namespace synthforge;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

std::filesystem::path write_texture(const TempDir& dir, const std::string& name = "tex.png") {
    const auto path = dir.path / name;
    save_png(testsupport::solid_texture(200, 180, 160, 4, 4), path);
    return path;
}

}  // namespace

TEST_CASE("load_mesh: minimal one-triangle file") {
    TempDir dir("mesh_min");
    write_file(dir.path / "tri.obj",
               "v 0 0 0\n"
               "v 1 0 0\n"
               "v 0 1 0\n"
               "vt 0 0\nvt 1 0\nvt 0 1\n"
               "f 1/1 2/2 3/3\n");
    const TexturedMesh mesh = load_mesh(dir.path / "tri.obj", write_texture(dir));
    CHECK(mesh.vertices.size() == 3);
    CHECK(mesh.uvs.size() == 3);
    CHECK(mesh.triangles.size() == 1);
    CHECK(mesh.vertex_normals.size() == 3);
}

TEST_CASE("load_mesh: quads fan-triangulate into two triangles") {
    TempDir dir("mesh_quad");
    write_file(dir.path / "quad.obj",
               "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
               "vt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\n"
               "f 1/1 2/2 3/3 4/4\n");
    const TexturedMesh mesh = load_mesh(dir.path / "quad.obj", write_texture(dir));
    CHECK(mesh.triangles.size() == 2);
    // fan shares the first corner
    CHECK(mesh.triangles[0].v[0] == mesh.triangles[1].v[0]);
}

TEST_CASE("load_mesh: v//vn corners and negative indices resolve") {
    TempDir dir("mesh_neg");
    write_file(dir.path / "m.obj",
               "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
               "vt 0 0\nvt 1 0\nvt 0 1\n"
               "vn 0 0 1\n"
               "f -3/-3/1 -2/-2/1 -1/-1/1\n");
    const TexturedMesh mesh = load_mesh(dir.path / "m.obj", write_texture(dir));
    CHECK(mesh.triangles.size() == 1);
    CHECK(mesh.triangles[0].v == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("load_mesh: out-of-range index names the face line") {
    TempDir dir("mesh_oob");
    write_file(dir.path / "bad.obj",
               "v 0 0 0\nv 1 0 0\nv 0 1 0\n"
               "vt 0 0\nvt 1 0\nvt 0 1\n"
               "f 1/1 2/2 999/3\n");
    try {
        load_mesh(dir.path / "bad.obj", write_texture(dir));
        FAIL("expected io_error");
    } catch (const io_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":7:") != std::string::npos);  // the face is on line 7
        CHECK(msg.find("999") != std::string::npos);
    }
}

TEST_CASE("load_mesh: malformed inputs raise descriptive errors") {
    TempDir dir("mesh_bad");
    const auto tex = write_texture(dir);
    write_file(dir.path / "two.obj", "v 0 0 0\nv 1 0 0\nvt 0 0\nvt 1 0\nf 1/1 2/2\n");
    CHECK_THROWS_AS(load_mesh(dir.path / "two.obj", tex), io_error);

    write_file(dir.path / "nouv.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    CHECK_THROWS_AS(load_mesh(dir.path / "nouv.obj", tex), io_error);

    write_file(dir.path / "junk.obj", "v 0 0 zebra\n");
    CHECK_THROWS_AS(load_mesh(dir.path / "junk.obj", tex), io_error);

    CHECK_THROWS_AS(load_mesh(dir.path / "missing.obj", tex), io_error);

    write_file(dir.path / "ok.obj",
               "v 0 0 0\nv 1 0 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 0 1\nf 1/1 2/2 3/3\n");
    CHECK_THROWS_AS(load_mesh(dir.path / "ok.obj", dir.path / "missing.png"), io_error);
}

TEST_CASE("normalize_mesh: centers and scales to unit longest edge") {
    TexturedMesh cube = testsupport::make_symmetric_cube();
    for (Vec3& v : cube.vertices) v = v * 20.0 + Vec3{5.0, 5.0, 5.0};  // edge 20 at (5,5,5)
    const TexturedMesh norm = normalize_mesh(cube);
    const Aabb box = mesh_bounds(norm);
    CHECK(length(box.center()) < 1e-12);
    CHECK(box.extent().x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(box.extent().y == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(box.extent().z == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(norm.triangles.size() == cube.triangles.size());
    CHECK(norm.uvs == cube.uvs);
}

TEST_CASE("normalize_mesh: idempotent") {
    TexturedMesh mesh = testsupport::make_quad_mesh(3.0);
    for (Vec3& v : mesh.vertices) v += Vec3{1.0, -2.0, 0.5};
    const TexturedMesh once = normalize_mesh(mesh);
    const TexturedMesh twice = normalize_mesh(once);
    REQUIRE(once.vertices.size() == twice.vertices.size());
    for (std::size_t i = 0; i < once.vertices.size(); ++i)
        CHECK(length(once.vertices[i] - twice.vertices[i]) < 1e-12);
}

TEST_CASE("normalize_mesh: preserves pairwise distance ratios") {
    Rng rng(77);
    TexturedMesh mesh = testsupport::make_random_soup(40, rng);
    for (Vec3& v : mesh.vertices) v = v * 7.3 + Vec3{100.0, -3.0, 9.0};
    const TexturedMesh norm = normalize_mesh(mesh);
    const double ref =
        length(mesh.vertices[1] - mesh.vertices[0]) / length(norm.vertices[1] - norm.vertices[0]);
    for (std::size_t i = 0; i < mesh.vertices.size(); i += 7) {
        for (std::size_t j = i + 1; j < mesh.vertices.size(); j += 11) {
            const double before = length(mesh.vertices[j] - mesh.vertices[i]);
            const double after = length(norm.vertices[j] - norm.vertices[i]);
            if (after < 1e-9) continue;
            CHECK(before / after == doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("normalize_mesh: drops degenerate triangles and rejects empty meshes") {
    TexturedMesh mesh = testsupport::make_quad_mesh(1.0);
    mesh.triangles.push_back({{0, 0, 1}, {0, 0, 1}});  // zero area
    const TexturedMesh norm = normalize_mesh(mesh);
    CHECK(norm.triangles.size() == 2);

    TexturedMesh empty;
    empty.texture = testsupport::solid_texture(1, 2, 3);
    CHECK_THROWS_AS(normalize_mesh(empty), io_error);
}

TEST_CASE("build_bvh: single triangle gives a single leaf") {
    TexturedMesh mesh;
    mesh.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    mesh.uvs = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    mesh.triangles = {{{0, 1, 2}, {0, 1, 2}}};
    mesh.texture = testsupport::solid_texture(255, 255, 255);
    compute_vertex_normals(mesh);
    const Bvh bvh = build_bvh(mesh);
    CHECK(bvh.node_count() == 1);
    CHECK(bvh.triangle_count() == 1);
}

TEST_CASE("build_bvh: leaves partition the triangle set") {
    Rng rng(5);
    const TexturedMesh mesh = testsupport::make_random_soup(500, rng);
    const Bvh bvh = build_bvh(mesh);
    CHECK(bvh.triangle_count() == mesh.triangles.size());
    std::set<int> seen(bvh.triangle_order().begin(), bvh.triangle_order().end());
    CHECK(seen.size() == mesh.triangles.size());  // each triangle in exactly one slot
}

TEST_CASE("build_bvh: nearest hit identical to brute force on random soup") {
    Rng rng(9);
    const TexturedMesh mesh = testsupport::make_random_soup(1000, rng);
    const Bvh bvh = build_bvh(mesh);
    int hits = 0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 origin{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const Vec3 dir = normalize(Vec3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                        rng.uniform(-1.0, 1.0)});
        const Ray ray{origin, dir};
        const auto fast = bvh.intersect(ray);
        const auto slow = testsupport::brute_force_hit(mesh, ray);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            ++hits;
            CHECK(fast->triangle == slow->triangle);
            CHECK(fast->t == slow->t);
            CHECK(fast->b0 == slow->b0);
            CHECK(fast->b1 == slow->b1);
        }
    }
    CHECK(hits > 100);  // the comparison actually exercised hits
}

TEST_CASE("bvh occluded: agrees with brute force any-hit") {
    Rng rng(21);
    const TexturedMesh mesh = testsupport::make_random_soup(300, rng);
    const Bvh bvh = build_bvh(mesh);
    for (int i = 0; i < 500; ++i) {
        const Vec3 origin{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const Vec3 dir = normalize(Vec3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                        rng.uniform(-1.0, 1.0)});
        const double t_max = rng.uniform(0.1, 4.0);
        const Ray ray{origin, dir};
        const auto slow = testsupport::brute_force_hit(mesh, ray, t_max);
        CHECK(bvh.occluded(ray, t_max) == slow.has_value());
    }
}
