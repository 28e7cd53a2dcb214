#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "synthforge/sampling.hpp"

using namespace synthforge;
using testsupport::ks_distance;
using testsupport::truncnorm_cdf;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("truncnorm: wide limits give the untruncated mean") {
    Rng rng(42);
    const TruncatedNormalSpec spec{0.0, 1.0, -1e9, 1e9};
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) sum += truncnorm_sample(spec, rng);
    CHECK(std::abs(sum / n) < 0.02);
}

TEST_CASE("truncnorm: vanishing variance pins samples to the mean") {
    Rng rng(1);
    const TruncatedNormalSpec spec{5.0, 1e-9, 0.0, 10.0};
    for (int i = 0; i < 1000; ++i) {
        const double x = truncnorm_sample(spec, rng);
        CHECK(x > 5.0 - 1e-6);
        CHECK(x < 5.0 + 1e-6);
    }
}

TEST_CASE("truncnorm: limits are hard over many draws") {
    Rng rng(7);
    const TruncatedNormalSpec spec{0.0, 1.0, 2.0, 3.0};
    for (int i = 0; i < 100000; ++i) {
        const double x = truncnorm_sample(spec, rng);
        CHECK(x >= 2.0);
        CHECK(x <= 3.0);
    }
}

TEST_CASE("truncnorm: empirical CDF matches the conditional-normal CDF") {
    Rng rng(2024);
    const TruncatedNormalSpec spec{0.0, 1.0, 2.0, 3.0};
    std::vector<double> xs(10000);
    for (double& x : xs) x = truncnorm_sample(spec, rng);
    const double d = ks_distance(xs, [&](double x) { return truncnorm_cdf(x, 0.0, 1.0, 2.0, 3.0); });
    CHECK(d < 0.02);
}

TEST_CASE("truncnorm: inverse-CDF fallback path stays inside far-tail limits") {
    Rng rng(5);
    // acceptance mass ~ 3e-5: rejection would grind, the fallback must kick in
    const TruncatedNormalSpec spec{0.0, 1.0, 4.0, 6.0};
    std::vector<double> xs(20000);
    for (double& x : xs) {
        x = truncnorm_sample(spec, rng);
        CHECK(x >= 4.0);
        CHECK(x <= 6.0);
    }
    const double d = ks_distance(xs, [&](double x) { return truncnorm_cdf(x, 0.0, 1.0, 4.0, 6.0); });
    CHECK(d < 0.02);
}

TEST_CASE("truncnorm: invalid specs are rejected") {
    Rng rng(0);
    CHECK_THROWS_AS(truncnorm_sample({0.0, 0.0, 0.0, 1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(truncnorm_sample({0.0, -1.0, 0.0, 1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(truncnorm_sample({0.0, 1.0, 2.0, 2.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(truncnorm_sample({0.0, 1.0, 3.0, 2.0}, rng), std::invalid_argument);
}

TEST_CASE("spherical_to_cartesian: axis cases") {
    const Vec3 a = spherical_to_cartesian(1.0, 0.0, 0.0);
    CHECK(a.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(a.z == doctest::Approx(0.0).epsilon(1e-12));

    const Vec3 b = spherical_to_cartesian(2.0, kPi / 2.0, 0.0);
    CHECK(b.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b.y == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.z == doctest::Approx(0.0).epsilon(1e-12));

    for (double theta : {0.0, 1.0, 2.5, -3.0}) {
        const Vec3 pole = spherical_to_cartesian(1.0, theta, kPi / 2.0);
        CHECK(std::abs(pole.x) < 1e-12);
        CHECK(std::abs(pole.y) < 1e-12);
        CHECK(pole.z == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("spherical_to_cartesian: norm equals rho") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double rho = rng.uniform(0.0, 10.0);
        const Vec3 p = spherical_to_cartesian(rho, rng.uniform(0.0, 2.0 * kPi),
                                              rng.uniform(-kPi / 2.0, kPi / 2.0));
        CHECK(length(p) == doctest::Approx(rho).epsilon(1e-12));
    }
}

TEST_CASE("rotate_about_y: axis permutation, fixed point, half turn") {
    const Vec3 a = rotate_about_y({0.0, 0.0, 1.0}, kPi / 2.0);
    CHECK(a.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(a.y) < 1e-12);
    CHECK(std::abs(a.z) < 1e-12);

    for (double angle : {0.1, 1.0, -2.0, 4.0}) {
        const Vec3 fixed = rotate_about_y({0.0, 1.0, 0.0}, angle);
        CHECK(fixed.x == 0.0);
        CHECK(fixed.y == 1.0);
        CHECK(fixed.z == 0.0);
    }

    const Vec3 half = rotate_about_y({1.0, 0.0, 0.0}, kPi);
    CHECK(half.x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(half.z) < 1e-12);
}

TEST_CASE("rotate_about_y: norm preservation and inverse composition") {
    Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const Vec3 p{rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
        const double angle = rng.uniform(-10.0, 10.0);
        const Vec3 q = rotate_about_y(p, angle);
        CHECK(length(q) == doctest::Approx(length(p)).epsilon(1e-12));
        const Vec3 back = rotate_about_y(q, -angle);
        CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
        CHECK(back.z == doctest::Approx(p.z).epsilon(1e-12));
    }
}

TEST_CASE("sample_ring_location: degenerate ring collapses onto the stated plane") {
    const TruncatedNormalSpec unit_radius{1.0, 1e-12, 1.0 - 1e-9, 1.0 + 1e-9};

    Rng rng(3);
    const RingSpec ring_z{unit_radius, 1e-9, Axis::Z};
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = sample_ring_location(ring_z, rng);
        CHECK(std::abs(p.z) < 1e-6);
        CHECK(p.x * p.x + p.y * p.y == doctest::Approx(1.0).epsilon(1e-6));
    }

    const RingSpec ring_x{unit_radius, 1e-9, Axis::X};
    for (int i = 0; i < 2000; ++i) CHECK(std::abs(sample_ring_location(ring_x, rng).x) < 1e-6);

    const RingSpec ring_y{unit_radius, 1e-9, Axis::Y};
    for (int i = 0; i < 2000; ++i) CHECK(std::abs(sample_ring_location(ring_y, rng).y) < 1e-6);
}

TEST_CASE("sample_ring_location: pi/3 width approximates a uniform sphere") {
    const RingSpec shell{{1.0, 1e-12, 1.0 - 1e-9, 1.0 + 1e-9}, kPi / 3.0, Axis::Z};
    Rng rng(99);
    std::vector<double> zs(100000);
    for (double& z : zs) z = sample_ring_location(shell, rng).z;
    const double d = ks_distance(zs, [](double z) { return (z + 1.0) / 2.0; });
    CHECK(d < 0.05);
}

TEST_CASE("uniform_sphere_dir: exact sampler is uniform in z and unit length") {
    Rng rng(123);
    std::vector<double> zs(100000);
    for (double& z : zs) {
        const Vec3 p = uniform_sphere_dir(rng);
        CHECK(length(p) == doctest::Approx(1.0).epsilon(1e-9));
        z = p.z;
    }
    const double d = ks_distance(zs, [](double z) { return (z + 1.0) / 2.0; });
    CHECK(d < 0.01);
}

TEST_CASE("sample_lamps: degenerate count and non-negative energies") {
    LampSpec spec;
    spec.count_min = 3;
    spec.count_max = 3;
    spec.energy_dist = {15.0, 7.0, 0.0, kInf};
    spec.radius_dist = {3.0, 0.5, 2.0, 5.0};

    Rng rng(17);
    for (int i = 0; i < 1000; ++i) CHECK(sample_lamps(spec, rng).size() == 3);

    spec.count_min = 0;
    spec.count_max = 2;
    double min_energy = kInf;
    for (int i = 0; i < 100000; ++i)
        for (const Lamp& lamp : sample_lamps(spec, rng)) min_energy = std::min(min_energy, lamp.energy);
    CHECK(min_energy >= 0.0);
}

TEST_CASE("sample_lamps: count frequencies are uniform") {
    LampSpec spec;
    spec.count_min = 1;
    spec.count_max = 4;
    spec.energy_dist = {15.0, 7.0, 0.0, kInf};
    spec.radius_dist = {3.0, 0.5, 2.0, 5.0};

    Rng rng(31);
    std::array<int, 5> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) counts[sample_lamps(spec, rng).size()] += 1;
    for (int c = 1; c <= 4; ++c)
        CHECK(std::abs(counts[static_cast<std::size_t>(c)] / static_cast<double>(n) - 0.25) < 0.02);
}

TEST_CASE("sample_lamps: radii follow the radius distribution") {
    LampSpec spec;
    spec.count_min = 1;
    spec.count_max = 1;
    spec.energy_dist = {15.0, 7.0, 0.0, kInf};
    spec.radius_dist = {3.0, 0.5, 2.0, 5.0};

    Rng rng(55);
    std::vector<double> radii(20000);
    for (double& r : radii) r = length(sample_lamps(spec, rng)[0].position);
    const double d =
        ks_distance(radii, [&](double r) { return truncnorm_cdf(r, 3.0, 0.5, 2.0, 5.0); });
    CHECK(d < 0.02);
}

TEST_CASE("sample_lamps: rejects negative-energy-capable specs") {
    LampSpec spec;
    spec.count_min = 1;
    spec.count_max = 2;
    spec.energy_dist = {15.0, 7.0, -1.0, kInf};  // would allow E < 0
    spec.radius_dist = {3.0, 0.5, 2.0, 5.0};
    Rng rng(1);
    CHECK_THROWS_AS(sample_lamps(spec, rng), std::invalid_argument);
}

namespace {

std::vector<RingSpec> default_rings() {
    return {{{2.5, 0.6, 1.2, 4.0}, 0.25, Axis::Z}, {{2.5, 0.6, 1.2, 4.0}, 0.25, Axis::Y}};
}

LampSpec default_lamps() {
    LampSpec spec;
    spec.count_min = 1;
    spec.count_max = 3;
    spec.energy_dist = {15.0, 7.0, 0.0, kInf};
    spec.radius_dist = {3.0, 0.5, 2.0, 5.0};
    return spec;
}

}  // namespace

TEST_CASE("sample_scene: identical seeds give bit-identical scenes") {
    const auto rings = default_rings();
    const auto lamps = default_lamps();
    const SceneSample a = sample_scene(rings, lamps, 10, 0xDEADBEEF);
    const SceneSample b = sample_scene(rings, lamps, 10, 0xDEADBEEF);
    CHECK(a == b);
    const SceneSample c = sample_scene(rings, lamps, 10, 0xDEADBEF0);
    CHECK(a.camera_position.x != c.camera_position.x);
}

TEST_CASE("sample_scene: rings are chosen uniformly") {
    // disjoint radius ranges make the chosen ring observable exactly
    std::vector<RingSpec> rings{{{1.5, 0.1, 1.0, 2.0}, 0.25, Axis::Z},
                                {{3.5, 0.1, 3.0, 4.0}, 0.25, Axis::Y}};
    const auto lamps = default_lamps();
    const int n = 100000;
    int far_ring = 0;
    for (int i = 0; i < n; ++i) {
        const SceneSample s = sample_scene(rings, lamps, 1, static_cast<std::uint64_t>(i));
        const double rho = length(s.camera_position);
        CHECK(((rho >= 1.0 && rho <= 2.0) || (rho >= 3.0 && rho <= 4.0)));
        if (rho >= 3.0) ++far_ring;
    }
    CHECK(std::abs(far_ring / static_cast<double>(n) - 0.5) < 0.015);
}

TEST_CASE("sample_scene: corpus of one always picks background 0") {
    const auto rings = default_rings();
    const auto lamps = default_lamps();
    for (int i = 0; i < 200; ++i)
        CHECK(sample_scene(rings, lamps, 1, static_cast<std::uint64_t>(i)).background_id == 0);
}

TEST_CASE("sample_scene: background ids cover the corpus uniformly") {
    const auto rings = default_rings();
    const auto lamps = default_lamps();
    std::array<int, 4> counts{};
    const int n = 10000;
    for (int i = 0; i < n; ++i)
        counts[static_cast<std::size_t>(
            sample_scene(rings, lamps, 4, static_cast<std::uint64_t>(i)).background_id)] += 1;
    for (int c = 0; c < 4; ++c)
        CHECK(std::abs(counts[static_cast<std::size_t>(c)] / static_cast<double>(n) - 0.25) < 0.02);
}

TEST_CASE("sample_scene: camera always looks at the origin with a valid up") {
    const auto rings = default_rings();
    const auto lamps = default_lamps();
    for (int i = 0; i < 500; ++i) {
        const SceneSample s = sample_scene(rings, lamps, 3, static_cast<std::uint64_t>(i * 7 + 1));
        CHECK(s.camera_target == Vec3{0.0, 0.0, 0.0});
        CHECK(length(s.camera_position) > 0.0);
        CHECK((s.camera_up == Vec3{0.0, 0.0, 1.0} || s.camera_up == Vec3{1.0, 0.0, 0.0}));
        const Vec3 dir = normalize(s.camera_target - s.camera_position);
        CHECK(std::abs(dot(dir, s.camera_up)) < 1.0 - 1e-9);
        CHECK(static_cast<std::size_t>(s.lamps.size()) >= 1);
        CHECK(static_cast<std::size_t>(s.lamps.size()) <= 3);
        for (const Lamp& lamp : s.lamps) CHECK(lamp.energy >= 0.0);
    }
}

TEST_CASE("default_camera_up: world-Z with a world-X polar fallback") {
    CHECK(default_camera_up({3.0, 0.5, 0.1}, {0.0, 0.0, 0.0}) == Vec3{0.0, 0.0, 1.0});
    CHECK(default_camera_up({0.0, 0.0, 5.0}, {0.0, 0.0, 0.0}) == Vec3{1.0, 0.0, 0.0});
    CHECK(default_camera_up({0.0, 0.0, -5.0}, {0.0, 0.0, 0.0}) == Vec3{1.0, 0.0, 0.0});
    CHECK(default_camera_up({1e-7, -1e-7, 2.0}, {0.0, 0.0, 0.0}) == Vec3{1.0, 0.0, 0.0});
    // just off the pole: regular Z up again
    CHECK(default_camera_up({0.1, 0.0, 2.0}, {0.0, 0.0, 0.0}) == Vec3{0.0, 0.0, 1.0});
}

TEST_CASE("sample_scene: validation errors") {
    const auto lamps = default_lamps();
    CHECK_THROWS_AS(sample_scene({}, lamps, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(sample_scene(default_rings(), lamps, 0, 0), std::invalid_argument);
    // camera ring that could put the camera on the object centroid
    std::vector<RingSpec> bad{{{0.5, 1.0, 0.0, 2.0}, 0.25, Axis::Z}};
    CHECK_THROWS_AS(sample_scene(bad, lamps, 1, 0), std::invalid_argument);
}
