#include "synthforge/sampling.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace synthforge {

namespace {

constexpr double kPi = std::numbers::pi;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    // erf_inv wants (-1, 1); clamp away from the endpoints
    double q = 2.0 * p - 1.0;
    constexpr double lim = 1.0 - 1e-16;
    if (q < -lim) q = -lim;
    if (q > lim) q = lim;
    return std::numbers::sqrt2 * boost::math::erf_inv(q);
}

}  // namespace

void TruncatedNormalSpec::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("truncated normal: sigma must be > 0");
    if (!(a < b)) throw std::invalid_argument("truncated normal: requires a < b");
    if (std::isnan(mu)) throw std::invalid_argument("truncated normal: mu is NaN");
}

void RingSpec::validate() const {
    radius_dist.validate();
    if (!(phi_sigma > 0.0)) throw std::invalid_argument("ring: phi_sigma must be > 0");
    if (radius_dist.a < 0.0) throw std::invalid_argument("ring: radius lower limit must be >= 0");
}

void LampSpec::validate() const {
    if (count_min < 0) throw std::invalid_argument("lamps: count_min must be >= 0");
    if (count_min > count_max) throw std::invalid_argument("lamps: requires count_min <= count_max");
    energy_dist.validate();
    radius_dist.validate();
    if (energy_dist.a != 0.0 || energy_dist.b != std::numeric_limits<double>::infinity())
        throw std::invalid_argument("lamps: energy distribution must be truncated to [0, +inf)");
    if (radius_dist.a < 0.0) throw std::invalid_argument("lamps: radius lower limit must be >= 0");
}

double truncnorm_sample(const TruncatedNormalSpec& spec, Rng& rng) {
    spec.validate();
    const double alpha = (spec.a - spec.mu) / spec.sigma;
    const double beta = (spec.b - spec.mu) / spec.sigma;
    const double lo = normal_cdf(alpha);
    const double hi = normal_cdf(beta);
    const double mass = hi - lo;

    if (mass >= 0.01) {
        // cheap and exact: expected iterations <= 100
        for (int i = 0; i < 10000; ++i) {
            const double x = spec.mu + spec.sigma * rng.normal();
            if (x >= spec.a && x <= spec.b) return x;
        }
        // pathological rounding near the limits; fall through
    }
    const double u = rng.uniform01();
    double x = spec.mu + spec.sigma * normal_quantile(lo + u * mass);
    if (x < spec.a) x = spec.a;
    if (x > spec.b) x = spec.b;
    return x;
}

Vec3 spherical_to_cartesian(double rho, double theta, double phi) {
    const double c = std::cos(phi);
    return {rho * c * std::cos(theta), rho * c * std::sin(theta), rho * std::sin(phi)};
}

Vec3 rotate_about_y(const Vec3& p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {p.x * c + p.z * s, p.y, -p.x * s + p.z * c};
}

Vec3 rotate_about_x(const Vec3& p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {p.x, p.y * c - p.z * s, p.y * s + p.z * c};
}

Vec3 sample_ring_location(const RingSpec& spec, Rng& rng) {
    spec.validate();
    const double rho = truncnorm_sample(spec.radius_dist, rng);
    const double phi = truncnorm_sample({0.0, spec.phi_sigma, -kPi / 2.0, kPi / 2.0}, rng);
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const Vec3 p = spherical_to_cartesian(rho, theta, phi);
    switch (spec.normal_axis) {
        case Axis::X: return rotate_about_y(p, kPi / 2.0);
        case Axis::Y: return rotate_about_x(p, kPi / 2.0);
        case Axis::Z: return p;
    }
    return p;
}

Vec3 uniform_sphere_dir(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double theta = rng.uniform(0.0, 2.0 * kPi);
    const double r = std::sqrt(std::fmax(0.0, 1.0 - z * z));
    return {r * std::cos(theta), r * std::sin(theta), z};
}

std::vector<Lamp> sample_lamps(const LampSpec& spec, Rng& rng) {
    spec.validate();
    const int count = static_cast<int>(rng.uniform_int(spec.count_min, spec.count_max));
    std::vector<Lamp> lamps;
    lamps.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Vec3 pos;
        if (spec.exact_sphere) {
            const double rho = truncnorm_sample(spec.radius_dist, rng);
            pos = uniform_sphere_dir(rng) * rho;
        } else {
            // sigma_phi = pi/3 spreads the ring into a near-uniform shell
            const RingSpec shell{spec.radius_dist, kPi / 3.0, Axis::Z};
            pos = sample_ring_location(shell, rng);
        }
        const double energy = truncnorm_sample(spec.energy_dist, rng);
        lamps.push_back({pos, energy});
    }
    return lamps;
}

Vec3 default_camera_up(const Vec3& position, const Vec3& target) {
    const Vec3 dir = normalize(target - position);
    const bool degenerate = std::abs(dir.x) < 1e-6 && std::abs(dir.y) < 1e-6;
    return degenerate ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 0.0, 1.0};
}

SceneSample sample_scene(const std::vector<RingSpec>& camera_rings, const LampSpec& lamp_spec,
                         int corpus_size, std::uint64_t seed) {
    if (camera_rings.empty()) throw std::invalid_argument("sample_scene: no camera rings");
    if (corpus_size < 1) throw std::invalid_argument("sample_scene: corpus_size must be >= 1");
    for (const RingSpec& ring : camera_rings) {
        ring.validate();
        if (!(ring.radius_dist.a > 0.0))
            throw std::invalid_argument("sample_scene: camera radius lower limit must be > 0");
    }
    lamp_spec.validate();

    Rng rng(seed);
    SceneSample scene;
    scene.rng_seed = seed;
    const auto ring_index = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(camera_rings.size()) - 1));
    scene.camera_position = sample_ring_location(camera_rings[ring_index], rng);
    scene.camera_target = {0.0, 0.0, 0.0};
    scene.camera_up = default_camera_up(scene.camera_position, scene.camera_target);
    scene.lamps = sample_lamps(lamp_spec, rng);
    scene.background_id = static_cast<int>(rng.uniform_int(0, corpus_size - 1));
    return scene;
}

}  // namespace synthforge
