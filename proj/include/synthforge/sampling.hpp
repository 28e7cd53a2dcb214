#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "synthforge/rng.hpp"
#include "synthforge/vec.hpp"

namespace synthforge {

/// Normal distribution conditioned to lie inside [a, b]. Limits may be
/// infinite on either side.
struct TruncatedNormalSpec {
    double mu = 0.0;
    double sigma = 1.0;
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();

    void validate() const;  // throws std::invalid_argument
};

enum class Axis { X, Y, Z };

/// Camera (or lamp) locations concentrated near a circle on a sphere.
/// The base distribution lives in the X-Y plane (ring normal Z); other
/// normals are realized by rotating the drawn point.
struct RingSpec {
    TruncatedNormalSpec radius_dist;
    double phi_sigma = 0.25;  // radians; ring width
    Axis normal_axis = Axis::Z;

    void validate() const;
};

struct LampSpec {
    int count_min = 1;
    int count_max = 1;
    TruncatedNormalSpec energy_dist;  // must be truncated to [0, +inf)
    TruncatedNormalSpec radius_dist;
    bool exact_sphere = false;  // exact uniform directions instead of the pi/3 ring heuristic

    void validate() const;
};

struct Lamp {
    Vec3 position;
    double energy = 0.0;

    bool operator==(const Lamp&) const = default;
};

/// One fully realized draw of every stochastic scene parameter. Construction
/// is a pure function of the generating specs and rng_seed.
struct SceneSample {
    Vec3 camera_position;
    Vec3 camera_target;
    Vec3 camera_up;
    std::vector<Lamp> lamps;
    int background_id = 0;
    std::uint64_t rng_seed = 0;

    bool operator==(const SceneSample&) const = default;
};

/// Draws from N(mu, sigma) conditioned on [a, b]. Rejection against the
/// untruncated normal; falls back to inverse-CDF sampling when the acceptance
/// region holds less than 1% of the mass.
double truncnorm_sample(const TruncatedNormalSpec& spec, Rng& rng);

/// Elevation convention: x = rho cos(phi) cos(theta), y = rho cos(phi) sin(theta),
/// z = rho sin(phi). phi = 0 is the equator, phi = +-pi/2 the poles.
Vec3 spherical_to_cartesian(double rho, double theta, double phi);

/// Right-handed rotation about the world Y axis.
Vec3 rotate_about_y(const Vec3& p, double angle);

/// Right-handed rotation about the world X axis.
Vec3 rotate_about_x(const Vec3& p, double angle);

/// Draws rho ~ T(radius_dist), phi ~ T(0, phi_sigma, -pi/2, pi/2),
/// theta ~ U(0, 2pi), converts to Cartesian, then reorients the Z-normal ring
/// onto the requested axis. Consumption order is rho, phi, theta.
Vec3 sample_ring_location(const RingSpec& spec, Rng& rng);

/// Direction uniform on the unit sphere: z ~ U(-1, 1), theta ~ U(0, 2pi).
Vec3 uniform_sphere_dir(Rng& rng);

/// Lamp count ~ U{count_min..count_max}; positions on a sphere-ish shell
/// (ring heuristic with phi_sigma = pi/3, or the exact sampler when
/// spec.exact_sphere); energies ~ T(energy_dist). Per lamp, position is drawn
/// before energy.
std::vector<Lamp> sample_lamps(const LampSpec& spec, Rng& rng);

/// World-Z up, falling back to world-X when the view direction from position
/// to target is within 1e-6 of +-Z.
Vec3 default_camera_up(const Vec3& position, const Vec3& target);

/// Full scene draw: ring choice, camera position, lamps, background index,
/// in that stream order. Camera always aims at the origin with world-Z up
/// (world-X up when the view direction is degenerate with Z).
SceneSample sample_scene(const std::vector<RingSpec>& camera_rings, const LampSpec& lamp_spec,
                         int corpus_size, std::uint64_t seed);

}  // namespace synthforge
