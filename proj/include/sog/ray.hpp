#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sog/vec.hpp"

namespace sog {

/// A ray with a parametric clip range. Directions must be unit length so
/// that t is measured in world units.
struct Ray {
    Vec3 origin;
    Vec3 direction;
    double t_min = 0.0;
    double t_max = std::numeric_limits<double>::max();

    Ray(const Vec3& o, const Vec3& d, double tmin, double tmax)
        : origin(o), direction(d), t_min(tmin), t_max(tmax) {
        if (std::abs(d.length() - 1.0) > 1e-9)
            throw std::invalid_argument("ray direction must be unit length");
        if (!(tmin >= 0.0))
            throw std::invalid_argument("ray t_min must be >= 0");
        if (!(tmin < tmax))
            throw std::invalid_argument("ray t_min must be < t_max");
    }

    /// Builds a ray from an arbitrary (non-zero) direction by normalizing it.
    static Ray from_dir(const Vec3& o, const Vec3& d, double tmin, double tmax) {
        return Ray(o, d.normalized(), tmin, tmax);
    }

    Vec3 at(double t) const { return origin + direction * t; }
};

/// Slab clip of a ray against an axis-aligned box. The box is treated as
/// half-open ([lo, hi) per axis) so that a ray lying exactly on the far face
/// of a degenerate axis counts as outside. Returns the intersection of the
/// box overlap with [t_min, t_max], or nothing when the overlap is empty.
/// The returned range always satisfies t_enter < t_exit.
inline std::optional<std::pair<double, double>> clip_to_box(const Ray& ray,
                                                            const Vec3& lo,
                                                            const Vec3& hi) {
    double t_enter = ray.t_min;
    double t_exit = ray.t_max;
    for (int a = 0; a < 3; ++a) {
        const double d = ray.direction[a];
        const double o = ray.origin[a];
        if (d == 0.0) {
            if (o < lo[a] || o >= hi[a]) return std::nullopt;
            continue;
        }
        double ta = (lo[a] - o) / d;
        double tb = (hi[a] - o) / d;
        if (ta > tb) std::swap(ta, tb);
        t_enter = std::max(t_enter, ta);
        t_exit = std::min(t_exit, tb);
    }
    if (!(t_enter < t_exit)) return std::nullopt;
    return std::make_pair(t_enter, t_exit);
}

} // namespace sog
