#pragma once

#include <cmath>
#include <stdexcept>

#include "sog/ray.hpp"

namespace sog {

/// Pinhole look-at camera. Right-handed basis: forward = normalize(target -
/// position), right = normalize(forward x up), camera-up = right x forward.
/// A ray goes through the center of pixel (px, py) with px growing right
/// and py growing down; directions are normalized. This parameterization is
/// spelled out in the README so traces are reproducible.
struct Camera {
    Vec3 position{0, 0, 2};
    Vec3 target{0, 0, 0};
    Vec3 up{0, 1, 0};
    double vfov_deg = 45.0;
    int width = 160;
    int height = 120;
    double t_far = 1e6;

    Ray pixel_ray(int px, int py) const {
        if (px < 0 || py < 0 || px >= width || py >= height)
            throw std::out_of_range("pixel outside image");
        const Vec3 forward = (target - position).normalized();
        const Vec3 right = forward.cross(up).normalized();
        const Vec3 cam_up = right.cross(forward);
        const double tan_half = std::tan(vfov_deg * 0.5 * M_PI / 180.0);
        const double aspect = static_cast<double>(width) / height;
        const double u = ((px + 0.5) / width * 2.0 - 1.0) * tan_half * aspect;
        const double v = (1.0 - (py + 0.5) / height * 2.0) * tan_half;
        const Vec3 dir = (forward + right * u + cam_up * v).normalized();
        return Ray(position, dir, 0.0, t_far);
    }
};

} // namespace sog
