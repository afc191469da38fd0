#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sog/ray.hpp"
#include "sog/sampling.hpp"

namespace sog {

/// Analytic emission-absorption scene: a handful of constant-density,
/// constant-color primitives over a background. Stands in for a radiance
/// field so renders are exactly reproducible.
struct Primitive {
    enum class Shape { sphere, box };

    Shape shape = Shape::sphere;
    Vec3 center;       // sphere
    double radius = 0; // sphere
    Vec3 lo, hi;       // box
    double density = 0.0;
    Vec3 color{1, 1, 1};

    static Primitive sphere(const Vec3& c, double r, double sigma, const Vec3& rgb) {
        Primitive p;
        p.shape = Shape::sphere;
        p.center = c;
        p.radius = r;
        p.density = sigma;
        p.color = rgb;
        return p;
    }

    static Primitive box(const Vec3& lo, const Vec3& hi, double sigma, const Vec3& rgb) {
        Primitive p;
        p.shape = Shape::box;
        p.lo = lo;
        p.hi = hi;
        p.density = sigma;
        p.color = rgb;
        return p;
    }

    bool contains(const Vec3& p) const {
        if (shape == Shape::sphere) {
            const Vec3 d = p - center;
            return d.dot(d) <= radius * radius;
        }
        return p.x >= lo.x && p.y >= lo.y && p.z >= lo.z && p.x < hi.x && p.y < hi.y && p.z < hi.z;
    }
};

struct AnalyticScene {
    std::vector<Primitive> primitives;
    Vec3 background{0, 0, 0};

    void validate() const {
        for (const auto& p : primitives) {
            if (p.density < 0.0) throw std::invalid_argument("primitive density must be >= 0");
            for (int c = 0; c < 3; ++c)
                if (p.color[c] < 0.0 || p.color[c] > 1.0)
                    throw std::invalid_argument("primitive color must lie in [0,1]");
        }
    }

    double density_at(const Vec3& p) const {
        double sigma = 0.0;
        for (const auto& prim : primitives)
            if (prim.contains(p)) sigma += prim.density;
        return sigma;
    }

    /// Density-weighted blend of the containing primitives' colors.
    Vec3 emission_at(const Vec3& p) const {
        Vec3 c{0, 0, 0};
        double sigma = 0.0;
        for (const auto& prim : primitives)
            if (prim.contains(p)) {
                c += prim.color * prim.density;
                sigma += prim.density;
            }
        return sigma > 0.0 ? c / sigma : c;
    }
};

struct CompositeResult {
    Vec3 color{0, 0, 0};
    double weight_sum = 0.0;      // accumulated opacity
    double transmittance = 1.0;   // what is left for the background
};

/// Front-to-back emission-absorption quadrature over a sample buffer. The
/// step of each sample is the gap to the next one; the last sample falls
/// back to the schedule's local step. weight_sum + transmittance stays 1 up
/// to rounding, which the tests pin at 1e-12.
inline CompositeResult composite_detailed(const Ray& ray, const SampleBuffer& samples,
                                          const AnalyticScene& scene, const StepSchedule& sched) {
    CompositeResult r;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double t = samples[i];
        const double dt = (i + 1 < samples.size()) ? samples[i + 1] - t : sched.step(t);
        const Vec3 p = ray.at(t);
        const double sigma = scene.density_at(p);
        if (sigma <= 0.0) continue;
        const double alpha = 1.0 - std::exp(-sigma * dt);
        const double w = r.transmittance * alpha;
        r.color += scene.emission_at(p) * w;
        r.weight_sum += w;
        r.transmittance *= 1.0 - alpha;
    }
    r.color += scene.background * r.transmittance;
    return r;
}

inline Vec3 composite(const Ray& ray, const SampleBuffer& samples, const AnalyticScene& scene,
                      const StepSchedule& sched) {
    return composite_detailed(ray, samples, scene, sched).color;
}

/// 8-bit RGB image, rows top to bottom.
class Image {
public:
    Image() = default;
    Image(int w, int h) : width_(w), height_(h), rgb_(static_cast<std::size_t>(w) * h * 3, 0) {
        if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }

    void set_pixel(int x, int y, const Vec3& linear_rgb) {
        const std::size_t at = (static_cast<std::size_t>(y) * width_ + x) * 3;
        for (int c = 0; c < 3; ++c) {
            const double v = std::min(1.0, std::max(0.0, linear_rgb[c]));
            rgb_[at + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }

    std::uint8_t channel(int x, int y, int c) const {
        return rgb_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c];
    }

    const std::vector<std::uint8_t>& data() const { return rgb_; }

    bool operator==(const Image& o) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> rgb_;
};

inline constexpr double kPsnrIdenticalSentinel = 99.0;

/// Peak signal-to-noise ratio in dB over all channels of two equally sized
/// 8-bit images. Identical images report the 99 dB sentinel.
inline double psnr(const Image& a, const Image& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("psnr: image dimensions differ");
    const auto& da = a.data();
    const auto& db = b.data();
    double sq = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
        sq += d * d;
    }
    if (sq == 0.0) return kPsnrIdenticalSentinel;
    const double mse = sq / static_cast<double>(da.size());
    return std::min(kPsnrIdenticalSentinel, 10.0 * std::log10(255.0 * 255.0 / mse));
}

/// Binary PPM (P6), the format of record for image outputs.
inline void write_ppm(std::ostream& os, const Image& img) {
    os << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data().data()),
             static_cast<std::streamsize>(img.data().size()));
}

} // namespace sog
