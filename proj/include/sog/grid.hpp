#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sog/ray.hpp"
#include "sog/vec.hpp"

namespace sog {

/// Index-to-world mapping of an axis-aligned voxel grid with cubic voxels.
/// Voxel ijk covers the half-open world box
/// [world_min + ijk*voxel_size, world_min + (ijk+1)*voxel_size).
struct GridTransform {
    Vec3i resolution{1, 1, 1};
    Vec3 world_min{0.0, 0.0, 0.0};
    double voxel_size = 1.0;

    GridTransform() = default;
    GridTransform(const Vec3i& res, const Vec3& wmin, double vsize)
        : resolution(res), world_min(wmin), voxel_size(vsize) {
        if (res.x < 1 || res.y < 1 || res.z < 1)
            throw std::invalid_argument("grid resolution components must be >= 1");
        if (!(vsize > 0.0))
            throw std::invalid_argument("voxel size must be positive");
    }

    /// Convenience for cubic grids centered on a world box.
    static GridTransform cube(int res, const Vec3& wmin, double extent) {
        return GridTransform({res, res, res}, wmin, extent / res);
    }

    Vec3 world_max() const {
        return world_min + Vec3(resolution.x, resolution.y, resolution.z) * voxel_size;
    }

    Vec3 index_to_world_corner(const Vec3i& ijk) const {
        return world_min + Vec3(ijk.x, ijk.y, ijk.z) * voxel_size;
    }

    Vec3 index_to_world_center(const Vec3i& ijk) const {
        return world_min + Vec3(ijk.x + 0.5, ijk.y + 0.5, ijk.z + 0.5) * voxel_size;
    }

    Vec3i world_to_index(const Vec3& p) const {
        const Vec3 g = (p - world_min) / voxel_size;
        return {static_cast<int>(std::floor(g.x)), static_cast<int>(std::floor(g.y)),
                static_cast<int>(std::floor(g.z))};
    }

    bool contains(const Vec3i& ijk) const {
        return ijk.x >= 0 && ijk.y >= 0 && ijk.z >= 0 && ijk.x < resolution.x &&
               ijk.y < resolution.y && ijk.z < resolution.z;
    }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(resolution.x) * resolution.y * resolution.z;
    }

    /// x-fastest linearization; callers must pass in-bounds coordinates.
    std::size_t linear_index(const Vec3i& ijk) const {
        return (static_cast<std::size_t>(ijk.z) * resolution.y + ijk.y) * resolution.x + ijk.x;
    }

    bool operator==(const GridTransform& o) const = default;
};

/// Granularity of a traversal step. leaf_voxel is a single voxel inside a
/// mixed leaf; leaf_tile is a uniform 8^3 block; internal_tile a uniform
/// 128^3 block; root_tile is the unbounded background outside the grid.
enum class Level : std::uint8_t { leaf_voxel = 0, leaf_tile = 1, internal_tile = 2, root_tile = 3 };

constexpr int level_extent(Level level) {
    switch (level) {
        case Level::leaf_voxel: return 1;
        case Level::leaf_tile: return 8;
        default: return 128;
    }
}

inline const char* level_name(Level level) {
    switch (level) {
        case Level::leaf_voxel: return "leaf_voxel";
        case Level::leaf_tile: return "leaf_tile";
        case Level::internal_tile: return "internal_tile";
        default: return "root_tile";
    }
}

/// One step of a ray traversal: the node crossed, its granularity, the
/// parametric interval spent inside it, and its occupancy. Intervals are
/// half-open [t0, t1); consecutive events from one analyzer share the
/// boundary value exactly.
struct TraversalEvent {
    Vec3i ijk;            // lowest voxel of the node
    Level level = Level::leaf_voxel;
    double t0 = 0.0;
    double t1 = 0.0;
    bool occupied = false;
};

/// Dense scalar field, x-fastest, used as the binarization source.
struct ScalarField {
    Vec3i resolution{0, 0, 0};
    std::vector<double> values;

    double at(const Vec3i& ijk) const {
        return values[(static_cast<std::size_t>(ijk.z) * resolution.y + ijk.y) * resolution.x +
                      ijk.x];
    }
};

/// Bit-per-voxel occupancy grid. Bits are stored x-fastest, LSB-first within
/// each byte, which is also the on-disk payload layout. Immutable once built
/// except through set_voxel, and safe for concurrent reads.
class DenseGrid {
public:
    DenseGrid() = default;
    explicit DenseGrid(const GridTransform& t)
        : transform_(t), bits_((t.voxel_count() + 7) / 8, 0u) {}

    const GridTransform& transform() const { return transform_; }

    /// Occupancy lookup; out-of-bounds coordinates read as empty.
    bool voxel_at(const Vec3i& ijk) const {
        if (!transform_.contains(ijk)) return false;
        const std::size_t idx = transform_.linear_index(ijk);
        return (bits_[idx >> 3] >> (idx & 7)) & 1u;
    }

    void set_voxel(const Vec3i& ijk, bool value) {
        if (!transform_.contains(ijk))
            throw std::out_of_range("set_voxel: coordinate outside grid");
        const std::size_t idx = transform_.linear_index(ijk);
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (idx & 7));
        if (value)
            bits_[idx >> 3] |= mask;
        else
            bits_[idx >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (std::size_t idx = 0; idx < transform_.voxel_count(); ++idx)
            n += (bits_[idx >> 3] >> (idx & 7)) & 1u;
        return n;
    }

    double occupancy_fraction() const {
        return static_cast<double>(occupied_count()) / static_cast<double>(transform_.voxel_count());
    }

    const std::vector<std::uint8_t>& payload() const { return bits_; }
    std::vector<std::uint8_t>& payload() { return bits_; }

    bool operator==(const DenseGrid& o) const = default;

private:
    GridTransform transform_;
    std::vector<std::uint8_t> bits_;
};

/// Thresholds a density field into occupancy. A bit is set iff the density
/// is strictly greater than the threshold.
inline DenseGrid binarize(const ScalarField& field, const GridTransform& transform,
                          double threshold) {
    if (field.values.empty() || field.resolution.x < 1 || field.resolution.y < 1 ||
        field.resolution.z < 1)
        throw std::invalid_argument("binarize: degenerate grid");
    if (field.resolution != transform.resolution)
        throw std::invalid_argument("binarize: field dimensions do not match transform");
    DenseGrid grid(transform);
    std::size_t idx = 0;
    for (int z = 0; z < transform.resolution.z; ++z)
        for (int y = 0; y < transform.resolution.y; ++y)
            for (int x = 0; x < transform.resolution.x; ++x, ++idx)
                if (field.values[idx] > threshold)
                    grid.set_voxel({x, y, z}, true);
    return grid;
}

/// Samples a density function at voxel centers and thresholds the result.
template <class DensityFn>
DenseGrid binarize(const GridTransform& transform, DensityFn&& density, double threshold) {
    DenseGrid grid(transform);
    for (int z = 0; z < transform.resolution.z; ++z)
        for (int y = 0; y < transform.resolution.y; ++y)
            for (int x = 0; x < transform.resolution.x; ++x) {
                const Vec3i ijk{x, y, z};
                if (density(transform.index_to_world_center(ijk)) > threshold)
                    grid.set_voxel(ijk, true);
            }
    return grid;
}

/// Clips a ray against the grid's world bounds. Absence means the ray never
/// overlaps the grid inside its own parametric range.
inline std::optional<std::pair<double, double>> clip_ray(const Ray& ray,
                                                         const GridTransform& transform) {
    return clip_to_box(ray, transform.world_min, transform.world_max());
}

} // namespace sog
