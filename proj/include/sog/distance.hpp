#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sog/grid.hpp"

namespace sog {

/// Per-voxel chessboard (L-infinity) distance to the nearest occupied voxel,
/// zero on occupied voxels. Values are exact. When the source grid has no
/// occupied voxels at all, every distance is the sentinel max(resolution)
/// and all_empty() reports it.
class DistanceGrid {
public:
    DistanceGrid() = default;
    DistanceGrid(const GridTransform& t, std::vector<std::int32_t> dist, bool all_empty)
        : transform_(t), dist_(std::move(dist)), all_empty_(all_empty) {}

    const GridTransform& transform() const { return transform_; }
    bool all_empty() const { return all_empty_; }

    /// Out-of-bounds coordinates read as distance 1: never occupied, never
    /// skippable, which keeps marching conservative at the grid edge.
    std::int32_t at(const Vec3i& ijk) const {
        if (!transform_.contains(ijk)) return 1;
        return dist_[transform_.linear_index(ijk)];
    }

    std::int32_t sentinel() const {
        return std::max({transform_.resolution.x, transform_.resolution.y,
                         transform_.resolution.z});
    }

private:
    GridTransform transform_;
    std::vector<std::int32_t> dist_;
    bool all_empty_ = false;
};

/// Two-pass chamfer transform over the 26-neighborhood with unit weights,
/// which is exact for the chessboard metric. Forward sweep consults the 13
/// already-visited neighbors, backward sweep the other 13.
inline DistanceGrid build_distance(const DenseGrid& dense) {
    const GridTransform& t = dense.transform();
    const Vec3i res = t.resolution;
    const std::int32_t kInf = 1 << 29;
    std::vector<std::int32_t> dist(t.voxel_count());

    std::size_t idx = 0;
    bool any_occupied = false;
    for (int z = 0; z < res.z; ++z)
        for (int y = 0; y < res.y; ++y)
            for (int x = 0; x < res.x; ++x, ++idx) {
                const bool occ = dense.voxel_at({x, y, z});
                dist[idx] = occ ? 0 : kInf;
                any_occupied |= occ;
            }

    if (!any_occupied) {
        const std::int32_t sentinel = std::max({res.x, res.y, res.z});
        std::fill(dist.begin(), dist.end(), sentinel);
        return DistanceGrid(t, std::move(dist), true);
    }

    const auto at = [&](int x, int y, int z) -> std::int32_t {
        if (x < 0 || y < 0 || z < 0 || x >= res.x || y >= res.y || z >= res.z) return kInf;
        return dist[(static_cast<std::size_t>(z) * res.y + y) * res.x + x];
    };

    // forward: all neighbors with (dz, dy, dx) lexicographically before 0
    for (int z = 0; z < res.z; ++z)
        for (int y = 0; y < res.y; ++y)
            for (int x = 0; x < res.x; ++x) {
                std::int32_t best = at(x, y, z);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        best = std::min(best, at(x + dx, y + dy, z - 1) + 1);
                best = std::min(best, at(x - 1, y - 1, z) + 1);
                best = std::min(best, at(x, y - 1, z) + 1);
                best = std::min(best, at(x + 1, y - 1, z) + 1);
                best = std::min(best, at(x - 1, y, z) + 1);
                dist[(static_cast<std::size_t>(z) * res.y + y) * res.x + x] = best;
            }

    // backward: mirror image of the forward mask
    for (int z = res.z - 1; z >= 0; --z)
        for (int y = res.y - 1; y >= 0; --y)
            for (int x = res.x - 1; x >= 0; --x) {
                std::int32_t best = at(x, y, z);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx)
                        best = std::min(best, at(x + dx, y + dy, z + 1) + 1);
                best = std::min(best, at(x + 1, y + 1, z) + 1);
                best = std::min(best, at(x, y + 1, z) + 1);
                best = std::min(best, at(x - 1, y + 1, z) + 1);
                best = std::min(best, at(x + 1, y, z) + 1);
                dist[(static_cast<std::size_t>(z) * res.y + y) * res.x + x] = best;
            }

    return DistanceGrid(t, std::move(dist), false);
}

} // namespace sog
