#pragma once

// Test-only helpers: independent oracles and random input generators. The
// oracles deliberately avoid the library's traversal/build code paths so
// they can serve as references for it.

#include <algorithm>
#include <random>
#include <vector>

#include "sog/distance.hpp"
#include "sog/grid.hpp"
#include "sog/ray.hpp"

namespace testsupport {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// --------------------------------------------------------------------------
// Generators
// --------------------------------------------------------------------------

inline sog::DenseGrid random_grid(std::mt19937_64& rng, const sog::GridTransform& t,
                                  double fraction) {
    sog::DenseGrid g(t);
    for (int z = 0; z < t.resolution.z; ++z)
        for (int y = 0; y < t.resolution.y; ++y)
            for (int x = 0; x < t.resolution.x; ++x)
                if (uniform01(rng) < fraction) g.set_voxel({x, y, z}, true);
    return g;
}

/// Random occupancy painted in solid 8-aligned blocks plus voxel noise, so
/// that the sparse build actually produces tiles.
inline sog::DenseGrid random_blocky_grid(std::mt19937_64& rng, const sog::GridTransform& t,
                                         double block_fraction, double noise_fraction) {
    sog::DenseGrid g(t);
    const int bx = (t.resolution.x + 7) / 8, by = (t.resolution.y + 7) / 8,
              bz = (t.resolution.z + 7) / 8;
    for (int z = 0; z < bz; ++z)
        for (int y = 0; y < by; ++y)
            for (int x = 0; x < bx; ++x) {
                if (uniform01(rng) >= block_fraction) continue;
                for (int lz = 0; lz < 8; ++lz)
                    for (int ly = 0; ly < 8; ++ly)
                        for (int lx = 0; lx < 8; ++lx) {
                            const sog::Vec3i ijk{x * 8 + lx, y * 8 + ly, z * 8 + lz};
                            if (t.contains(ijk)) g.set_voxel(ijk, true);
                        }
            }
    for (int z = 0; z < t.resolution.z; ++z)
        for (int y = 0; y < t.resolution.y; ++y)
            for (int x = 0; x < t.resolution.x; ++x)
                if (uniform01(rng) < noise_fraction) g.set_voxel({x, y, z}, true);
    return g;
}

/// Ray from a random point on a sphere around the grid toward a random
/// interior point.
inline sog::Ray random_ray(std::mt19937_64& rng, const sog::GridTransform& t) {
    const sog::Vec3 extent = t.world_max() - t.world_min;
    const sog::Vec3 center = t.world_min + extent * 0.5;
    const double radius = extent.length();
    while (true) {
        const double z = uniform(rng, -1.0, 1.0);
        const double phi = uniform(rng, 0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const sog::Vec3 pos = center + sog::Vec3{r * std::cos(phi), z, r * std::sin(phi)} * radius;
        sog::Vec3 aim;
        for (int a = 0; a < 3; ++a)
            aim[a] = uniform(rng, t.world_min[a] + 0.05 * extent[a],
                             t.world_max()[a] - 0.05 * extent[a]);
        const sog::Vec3 dir = aim - pos;
        if (dir.length() > 1e-9) return sog::Ray::from_dir(pos, dir, 0.0, 1e9);
    }
}

// --------------------------------------------------------------------------
// Oracles
// --------------------------------------------------------------------------

/// O(occupied * N) reference chessboard distance: per voxel, minimum over
/// every occupied voxel of the L-infinity coordinate distance.
inline std::vector<std::int32_t> brute_force_linf_distance(const sog::DenseGrid& g) {
    const sog::GridTransform& t = g.transform();
    std::vector<sog::Vec3i> occupied;
    for (int z = 0; z < t.resolution.z; ++z)
        for (int y = 0; y < t.resolution.y; ++y)
            for (int x = 0; x < t.resolution.x; ++x)
                if (g.voxel_at({x, y, z})) occupied.push_back({x, y, z});
    std::vector<std::int32_t> dist(t.voxel_count());
    const std::int32_t sentinel =
        std::max({t.resolution.x, t.resolution.y, t.resolution.z});
    std::size_t idx = 0;
    for (int z = 0; z < t.resolution.z; ++z)
        for (int y = 0; y < t.resolution.y; ++y)
            for (int x = 0; x < t.resolution.x; ++x, ++idx) {
                std::int32_t best = sentinel;
                for (const auto& o : occupied) {
                    const std::int32_t d = std::max(
                        {std::abs(o.x - x), std::abs(o.y - y), std::abs(o.z - z)});
                    best = std::min(best, d);
                    if (best == 0) break;
                }
                dist[idx] = best;
            }
    return dist;
}

/// Cells visited by a ray, found by dense point sampling along the clipped
/// range, consecutive duplicates removed. step_fraction is in voxel units.
inline std::vector<sog::Vec3i> point_sampled_cells(const sog::Ray& ray,
                                                   const sog::GridTransform& t,
                                                   double step_fraction = 1e-3) {
    std::vector<sog::Vec3i> cells;
    const auto clip = sog::clip_ray(ray, t);
    if (!clip) return cells;
    const double dt = step_fraction * t.voxel_size;
    for (double s = clip->first + dt * 0.5; s < clip->second; s += dt) {
        sog::Vec3i c = t.world_to_index(ray.at(s));
        for (int a = 0; a < 3; ++a)
            c[a] = std::max(0, std::min(t.resolution[a] - 1, c[a]));
        if (cells.empty() || !(cells.back() == c)) cells.push_back(c);
    }
    return cells;
}

} // namespace testsupport
