#pragma once

#include <random>
#include <string>

#include "sog/grid.hpp"
#include "sog/render.hpp"

namespace sog {

enum class SceneKind { blobs, shell, sponge, random };

inline const char* to_string(SceneKind k) {
    switch (k) {
        case SceneKind::blobs: return "blobs";
        case SceneKind::shell: return "shell";
        case SceneKind::sponge: return "sponge";
        default: return "random";
    }
}

inline SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "blobs") return SceneKind::blobs;
    if (s == "shell") return SceneKind::shell;
    if (s == "sponge") return SceneKind::sponge;
    if (s == "random") return SceneKind::random;
    throw std::invalid_argument("unknown scene kind: " + s);
}

struct SceneParams {
    std::uint64_t seed = 1;
    double fraction = 0.05;    // random kind: Bernoulli occupancy probability
    int primitive_count = 12;  // blobs: sphere count
    double threshold = 0.01;   // binarization threshold over the density field
};

struct GeneratedScene {
    AnalyticScene scene;
    DenseGrid grid;
    double occupancy = 0.0;
};

namespace detail {

// Hand-rolled uniforms keep generated scenes identical across standard
// library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace detail

/// Accumulates primitive densities at voxel centers (restricted to each
/// primitive's bounding box) and thresholds the sum. Matches density_at
/// evaluated per voxel center, including summation order.
inline DenseGrid rasterize_occupancy(const AnalyticScene& scene, const GridTransform& t,
                                     double threshold) {
    ScalarField field;
    field.resolution = t.resolution;
    field.values.assign(t.voxel_count(), 0.0);
    for (const auto& prim : scene.primitives) {
        Vec3 lo, hi;
        if (prim.shape == Primitive::Shape::sphere) {
            const Vec3 r{prim.radius, prim.radius, prim.radius};
            lo = prim.center - r;
            hi = prim.center + r;
        } else {
            lo = prim.lo;
            hi = prim.hi;
        }
        const Vec3i ilo = t.world_to_index(lo);
        const Vec3i ihi = t.world_to_index(hi);
        const int x0 = std::max(0, ilo.x), x1 = std::min(t.resolution.x - 1, ihi.x);
        const int y0 = std::max(0, ilo.y), y1 = std::min(t.resolution.y - 1, ihi.y);
        const int z0 = std::max(0, ilo.z), z1 = std::min(t.resolution.z - 1, ihi.z);
        for (int z = z0; z <= z1; ++z)
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const Vec3i ijk{x, y, z};
                    if (prim.contains(t.index_to_world_center(ijk)))
                        field.values[t.linear_index(ijk)] += prim.density;
                }
    }
    return binarize(field, t, threshold);
}

/// Deterministic synthetic scenes. blobs: random spheres; shell: a hollow
/// sphere approximated by small spheres on a Fibonacci spiral; sponge: a
/// lattice of thin axis-aligned rods; random: iid Bernoulli voxel noise
/// under a single full-volume primitive.
inline GeneratedScene generate_scene(SceneKind kind, const GridTransform& t,
                                     const SceneParams& params) {
    if (params.fraction < 0.0 || params.fraction > 1.0)
        throw std::invalid_argument("occupancy fraction must lie in [0, 1]");
    if (params.primitive_count < 1)
        throw std::invalid_argument("primitive count must be >= 1");

    std::mt19937_64 rng(params.seed);
    const Vec3 wmin = t.world_min;
    const Vec3 wmax = t.world_max();
    const Vec3 extent = wmax - wmin;
    const Vec3 center = wmin + extent * 0.5;
    const double min_extent = std::min({extent.x, extent.y, extent.z});

    AnalyticScene scene;
    scene.background = {0.05, 0.06, 0.08};

    switch (kind) {
        case SceneKind::blobs: {
            for (int i = 0; i < params.primitive_count; ++i) {
                Vec3 c;
                for (int a = 0; a < 3; ++a)
                    c[a] = detail::uniform(rng, wmin[a] + 0.15 * extent[a],
                                           wmax[a] - 0.15 * extent[a]);
                const double r = detail::uniform(rng, 0.04, 0.10) * min_extent;
                const double sigma = detail::uniform(rng, 4.0, 12.0) / min_extent;
                const Vec3 rgb{detail::uniform(rng, 0.1, 1.0), detail::uniform(rng, 0.1, 1.0),
                               detail::uniform(rng, 0.1, 1.0)};
                scene.primitives.push_back(Primitive::sphere(c, r, sigma, rgb));
            }
            break;
        }
        case SceneKind::shell: {
            const int n = std::max(64, params.primitive_count);
            const double shell_radius = 0.35 * min_extent;
            const double bump = 1.6 * shell_radius * std::sqrt(M_PI / n);
            const double golden = M_PI * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < n; ++i) {
                const double y = 1.0 - 2.0 * (i + 0.5) / n;
                const double r = std::sqrt(1.0 - y * y);
                const double phi = golden * i;
                const Vec3 dir{r * std::cos(phi), y, r * std::sin(phi)};
                const Vec3 c = center + dir * shell_radius;
                const Vec3 rgb = Vec3{0.5, 0.5, 0.5} + dir * 0.45;
                scene.primitives.push_back(Primitive::sphere(c, bump, 8.0 / min_extent, rgb));
            }
            break;
        }
        case SceneKind::sponge: {
            const int cells = 4;
            const double inset = 0.1 * min_extent;
            const Vec3 lo = wmin + Vec3{inset, inset, inset};
            const Vec3 hi = wmax - Vec3{inset, inset, inset};
            const double w = 0.01 * min_extent;
            const double sigma = 10.0 / min_extent;
            const auto plane = [&](int axis, int i) {
                return lo[axis] + (hi[axis] - lo[axis]) * i / cells;
            };
            for (int axis = 0; axis < 3; ++axis) {
                const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                Vec3 col{0.15, 0.15, 0.15};
                col[axis] = 0.9;
                for (int i = 0; i <= cells; ++i)
                    for (int j = 0; j <= cells; ++j) {
                        Vec3 blo, bhi;
                        blo[axis] = lo[axis];
                        bhi[axis] = hi[axis];
                        blo[u] = plane(u, i) - w;
                        bhi[u] = plane(u, i) + w;
                        blo[v] = plane(v, j) - w;
                        bhi[v] = plane(v, j) + w;
                        scene.primitives.push_back(Primitive::box(blo, bhi, sigma, col));
                    }
            }
            break;
        }
        case SceneKind::random: {
            scene.primitives.push_back(
                Primitive::box(wmin, wmax, 3.0 / min_extent, {0.7, 0.7, 0.7}));
            break;
        }
    }
    scene.validate();

    GeneratedScene out{std::move(scene), DenseGrid(t), 0.0};
    if (kind == SceneKind::random) {
        DenseGrid grid(t);
        for (int z = 0; z < t.resolution.z; ++z)
            for (int y = 0; y < t.resolution.y; ++y)
                for (int x = 0; x < t.resolution.x; ++x)
                    if (detail::uniform01(rng) < params.fraction)
                        grid.set_voxel({x, y, z}, true);
        out.grid = std::move(grid);
    } else {
        out.grid = rasterize_occupancy(out.scene, t, params.threshold);
    }
    out.occupancy = out.grid.occupancy_fraction();
    return out;
}

/// Concentric occupancy grids for the scene: level b shares the resolution
/// and doubles the voxel size, so its bounds grow around the same center.
inline DenseCascade build_dense_cascade(const AnalyticScene& scene, const GridTransform& base,
                                        int levels, double threshold) {
    if (levels < 1) throw std::invalid_argument("cascade needs at least one level");
    DenseCascade cascade;
    const Vec3 extent = base.world_max() - base.world_min;
    const Vec3 center = base.world_min + extent * 0.5;
    for (int b = 0; b < levels; ++b) {
        const double scale = static_cast<double>(1u << b);
        const GridTransform t(base.resolution, center - extent * (0.5 * scale),
                              base.voxel_size * scale);
        cascade.levels.push_back(rasterize_occupancy(scene, t, threshold));
    }
    return cascade;
}

inline SparseCascade build_sparse_cascade(const DenseCascade& dense) {
    SparseCascade out;
    for (const auto& level : dense.levels) out.levels.push_back(build_sparse(level));
    return out;
}

} // namespace sog
