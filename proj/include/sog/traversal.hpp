#pragma once

#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <span>

#include "sog/distance.hpp"
#include "sog/grid.hpp"
#include "sog/sparse.hpp"

namespace sog {

namespace detail {

/// Effectively infinite parametric step, substituted on axes the ray does
/// not move along.
inline constexpr double kInfiniteStep = std::numeric_limits<double>::max() / 4;

/// Ray mapped into grid index space, with the clipped parametric range and
/// an exact plane-crossing evaluator. Every boundary parameter an analyzer
/// emits comes from plane_t anchored at the clip entry, so the DDA, HDDA
/// and CD streams produce bit-identical t values for the same geometric
/// plane. The traversal exit is itself re-derived through plane_t, which
/// keeps the final event boundary consistent with interior crossings.
struct RayGridGeometry {
    Vec3 entry_g;   // grid-space position at t_enter
    Vec3 dir_g;     // grid-space direction (voxels per world t)
    Vec3 inv_dir_g; // reciprocal, kInfiniteStep on still axes
    Vec3i step;     // -1 / 0 / +1
    double t_enter = 0.0;
    double t_exit = 0.0;
    bool valid = false;

    RayGridGeometry() = default;

    RayGridGeometry(const Ray& ray, const GridTransform& t) {
        const auto clip = clip_ray(ray, t);
        if (!clip) return;
        t_enter = clip->first;
        for (int a = 0; a < 3; ++a) {
            dir_g[a] = ray.direction[a] / t.voxel_size;
            entry_g[a] =
                (ray.origin[a] + ray.direction[a] * t_enter - t.world_min[a]) / t.voxel_size;
            if (dir_g[a] > 0.0) {
                step[a] = 1;
                inv_dir_g[a] = 1.0 / dir_g[a];
            } else if (dir_g[a] < 0.0) {
                step[a] = -1;
                inv_dir_g[a] = 1.0 / dir_g[a];
            } else {
                step[a] = 0;
                inv_dir_g[a] = kInfiniteStep;
            }
        }
        t_exit = ray.t_max;
        for (int a = 0; a < 3; ++a) {
            if (step[a] == 0) continue;
            const double far_plane = step[a] > 0 ? static_cast<double>(t.resolution[a]) : 0.0;
            t_exit = std::min(t_exit, plane_t(a, far_plane));
        }
        valid = t_enter < t_exit;
    }

    double plane_t(int axis, double plane) const {
        return t_enter + (plane - entry_g[axis]) * inv_dir_g[axis];
    }

    double grid_coord(int axis, double t) const {
        return entry_g[axis] + (t - t_enter) * dir_g[axis];
    }

    /// Cell containing the entry point. A point exactly on an integer plane
    /// belongs to the lower cell when traveling in the negative direction,
    /// matching the half-open event convention.
    Vec3i entry_cell(const Vec3i& res) const {
        Vec3i ijk;
        for (int a = 0; a < 3; ++a) {
            double c = std::floor(entry_g[a]);
            if (step[a] < 0 && c == entry_g[a]) c -= 1.0;
            ijk[a] = static_cast<int>(std::max(0.0, std::min(c, static_cast<double>(res[a] - 1))));
        }
        return ijk;
    }

    /// Cell just past a boundary crossing at parameter t, where the crossing
    /// stepped `axis` onto the integer plane `stepped_coord` belongs to.
    /// Still axes keep their previous coordinate; the rest are re-derived
    /// from the position.
    Vec3i cell_after_crossing(double t, int axis, int stepped_coord, const Vec3i& prev) const {
        Vec3i ijk = prev;
        for (int a = 0; a < 3; ++a) {
            if (a == axis) {
                ijk[a] = stepped_coord;
            } else if (step[a] != 0) {
                const double g = grid_coord(a, t);
                double c = std::floor(g);
                if (step[a] < 0 && c == g) c -= 1.0;
                ijk[a] = static_cast<int>(c);
            }
        }
        return ijk;
    }

    /// Smallest-t axis, ties resolved toward the smallest index.
    static int argmin_axis(const double (&t)[3]) {
        int axis = 0;
        if (t[1] < t[0]) axis = 1;
        if (t[2] < t[axis]) axis = 2;
        return axis;
    }
};

} // namespace detail

/// Voxel-by-voxel analyzer over a dense grid (Amanatides-Woo stepping).
/// Emits one event per voxel crossed; one occupancy lookup and one step per
/// event.
class DdaTraversal {
public:
    using Event = TraversalEvent;

    DdaTraversal(const DenseGrid& grid, const Ray& ray)
        : grid_(&grid), geom_(ray, grid.transform()) {
        if (!geom_.valid) {
            done_ = true;
            return;
        }
        ijk_ = geom_.entry_cell(grid.transform().resolution);
        t_cur_ = geom_.t_enter;
        for (int a = 0; a < 3; ++a) {
            if (geom_.step[a] == 0) {
                next_plane_[a] = 0;
                t_next_[a] = detail::kInfiniteStep;
            } else {
                next_plane_[a] = ijk_[a] + (geom_.step[a] > 0 ? 1 : 0);
                t_next_[a] = geom_.plane_t(a, next_plane_[a]);
            }
        }
    }

    std::optional<TraversalEvent> next() {
        if (done_) return std::nullopt;
        while (true) {
            const int axis = detail::RayGridGeometry::argmin_axis(t_next_);
            const double t1 = t_next_[axis];
            if (t1 >= geom_.t_exit) {
                done_ = true;
                return emit(geom_.t_exit);
            }
            if (t1 <= t_cur_) { // degenerate corner crossing, advance silently
                advance(axis);
                if (done_) return std::nullopt;
                continue;
            }
            TraversalEvent ev = emit(t1);
            t_cur_ = t1;
            advance(axis);
            return ev;
        }
    }

    long lookup_count() const { return lookup_count_; }
    long step_count() const { return step_count_; }
    bool valid() const { return geom_.valid; }
    double t_enter() const { return geom_.t_enter; }
    double t_exit() const { return geom_.t_exit; }

private:
    TraversalEvent emit(double t1) {
        ++step_count_;
        ++lookup_count_;
        return {ijk_, Level::leaf_voxel, t_cur_, t1, grid_->voxel_at(ijk_)};
    }

    void advance(int axis) {
        ijk_[axis] += geom_.step[axis];
        next_plane_[axis] += geom_.step[axis];
        t_next_[axis] = geom_.plane_t(axis, next_plane_[axis]);
        if (ijk_[axis] < 0 || ijk_[axis] >= grid_->transform().resolution[axis]) done_ = true;
    }

    const DenseGrid* grid_;
    detail::RayGridGeometry geom_;
    Vec3i ijk_;
    int next_plane_[3] = {0, 0, 0};
    double t_next_[3] = {0.0, 0.0, 0.0};
    double t_cur_ = 0.0;
    long lookup_count_ = 0;
    long step_count_ = 0;
    bool done_ = false;
};

/// Hierarchical analyzer over the sparse tree. Each step queries the node
/// containing the current voxel, emits one event spanning that node, and
/// jumps across its boundary, so uniform tiles are crossed in one step. The
/// per-axis crossing state is re-derived from the node box on every step.
class HddaTraversal {
public:
    using Event = TraversalEvent;

    HddaTraversal(const SparseGrid& grid, const Ray& ray)
        : acc_(grid), geom_(ray, grid.transform()) {
        if (!geom_.valid) {
            done_ = true;
            return;
        }
        ijk_ = geom_.entry_cell(grid.transform().resolution);
        t_cur_ = geom_.t_enter;
    }

    std::optional<TraversalEvent> next() {
        if (done_) return std::nullopt;
        while (true) {
            const QueryResult q = acc_.query(ijk_);
            ++lookup_count_;
            double t_cross[3];
            for (int a = 0; a < 3; ++a) {
                if (geom_.step[a] == 0) {
                    t_cross[a] = detail::kInfiniteStep;
                } else {
                    const double plane = geom_.step[a] > 0
                                             ? static_cast<double>(q.origin[a] + q.extent)
                                             : static_cast<double>(q.origin[a]);
                    t_cross[a] = geom_.plane_t(a, plane);
                }
            }
            const int axis = detail::RayGridGeometry::argmin_axis(t_cross);
            const double t1 = t_cross[axis];
            if (t1 >= geom_.t_exit) {
                ++step_count_;
                done_ = true;
                return TraversalEvent{q.origin, q.level, t_cur_, geom_.t_exit, q.occupied};
            }
            const int stepped = geom_.step[axis] > 0 ? q.origin[axis] + q.extent
                                                     : q.origin[axis] - 1;
            if (t1 <= t_cur_) { // degenerate corner crossing
                ijk_ = geom_.cell_after_crossing(t_cur_, axis, stepped, ijk_);
                continue;
            }
            TraversalEvent ev{q.origin, q.level, t_cur_, t1, q.occupied};
            ++step_count_;
            ijk_ = geom_.cell_after_crossing(t1, axis, stepped, ijk_);
            t_cur_ = t1;
            return ev;
        }
    }

    long lookup_count() const { return lookup_count_; }
    long step_count() const { return step_count_; }
    bool valid() const { return geom_.valid; }
    double t_enter() const { return geom_.t_enter; }
    double t_exit() const { return geom_.t_exit; }

private:
    Accessor acc_;
    detail::RayGridGeometry geom_;
    Vec3i ijk_;
    double t_cur_ = 0.0;
    long lookup_count_ = 0;
    long step_count_ = 0;
    bool done_ = false;
};

/// Distance-accelerated analyzer over a dense grid plus its chessboard
/// distance transform. A voxel at distance d >= 2 proves the open cube of
/// half-width d-1 around it empty, so the ray jumps to that cube's exit in
/// one merged event; at d <= 1 it steps voxel by voxel like plain DDA.
class CdTraversal {
public:
    using Event = TraversalEvent;

    CdTraversal(const DistanceGrid& dist, const Ray& ray)
        : dist_(&dist), geom_(ray, dist.transform()) {
        if (!geom_.valid) {
            done_ = true;
            return;
        }
        ijk_ = geom_.entry_cell(dist.transform().resolution);
        t_cur_ = geom_.t_enter;
    }

    std::optional<TraversalEvent> next() {
        if (done_) return std::nullopt;
        while (true) {
            const std::int32_t d = dist_->at(ijk_);
            ++lookup_count_;
            const int half = d > 1 ? d - 1 : 0;
            const Vec3i low = ijk_ - Vec3i{half, half, half};
            const int extent = 2 * half + 1;
            double t_cross[3];
            for (int a = 0; a < 3; ++a) {
                if (geom_.step[a] == 0) {
                    t_cross[a] = detail::kInfiniteStep;
                } else {
                    const double plane = geom_.step[a] > 0
                                             ? static_cast<double>(low[a] + extent)
                                             : static_cast<double>(low[a]);
                    t_cross[a] = geom_.plane_t(a, plane);
                }
            }
            const int axis = detail::RayGridGeometry::argmin_axis(t_cross);
            const double t1 = t_cross[axis];
            if (t1 >= geom_.t_exit) {
                ++step_count_;
                done_ = true;
                return TraversalEvent{low, Level::leaf_voxel, t_cur_, geom_.t_exit, d == 0};
            }
            const int stepped = geom_.step[axis] > 0 ? low[axis] + extent : low[axis] - 1;
            if (t1 <= t_cur_) { // degenerate corner crossing
                ijk_ = geom_.cell_after_crossing(t_cur_, axis, stepped, ijk_);
                continue;
            }
            TraversalEvent ev{low, Level::leaf_voxel, t_cur_, t1, d == 0};
            ++step_count_;
            ijk_ = geom_.cell_after_crossing(t1, axis, stepped, ijk_);
            t_cur_ = t1;
            return ev;
        }
    }

    long lookup_count() const { return lookup_count_; }
    long step_count() const { return step_count_; }
    bool valid() const { return geom_.valid; }
    double t_enter() const { return geom_.t_enter; }
    double t_exit() const { return geom_.t_exit; }

private:
    const DistanceGrid* dist_;
    detail::RayGridGeometry geom_;
    Vec3i ijk_;
    double t_cur_ = 0.0;
    long lookup_count_ = 0;
    long step_count_ = 0;
    bool done_ = false;
};

/// Drains an analyzer into a vector.
template <class Analyzer>
std::vector<TraversalEvent> collect_events(Analyzer&& an) {
    std::vector<TraversalEvent> events;
    while (auto ev = an.next()) events.push_back(*ev);
    return events;
}

/// Debug/golden-test dump: one event per line, tab separated fields
/// level, ijk (comma separated), t0, t1, occupied; t values carry 17
/// significant digits.
inline void dump_trace(std::ostream& os, std::span<const TraversalEvent> events) {
    char buf[64];
    for (const auto& ev : events) {
        os << level_name(ev.level) << '\t' << ev.ijk.x << ',' << ev.ijk.y << ',' << ev.ijk.z;
        std::snprintf(buf, sizeof buf, "%.17g", ev.t0);
        os << '\t' << buf;
        std::snprintf(buf, sizeof buf, "%.17g", ev.t1);
        os << '\t' << buf << '\t' << (ev.occupied ? 1 : 0) << '\n';
    }
}

} // namespace sog
