#pragma once

#include <algorithm>
#include <span>
#include <type_traits>
#include <vector>

#include "sog/traversal.hpp"

namespace sog {

inline constexpr double kDefaultLinearGrowth = 1.0 / 256.0;

/// Ladder step schedule. The constant kind always advances by dt0; the
/// linear kind advances by max(dt0, growth * t), evaluated at the current
/// ladder position before the increment, which makes consecutive sample
/// gaps non-decreasing along the ray.
struct StepSchedule {
    enum class Kind { constant, linear };

    Kind kind = Kind::constant;
    double dt0 = 1.0;
    double growth = 0.0;

    static StepSchedule constant(double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
        return {Kind::constant, dt, 0.0};
    }

    static StepSchedule linear(double dt0, double growth = kDefaultLinearGrowth) {
        if (!(dt0 > 0.0)) throw std::invalid_argument("step size must be positive");
        if (growth < 0.0) throw std::invalid_argument("growth must be non-negative");
        return {Kind::linear, dt0, growth};
    }

    double step(double t) const {
        return kind == Kind::constant ? dt0 : std::max(dt0, growth * t);
    }
};

/// Ordered parametric sample positions, strictly increasing.
using SampleBuffer = std::vector<double>;

// ---------------------------------------------------------------------------
// Occupancy probes used by the branch kernel (one grid lookup per ladder
// point). Each probe counts its own lookups; analyzer lookups are counted by
// the analyzers themselves.
// ---------------------------------------------------------------------------

struct DenseProbe {
    const DenseGrid* grid;
    long lookups = 0;
    bool operator()(const TraversalEvent& ev) {
        ++lookups;
        return grid->voxel_at(ev.ijk);
    }
};

struct SparseProbe {
    Accessor acc;
    long lookups = 0;
    explicit SparseProbe(const SparseGrid& g) : acc(g) {}
    bool operator()(const TraversalEvent& ev) {
        ++lookups;
        return acc.query(ev.ijk).occupied;
    }
};

struct DistanceProbe {
    const DistanceGrid* dist;
    long lookups = 0;
    bool operator()(const TraversalEvent& ev) {
        ++lookups;
        return dist->at(ev.ijk) == 0;
    }
};

// ---------------------------------------------------------------------------
// The two sampling kernels. Both filter the same global ladder: t_last
// starts at the clip entry and is only ever advanced by schedule steps, so
// for any analyzer the two kernels return identical buffers. The branch
// kernel walks every event and pays one occupancy lookup per ladder point;
// the skip kernel seeks occupied events and samples without per-point
// lookups.
// ---------------------------------------------------------------------------

template <class Analyzer, class Probe>
SampleBuffer sample_branch(Analyzer& an, Probe&& probe, const StepSchedule& sched) {
    SampleBuffer buf;
    if (!an.valid()) return buf;
    const double t_end = an.t_exit();
    double t_last = an.t_enter();
    while (t_last <= t_end) {
        const auto ev = an.next();
        if (!ev) break;
        while (t_last <= ev->t0) t_last += sched.step(t_last);
        while (t_last <= ev->t1) {
            if (probe(*ev)) buf.push_back(t_last);
            t_last += sched.step(t_last);
        }
    }
    return buf;
}

template <class Analyzer>
SampleBuffer sample_skip(Analyzer& an, const StepSchedule& sched) {
    SampleBuffer buf;
    if (!an.valid()) return buf;
    const double t_end = an.t_exit();
    double t_last = an.t_enter();
    while (t_last <= t_end) {
        const auto ev = an.next();
        if (!ev) break;
        if (!ev->occupied) continue;
        while (t_last <= ev->t0) t_last += sched.step(t_last);
        while (t_last <= ev->t1) {
            buf.push_back(t_last);
            t_last += sched.step(t_last);
        }
    }
    return buf;
}

/// Defective skip variant kept for documentation tests: the seek restarts
/// from the stream head on every outer iteration and stops at the first
/// UNoccupied cell, so it samples inside empty cells and stalls once the
/// ladder has passed that cell. Real callers want sample_skip; the
/// iteration cap bounds the stall.
inline SampleBuffer sample_skip_rescan(std::span<const TraversalEvent> events,
                                       const StepSchedule& sched, double t_min, double t_max,
                                       long max_outer_iterations = 1000) {
    SampleBuffer buf;
    double t_last = t_min;
    long outer = 0;
    while (t_last <= t_max && ++outer <= max_outer_iterations) {
        std::size_t i = 0;
        const TraversalEvent* ev = nullptr;
        do {
            if (i == events.size()) return buf;
            ev = &events[i++];
        } while (ev->occupied);
        while (t_last <= ev->t0) t_last += sched.step(t_last);
        while (t_last <= ev->t1) {
            buf.push_back(t_last);
            t_last += sched.step(t_last);
        }
    }
    return buf;
}

// ---------------------------------------------------------------------------
// Per-ray sampler runs with instrumentation, one overload per grid kind.
// ---------------------------------------------------------------------------

enum class KernelKind { branch, skip };

struct SampleRun {
    SampleBuffer samples;
    long analyzer_lookups = 0;
    long analyzer_steps = 0;
    long kernel_lookups = 0;

    long total_lookups() const { return analyzer_lookups + kernel_lookups; }
};

inline SampleRun run_sampler(const Ray& ray, const DenseGrid& grid, KernelKind kernel,
                             const StepSchedule& sched) {
    DdaTraversal an(grid, ray);
    SampleRun run;
    if (kernel == KernelKind::branch) {
        DenseProbe probe{&grid};
        run.samples = sample_branch(an, probe, sched);
        run.kernel_lookups = probe.lookups;
    } else {
        run.samples = sample_skip(an, sched);
    }
    run.analyzer_lookups = an.lookup_count();
    run.analyzer_steps = an.step_count();
    return run;
}

inline SampleRun run_sampler(const Ray& ray, const SparseGrid& grid, KernelKind kernel,
                             const StepSchedule& sched) {
    HddaTraversal an(grid, ray);
    SampleRun run;
    if (kernel == KernelKind::branch) {
        SparseProbe probe(grid);
        run.samples = sample_branch(an, probe, sched);
        run.kernel_lookups = probe.lookups;
    } else {
        run.samples = sample_skip(an, sched);
    }
    run.analyzer_lookups = an.lookup_count();
    run.analyzer_steps = an.step_count();
    return run;
}

inline SampleRun run_sampler(const Ray& ray, const DenseGrid& grid, const DistanceGrid& dist,
                             KernelKind kernel, const StepSchedule& sched) {
    CdTraversal an(dist, ray);
    SampleRun run;
    if (kernel == KernelKind::branch) {
        DenseProbe probe{&grid};
        run.samples = sample_branch(an, probe, sched);
        run.kernel_lookups = probe.lookups;
    } else {
        run.samples = sample_skip(an, sched);
    }
    run.analyzer_lookups = an.lookup_count();
    run.analyzer_steps = an.step_count();
    return run;
}

// ---------------------------------------------------------------------------
// Multi-resolution cascades: identical resolution per level, voxel size
// doubling with the level index, concentric world bounds. Where levels
// overlap, the finest level containing the query point wins. Containment is
// decided against a level's voxel-center bounds (world bounds shrunk by half
// a voxel on every side).
// ---------------------------------------------------------------------------

template <class GridT>
struct Cascade {
    std::vector<GridT> levels; // finest (b = 0) first
};

using DenseCascade = Cascade<DenseGrid>;
using SparseCascade = Cascade<SparseGrid>;
using DistanceCascade = Cascade<DistanceGrid>;

namespace detail {
template <class GridT>
struct CascadeSub;
template <>
struct CascadeSub<DenseGrid> {
    using type = DdaTraversal;
};
template <>
struct CascadeSub<SparseGrid> {
    using type = HddaTraversal;
};
template <>
struct CascadeSub<DistanceGrid> {
    using type = CdTraversal;
};
} // namespace detail

inline std::pair<Vec3, Vec3> center_bounds(const GridTransform& t) {
    const Vec3 half{t.voxel_size * 0.5, t.voxel_size * 0.5, t.voxel_size * 0.5};
    return {t.world_min + half, t.world_max() - half};
}

template <class GridT>
void validate_cascade(const Cascade<GridT>& cascade) {
    if (cascade.levels.empty()) throw std::invalid_argument("cascade has no levels");
    const GridTransform& base = cascade.levels.front().transform();
    for (std::size_t b = 0; b < cascade.levels.size(); ++b) {
        const GridTransform& t = cascade.levels[b].transform();
        if (!(t.resolution == base.resolution))
            throw std::invalid_argument("cascade levels must share one resolution");
        const double expected = base.voxel_size * static_cast<double>(1u << b);
        if (std::abs(t.voxel_size - expected) > 1e-12 * expected)
            throw std::invalid_argument("cascade voxel sizes must double per level");
        if (b > 0) {
            const GridTransform& prev = cascade.levels[b - 1].transform();
            const Vec3 lo = t.world_min, hi = t.world_max();
            const Vec3 plo = prev.world_min, phi = prev.world_max();
            if (plo.x < lo.x || plo.y < lo.y || plo.z < lo.z || phi.x > hi.x || phi.y > hi.y ||
                phi.z > hi.z)
                throw std::invalid_argument("cascade level bounds must nest");
        }
    }
}

inline const GridTransform& grid_transform(const DenseGrid& g) { return g.transform(); }
inline const GridTransform& grid_transform(const SparseGrid& g) { return g.transform(); }
inline const GridTransform& grid_transform(const DistanceGrid& g) { return g.transform(); }

inline bool grid_occupancy(const DenseGrid& g, const Vec3i& ijk) { return g.voxel_at(ijk); }
inline bool grid_occupancy(const SparseGrid& g, const Vec3i& ijk) { return g.occupancy_at(ijk); }
inline bool grid_occupancy(const DistanceGrid& g, const Vec3i& ijk) { return g.at(ijk) == 0; }

/// Composite point occupancy: the finest level whose voxel-center bounds
/// contain the point answers; outside every level the space reads empty.
template <class GridT>
bool cascade_occupancy_at(const Cascade<GridT>& cascade, const Vec3& p) {
    for (const GridT& level : cascade.levels) {
        const auto [lo, hi] = center_bounds(grid_transform(level));
        if (p.x < lo.x || p.y < lo.y || p.z < lo.z || p.x >= hi.x || p.y >= hi.y || p.z >= hi.z)
            continue;
        return grid_occupancy(level, grid_transform(level).world_to_index(p));
    }
    return false;
}

struct CascadeEvent : TraversalEvent {
    int grid_level = 0;
};

/// Composite analyzer over a cascade. The ray is cut into segments at every
/// level's containment boundaries; within a segment the finest containing
/// level is traversed with the per-grid analyzer (DDA on dense levels, HDDA
/// on sparse ones). Events tile the composite range exactly and carry the
/// level that produced them.
template <class GridT>
class CascadeTraversal {
    using Sub = typename detail::CascadeSub<GridT>::type;

public:
    using Event = CascadeEvent;

    CascadeTraversal(const Cascade<GridT>& cascade, const Ray& ray)
        : cascade_(&cascade), ray_(ray) {
        validate_cascade(cascade);
        const std::size_t n = cascade.levels.size();
        std::vector<std::pair<double, double>> ranges(n);
        std::vector<bool> hit(n, false);
        for (std::size_t b = 0; b < n; ++b) {
            const auto [lo, hi] = center_bounds(grid_transform(cascade.levels[b]));
            if (const auto r = clip_to_box(ray, lo, hi)) {
                ranges[b] = *r;
                hit[b] = true;
            }
        }
        if (!hit[n - 1]) return; // outside even the coarsest level
        const double t_enter = ranges[n - 1].first;
        const double t_exit = ranges[n - 1].second;

        std::vector<double> cuts{t_enter, t_exit};
        for (std::size_t b = 0; b + 1 < n; ++b) {
            if (!hit[b]) continue;
            if (ranges[b].first > t_enter && ranges[b].first < t_exit)
                cuts.push_back(ranges[b].first);
            if (ranges[b].second > t_enter && ranges[b].second < t_exit)
                cuts.push_back(ranges[b].second);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (!(cuts[i] < cuts[i + 1])) continue;
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            int level = -1;
            for (std::size_t b = 0; b < n; ++b) {
                if (hit[b] && mid >= ranges[b].first && mid < ranges[b].second) {
                    level = static_cast<int>(b);
                    break;
                }
            }
            segments_.push_back({cuts[i], cuts[i + 1], level});
        }
        valid_ = !segments_.empty();
        t_enter_ = t_enter;
        t_exit_ = t_exit;
    }

    bool valid() const { return valid_; }
    double t_enter() const { return t_enter_; }
    double t_exit() const { return t_exit_; }

    std::optional<CascadeEvent> next() {
        while (true) {
            if (sub_) {
                if (auto ev = sub_->next()) {
                    CascadeEvent out;
                    static_cast<TraversalEvent&>(out) = *ev;
                    out.grid_level = segments_[seg_].level;
                    return out;
                }
                finished_lookups_ += sub_->lookup_count();
                finished_steps_ += sub_->step_count();
                sub_.reset();
                ++seg_;
            }
            if (seg_ >= segments_.size()) return std::nullopt;
            const Segment& seg = segments_[seg_];
            if (seg.level < 0) { // outside every level: one empty event
                CascadeEvent out;
                out.ijk = {0, 0, 0};
                out.level = Level::root_tile;
                out.t0 = seg.t0;
                out.t1 = seg.t1;
                out.occupied = false;
                out.grid_level = -1;
                ++seg_;
                ++finished_steps_;
                return out;
            }
            const Ray sub_ray(ray_.origin, ray_.direction, seg.t0, seg.t1);
            sub_.emplace(cascade_->levels[seg.level], sub_ray);
        }
    }

    long lookup_count() const {
        return finished_lookups_ + (sub_ ? sub_->lookup_count() : 0);
    }
    long step_count() const { return finished_steps_ + (sub_ ? sub_->step_count() : 0); }

private:
    struct Segment {
        double t0, t1;
        int level;
    };

    const Cascade<GridT>* cascade_;
    Ray ray_;
    std::vector<Segment> segments_;
    std::size_t seg_ = 0;
    std::optional<Sub> sub_;
    long finished_lookups_ = 0;
    long finished_steps_ = 0;
    bool valid_ = false;
    double t_enter_ = 0.0;
    double t_exit_ = 0.0;
};

template <class GridT>
struct CascadeProbe {
    const Cascade<GridT>* cascade;
    std::vector<Accessor> accessors; // sparse cascades only
    long lookups = 0;

    explicit CascadeProbe(const Cascade<GridT>& c) : cascade(&c) {
        if constexpr (std::is_same_v<GridT, SparseGrid>) {
            accessors.reserve(c.levels.size());
            for (const auto& level : c.levels) accessors.emplace_back(level);
        }
    }

    bool operator()(const CascadeEvent& ev) {
        ++lookups;
        if (ev.grid_level < 0) return false;
        if constexpr (std::is_same_v<GridT, SparseGrid>)
            return accessors[ev.grid_level].query(ev.ijk).occupied;
        else
            return grid_occupancy(cascade->levels[ev.grid_level], ev.ijk);
    }
};

template <class GridT>
SampleRun run_cascade_sampler(const Ray& ray, const Cascade<GridT>& cascade, KernelKind kernel,
                              const StepSchedule& sched) {
    CascadeTraversal<GridT> an(cascade, ray);
    SampleRun run;
    if (kernel == KernelKind::branch) {
        CascadeProbe<GridT> probe(cascade);
        run.samples = sample_branch(an, probe, sched);
        run.kernel_lookups = probe.lookups;
    } else {
        run.samples = sample_skip(an, sched);
    }
    run.analyzer_lookups = an.lookup_count();
    run.analyzer_steps = an.step_count();
    return run;
}

/// Buffer-only convenience over the cascade sampler.
template <class GridT>
SampleBuffer sample_cascade(const Ray& ray, const Cascade<GridT>& cascade, KernelKind kernel,
                            const StepSchedule& sched) {
    return run_cascade_sampler(ray, cascade, kernel, sched).samples;
}

} // namespace sog
