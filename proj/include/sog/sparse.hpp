#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "sog/grid.hpp"

namespace sog {

/// 8^3 bitmask leaf. Bit layout matches DenseGrid: x-fastest, LSB-first.
class LeafNode {
public:
    static constexpr int kDim = 8;
    static constexpr int kVoxels = kDim * kDim * kDim;
    static constexpr int kBytes = kVoxels / 8;

    /// local must be in [0,8)^3.
    static int bit_index(const Vec3i& local) {
        return (local.z * kDim + local.y) * kDim + local.x;
    }

    bool test(int bit) const { return (bytes_[bit >> 3] >> (bit & 7)) & 1u; }

    void set(int bit, bool value) {
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (bit & 7));
        if (value)
            bytes_[bit >> 3] |= mask;
        else
            bytes_[bit >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    bool all_set() const {
        for (auto b : bytes_)
            if (b != 0xFF) return false;
        return true;
    }

    bool none_set() const {
        for (auto b : bytes_)
            if (b != 0x00) return false;
        return true;
    }

    std::array<std::uint8_t, kBytes>& bytes() { return bytes_; }
    const std::array<std::uint8_t, kBytes>& bytes() const { return bytes_; }

    bool operator==(const LeafNode& o) const = default;

private:
    std::array<std::uint8_t, kBytes> bytes_{};
};

enum class ChildKind : std::uint8_t { empty_tile = 0, occupied_tile = 1, leaf = 2 };

/// 16^3 interior node; each child covers an 8^3 voxel block and is either a
/// boolean tile or a resolved leaf. Leaves live in an append-only pool.
class InternalNode {
public:
    static constexpr int kDim = 16;
    static constexpr int kChildren = kDim * kDim * kDim;
    static constexpr int kSpan = kDim * LeafNode::kDim; // voxels per axis (128)

    InternalNode() { slots_.fill(-1); }

    /// child coordinates in [0,16)^3, x-fastest.
    static int child_index(const Vec3i& c) { return (c.z * kDim + c.y) * kDim + c.x; }

    ChildKind kind(int ci) const { return static_cast<ChildKind>(kinds_[ci]); }

    bool tile_value(int ci) const { return kind(ci) == ChildKind::occupied_tile; }

    const LeafNode& leaf(int ci) const { return pool_[slots_[ci]]; }

    void set_tile(int ci, bool occupied) {
        kinds_[ci] = static_cast<std::uint8_t>(occupied ? ChildKind::occupied_tile
                                                        : ChildKind::empty_tile);
        slots_[ci] = -1;
    }

    LeafNode& emplace_leaf(int ci) {
        kinds_[ci] = static_cast<std::uint8_t>(ChildKind::leaf);
        slots_[ci] = static_cast<std::int32_t>(pool_.size());
        return pool_.emplace_back();
    }

    std::size_t leaf_count() const { return pool_.size(); }

    /// True when every child is a tile and all tiles agree; reports the value.
    bool uniform_tiles(bool& value) const {
        if (kinds_[0] == static_cast<std::uint8_t>(ChildKind::leaf)) return false;
        const std::uint8_t first = kinds_[0];
        for (int ci = 1; ci < kChildren; ++ci)
            if (kinds_[ci] != first) return false;
        value = (static_cast<ChildKind>(first) == ChildKind::occupied_tile);
        return true;
    }

    bool structurally_equal(const InternalNode& o) const {
        if (kinds_ != o.kinds_) return false;
        for (int ci = 0; ci < kChildren; ++ci)
            if (kind(ci) == ChildKind::leaf && !(leaf(ci) == o.leaf(ci))) return false;
        return true;
    }

private:
    std::array<std::uint8_t, kChildren> kinds_{}; // zero-initialized: all empty tiles
    std::array<std::int32_t, kChildren> slots_;
    std::vector<LeafNode> pool_;
};

enum class RootKind : std::uint8_t { empty_tile = 0, occupied_tile = 1, internal = 2 };

namespace detail {
/// Root entries are ordered z, then y, then x so that serialization and
/// iteration are canonical.
struct RegionOrder {
    bool operator()(const Vec3i& a, const Vec3i& b) const {
        if (a.z != b.z) return a.z < b.z;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    }
};
} // namespace detail

/// Answer record of a tree lookup: occupancy plus the uniform node that
/// produced it, described by its lowest voxel and edge length.
struct QueryResult {
    bool occupied = false;
    Level level = Level::root_tile;
    Vec3i origin;
    int extent = 0;
};

/// Fixed-depth sparse occupancy tree: root map -> 16^3 internal -> 8^3 leaf.
/// One root region spans 128^3 voxels. Uniform regions are collapsed into
/// boolean tiles during build; the tree is immutable afterwards and safe to
/// share across threads.
class SparseGrid {
public:
    static constexpr int kRegionSpan = InternalNode::kSpan; // 128

    struct RootEntry {
        RootKind kind = RootKind::empty_tile;
        std::unique_ptr<InternalNode> node; // set iff kind == internal
    };

    using RootMap = std::map<Vec3i, RootEntry, detail::RegionOrder>;

    SparseGrid() = default;
    explicit SparseGrid(const GridTransform& t) : transform_(t) {}

    const GridTransform& transform() const { return transform_; }
    const RootMap& root() const { return root_; }
    RootMap& root() { return root_; }

    static Vec3i region_origin(const Vec3i& ijk) { return floor_div(ijk, kRegionSpan) * kRegionSpan; }

    /// Uncached lookup. Out-of-bounds coordinates resolve to the empty
    /// background tile of the containing 128-aligned region.
    QueryResult query(const Vec3i& ijk) const {
        if (!transform_.contains(ijk))
            return {false, Level::root_tile, region_origin(ijk), kRegionSpan};
        const Vec3i region = region_origin(ijk);
        const auto it = root_.find(region);
        if (it == root_.end())
            return {false, Level::internal_tile, region, kRegionSpan};
        return query_in_entry(it->second, region, ijk);
    }

    bool occupancy_at(const Vec3i& ijk) const { return query(ijk).occupied; }

    std::size_t leaf_count() const {
        std::size_t n = 0;
        for (const auto& [origin, entry] : root_)
            if (entry.kind == RootKind::internal) n += entry.node->leaf_count();
        return n;
    }

    bool structurally_equal(const SparseGrid& o) const {
        if (!(transform_ == o.transform_) || root_.size() != o.root_.size()) return false;
        auto a = root_.begin();
        auto b = o.root_.begin();
        for (; a != root_.end(); ++a, ++b) {
            if (!(a->first == b->first) || a->second.kind != b->second.kind) return false;
            if (a->second.kind == RootKind::internal &&
                !a->second.node->structurally_equal(*b->second.node))
                return false;
        }
        return true;
    }

    friend class Accessor;

private:
    QueryResult query_in_entry(const RootEntry& entry, const Vec3i& region,
                               const Vec3i& ijk) const {
        if (entry.kind != RootKind::internal)
            return {entry.kind == RootKind::occupied_tile, Level::internal_tile, region,
                    kRegionSpan};
        const Vec3i local = ijk - region;
        const Vec3i child{local.x >> 3, local.y >> 3, local.z >> 3};
        const int ci = InternalNode::child_index(child);
        const InternalNode& node = *entry.node;
        if (node.kind(ci) != ChildKind::leaf) {
            const Vec3i child_origin = region + child * LeafNode::kDim;
            return {node.tile_value(ci), Level::leaf_tile, child_origin, LeafNode::kDim};
        }
        const Vec3i voxel_local{local.x & 7, local.y & 7, local.z & 7};
        const bool bit = node.leaf(ci).test(LeafNode::bit_index(voxel_local));
        return {bit, Level::leaf_voxel, ijk, 1};
    }

    GridTransform transform_;
    RootMap root_;
};

/// Per-worker read accessor with a one-node-per-level cache, tuned for the
/// coherent access pattern of ray marching. Answers are identical to
/// SparseGrid::query; only the lookup path differs. Not shareable between
/// threads.
class Accessor {
public:
    explicit Accessor(const SparseGrid& grid) : grid_(&grid) {}

    QueryResult query(const Vec3i& ijk) {
        if (cached_leaf_ && in_block(ijk, leaf_origin_, LeafNode::kDim)) {
            const Vec3i local = ijk - leaf_origin_;
            const bool bit = cached_leaf_->test(LeafNode::bit_index(local));
            return {bit, Level::leaf_voxel, ijk, 1};
        }
        if (!grid_->transform().contains(ijk))
            return {false, Level::root_tile, SparseGrid::region_origin(ijk),
                    SparseGrid::kRegionSpan};
        if (!cached_internal_entry_ || !in_block(ijk, region_origin_, SparseGrid::kRegionSpan)) {
            region_origin_ = SparseGrid::region_origin(ijk);
            const auto it = grid_->root_.find(region_origin_);
            cached_internal_entry_ = (it == grid_->root_.end()) ? &kAbsentEntry : &it->second;
            cached_leaf_ = nullptr;
        }
        const SparseGrid::RootEntry& entry = *cached_internal_entry_;
        if (entry.kind != RootKind::internal)
            return {entry.kind == RootKind::occupied_tile, Level::internal_tile, region_origin_,
                    SparseGrid::kRegionSpan};
        const Vec3i local = ijk - region_origin_;
        const Vec3i child{local.x >> 3, local.y >> 3, local.z >> 3};
        const int ci = InternalNode::child_index(child);
        const InternalNode& node = *entry.node;
        if (node.kind(ci) != ChildKind::leaf) {
            const Vec3i child_origin = region_origin_ + child * LeafNode::kDim;
            return {node.tile_value(ci), Level::leaf_tile, child_origin, LeafNode::kDim};
        }
        cached_leaf_ = &node.leaf(ci);
        leaf_origin_ = region_origin_ + child * LeafNode::kDim;
        const Vec3i voxel_local{local.x & 7, local.y & 7, local.z & 7};
        return {cached_leaf_->test(LeafNode::bit_index(voxel_local)), Level::leaf_voxel, ijk, 1};
    }

    const SparseGrid& grid() const { return *grid_; }

private:
    static bool in_block(const Vec3i& ijk, const Vec3i& origin, int span) {
        return ijk.x >= origin.x && ijk.y >= origin.y && ijk.z >= origin.z &&
               ijk.x < origin.x + span && ijk.y < origin.y + span && ijk.z < origin.z + span;
    }

    static inline const SparseGrid::RootEntry kAbsentEntry{};

    const SparseGrid* grid_;
    const SparseGrid::RootEntry* cached_internal_entry_ = nullptr;
    Vec3i region_origin_;
    const LeafNode* cached_leaf_ = nullptr;
    Vec3i leaf_origin_;
};

namespace detail {

/// Extracts one 8^3 leaf block from the dense grid. Returns the leaf bits
/// and whether the block is uniform. Blocks straddling the resolution edge
/// are padded with empty voxels.
inline void read_leaf_block(const DenseGrid& dense, const Vec3i& block_origin, LeafNode& leaf,
                            bool& uniform, bool& value) {
    const GridTransform& t = dense.transform();
    const Vec3i res = t.resolution;
    const bool aligned_fast_path =
        (res.x % 8 == 0) && block_origin.x >= 0 && block_origin.x + 8 <= res.x &&
        block_origin.y >= 0 && block_origin.y + 8 <= res.y && block_origin.z >= 0 &&
        block_origin.z + 8 <= res.z;
    if (aligned_fast_path) {
        const auto& payload = dense.payload();
        const std::size_t row_bytes = static_cast<std::size_t>(res.x) / 8;
        const std::size_t x_byte = static_cast<std::size_t>(block_origin.x) / 8;
        int out = 0;
        bool all0 = true, all1 = true;
        for (int lz = 0; lz < 8; ++lz)
            for (int ly = 0; ly < 8; ++ly, ++out) {
                const std::size_t row =
                    (static_cast<std::size_t>(block_origin.z + lz) * res.y + block_origin.y + ly) *
                        row_bytes +
                    x_byte;
                const std::uint8_t b = payload[row];
                leaf.bytes()[out] = b;
                all0 &= (b == 0x00);
                all1 &= (b == 0xFF);
            }
        uniform = all0 || all1;
        value = all1;
        return;
    }
    bool all0 = true, all1 = true;
    for (int lz = 0; lz < 8; ++lz)
        for (int ly = 0; ly < 8; ++ly)
            for (int lx = 0; lx < 8; ++lx) {
                const bool bit =
                    dense.voxel_at({block_origin.x + lx, block_origin.y + ly, block_origin.z + lz});
                leaf.set(LeafNode::bit_index({lx, ly, lz}), bit);
                all0 &= !bit;
                all1 &= bit;
            }
    uniform = all0 || all1;
    value = all1;
}

} // namespace detail

/// Converts a dense occupancy grid into the pruned sparse tree. The build is
/// bottom-up: leaves are read first, uniform leaves collapse into tiles, and
/// internal nodes whose children are all-equal tiles collapse into root
/// tiles. Resolutions that are not multiples of 8 are padded with empty
/// voxels; padding never changes in-bounds occupancy.
inline SparseGrid build_sparse(const DenseGrid& dense) {
    const GridTransform& t = dense.transform();
    SparseGrid sparse(t);
    const int span = SparseGrid::kRegionSpan;
    const Vec3i regions{(t.resolution.x + span - 1) / span, (t.resolution.y + span - 1) / span,
                        (t.resolution.z + span - 1) / span};
    for (int rz = 0; rz < regions.z; ++rz)
        for (int ry = 0; ry < regions.y; ++ry)
            for (int rx = 0; rx < regions.x; ++rx) {
                const Vec3i region{rx * span, ry * span, rz * span};
                auto node = std::make_unique<InternalNode>();
                bool any_leaf = false;
                for (int cz = 0; cz < InternalNode::kDim; ++cz)
                    for (int cy = 0; cy < InternalNode::kDim; ++cy)
                        for (int cx = 0; cx < InternalNode::kDim; ++cx) {
                            const int ci = InternalNode::child_index({cx, cy, cz});
                            const Vec3i block = region + Vec3i{cx, cy, cz} * LeafNode::kDim;
                            LeafNode scratch;
                            bool uniform = false, value = false;
                            detail::read_leaf_block(dense, block, scratch, uniform, value);
                            if (uniform) {
                                node->set_tile(ci, value);
                            } else {
                                node->emplace_leaf(ci) = scratch;
                                any_leaf = true;
                            }
                        }
                SparseGrid::RootEntry entry;
                bool tile_value = false;
                if (!any_leaf && node->uniform_tiles(tile_value)) {
                    entry.kind = tile_value ? RootKind::occupied_tile : RootKind::empty_tile;
                } else {
                    entry.kind = RootKind::internal;
                    entry.node = std::move(node);
                }
                sparse.root().emplace(region, std::move(entry));
            }
    return sparse;
}

/// Expands a sparse grid back into dense form (bounded by its resolution).
inline DenseGrid to_dense(const SparseGrid& sparse) {
    DenseGrid dense(sparse.transform());
    Accessor acc(sparse);
    const Vec3i res = sparse.transform().resolution;
    for (int z = 0; z < res.z; ++z)
        for (int y = 0; y < res.y; ++y)
            for (int x = 0; x < res.x; ++x)
                if (acc.query({x, y, z}).occupied) dense.set_voxel({x, y, z}, true);
    return dense;
}

} // namespace sog
