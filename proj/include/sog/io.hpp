#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sog/sparse.hpp"

namespace sog {

enum class io_errc { bad_magic, bad_version, truncated, corrupt };

inline const char* to_string(io_errc c) {
    switch (c) {
        case io_errc::bad_magic: return "bad magic";
        case io_errc::bad_version: return "bad version";
        case io_errc::truncated: return "truncated";
        default: return "corrupt";
    }
}

class io_error : public std::runtime_error {
public:
    io_error(io_errc code, const std::string& what)
        : std::runtime_error(what + " (" + to_string(code) + ")"), code_(code) {}
    io_errc code() const { return code_; }

private:
    io_errc code_;
};

namespace detail {

struct ByteWriter {
    std::vector<std::uint8_t> out;

    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void bytes(const std::uint8_t* data, std::size_t n) { out.insert(out.end(), data, data + n); }
};

struct ByteReader {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;

    void require(std::size_t n) const {
        if (pos + n > in.size()) throw io_error(io_errc::truncated, "unexpected end of data");
    }
    std::uint8_t u8() {
        require(1);
        return in[pos++];
    }
    std::uint32_t u32() {
        require(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        require(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(bits);
    }
    void bytes(std::uint8_t* dst, std::size_t n) {
        require(n);
        std::memcpy(dst, in.data() + pos, n);
        pos += n;
    }
    void expect_end() const {
        if (pos != in.size()) throw io_error(io_errc::corrupt, "trailing bytes after payload");
    }
};

inline void write_transform(ByteWriter& w, const GridTransform& t) {
    w.u32(static_cast<std::uint32_t>(t.resolution.x));
    w.u32(static_cast<std::uint32_t>(t.resolution.y));
    w.u32(static_cast<std::uint32_t>(t.resolution.z));
    w.f64(t.world_min.x);
    w.f64(t.world_min.y);
    w.f64(t.world_min.z);
    w.f64(t.voxel_size);
}

inline GridTransform read_transform(ByteReader& r) {
    const std::uint32_t rx = r.u32(), ry = r.u32(), rz = r.u32();
    Vec3 wmin;
    wmin.x = r.f64();
    wmin.y = r.f64();
    wmin.z = r.f64();
    const double vsize = r.f64();
    if (rx < 1 || ry < 1 || rz < 1 || !(vsize > 0.0))
        throw io_error(io_errc::corrupt, "invalid grid transform");
    // refuse absurd headers before allocating
    const std::uint64_t count = std::uint64_t(rx) * ry * rz;
    if (count > (std::uint64_t(1) << 33))
        throw io_error(io_errc::corrupt, "resolution too large");
    return GridTransform({static_cast<int>(rx), static_cast<int>(ry), static_cast<int>(rz)}, wmin,
                         vsize);
}

inline void check_magic(ByteReader& r, const char expected[4]) {
    r.require(4);
    if (std::memcmp(r.in.data() + r.pos, expected, 4) != 0)
        throw io_error(io_errc::bad_magic, "not a grid file");
    r.pos += 4;
}

} // namespace detail

inline constexpr std::uint32_t kFormatVersion = 1;

// ---------------------------------------------------------------------------
// Dense format "SOG0": magic, version u32, resolution 3xu32, world_min 3xf64,
// voxel_size f64, then ceil(N/8) payload bytes (x-fastest, LSB-first).
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> serialize_dense(const DenseGrid& grid) {
    detail::ByteWriter w;
    w.bytes(reinterpret_cast<const std::uint8_t*>("SOG0"), 4);
    w.u32(kFormatVersion);
    detail::write_transform(w, grid.transform());
    w.bytes(grid.payload().data(), grid.payload().size());
    return std::move(w.out);
}

inline DenseGrid deserialize_dense(std::span<const std::uint8_t> data) {
    detail::ByteReader r{data};
    detail::check_magic(r, "SOG0");
    if (r.u32() != kFormatVersion) throw io_error(io_errc::bad_version, "unsupported version");
    DenseGrid grid(detail::read_transform(r));
    r.bytes(grid.payload().data(), grid.payload().size());
    r.expect_end();
    return grid;
}

// ---------------------------------------------------------------------------
// Sparse format "SOG1": magic, version u32, transform as above, root entry
// count u32, then per entry (ordered by region z,y,x): origin 3xi32, kind u8
// (0 empty tile, 1 occupied tile, 2 internal). Internal payload is 4096
// child records, z-major (x fastest): kind u8 (0/1 tile, 2 leaf), leaf
// payload 64 bytes of bits.
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> serialize_sparse(const SparseGrid& grid) {
    detail::ByteWriter w;
    w.bytes(reinterpret_cast<const std::uint8_t*>("SOG1"), 4);
    w.u32(kFormatVersion);
    detail::write_transform(w, grid.transform());
    w.u32(static_cast<std::uint32_t>(grid.root().size()));
    for (const auto& [origin, entry] : grid.root()) {
        w.i32(origin.x);
        w.i32(origin.y);
        w.i32(origin.z);
        w.u8(static_cast<std::uint8_t>(entry.kind));
        if (entry.kind != RootKind::internal) continue;
        const InternalNode& node = *entry.node;
        for (int ci = 0; ci < InternalNode::kChildren; ++ci) {
            w.u8(static_cast<std::uint8_t>(node.kind(ci)));
            if (node.kind(ci) == ChildKind::leaf)
                w.bytes(node.leaf(ci).bytes().data(), LeafNode::kBytes);
        }
    }
    return std::move(w.out);
}

inline SparseGrid deserialize_sparse(std::span<const std::uint8_t> data) {
    detail::ByteReader r{data};
    detail::check_magic(r, "SOG1");
    if (r.u32() != kFormatVersion) throw io_error(io_errc::bad_version, "unsupported version");
    SparseGrid grid(detail::read_transform(r));
    const std::uint32_t entries = r.u32();
    for (std::uint32_t e = 0; e < entries; ++e) {
        Vec3i origin;
        origin.x = r.i32();
        origin.y = r.i32();
        origin.z = r.i32();
        const std::uint8_t kind = r.u8();
        if (kind > 2) throw io_error(io_errc::corrupt, "invalid root entry kind");
        SparseGrid::RootEntry entry;
        entry.kind = static_cast<RootKind>(kind);
        if (entry.kind == RootKind::internal) {
            entry.node = std::make_unique<InternalNode>();
            for (int ci = 0; ci < InternalNode::kChildren; ++ci) {
                const std::uint8_t ck = r.u8();
                if (ck > 2) throw io_error(io_errc::corrupt, "invalid child kind");
                if (static_cast<ChildKind>(ck) == ChildKind::leaf)
                    r.bytes(entry.node->emplace_leaf(ci).bytes().data(), LeafNode::kBytes);
                else
                    entry.node->set_tile(ci, static_cast<ChildKind>(ck) == ChildKind::occupied_tile);
            }
        }
        if (!grid.root().emplace(origin, std::move(entry)).second)
            throw io_error(io_errc::corrupt, "duplicate root entry");
    }
    r.expect_end();
    return grid;
}

// ---------------------------------------------------------------------------
// Memory accounting. Counts are defined by the file formats, not by process
// allocator statistics. The dense figure is the bit payload alone (the
// in-core bitarray); the sparse figure is the full SOG1 byte size including
// the header, since the tree has no meaningful payload/header split.
// ---------------------------------------------------------------------------

inline std::size_t memory_bytes(const DenseGrid& grid) {
    return (grid.transform().voxel_count() + 7) / 8;
}

inline std::size_t memory_bytes(const SparseGrid& grid) {
    constexpr std::size_t header = 4 + 4 + 12 + 24 + 8 + 4; // magic..voxel_size + entry count
    std::size_t total = header;
    for (const auto& [origin, entry] : grid.root()) {
        total += 12 + 1;
        if (entry.kind != RootKind::internal) continue;
        total += InternalNode::kChildren;
        for (int ci = 0; ci < InternalNode::kChildren; ++ci)
            if (entry.node->kind(ci) == ChildKind::leaf) total += LeafNode::kBytes;
    }
    return total;
}

// ---------------------------------------------------------------------------
// File helpers.
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f),
                                     std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open file for writing: " + path);
    f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace sog
