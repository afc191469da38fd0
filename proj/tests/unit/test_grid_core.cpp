#include <doctest.h>

#include <random>

#include "sog/grid.hpp"
#include "sog/io.hpp"
#include "test_support.hpp"

using namespace sog;

TEST_CASE("transform index/world round-trip") {
    const GridTransform t({16, 8, 32}, {-1.0, 2.0, -5.0}, 0.125);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const Vec3i ijk{static_cast<int>(rng() % 16), static_cast<int>(rng() % 8),
                        static_cast<int>(rng() % 32)};
        CHECK(t.world_to_index(t.index_to_world_center(ijk)) == ijk);
        CHECK(t.world_to_index(t.index_to_world_corner(ijk)) == ijk);
    }
}

TEST_CASE("transform validation") {
    CHECK_THROWS_AS(GridTransform({0, 4, 4}, {0, 0, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridTransform({4, 4, 4}, {0, 0, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(GridTransform({4, 4, 4}, {0, 0, 0}, -1.0), std::invalid_argument);
}

TEST_CASE("binarize thresholding is strict") {
    const GridTransform t({4, 4, 4}, {0, 0, 0}, 1.0);
    ScalarField field;
    field.resolution = {4, 4, 4};
    field.values.assign(64, 0.0);

    SUBCASE("all-zero field stays empty") {
        const DenseGrid g = binarize(field, t, 0.01);
        CHECK(g.occupied_count() == 0);
    }
    SUBCASE("single hot cell sets exactly one bit") {
        field.values[t.linear_index({2, 1, 3})] = 1.0;
        const DenseGrid g = binarize(field, t, 0.5);
        CHECK(g.occupied_count() == 1);
        CHECK(g.voxel_at({2, 1, 3}));
    }
    SUBCASE("values equal to the threshold stay empty") {
        field.values.assign(64, 0.5);
        const DenseGrid g = binarize(field, t, 0.5);
        CHECK(g.occupied_count() == 0);
    }
    SUBCASE("empty field is rejected") {
        ScalarField degenerate;
        CHECK_THROWS_WITH_AS(binarize(degenerate, t, 0.1), "binarize: degenerate grid",
                             std::invalid_argument);
    }
}

TEST_CASE("binarize is monotone in the threshold") {
    const GridTransform t({8, 8, 8}, {0, 0, 0}, 1.0);
    std::mt19937_64 rng(5);
    ScalarField field;
    field.resolution = {8, 8, 8};
    field.values.resize(512);
    for (auto& v : field.values) v = testsupport::uniform01(rng);
    const DenseGrid lo = binarize(field, t, 0.3);
    const DenseGrid hi = binarize(field, t, 0.7);
    for (int z = 0; z < 8; ++z)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                if (hi.voxel_at({x, y, z})) CHECK(lo.voxel_at({x, y, z}));
}

TEST_CASE("clip_ray basics") {
    const GridTransform t({4, 4, 4}, {0, 0, 0}, 1.0);

    SUBCASE("axis ray enters and exits through the x faces") {
        const Ray ray({-1.0, 0.5, 0.5}, {1.0, 0.0, 0.0}, 0.0, 100.0);
        const auto clip = clip_ray(ray, t);
        REQUIRE(clip.has_value());
        CHECK(clip->first == doctest::Approx(1.0));
        CHECK(clip->second == doctest::Approx(5.0));
    }
    SUBCASE("ray range truncates the overlap") {
        const Ray ray({-1.0, 0.5, 0.5}, {1.0, 0.0, 0.0}, 0.0, 2.0);
        const auto clip = clip_ray(ray, t);
        REQUIRE(clip.has_value());
        CHECK(clip->first == doctest::Approx(1.0));
        CHECK(clip->second == doctest::Approx(2.0));
    }
    SUBCASE("parallel ray outside the slab misses") {
        const Ray ray({-1.0, 5.5, 0.5}, {1.0, 0.0, 0.0}, 0.0, 100.0);
        CHECK_FALSE(clip_ray(ray, t).has_value());
    }
}

TEST_CASE("clip_ray result stays inside ray range and box") {
    const GridTransform t({8, 8, 8}, {-1, -1, -1}, 0.25);
    std::mt19937_64 rng(77);
    for (int i = 0; i < 500; ++i) {
        const Ray ray = testsupport::random_ray(rng, t);
        const auto clip = clip_ray(ray, t);
        if (!clip) continue;
        CHECK(clip->first >= ray.t_min);
        CHECK(clip->second <= ray.t_max);
        CHECK(clip->first < clip->second);
        const double eps = 1e-9 * (clip->second - clip->first);
        for (const double s : {clip->first + eps, clip->second - eps}) {
            const Vec3 p = ray.at(s);
            for (int a = 0; a < 3; ++a) {
                CHECK(p[a] >= t.world_min[a] - 1e-9);
                CHECK(p[a] <= t.world_max()[a] + 1e-9);
            }
        }
    }
}

TEST_CASE("voxel_at out-of-bounds reads empty") {
    const GridTransform t({4, 4, 4}, {0, 0, 0}, 1.0);
    DenseGrid g(t);
    CHECK_FALSE(g.voxel_at({0, 0, 0}));
    CHECK_FALSE(g.voxel_at({-1, 0, 0}));
    CHECK_FALSE(g.voxel_at({0, 4, 0}));
    g.set_voxel({3, 3, 3}, true);
    CHECK(g.voxel_at({3, 3, 3}));
    CHECK(g.occupied_count() == 1);
    CHECK_THROWS_AS(g.set_voxel({4, 0, 0}, true), std::out_of_range);
}

TEST_CASE("ray validation") {
    CHECK_THROWS_AS(Ray({0, 0, 0}, {1.0, 1.0, 0.0}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Ray({0, 0, 0}, {1.0, 0.0, 0.0}, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Ray({0, 0, 0}, {1.0, 0.0, 0.0}, 2.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(Ray::from_dir({0, 0, 0}, {3.0, 4.0, 0.0}, 0.0, 1.0));
}

TEST_CASE("dense grid SOG0 round-trip and error paths") {
    const GridTransform t({16, 8, 8}, {-0.5, 0.25, 1.0}, 0.125);
    std::mt19937_64 rng(3);
    const DenseGrid g = testsupport::random_grid(rng, t, 0.3);

    auto bytes = serialize_dense(g);
    const DenseGrid back = deserialize_dense(bytes);
    CHECK(back == g);

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        CHECK_THROWS_AS(deserialize_dense(bytes), io_error);
        try {
            deserialize_dense(bytes);
        } catch (const io_error& e) {
            CHECK(e.code() == io_errc::bad_magic);
        }
    }
    SUBCASE("bad version") {
        bytes[4] = 9;
        try {
            deserialize_dense(bytes);
            FAIL("expected io_error");
        } catch (const io_error& e) {
            CHECK(e.code() == io_errc::bad_version);
        }
    }
    SUBCASE("truncated payload") {
        bytes.resize(bytes.size() - 5);
        try {
            deserialize_dense(bytes);
            FAIL("expected io_error");
        } catch (const io_error& e) {
            CHECK(e.code() == io_errc::truncated);
        }
    }
    SUBCASE("trailing garbage") {
        bytes.push_back(0);
        try {
            deserialize_dense(bytes);
            FAIL("expected io_error");
        } catch (const io_error& e) {
            CHECK(e.code() == io_errc::corrupt);
        }
    }
}
