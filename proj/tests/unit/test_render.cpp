#include <doctest.h>

#include <random>
#include <sstream>

#include "sog/render.hpp"
#include "test_support.hpp"

using namespace sog;

namespace {

AnalyticScene slab_scene(double sigma, double x0, double x1) {
    AnalyticScene scene;
    scene.background = {0, 0, 0};
    scene.primitives.push_back(
        Primitive::box({x0, -10, -10}, {x1, 10, 10}, sigma, {1.0, 1.0, 1.0}));
    return scene;
}

/// Total opacity of a ladder quadrature through [x0, x1] along +x.
double slab_opacity(double sigma, double x0, double x1, double dt, double phase) {
    const Ray ray({phase, 0.0, 0.0}, {1, 0, 0}, 0.0, 100.0);
    const AnalyticScene scene = slab_scene(sigma, x0, x1);
    SampleBuffer samples;
    for (double t = dt; t <= 100.0; t += dt)
        if (ray.at(t).x >= x0 && ray.at(t).x < x1) samples.push_back(t);
    const auto r = composite_detailed(ray, samples, scene, StepSchedule::constant(dt));
    return r.weight_sum;
}

} // namespace

TEST_CASE("compositing basics") {
    const StepSchedule sched = StepSchedule::constant(0.1);
    const Ray ray({0, 0, 0}, {1, 0, 0}, 0.0, 10.0);

    SUBCASE("no samples yields the background") {
        AnalyticScene scene;
        scene.background = {0.2, 0.4, 0.6};
        const Vec3 c = composite(ray, {}, scene, sched);
        CHECK(c == Vec3{0.2, 0.4, 0.6});
    }
    SUBCASE("a saturated sample yields the primitive color") {
        AnalyticScene scene;
        scene.background = {1, 0, 0};
        scene.primitives.push_back(Primitive::sphere({5, 0, 0}, 1.0, 250.0, {0.3, 0.7, 0.9}));
        // sigma * dt = 25 >= 20: opacity saturates
        const Vec3 c = composite(ray, {5.0}, scene, sched);
        CHECK(std::abs(c.x - 0.3) < 1e-8);
        CHECK(std::abs(c.y - 0.7) < 1e-8);
        CHECK(std::abs(c.z - 0.9) < 1e-8);
    }
}

TEST_CASE("slab quadrature converges to the closed form at first order") {
    // slab length chosen incommensurate with the dyadic ladder steps
    const double sigma = 0.9, x0 = 2.0137, x1 = x0 + std::sqrt(3.0);
    const double exact = 1.0 - std::exp(-sigma * (x1 - x0));
    std::mt19937_64 rng(99);

    const auto mean_error = [&](double dt) {
        double sum = 0.0;
        const int phases = 64;
        for (int i = 0; i < phases; ++i) {
            const double phase = testsupport::uniform(rng, 0.0, dt);
            sum += std::abs(slab_opacity(sigma, x0, x1, dt, phase) - exact);
        }
        return sum / phases;
    };

    const double e1 = mean_error(1.0 / 32.0);
    const double e2 = mean_error(1.0 / 64.0);
    const double ratio = e1 / e2; // linear prediction says 2
    CHECK(ratio > 0.6);
    CHECK(ratio < 6.0);
    CHECK(e2 < e1);
}

TEST_CASE("weight sum plus transmittance is one") {
    std::mt19937_64 rng(123);
    AnalyticScene scene;
    scene.background = {0.1, 0.1, 0.1};
    for (int i = 0; i < 6; ++i)
        scene.primitives.push_back(Primitive::sphere(
            {testsupport::uniform(rng, -1, 1), testsupport::uniform(rng, -1, 1),
             testsupport::uniform(rng, -1, 1)},
            testsupport::uniform(rng, 0.1, 0.5), testsupport::uniform(rng, 0.5, 8.0),
            {0.5, 0.5, 0.5}));
    const StepSchedule sched = StepSchedule::constant(0.01);
    const GridTransform t = GridTransform::cube(8, {-1, -1, -1}, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Ray ray = testsupport::random_ray(rng, t);
        SampleBuffer samples;
        for (double s = 0.5; s < 4.0; s += 0.01) samples.push_back(s);
        const auto r = composite_detailed(ray, samples, scene, sched);
        CHECK(std::abs(r.weight_sum + r.transmittance - 1.0) <= 1e-12);
    }
}

TEST_CASE("psnr") {
    SUBCASE("identical images hit the sentinel") {
        Image a(8, 8), b(8, 8);
        CHECK(psnr(a, b) == 99.0);
    }
    SUBCASE("black vs white is 0 dB") {
        Image black(4, 4), white(4, 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) white.set_pixel(x, y, {1, 1, 1});
        CHECK(psnr(black, white) == doctest::Approx(0.0));
    }
    SUBCASE("one level on one channel of an 8x8 gray image") {
        Image a(8, 8), b(8, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) {
                a.set_pixel(x, y, {128.0 / 255, 128.0 / 255, 128.0 / 255});
                b.set_pixel(x, y, {128.0 / 255, 128.0 / 255, 128.0 / 255});
            }
        Image c = b;
        // bump one channel by exactly one level
        Image d(8, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) d.set_pixel(x, y, {128.0 / 255, 128.0 / 255, 128.0 / 255});
        d.set_pixel(0, 0, {129.0 / 255, 128.0 / 255, 128.0 / 255});
        const double expected = 10.0 * std::log10(255.0 * 255.0 * (3.0 * 64.0));
        CHECK(psnr(a, d) == doctest::Approx(expected).epsilon(1e-9));
        CHECK(psnr(a, c) == 99.0);
    }
    SUBCASE("symmetry and dimension mismatch") {
        std::mt19937_64 rng(4);
        Image a(6, 5), b(6, 5);
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 6; ++x) {
                a.set_pixel(x, y, {testsupport::uniform01(rng), testsupport::uniform01(rng),
                                   testsupport::uniform01(rng)});
                b.set_pixel(x, y, {testsupport::uniform01(rng), testsupport::uniform01(rng),
                                   testsupport::uniform01(rng)});
            }
        CHECK(psnr(a, b) == psnr(b, a));
        CHECK_THROWS_AS(psnr(a, Image(5, 6)), std::invalid_argument);
    }
}

TEST_CASE("ppm bytes are exact") {
    Image img(2, 1);
    img.set_pixel(0, 0, {1.0, 0.0, 0.0});
    img.set_pixel(1, 0, {0.0, 0.0, 1.0});
    std::ostringstream os;
    write_ppm(os, img);
    const std::string expected = std::string("P6\n2 1\n255\n") +
                                 std::string("\xFF\x00\x00\x00\x00\xFF", 6);
    CHECK(os.str() == expected);
}

TEST_CASE("scene validation rejects bad primitives") {
    AnalyticScene scene;
    scene.primitives.push_back(Primitive::sphere({0, 0, 0}, 1.0, -1.0, {1, 1, 1}));
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
    scene.primitives[0] = Primitive::sphere({0, 0, 0}, 1.0, 1.0, {2, 0, 0});
    CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}
