#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "sog/bench.hpp"
#include "test_support.hpp"

using namespace sog;

TEST_CASE("random scene generator hits the requested occupancy") {
    const GridTransform t = GridTransform::cube(32, {-1, -1, -1}, 2.0);
    SceneParams params;
    params.seed = 7;

    SUBCASE("fraction 0 -> empty grid") {
        params.fraction = 0.0;
        CHECK(generate_scene(SceneKind::random, t, params).grid.occupied_count() == 0);
    }
    SUBCASE("fraction 1 -> full grid") {
        params.fraction = 1.0;
        const auto gen = generate_scene(SceneKind::random, t, params);
        CHECK(gen.grid.occupied_count() == t.voxel_count());
    }
    SUBCASE("fraction 0.1 lands within 10 percent") {
        params.fraction = 0.1;
        const auto gen = generate_scene(SceneKind::random, t, params);
        CHECK(gen.occupancy > 0.09);
        CHECK(gen.occupancy < 0.11);
    }
    SUBCASE("same seed reproduces the same grid") {
        params.fraction = 0.25;
        const auto a = generate_scene(SceneKind::random, t, params);
        const auto b = generate_scene(SceneKind::random, t, params);
        CHECK(a.grid == b.grid);
    }
    SUBCASE("invalid fraction is rejected") {
        params.fraction = 1.5;
        CHECK_THROWS_AS(generate_scene(SceneKind::random, t, params), std::invalid_argument);
    }
}

TEST_CASE("blobs occupancy equals the analytic voxel-center membership test") {
    const GridTransform t = GridTransform::cube(32, {-1, -1, -1}, 2.0);
    SceneParams params;
    params.seed = 3;
    params.primitive_count = 6;
    const auto gen = generate_scene(SceneKind::blobs, t, params);
    CHECK(gen.grid.occupied_count() > 0);
    for (int z = 0; z < 32; ++z)
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                const Vec3 p = t.index_to_world_center({x, y, z});
                double sigma = 0.0;
                for (const auto& prim : gen.scene.primitives)
                    if (prim.contains(p)) sigma += prim.density;
                REQUIRE(gen.grid.voxel_at({x, y, z}) == (sigma > params.threshold));
            }
}

TEST_CASE("shell and sponge scenes are coherent") {
    const GridTransform t = GridTransform::cube(64, {-1, -1, -1}, 2.0);
    SceneParams params;
    params.seed = 5;
    for (const auto kind : {SceneKind::shell, SceneKind::sponge}) {
        const auto gen = generate_scene(kind, t, params);
        CHECK(gen.occupancy > 0.001);
        CHECK(gen.occupancy < (kind == SceneKind::shell ? 0.45 : 0.1));
        // coherent scenes must produce genuine tiles when sparsified
        const SparseGrid sparse = build_sparse(gen.grid);
        std::size_t tile_children = 0;
        for (const auto& [origin, entry] : sparse.root()) {
            if (entry.kind != RootKind::internal) continue;
            for (int ci = 0; ci < InternalNode::kChildren; ++ci)
                if (entry.node->kind(ci) != ChildKind::leaf) ++tile_children;
        }
        CHECK(tile_children > 0);
    }
}

TEST_CASE("variant ids parse and print consistently") {
    CHECK(all_variants().size() == 6);
    for (const VariantId& v : all_variants()) CHECK(parse_variant(to_string(v)) == v);
    CHECK_THROWS_AS(parse_variant("dense+hdda+branch"), std::invalid_argument);
    CHECK_THROWS_AS(parse_variant("sparse+dda+skip"), std::invalid_argument);
    CHECK_THROWS_AS(parse_variant("nonsense"), std::invalid_argument);
}

TEST_CASE("config parser") {
    SUBCASE("full config round-trips into fields") {
        std::istringstream in(
            "# benchmark configuration\n"
            "scene = sponge\n"
            "seed = 42\n"
            "resolution = 64\n"
            "cascades = 1\n"
            "schedule = linear\n"
            "dt0 = 0.01\n"
            "growth = 0.005\n"
            "width = 80\n"
            "height = 60\n"
            "repetitions = 5\n"
            "threads = 2\n"
            "variants = dense+dda+branch, sparse+hdda+skip\n"
            "csv = out.csv\n");
        const BenchConfig cfg = parse_config(in);
        CHECK(cfg.kind == SceneKind::sponge);
        CHECK(cfg.params.seed == 42);
        CHECK(cfg.resolution == 64);
        CHECK(cfg.schedule_kind == StepSchedule::Kind::linear);
        CHECK(cfg.dt0 == 0.01);
        CHECK(cfg.growth == 0.005);
        CHECK(cfg.width == 80);
        CHECK(cfg.height == 60);
        CHECK(cfg.threads == 2);
        REQUIRE(cfg.variants.size() == 2);
        CHECK(cfg.variants[0] == kReferenceVariant);
        CHECK(cfg.out_csv == "out.csv");
    }
    SUBCASE("unknown keys are rejected") {
        std::istringstream in("speling = mistake\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    SUBCASE("bad resolution is rejected") {
        std::istringstream in("resolution = 100\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
    SUBCASE("malformed line is rejected") {
        std::istringstream in("this is not a key value pair\n");
        CHECK_THROWS_AS(parse_config(in), std::invalid_argument);
    }
}

TEST_CASE("csv emission has a fixed header and one line per row") {
    BenchReport report;
    SUBCASE("empty matrix emits the header only") {
        const std::string csv = emit_csv(report);
        CHECK(csv == std::string(kCsvHeader) + "\n");
    }
    SUBCASE("row count equals variants plus header") {
        for (int i = 0; i < 3; ++i) {
            BenchRow row;
            row.variant = "dense+dda+branch";
            report.rows.push_back(row);
        }
        const std::string csv = emit_csv(report);
        std::size_t lines = 0;
        for (const char c : csv)
            if (c == '\n') ++lines;
        CHECK(lines == 4);
    }
}

TEST_CASE("json report round-trips through the schema") {
    BenchReport report;
    report.scene = "blobs";
    report.seed = 9;
    report.resolution = 32;
    report.cascades = 1;
    report.occupancy = 0.05;
    BenchRow row;
    row.variant = "sparse+hdda+skip";
    row.ms_per_frame = 12.5;
    row.fps = 80.0;
    row.lookup_count = 1234;
    row.step_count = 777;
    row.samples = 4321;
    row.memory_bytes = 69;
    row.psnr_db = 55.5;
    row.conversion_ms = 3.25;
    report.rows.push_back(row);

    const auto j = nlohmann::json::parse(emit_json(report));
    CHECK(j["schema_version"] == 1);
    CHECK(j["scene"]["kind"] == "blobs");
    CHECK(j["scene"]["seed"] == 9);
    REQUIRE(j["rows"].size() == 1);
    CHECK(j["rows"][0]["variant"] == "sparse+hdda+skip");
    CHECK(j["rows"][0]["ms_per_frame"] == 12.5);
    CHECK(j["rows"][0]["lookup_count"] == 1234);
    CHECK(j["rows"][0]["memory_bytes"] == 69);
    CHECK(j["rows"][0]["psnr_db"] == 55.5);
}

TEST_CASE("bench run on a small scene") {
    BenchConfig cfg;
    cfg.kind = SceneKind::blobs;
    cfg.params.seed = 11;
    cfg.params.primitive_count = 5;
    cfg.resolution = 32;
    cfg.width = 48;
    cfg.height = 36;
    cfg.repetitions = 5;
    cfg.validate();

    const BenchReport report = run_matrix(cfg);
    REQUIRE(report.rows.size() == 6);
    CHECK(report.all_checks_passed);

    long dda_steps = 0, hdda_steps = 0;
    for (const auto& row : report.rows) {
        CHECK(row.status == "ok");
        CHECK(row.samples > 0);
        CHECK(row.lookup_count > 0);
        CHECK(row.memory_bytes > 0);
        CHECK(row.psnr_db >= 40.0); // every variant renders the reference image
        if (row.variant == "dense+dda+branch") {
            dda_steps = row.step_count;
            CHECK(row.psnr_db == 99.0);
            CHECK(row.conversion_ms == 0.0);
        }
        if (row.variant == "sparse+hdda+skip") {
            hdda_steps = row.step_count;
            CHECK(row.conversion_ms >= 0.0);
        }
    }
    CHECK(hdda_steps < dda_steps);

    SUBCASE("counters are deterministic across runs") {
        const BenchReport again = run_matrix(cfg);
        REQUIRE(again.rows.size() == report.rows.size());
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            CHECK(again.rows[i].lookup_count == report.rows[i].lookup_count);
            CHECK(again.rows[i].step_count == report.rows[i].step_count);
            CHECK(again.rows[i].samples == report.rows[i].samples);
            CHECK(again.rows[i].psnr_db == report.rows[i].psnr_db);
        }
    }
}

TEST_CASE("render_frame is identical across kernels and thread counts") {
    BenchConfig cfg;
    cfg.kind = SceneKind::blobs;
    cfg.params.seed = 2;
    cfg.resolution = 32;
    cfg.width = 40;
    cfg.height = 30;
    const BenchAssets assets = build_assets(cfg);

    const auto branch = make_sampler(assets, parse_variant("sparse+hdda+branch"));
    const auto skip = make_sampler(assets, parse_variant("sparse+hdda+skip"));
    const FrameResult a = render_frame(assets, branch, 1);
    const FrameResult b = render_frame(assets, skip, 1);
    const FrameResult c = render_frame(assets, skip, 4);
    CHECK(a.image == b.image); // kernel equivalence propagates to pixels
    CHECK(b.image == c.image); // thread count cannot change the output
    CHECK(b.samples == c.samples);
    CHECK(b.lookups == c.lookups);
}

TEST_CASE("verify suite passes on a generated scene") {
    SceneParams params;
    params.seed = 13;
    params.fraction = 0.02;
    const VerifyResult result = run_verify(SceneKind::blobs, params, 32, 60);
    REQUIRE(result.checks.size() == 4);
    for (const auto& check : result.checks) {
        INFO(check.name, ": ", check.detail);
        CHECK(check.passed);
    }
    CHECK(result.all_passed());
}
