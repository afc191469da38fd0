// Command line harness for the sparse occupancy grid library: benchmark
// matrix runs, dense->sparse conversion, scene rendering, and equivalence
// verification. Exit codes: 0 all checks passed, 1 check or run failure,
// 2 usage error.

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sog/sog.hpp"

namespace {

// Scene specs look like "blobs:seed=3,count=10" with the kind followed by
// optional key=value pairs (seed, fraction, count, threshold).
struct SceneSpec {
    sog::SceneKind kind = sog::SceneKind::blobs;
    sog::SceneParams params;
};

SceneSpec parse_scene_spec(const std::string& spec) {
    SceneSpec out;
    const auto colon = spec.find(':');
    out.kind = sog::scene_kind_from_string(spec.substr(0, colon));
    if (colon == std::string::npos) return out;
    std::stringstream rest(spec.substr(colon + 1));
    std::string pair;
    while (std::getline(rest, pair, ',')) {
        if (pair.empty()) continue;
        const auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("scene spec entries must be key=value, got '" + pair + "'");
        const std::string key = pair.substr(0, eq);
        const std::string value = pair.substr(eq + 1);
        if (key != "seed" && key != "fraction" && key != "count" && key != "threshold")
            throw std::invalid_argument("unknown scene spec key '" + key + "'");
        try {
            if (key == "seed")
                out.params.seed = std::stoull(value);
            else if (key == "fraction")
                out.params.fraction = std::stod(value);
            else if (key == "count")
                out.params.primitive_count = std::stoi(value);
            else
                out.params.threshold = std::stod(value);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad value for scene spec key '" + key + "': " + value);
        }
    }
    return out;
}

void print_report(const sog::BenchReport& report) {
    std::cout << "scene=" << report.scene << " seed=" << report.seed
              << " resolution=" << report.resolution << " cascades=" << report.cascades
              << " occupancy=" << report.occupancy << "\n";
    std::cout << sog::emit_csv(report);
    for (const auto& row : report.rows)
        for (const auto& msg : row.check_messages)
            std::cout << "# " << row.variant << ": " << msg << "\n";
}

int cmd_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open config: " << config_path << "\n";
        return 2;
    }
    sog::BenchConfig cfg;
    try {
        cfg = sog::parse_config(in);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    const sog::BenchReport report = sog::run_matrix(cfg);
    print_report(report);
    if (!cfg.out_csv.empty()) {
        std::ofstream f(cfg.out_csv, std::ios::trunc);
        f << sog::emit_csv(report);
    }
    if (!cfg.out_json.empty()) {
        std::ofstream f(cfg.out_json, std::ios::trunc);
        f << sog::emit_json(report) << "\n";
    }
    return report.all_checks_passed ? 0 : 1;
}

int cmd_convert(const std::string& in_path, const std::string& out_path) {
    const auto bytes = sog::read_file(in_path);
    const sog::DenseGrid dense = sog::deserialize_dense(bytes);
    const auto t0 = std::chrono::steady_clock::now();
    const sog::SparseGrid sparse = sog::build_sparse(dense);
    const auto t1 = std::chrono::steady_clock::now();
    sog::write_file(out_path, sog::serialize_sparse(sparse));
    std::cout << "converted " << in_path << " -> " << out_path << "\n"
              << "dense payload bytes: " << sog::memory_bytes(dense) << "\n"
              << "sparse bytes: " << sog::memory_bytes(sparse) << "\n"
              << "conversion ms: "
              << std::chrono::duration<double, std::milli>(t1 - t0).count() << "\n";
    return 0;
}

int cmd_render(const std::string& scene_spec, const std::string& variant_id,
               const std::string& out_path, int resolution, int width, int height) {
    const SceneSpec spec = parse_scene_spec(scene_spec);
    const sog::VariantId variant = sog::parse_variant(variant_id);

    sog::BenchConfig cfg;
    cfg.kind = spec.kind;
    cfg.params = spec.params;
    cfg.resolution = resolution;
    cfg.width = width;
    cfg.height = height;
    cfg.validate();

    const sog::BenchAssets assets = sog::build_assets(cfg);
    const auto sampler = sog::make_sampler(assets, variant);
    const sog::FrameResult frame = sog::render_frame(assets, sampler, 1);

    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) {
        std::cerr << "cannot open output: " << out_path << "\n";
        return 1;
    }
    sog::write_ppm(f, frame.image);
    std::cout << "rendered " << variant_id << " (" << width << "x" << height << ", "
              << frame.samples << " samples) -> " << out_path << "\n";
    return 0;
}

int cmd_verify(const std::string& scene_spec, int resolution, int rays) {
    const SceneSpec spec = parse_scene_spec(scene_spec);
    const sog::VerifyResult result = sog::run_verify(spec.kind, spec.params, resolution, rays);
    for (const auto& check : result.checks)
        std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.detail
                  << "\n";
    std::cout << (result.all_passed() ? "all checks passed" : "CHECK FAILURES") << "\n";
    return result.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse occupancy grid benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the benchmark matrix from a config file");
    run->add_option("--config", config_path, "key = value config file")->required();

    std::string in_path, out_path;
    auto* convert = app.add_subcommand("convert", "convert a dense .sog0 grid to sparse .sog1");
    convert->add_option("--in", in_path, "input dense grid (SOG0)")->required();
    convert->add_option("--out", out_path, "output sparse grid (SOG1)")->required();

    std::string scene_spec = "blobs:seed=1";
    std::string variant_id = "dense+dda+branch";
    std::string image_path = "image.ppm";
    int resolution = 128, width = 320, height = 240, rays = 500;
    auto* render = app.add_subcommand("render", "render a synthetic scene with one variant");
    render->add_option("--scene", scene_spec, "scene spec, e.g. blobs:seed=3,count=10");
    render->add_option("--variant", variant_id, "sampler variant id");
    render->add_option("--out", image_path, "output PPM path")->required();
    render->add_option("--resolution", resolution, "occupancy grid resolution");
    render->add_option("--width", width, "image width");
    render->add_option("--height", height, "image height");

    auto* verify = app.add_subcommand("verify", "run the equivalence suites on a scene");
    verify->add_option("--scene", scene_spec, "scene spec");
    verify->add_option("--resolution", resolution, "occupancy grid resolution");
    verify->add_option("--rays", rays, "number of probe rays");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // help exits 0, anything else is a usage error
    }

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (convert->parsed()) return cmd_convert(in_path, out_path);
        if (render->parsed()) return cmd_render(scene_spec, variant_id, image_path, resolution,
                                                width, height);
        if (verify->parsed()) return cmd_verify(scene_spec, resolution, rays);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
