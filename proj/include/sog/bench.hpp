#pragma once

#include <algorithm>
#include <chrono>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sog/camera.hpp"
#include "sog/io.hpp"
#include "sog/render.hpp"
#include "sog/scene_gen.hpp"

namespace sog {

// ---------------------------------------------------------------------------
// Variant matrix. Analyzers are tied to their structure: DDA and CD march
// the dense grid (CD with a precomputed distance field), HDDA marches the
// sparse tree. Each pairs with either sampling kernel, six variants total.
// ---------------------------------------------------------------------------

enum class GridKind { dense, sparse };
enum class AnalyzerKind { dda, hdda, cd };

struct VariantId {
    GridKind grid = GridKind::dense;
    AnalyzerKind analyzer = AnalyzerKind::dda;
    KernelKind kernel = KernelKind::branch;

    bool operator==(const VariantId&) const = default;
};

inline std::string to_string(const VariantId& v) {
    std::string s = v.grid == GridKind::dense ? "dense" : "sparse";
    s += v.analyzer == AnalyzerKind::dda ? "+dda" : (v.analyzer == AnalyzerKind::hdda ? "+hdda" : "+cd");
    s += v.kernel == KernelKind::branch ? "+branch" : "+skip";
    return s;
}

inline std::vector<VariantId> all_variants() {
    return {
        {GridKind::dense, AnalyzerKind::dda, KernelKind::branch},
        {GridKind::dense, AnalyzerKind::dda, KernelKind::skip},
        {GridKind::dense, AnalyzerKind::cd, KernelKind::branch},
        {GridKind::dense, AnalyzerKind::cd, KernelKind::skip},
        {GridKind::sparse, AnalyzerKind::hdda, KernelKind::branch},
        {GridKind::sparse, AnalyzerKind::hdda, KernelKind::skip},
    };
}

inline VariantId parse_variant(const std::string& id) {
    for (const VariantId& v : all_variants())
        if (to_string(v) == id) return v;
    throw std::invalid_argument("unknown variant '" + id +
                                "' (analyzers are bound to their grid: dense+dda, dense+cd, "
                                "sparse+hdda, each with +branch or +skip)");
}

inline const VariantId kReferenceVariant{GridKind::dense, AnalyzerKind::dda, KernelKind::branch};

// ---------------------------------------------------------------------------
// Configuration. Parsed from a plain key = value text file; '#' starts a
// comment. Keys are documented in the README.
// ---------------------------------------------------------------------------

struct BenchConfig {
    SceneKind kind = SceneKind::blobs;
    SceneParams params;
    int resolution = 128;
    int cascades = 1;
    StepSchedule::Kind schedule_kind = StepSchedule::Kind::constant;
    double dt0 = 0.0; // 0 = auto: half the finest voxel size
    double growth = kDefaultLinearGrowth;
    int width = 160;
    int height = 120;
    int repetitions = 5;
    int threads = 1;
    std::vector<VariantId> variants = all_variants();
    std::string out_csv;
    std::string out_json;

    void validate() const {
        if (resolution < 8 || resolution % 8 != 0)
            throw std::invalid_argument("resolution must be a positive multiple of 8");
        if (cascades != 1 && cascades != 4)
            throw std::invalid_argument("cascades must be 1 or 4");
        if (width < 1 || height < 1) throw std::invalid_argument("image size must be positive");
        if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
        if (threads < 1) throw std::invalid_argument("threads must be >= 1");
        if (variants.empty()) throw std::invalid_argument("variant list is empty");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

} // namespace detail

inline BenchConfig parse_config(std::istream& in) {
    BenchConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "scene")
                cfg.kind = scene_kind_from_string(value);
            else if (key == "seed")
                cfg.params.seed = std::stoull(value);
            else if (key == "fraction")
                cfg.params.fraction = std::stod(value);
            else if (key == "count")
                cfg.params.primitive_count = std::stoi(value);
            else if (key == "threshold")
                cfg.params.threshold = std::stod(value);
            else if (key == "resolution")
                cfg.resolution = std::stoi(value);
            else if (key == "cascades")
                cfg.cascades = std::stoi(value);
            else if (key == "schedule")
                cfg.schedule_kind = value == "linear"    ? StepSchedule::Kind::linear
                                    : value == "constant" ? StepSchedule::Kind::constant
                                                          : throw std::invalid_argument(
                                                                "schedule must be constant or linear");
            else if (key == "dt0")
                cfg.dt0 = std::stod(value);
            else if (key == "growth")
                cfg.growth = std::stod(value);
            else if (key == "width")
                cfg.width = std::stoi(value);
            else if (key == "height")
                cfg.height = std::stoi(value);
            else if (key == "repetitions")
                cfg.repetitions = std::stoi(value);
            else if (key == "threads")
                cfg.threads = std::stoi(value);
            else if (key == "csv")
                cfg.out_csv = value;
            else if (key == "json")
                cfg.out_json = value;
            else if (key == "variants") {
                cfg.variants.clear();
                if (value == "all") {
                    cfg.variants = all_variants();
                } else {
                    for (const auto& id : detail::split(value, ','))
                        if (!id.empty()) cfg.variants.push_back(parse_variant(id));
                }
            } else {
                throw std::invalid_argument("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad value for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Sample-set and interval comparison utilities, shared by the alongside
// checks of `bench run` and the `bench verify` suites.
// ---------------------------------------------------------------------------

inline bool nearly_equal_t(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + 1e-15;
}

struct Interval {
    double t0, t1;
};

/// Merges the occupied events of an analyzer stream into maximal intervals.
/// Adjacent events share boundary values exactly, so merging compares with ==.
template <class Analyzer>
std::vector<Interval> merged_occupied_intervals(Analyzer&& an) {
    std::vector<Interval> out;
    while (const auto ev = an.next()) {
        if (!ev->occupied) continue;
        if (!out.empty() && out.back().t1 == ev->t0)
            out.back().t1 = ev->t1;
        else
            out.push_back({ev->t0, ev->t1});
    }
    return out;
}

inline bool intervals_equivalent(const std::vector<Interval>& a, const std::vector<Interval>& b,
                                 double rel = 1e-9) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!nearly_equal_t(a[i].t0, b[i].t0, rel) || !nearly_equal_t(a[i].t1, b[i].t1, rel))
            return false;
    return true;
}

struct SampleSetComparison {
    std::size_t differing = 0; // samples present on only one side
    std::size_t matched = 0;
};

inline SampleSetComparison compare_sample_sets(const SampleBuffer& a, const SampleBuffer& b,
                                               double rel = 1e-9) {
    SampleSetComparison cmp;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (nearly_equal_t(a[i], b[j], rel)) {
            ++cmp.matched;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++cmp.differing;
            ++i;
        } else {
            ++cmp.differing;
            ++j;
        }
    }
    cmp.differing += (a.size() - i) + (b.size() - j);
    return cmp;
}

// ---------------------------------------------------------------------------
// Benchmark execution.
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string variant;
    std::string status = "ok"; // ok | check_failed | failed: <reason>
    double ms_per_frame = 0.0;
    double fps = 0.0;
    long lookup_count = 0;
    long step_count = 0;
    long samples = 0;
    std::size_t memory_bytes = 0;
    double psnr_db = 0.0;
    double conversion_ms = 0.0;
    std::vector<std::string> check_messages;
};

struct BenchReport {
    std::string scene;
    std::uint64_t seed = 0;
    int resolution = 0;
    int cascades = 1;
    double occupancy = 0.0;
    std::vector<BenchRow> rows;
    bool all_checks_passed = true;
};

/// Everything a run needs, built once so that frame timing excludes all
/// construction work. Conversion times are medians over 10 rebuilds.
struct BenchAssets {
    AnalyticScene scene;
    double occupancy = 0.0;
    DenseCascade dense;
    SparseCascade sparse;
    DistanceCascade distance;
    Camera camera;
    StepSchedule schedule{};
    double sparse_conversion_ms = 0.0;
    double distance_conversion_ms = 0.0;
};

namespace detail {

inline double steady_ms(std::chrono::steady_clock::time_point a,
                        std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Fn>
double median_run_ms(Fn&& fn, int reps) {
    std::vector<double> times;
    times.reserve(reps);
    for (int i = 0; i < reps; ++i) {
        const auto a = std::chrono::steady_clock::now();
        fn();
        const auto b = std::chrono::steady_clock::now();
        times.push_back(steady_ms(a, b));
    }
    return median(std::move(times));
}

} // namespace detail

inline BenchAssets build_assets(const BenchConfig& cfg) {
    BenchAssets assets;
    const GridTransform base = GridTransform::cube(cfg.resolution, {-1.0, -1.0, -1.0}, 2.0);
    GeneratedScene gen = generate_scene(cfg.kind, base, cfg.params);
    assets.scene = std::move(gen.scene);
    assets.occupancy = gen.occupancy;

    if (cfg.cascades == 1) {
        assets.dense.levels.push_back(std::move(gen.grid));
    } else if (cfg.kind == SceneKind::random) {
        // voxel noise has no analytic density; coarser levels reuse the
        // level-0 bits under scaled transforms
        for (int b = 0; b < cfg.cascades; ++b) {
            const double scale = static_cast<double>(1u << b);
            const GridTransform t(base.resolution, Vec3{-scale, -scale, -scale},
                                  base.voxel_size * scale);
            DenseGrid level(t);
            level.payload() = gen.grid.payload();
            assets.dense.levels.push_back(std::move(level));
        }
    } else {
        assets.dense = build_dense_cascade(assets.scene, base, cfg.cascades, cfg.params.threshold);
    }

    assets.sparse_conversion_ms = detail::median_run_ms(
        [&] {
            SparseCascade rebuilt;
            for (const auto& level : assets.dense.levels)
                rebuilt.levels.push_back(build_sparse(level));
            assets.sparse = std::move(rebuilt);
        },
        10);
    assets.distance_conversion_ms = detail::median_run_ms(
        [&] {
            DistanceCascade rebuilt;
            for (const auto& level : assets.dense.levels)
                rebuilt.levels.push_back(build_distance(level));
            assets.distance = std::move(rebuilt);
        },
        10);

    assets.camera.position = {1.9, 1.4, 2.3};
    assets.camera.target = {0.0, 0.0, 0.0};
    assets.camera.up = {0.0, 1.0, 0.0};
    assets.camera.vfov_deg = 42.0;
    assets.camera.width = cfg.width;
    assets.camera.height = cfg.height;

    const double dt0 = cfg.dt0 > 0.0 ? cfg.dt0 : 0.5 * base.voxel_size;
    assets.schedule = cfg.schedule_kind == StepSchedule::Kind::constant
                          ? StepSchedule::constant(dt0)
                          : StepSchedule::linear(dt0, cfg.growth);
    return assets;
}

/// Per-ray sampler for one variant. Single-level configs use the direct
/// analyzers; multi-level configs go through the cascade traversal.
inline std::function<SampleRun(const Ray&)> make_sampler(const BenchAssets& assets,
                                                         const VariantId& v) {
    const bool single = assets.dense.levels.size() == 1;
    const StepSchedule sched = assets.schedule;
    switch (v.analyzer) {
        case AnalyzerKind::dda:
            if (single)
                return [&assets, sched, v](const Ray& r) {
                    return run_sampler(r, assets.dense.levels[0], v.kernel, sched);
                };
            return [&assets, sched, v](const Ray& r) {
                return run_cascade_sampler(r, assets.dense, v.kernel, sched);
            };
        case AnalyzerKind::hdda:
            if (single)
                return [&assets, sched, v](const Ray& r) {
                    return run_sampler(r, assets.sparse.levels[0], v.kernel, sched);
                };
            return [&assets, sched, v](const Ray& r) {
                return run_cascade_sampler(r, assets.sparse, v.kernel, sched);
            };
        default:
            if (single)
                return [&assets, sched, v](const Ray& r) {
                    return run_sampler(r, assets.dense.levels[0], assets.distance.levels[0],
                                       v.kernel, sched);
                };
            return [&assets, sched, v](const Ray& r) {
                return run_cascade_sampler(r, assets.distance, v.kernel, sched);
            };
    }
}

struct FrameResult {
    Image image;
    long lookups = 0;
    long steps = 0;
    long samples = 0;
};

/// Renders one frame, optionally split across worker threads by row chunks.
/// Output is identical for any thread count.
inline FrameResult render_frame(const BenchAssets& assets,
                                const std::function<SampleRun(const Ray&)>& sampler,
                                int threads) {
    FrameResult frame;
    const Camera& cam = assets.camera;
    frame.image = Image(cam.width, cam.height);
    const int n = std::max(1, std::min(threads, cam.height));

    std::vector<long> lookups(n, 0), steps(n, 0), samples(n, 0);
    const auto work = [&](int worker, int y0, int y1) {
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < cam.width; ++x) {
                const Ray ray = cam.pixel_ray(x, y);
                const SampleRun run = sampler(ray);
                lookups[worker] += run.total_lookups();
                steps[worker] += run.analyzer_steps;
                samples[worker] += static_cast<long>(run.samples.size());
                frame.image.set_pixel(x, y,
                                      composite(ray, run.samples, assets.scene, assets.schedule));
            }
    };

    if (n == 1) {
        work(0, 0, cam.height);
    } else {
        std::vector<std::thread> pool;
        const int rows_per = (cam.height + n - 1) / n;
        for (int w = 0; w < n; ++w)
            pool.emplace_back(work, w, w * rows_per, std::min(cam.height, (w + 1) * rows_per));
        for (auto& th : pool) th.join();
    }
    for (int w = 0; w < n; ++w) {
        frame.lookups += lookups[w];
        frame.steps += steps[w];
        frame.samples += samples[w];
    }
    return frame;
}

inline std::size_t variant_memory_bytes(const BenchAssets& assets, const VariantId& v) {
    std::size_t total = 0;
    switch (v.grid) {
        case GridKind::sparse:
            for (const auto& level : assets.sparse.levels) total += memory_bytes(level);
            return total;
        case GridKind::dense:
            for (const auto& level : assets.dense.levels) total += memory_bytes(level);
            if (v.analyzer == AnalyzerKind::cd)
                for (const auto& level : assets.distance.levels)
                    total += level.transform().voxel_count() * sizeof(std::int32_t);
            return total;
    }
    return total;
}

/// The equivalence checks that run alongside the benchmark: the variant's
/// kernel twin must produce identical buffers, and its sample set must match
/// the reference analyzer within the boundary tolerance. Failures mark the
/// row but never abort the run.
inline void run_row_checks(const BenchAssets& assets, const VariantId& v, BenchRow& row) {
    const Camera& cam = assets.camera;
    const VariantId twin{v.grid, v.analyzer, v.kernel == KernelKind::branch ? KernelKind::skip
                                                                            : KernelKind::branch};
    const auto sampler = make_sampler(assets, v);
    const auto twin_sampler = make_sampler(assets, twin);
    const auto ref_sampler = make_sampler(assets, kReferenceVariant);

    const long total = static_cast<long>(cam.width) * cam.height;
    const long stride = std::max<long>(1, total / 512);
    long kernel_mismatches = 0, analyzer_mismatches = 0;
    for (long p = 0; p < total; p += stride) {
        const Ray ray = cam.pixel_ray(static_cast<int>(p % cam.width),
                                      static_cast<int>(p / cam.width));
        const SampleBuffer mine = sampler(ray).samples;
        if (mine != twin_sampler(ray).samples) ++kernel_mismatches;
        const auto cmp = compare_sample_sets(mine, ref_sampler(ray).samples);
        if (cmp.differing > 0) ++analyzer_mismatches;
    }
    if (kernel_mismatches > 0) {
        row.status = "check_failed";
        row.check_messages.push_back("kernel twin mismatch on " +
                                     std::to_string(kernel_mismatches) + " probe rays");
    }
    if (analyzer_mismatches > 0) {
        row.status = "check_failed";
        row.check_messages.push_back("sample set deviates from reference on " +
                                     std::to_string(analyzer_mismatches) + " probe rays");
    }
}

inline BenchReport run_matrix(const BenchConfig& cfg) {
    const BenchAssets assets = build_assets(cfg);
    BenchReport report;
    report.scene = to_string(cfg.kind);
    report.seed = cfg.params.seed;
    report.resolution = cfg.resolution;
    report.cascades = cfg.cascades;
    report.occupancy = assets.occupancy;

    // the reference image is rendered up front so every row can report PSNR
    const auto ref_sampler = make_sampler(assets, kReferenceVariant);
    const Image reference_image = render_frame(assets, ref_sampler, cfg.threads).image;

    for (const VariantId& v : cfg.variants) {
        BenchRow row;
        row.variant = to_string(v);
        try {
            const auto sampler = make_sampler(assets, v);
            const FrameResult counted = render_frame(assets, sampler, cfg.threads);
            row.lookup_count = counted.lookups;
            row.step_count = counted.steps;
            row.samples = counted.samples;
            row.memory_bytes = variant_memory_bytes(assets, v);
            row.ms_per_frame = detail::median_run_ms(
                [&] { render_frame(assets, sampler, cfg.threads); }, std::max(5, cfg.repetitions));
            row.fps = row.ms_per_frame > 0.0 ? 1000.0 / row.ms_per_frame : 0.0;
            row.psnr_db = psnr(counted.image, reference_image);
            row.conversion_ms = v.grid == GridKind::sparse ? assets.sparse_conversion_ms
                                : v.analyzer == AnalyzerKind::cd ? assets.distance_conversion_ms
                                                                 : 0.0;
            run_row_checks(assets, v, row);
        } catch (const std::exception& e) {
            row.status = std::string("failed: ") + e.what();
        }
        if (row.status != "ok") report.all_checks_passed = false;
        report.rows.push_back(std::move(row));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report emission. The CSV column order is fixed and documented; the JSON
// schema is versioned.
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "variant,status,ms_per_frame,fps,lookup_count,step_count,samples,memory_bytes,psnr_db,"
    "conversion_ms";

inline std::string emit_csv(const BenchReport& report) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    char buf[64];
    const auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    for (const auto& row : report.rows) {
        os << row.variant << ',' << row.status << ',' << num(row.ms_per_frame) << ','
           << num(row.fps) << ',' << row.lookup_count << ',' << row.step_count << ','
           << row.samples << ',' << row.memory_bytes << ',' << num(row.psnr_db) << ','
           << num(row.conversion_ms) << "\n";
    }
    return os.str();
}

inline std::string emit_json(const BenchReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["scene"] = {{"kind", report.scene},
                  {"seed", report.seed},
                  {"resolution", report.resolution},
                  {"cascades", report.cascades},
                  {"occupancy", report.occupancy}};
    j["all_checks_passed"] = report.all_checks_passed;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r = {{"variant", row.variant},
                            {"status", row.status},
                            {"ms_per_frame", row.ms_per_frame},
                            {"fps", row.fps},
                            {"lookup_count", row.lookup_count},
                            {"step_count", row.step_count},
                            {"samples", row.samples},
                            {"memory_bytes", row.memory_bytes},
                            {"psnr_db", row.psnr_db},
                            {"conversion_ms", row.conversion_ms}};
        if (!row.check_messages.empty()) r["check_messages"] = row.check_messages;
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Verification suites behind `bench verify`.
// ---------------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyResult {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Deterministic ray fan aimed at the grid from positions on a surrounding
/// sphere. Used by verify and by documentation examples.
inline std::vector<Ray> make_probe_rays(const GridTransform& t, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Ray> rays;
    rays.reserve(count);
    const Vec3 extent = t.world_max() - t.world_min;
    const Vec3 center = t.world_min + extent * 0.5;
    const double radius = extent.length();
    while (static_cast<int>(rays.size()) < count) {
        const double z = detail::uniform(rng, -1.0, 1.0);
        const double phi = detail::uniform(rng, 0.0, 2.0 * M_PI);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 pos = center + Vec3{r * std::cos(phi), z, r * std::sin(phi)} * radius;
        Vec3 aim;
        for (int a = 0; a < 3; ++a)
            aim[a] = detail::uniform(rng, t.world_min[a] + 0.1 * extent[a],
                                     t.world_max()[a] - 0.1 * extent[a]);
        const Vec3 dir = aim - pos;
        if (dir.length() < 1e-12) continue;
        rays.push_back(Ray::from_dir(pos, dir, 0.0, 1e9));
    }
    return rays;
}

inline VerifyResult run_verify(SceneKind kind, const SceneParams& params, int resolution,
                               int ray_count) {
    VerifyResult result;
    const GridTransform t = GridTransform::cube(resolution, {-1.0, -1.0, -1.0}, 2.0);
    const GeneratedScene gen = generate_scene(kind, t, params);
    const DenseGrid& dense = gen.grid;
    const SparseGrid sparse = build_sparse(dense);
    const DistanceGrid distance = build_distance(dense);

    {
        VerifyCheck c;
        c.name = "occupancy equivalence (dense vs sparse, exhaustive)";
        Accessor acc(sparse);
        std::size_t mismatches = 0;
        for (int z = 0; z < resolution && mismatches == 0; ++z)
            for (int y = 0; y < resolution; ++y)
                for (int x = 0; x < resolution; ++x)
                    if (dense.voxel_at({x, y, z}) != acc.query({x, y, z}).occupied) ++mismatches;
        c.passed = mismatches == 0;
        c.detail = std::to_string(mismatches) + " mismatches";
        result.checks.push_back(std::move(c));
    }

    const std::vector<Ray> rays = make_probe_rays(t, ray_count, params.seed ^ 0x9e3779b97f4a7c15ull);
    const StepSchedule sched = StepSchedule::constant(0.5 * t.voxel_size);

    {
        VerifyCheck c;
        c.name = "kernel equivalence (branch == skip, all analyzers)";
        std::size_t mismatches = 0;
        for (const Ray& ray : rays) {
            if (run_sampler(ray, dense, KernelKind::branch, sched).samples !=
                run_sampler(ray, dense, KernelKind::skip, sched).samples)
                ++mismatches;
            if (run_sampler(ray, sparse, KernelKind::branch, sched).samples !=
                run_sampler(ray, sparse, KernelKind::skip, sched).samples)
                ++mismatches;
            if (run_sampler(ray, dense, distance, KernelKind::branch, sched).samples !=
                run_sampler(ray, dense, distance, KernelKind::skip, sched).samples)
                ++mismatches;
        }
        c.passed = mismatches == 0;
        c.detail = std::to_string(mismatches) + " kernel mismatches over " +
                   std::to_string(rays.size()) + " rays";
        result.checks.push_back(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "analyzer soundness (merged occupied intervals agree)";
        std::size_t mismatches = 0;
        for (const Ray& ray : rays) {
            auto dda_iv = merged_occupied_intervals(DdaTraversal(dense, ray));
            auto hdda_iv = merged_occupied_intervals(HddaTraversal(sparse, ray));
            auto cd_iv = merged_occupied_intervals(CdTraversal(distance, ray));
            if (!intervals_equivalent(dda_iv, hdda_iv) || !intervals_equivalent(dda_iv, cd_iv))
                ++mismatches;
        }
        c.passed = mismatches == 0;
        c.detail = std::to_string(mismatches) + " interval-set mismatches";
        result.checks.push_back(std::move(c));
    }

    {
        VerifyCheck c;
        c.name = "sampler agreement (hdda and cd match dda sample sets)";
        std::size_t mismatches = 0;
        for (const Ray& ray : rays) {
            const SampleBuffer ref = run_sampler(ray, dense, KernelKind::branch, sched).samples;
            const SampleBuffer hs = run_sampler(ray, sparse, KernelKind::skip, sched).samples;
            const SampleBuffer cs =
                run_sampler(ray, dense, distance, KernelKind::skip, sched).samples;
            if (compare_sample_sets(ref, hs).differing > 0 ||
                compare_sample_sets(ref, cs).differing > 0)
                ++mismatches;
        }
        c.passed = mismatches == 0;
        c.detail = std::to_string(mismatches) + " sample-set mismatches";
        result.checks.push_back(std::move(c));
    }

    return result;
}

} // namespace sog
