// Acceptance gate: ten end-to-end checks, one line each, nonzero exit if any
// fail. Each check prints the measured numbers so a red line carries its own
// evidence; see the README for the known limits of the displacement search
// and of the compensation-mode ordering.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "aleph/config.hpp"
#include "aleph/model_motion.hpp"
#include "aleph/oracle.hpp"
#include "aleph/pipeline.hpp"
#include "aleph/render.hpp"

using namespace aleph;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// ---- shared fixtures -------------------------------------------------------

ImageBuffer noise(int w, int h, uint32_t seed) {
    ImageBuffer img = ImageBuffer::scalar(w, h);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : img.data) v = dist(rng);
    return img;
}

ImageBuffer textured_noise(int w, int h, uint32_t seed) {
    ImageBuffer img = ImageBuffer::scalar(w, h);
    for (int shift : {2, 3, 4}) {
        ImageBuffer oct = noise(((w - 1) >> shift) + 1, ((h - 1) >> shift) + 1, seed++);
        ImageBuffer up = upsample_to(oct, w, h);
        for (size_t i = 0; i < img.data.size(); ++i) img.data[i] += up.data[i];
    }
    return img;
}

ImageBuffer circular_shift(const ImageBuffer& img, int sx, int sy) {
    ImageBuffer out = ImageBuffer::scalar(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int ox = ((x - sx) % img.width + img.width) % img.width;
            const int oy = ((y - sy) % img.height + img.height) % img.height;
            out.at(0, x, y) = img.at(0, ox, oy);
        }
    return out;
}

double recovered_fraction(const DisplacementField& d, int sx, int sy) {
    long total = 0, exact = 0;
    const int margin = 16;
    for (int y = margin; y < d.height - margin; ++y)
        for (int x = margin; x < d.width - margin; ++x) {
            const size_t i = size_t(y) * d.width + x;
            ++total;
            if (d.valid[i] && d.dx[i] == float(sx) && d.dy[i] == float(sy)) ++exact;
        }
    return double(exact) / double(total);
}

// Box fixture artifacts shared by the renderer-facing checks.
struct BoxArtifacts {
    Scene scene;
    ImageBuffer estimate;  // 128x128 direct-light frame
    VelocityField vel;
    AlephMap aleph;
    ThresholdMap threshold;
    ImageBuffer ref_lum;
    bool ready = false;
};

BoxArtifacts make_box_artifacts() {
    BoxArtifacts a;
    a.scene = load_scene(FIXTURE_DIR "/box.scene");
    PipelineConfig cfg;
    cfg.mode = "full";  // the 7-band pyramid fits 128 px, the saliency one needs 256
    a.estimate = trace_direct(a.scene, 0, 128, 128, cfg.direct_spp, cfg.seed);
    a.vel = displacement_to_velocity(
        project_model_motion(a.scene, 0, 128, 128, cfg.far_distance), cfg.geom);
    a.aleph = compute_aleph_pipeline(a.estimate, a.vel, cfg).aleph;
    a.ref_lum = luminance_of(a.estimate, cfg.geom);
    a.threshold = threshold_map(a.aleph, adaptation_luminance(a.ref_lum, cfg.geom));
    a.ready = true;
    return a;
}

// ---- criteria --------------------------------------------------------------

Outcome c1_static_peak() {
    const double peak = csf_peak(0.15).rho_peak;
    return {peak >= 4.3 && peak <= 5.3,
            fmt("rho_peak(0.15)=%.4f cpd, window [4.3, 5.3]", peak)};
}

Outcome c2_ceiling() {
    double best = 0, best_v = 0;
    const int nv = 4001;
    for (int i = 0; i < nv; ++i) {
        const double v = 0.15 + (80.0 - 0.15) * double(i) / double(nv - 1);
        const double m = csf_peak(v).csf_max;
        if (m > best) {
            best = m;
            best_v = v;
        }
    }
    // Independent check of the analytic ceiling: dense frequency sweep.
    double grid = 0;
    const int nr = 200000;
    for (int i = 0; i < nr; ++i) {
        const double rho =
            0.005 * std::pow(100.0 / 0.005, double(i) / double(nr - 1));
        grid = std::max(grid, csf_value(rho, best_v));
    }
    const double rel = std::abs(grid - best) / best;
    return {best >= 245.0 && best <= 255.0 && rel <= 1e-3,
            fmt("max sensitivity %.4f at v=%.4f deg/s (grid oracle off by %.2g)",
                best, best_v, rel)};
}

Outcome c3_bounds_and_ordering() {
    Scene sc = load_scene(FIXTURE_DIR "/box.scene");
    PipelineConfig cfg;
    const ImageBuffer est = trace_direct(sc, 0, 256, 256, cfg.direct_spp, cfg.seed);
    const VelocityField vel = displacement_to_velocity(
        project_model_motion(sc, 0, 256, 256, cfg.far_distance), cfg.geom);

    cfg.mode = "zero";
    const AlephMap zero = compute_aleph_pipeline(est, vel, cfg).aleph;
    cfg.mode = "full";
    const AlephMap full = compute_aleph_pipeline(est, vel, cfg).aleph;
    cfg.mode = "saliency";
    const PipelineResult sal = compute_aleph_pipeline(est, vel, cfg);

    float lo = 1e9f, hi = -1e9f;
    for (const AlephMap* m : {&zero, &full, &sal.aleph})
        for (float v : m->value.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const bool bounds_ok = lo >= 1.0f && hi <= 250.0f;

    long sel = 0, claimed = 0, reversed = 0;
    const float eps = 1e-3f;
    for (size_t i = 0; i < sal.saliency.s.data.size(); ++i) {
        if (sal.saliency.s.data[i] > 0.82f) continue;
        ++sel;
        const float az = zero.value.data[i];
        const float af = full.value.data[i];
        const float as = sal.aleph.value.data[i];
        if (az <= as + eps && as <= af + eps) ++claimed;
        if (az <= af + eps && af <= as + eps) ++reversed;
    }
    const double claimed_pct = 100.0 * double(claimed) / double(sel);
    const double reversed_pct = 100.0 * double(reversed) / double(sel);
    return {bounds_ok && claimed == sel,
            fmt("values in [%.3f, %.1f]; zero<=saliency<=full on %.1f%% of the "
                "%ld low-saliency pixels (zero<=full<=saliency on %.1f%%)",
                lo, hi, claimed_pct, sel, reversed_pct)};
}

Outcome c4_motion_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    const ImageBuffer a = textured_noise(512, 512, 50);
    const DisplacementField odd = match_image_motion(a, circular_shift(a, 3, 2));
    const double frac = recovered_fraction(odd, 3, 2);
    float cap = 0;
    for (size_t i = 0; i < odd.dx.size(); ++i)
        cap = std::max({cap, std::abs(odd.dx[i]), std::abs(odd.dy[i])});
    const DisplacementField even = match_image_motion(a, circular_shift(a, 8, 4));
    const double even_frac = recovered_fraction(even, 8, 4);
    const double dt = seconds_since(t0);
    return {frac >= 0.85 && cap <= 53.0f,
            fmt("(3,2) exact on %.1f%% (need 85%%), |d|max=%.0f<=53, even control "
                "(8,4) %.1f%%, %.1fs",
                100 * frac, double(cap), 100 * even_frac, dt)};
}

Outcome c5_hamming() {
    const int d = hamming_distance("1110", "1011");
    return {d == 2, fmt("d(\"1110\",\"1011\")=%d", d)};
}

Outcome c6_saliency_structure() {
    ImageBuffer frame(256, 256, 3, ColorSpace::OpponentAC1C2);
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 256; ++x)
            frame.at(0, x, y) =
                0.4f + 0.1f * float(std::sin(0.3 * x) * std::sin(0.2 * y));
    VelocityField still;
    still.width = still.height = 256;
    still.vx.assign(256 * 256, 0.0f);
    still.vy.assign(256 * 256, 0.0f);
    const int maps = compute_saliency_detail(frame, still).feature_map_count;

    ImageBuffer rivals = ImageBuffer::scalar(16, 16);
    rivals.at(0, 4, 4) = 1.0f;
    rivals.at(0, 12, 12) = 1.0f;
    float residue = 0;
    for (float v : lateral_inhibition(rivals).data) residue = std::max(residue, v);

    ImageBuffer scene(256, 256, 3, ColorSpace::OpponentAC1C2);
    for (size_t i = 0; i < scene.plane_size(); ++i) scene.data[i] = 0.35f;
    VelocityField vel = still;
    for (int y = 96; y < 128; ++y)
        for (int x = 96; x < 128; ++x) {
            scene.at(0, x, y) = 0.9f;
            vel.vx[size_t(y) * 256 + x] = 20.0f;
        }
    const SaliencyMap s = compute_saliency(scene, vel);
    size_t arg = 0;
    for (size_t i = 1; i < s.s.data.size(); ++i)
        if (s.s.data[i] > s.s.data[arg]) arg = i;
    const int ax = int(arg % 256), ay = int(arg / 256);
    const bool in_box = ax >= 72 && ax < 152 && ay >= 72 && ay < 152;

    return {maps == 48 && residue == 0.0f && in_box,
            fmt("%d feature maps, rival-peak residue %.3g, argmax (%d,%d) on the "
                "moving square",
                maps, residue, ax, ay)};
}

Outcome c7_oracle_algebra() {
    const double at_one = compress_accuracy(1.0, 0.1);
    bool monotone = true, bounded = true;
    double prev = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double v = 1.0 + 249.0 * double(i) / 1000.0;
        const double a = compress_accuracy(v, 0.1);
        if (a + 1e-12 < prev) monotone = false;
        if (a < 0.1 || a > 1.0) bounded = false;
        prev = a;
    }
    const int budget = asp_budget(512, 64.0, 16);
    return {std::abs(at_one - 0.1) <= 1e-12 && monotone && bounded && budget == 16,
            fmt("alpha1(1)=%.3f, monotone=%d, bounded=%d, budget(512,64,16)=%d",
                at_one, monotone, bounded, budget)};
}

Outcome c8_cache_thinning(const BoxArtifacts& box) {
    const auto t0 = std::chrono::steady_clock::now();
    RenderParams p;
    p.width = 128;
    p.height = 128;
    p.max_spp = 16;
    p.hemi_samples = 64;
    p.alpha_acc = 0.1;
    p.seed = 1;
    auto [img_u, st_u] = render(box.scene, 0, RenderMode::Uniform, {}, p);
    RenderInputs in;
    in.aleph = &box.aleph;
    auto [img_a, st_a] = render(box.scene, 0, RenderMode::AlephAlpha, in, p);

    PipelineConfig cfg;
    const ImageBuffer lum_u = luminance_of(img_u, cfg.geom);
    const ImageBuffer lum_a = luminance_of(img_a, cfg.geom);
    const ThresholdMap tm =
        threshold_map(box.aleph, adaptation_luminance(lum_u, cfg.geom));
    long within = 0;
    for (size_t i = 0; i < lum_u.data.size(); ++i)
        if (std::abs(lum_u.data[i] - lum_a.data[i]) < tm.delta_l.data[i]) ++within;
    const double frac = double(within) / double(lum_u.data.size());
    const double dt = seconds_since(t0);
    const double ratio = double(st_u.cache_created) / double(st_a.cache_created);
    return {ratio >= 2.0 && frac >= 0.95 && dt < 300.0,
            fmt("records %ld vs %ld (%.2fx, need 2x), within threshold %.1f%% "
                "(need 95%%), %.0fs",
                st_u.cache_created, st_a.cache_created, ratio, 100 * frac, dt)};
}

Outcome c9_noise_closure(const BoxArtifacts& box) {
    const ImageBuffer noisy = noise_inject(box.ref_lum, box.threshold, 1);
    const ImageBuffer conv = convergence_test(noisy, box.ref_lum, box.threshold);
    long pass_px = 0;
    for (float v : conv.data) pass_px += v == 1.0f;
    const ImageBuffer again = noise_inject(box.ref_lum, box.threshold, 1);
    const bool reproducible = noisy.data == again.data;
    return {pass_px == long(conv.data.size()) && reproducible,
            fmt("%ld/%zu pixels converge, rerun identical=%d", pass_px,
                conv.data.size(), int(reproducible))};
}

Outcome c10_form_factor() {
    Scene sc = parse_scene(
        "mat floor_m 0.7 0.7 0.7\n"
        "light lamp_m 10 10 10\n"
        "tri floor_m  -50 -50 0   50 -50 0   50 50 0\n"
        "tri floor_m  -50 -50 0   50 50 0   -50 50 0\n"
        "tri lamp_m   -0.5 -0.5 3   0.5 -0.5 3   0.5 0.5 3\n"
        "tri lamp_m   -0.5 -0.5 3   0.5 0.5 3   -0.5 0.5 3\n"
        "camera 0   0.3 0.2 1   0.3 0.2 0   0 1 0   30\n");
    const std::vector<Vec3> lamp = {{-0.5, -0.5, 3}, {0.5, -0.5, 3},
                                    {0.5, 0.5, 3}, {-0.5, 0.5, 3}};
    const Vec3 at{0.3, 0.2, 0};
    double contour = 0;
    for (size_t i = 0; i < lamp.size(); ++i) {
        const Vec3 a = (lamp[i] - at).normalized();
        const Vec3 b = (lamp[(i + 1) % lamp.size()] - at).normalized();
        const double beta = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
        contour += beta * a.cross(b).normalized().z;
    }
    const double expected = 0.7 / M_PI * 0.5 * 10.0 * std::abs(contour);
    const ImageBuffer px = trace_direct(sc, 0, 1, 1, 4096, 11);
    const double rel = std::abs(px.at(0, 0, 0) - expected) / expected;
    return {rel <= 0.02,
            fmt("4096 spp estimate %.5f vs analytic %.5f (%.2f%% off)",
                px.at(0, 0, 0), expected, 100 * rel)};
}

void report(int idx, const char* name, const Outcome& o, int& failures) {
    std::printf("[%2d] %-46s %s  %s\n", idx, name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

template <typename F>
Outcome guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main() {
    int failures = 0;
    report(1, "static sensitivity peak location", guarded(c1_static_peak), failures);
    report(2, "sensitivity ceiling across velocities", guarded(c2_ceiling), failures);
    report(3, "tolerance bounds and compensation ordering",
           guarded(c3_bounds_and_ordering), failures);
    report(4, "odd-shift motion recovery at 512px", guarded(c4_motion_recovery),
           failures);
    report(5, "hamming distance worked example", guarded(c5_hamming), failures);
    report(6, "saliency census and competition", guarded(c6_saliency_structure),
           failures);
    report(7, "accuracy compression and sample budgets", guarded(c7_oracle_algebra),
           failures);

    BoxArtifacts box;
    try {
        box = make_box_artifacts();
    } catch (const std::exception& e) {
        std::printf("box fixture failed: %s\n", e.what());
    }
    report(8, "cache thinning within perceptual closure",
           box.ready ? guarded([&] { return c8_cache_thinning(box); })
                     : Outcome{false, "box fixture unavailable"},
           failures);
    report(9, "noise-map closure and reproducibility",
           box.ready ? guarded([&] { return c9_noise_closure(box); })
                     : Outcome{false, "box fixture unavailable"},
           failures);
    report(10, "direct tracing vs the form-factor oracle", guarded(c10_form_factor),
           failures);

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
