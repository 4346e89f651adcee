// Command-line front end: per-pixel error-tolerance maps from animation
// frames, plus the adaptive renderer that consumes them.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "aleph/config.hpp"
#include "aleph/image_io.hpp"
#include "aleph/model_motion.hpp"
#include "aleph/oracle.hpp"
#include "aleph/pipeline.hpp"
#include "aleph/render.hpp"

using namespace aleph;

namespace {

std::string version_text() {
    std::ostringstream s;
    s << "alephmap 1.0.0\n"
      << "sensitivity: c0=1.14 c1=0.67 c2=1.7 v_min=0.15 v_max=80"
         " tracking_efficiency=0.82, ceiling clamp [1,250]\n"
      << "band peaks (cpd at 31 ppd): 16 8 4 2 1 0.5 0.25\n"
      << "pyramid filter: 0.05 0.25 0.4 0.25 0.05\n"
      << "tvi log10 segments: -2.86 | (0.405t+1.6)^2.18-2.86 | t-0.395 |"
         " (0.249t+0.65)^2.7-0.72 | t-1.255"
         "  joints t = -3.94, -1.2066, -0.0184, 1.9176\n"
      << "opponent matrix rows: [0.2126 0.7152 0.0722] [1 -1 0] [-0.5 -0.5 1]\n"
      << "motion search: census 3x3, exhaustive +-8 at level 2,"
         " three-step 4/2/1, displacement cap 53 px\n"
      << "defaults: ppd=31 fps=30 max_luminance=100 alpha_acc=0.1 k=100"
         " max_samples=512 floor_samples=16 direct_spp=16 hemi_samples=64\n";
    return s.str();
}

struct CommonOpts {
    std::string config_file;
    std::vector<std::string> sets;

    void attach(CLI::App* sub) {
        sub->add_option("--config", config_file, "key=value config file");
        sub->add_option("--set", sets, "override one config key (key=value)");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg =
            config_file.empty() ? PipelineConfig{} : load_config(config_file);
        for (const auto& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
            cfg.apply(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return cfg;
    }
};

// Absolute luminance plane of a loaded frame (scalars pass through).
ImageBuffer as_abs_luminance(const ImageBuffer& img, const DisplayGeometry& geom) {
    if (img.planes == 1) return img;
    return luminance_of(img, geom);
}

VelocityField velocity_from_inputs(const PipelineConfig& cfg, const std::string& scene_path,
                                   int frame, const std::string& frame_a,
                                   const std::string& frame_b, int w, int h) {
    DisplacementField d;
    if (!frame_b.empty()) {
        d = match_image_motion(load_frame(frame_a), load_frame(frame_b));
    } else if (!scene_path.empty()) {
        d = project_model_motion(load_scene(scene_path), frame, w, h, cfg.far_distance);
    } else {
        throw CLI::ValidationError("motion",
                                   "need either --frame-b or --scene for motion");
    }
    return displacement_to_velocity(d, cfg.geom);
}

void write_stats(const std::string& path, const RenderStats& st) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "primary_rays=" << st.primary_rays << "\n"
        << "direct_samples=" << st.direct_samples << "\n"
        << "hemi_rays=" << st.hemi_rays << "\n"
        << "cache_lookups=" << st.cache_lookups << "\n"
        << "cache_interpolated=" << st.cache_interpolated << "\n"
        << "cache_created=" << st.cache_created << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"per-pixel spatiotemporal error tolerance maps and an adaptive"
                 " global-illumination harness"};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "direct-light frame estimate");
    CommonOpts est_c;
    est_c.attach(est);
    std::string est_scene, est_out;
    int est_frame = 0, est_w = 256, est_h = 256;
    est->add_option("--scene", est_scene, "scene file")->required();
    est->add_option("--frame", est_frame, "frame number");
    est->add_option("--width", est_w);
    est->add_option("--height", est_h);
    est->add_option("-o,--out", est_out, "output image (.pfm or .ppm)")->required();
    est->callback([&] {
        const PipelineConfig cfg = est_c.resolve();
        const Scene sc = load_scene(est_scene);
        const ImageBuffer img =
            trace_direct(sc, est_frame, est_w, est_h, cfg.direct_spp, cfg.seed);
        save_frame(img, est_out);
        write_metadata(est_out, cfg,
                       {{"command", "estimate"},
                        {"scene", est_scene},
                        {"frame", std::to_string(est_frame)},
                        {"width", std::to_string(est_w)},
                        {"height", std::to_string(est_h)}});
    });

    // ---- motion ----
    auto* mot = app.add_subcommand("motion", "per-pixel velocity field");
    CommonOpts mot_c;
    mot_c.attach(mot);
    std::string mot_scene, mot_a, mot_b, mot_out;
    int mot_frame = 0, mot_w = 256, mot_h = 256;
    mot->add_option("--scene", mot_scene, "scene file (model-based motion)");
    mot->add_option("--frame", mot_frame, "frame number (model-based)");
    mot->add_option("--frame-a", mot_a, "frame N image (image-based)");
    mot->add_option("--frame-b", mot_b, "frame N+1 image (image-based)");
    mot->add_option("--width", mot_w, "viewport width (model-based)");
    mot->add_option("--height", mot_h, "viewport height (model-based)");
    mot->add_option("-o,--out", mot_out, "velocity PFM (planes: vx, vy, |v| deg/s)")
        ->required();
    mot->callback([&] {
        const PipelineConfig cfg = mot_c.resolve();
        if (mot_a.empty() != mot_b.empty())
            throw CLI::ValidationError("motion", "--frame-a and --frame-b go together");
        VelocityField v = velocity_from_inputs(cfg, mot_scene, mot_frame, mot_a, mot_b,
                                               mot_w, mot_h);
        ImageBuffer out(v.width, v.height, 3, ColorSpace::Scalar);
        const ImageBuffer mag = v.magnitude();
        for (size_t i = 0; i < v.vx.size(); ++i) {
            out.plane(0)[i] = v.vx[i];
            out.plane(1)[i] = v.vy[i];
            out.plane(2)[i] = mag.data[i];
        }
        save_pfm(out, mot_out);
        write_metadata(mot_out, cfg,
                       {{"command", "motion"},
                        {"source", mot_b.empty() ? "model" : "image"},
                        {"frame", std::to_string(mot_frame)}});
    });

    // ---- saliency ----
    auto* sal = app.add_subcommand("saliency", "bottom-up attention map");
    CommonOpts sal_c;
    sal_c.attach(sal);
    std::string sal_frame, sal_b, sal_scene, sal_out, sal_consp;
    int sal_frameno = 0;
    sal->add_option("--frame-a", sal_frame, "frame N image (appearance + motion)")
        ->required();
    sal->add_option("--frame-b", sal_b, "frame N+1 image (image-based motion)");
    sal->add_option("--scene", sal_scene, "scene file (model-based motion)");
    sal->add_option("--frame", sal_frameno, "frame number (model-based)");
    sal->add_option("-o,--out", sal_out, "saliency PFM in [0,1]")->required();
    sal->add_option("--conspicuity", sal_consp,
                    "prefix for per-channel conspicuity dumps");
    sal->callback([&] {
        const PipelineConfig cfg = sal_c.resolve();
        const ImageBuffer frame = load_frame(sal_frame);
        const VelocityField v = velocity_from_inputs(
            cfg, sal_scene, sal_frameno, sal_frame, sal_b, frame.width, frame.height);
        const ImageBuffer opp = frame.space == ColorSpace::OpponentAC1C2
                                    ? frame
                                    : rgb_to_opponent(frame);
        const SaliencyBreakdown sb = compute_saliency_detail(opp, v);
        save_pfm(sb.s.s, sal_out);
        if (!sal_consp.empty()) {
            const char* names[4] = {"intensity", "color", "orientation", "motion"};
            for (int i = 0; i < 4; ++i)
                save_pfm(sb.conspicuity[i], sal_consp + "-" + names[i] + ".pfm");
        }
        write_metadata(sal_out, cfg,
                       {{"command", "saliency"},
                        {"feature_maps", std::to_string(sb.feature_map_count)}});
    });

    // ---- aleph ----
    auto* alf = app.add_subcommand("aleph", "per-pixel tolerance map");
    CommonOpts alf_c;
    alf_c.attach(alf);
    std::string alf_a, alf_b, alf_scene, alf_out, alf_sal_out, alf_vis;
    int alf_frame = 0, alf_w = 256, alf_h = 256;
    alf->add_option("--frame-a", alf_a, "frame N estimate (omit to trace from scene)");
    alf->add_option("--frame-b", alf_b, "frame N+1 estimate (image-based motion)");
    alf->add_option("--scene", alf_scene, "scene file (model motion and/or estimates)");
    alf->add_option("--frame", alf_frame, "frame number");
    alf->add_option("--width", alf_w);
    alf->add_option("--height", alf_h);
    alf->add_option("-o,--out", alf_out, "tolerance map PFM, values in [1,250]")
        ->required();
    alf->add_option("--saliency-out", alf_sal_out, "also write the saliency map");
    alf->add_option("--vis", alf_vis, "8-bit visualization (values / 250)");
    alf->callback([&] {
        const PipelineConfig cfg = alf_c.resolve();
        if (!alf_b.empty() && alf_a.empty())
            throw CLI::ValidationError("aleph", "--frame-b needs --frame-a");
        ImageBuffer frame;
        std::string estimate_src;
        if (!alf_a.empty()) {
            frame = load_frame(alf_a);
            estimate_src = alf_a;
        } else if (!alf_scene.empty()) {
            frame = trace_direct(load_scene(alf_scene), alf_frame, alf_w, alf_h,
                                 cfg.direct_spp, cfg.seed);
            estimate_src = "traced";
        } else {
            throw CLI::ValidationError("aleph", "need --frame-a or --scene");
        }
        const VelocityField v = velocity_from_inputs(
            cfg, alf_scene, alf_frame, alf_a, alf_b, frame.width, frame.height);
        const PipelineResult pr = compute_aleph_pipeline(frame, v, cfg);
        save_pfm(pr.aleph.value, alf_out);
        if (!alf_sal_out.empty()) {
            if (pr.saliency.empty())
                throw std::runtime_error("no saliency map in mode " + cfg.mode);
            save_pfm(pr.saliency.s, alf_sal_out);
        }
        if (!alf_vis.empty()) {
            ImageBuffer vis = pr.aleph.value;
            for (float& x : vis.data) x /= 250.0f;
            save_ppm(vis, alf_vis);
        }
        write_metadata(alf_out, cfg,
                       {{"command", "aleph"},
                        {"estimate", estimate_src},
                        {"frame", std::to_string(alf_frame)}});
    });

    // ---- oracle ----
    auto* ora = app.add_subcommand("oracle", "perceptual threshold map");
    CommonOpts ora_c;
    ora_c.attach(ora);
    std::string ora_aleph, ora_lum, ora_out, ora_alpha_out, ora_alpha_mode = "compress";
    ora->add_option("--aleph", ora_aleph, "tolerance map PFM")->required();
    ora->add_option("--luminance", ora_lum, "frame or luminance plane (cd/m^2)")
        ->required();
    ora->add_option("-o,--out", ora_out, "threshold map PFM (cd/m^2)")->required();
    ora->add_option("--alpha-out", ora_alpha_out, "also write the accuracy map");
    ora->add_option("--alpha-mode", ora_alpha_mode, "compress | scale-add")
        ->check(CLI::IsMember({"compress", "scale-add"}));
    ora->callback([&] {
        const PipelineConfig cfg = ora_c.resolve();
        AlephMap am;
        am.value = load_frame(ora_aleph);
        const ImageBuffer lum = as_abs_luminance(load_frame(ora_lum), cfg.geom);
        const ImageBuffer adapt = adaptation_luminance(lum, cfg.geom);
        const ThresholdMap t = threshold_map(am, adapt);
        save_pfm(t.delta_l, ora_out);
        if (!ora_alpha_out.empty()) {
            ImageBuffer alpha(am.value.width, am.value.height, 1, ColorSpace::Scalar);
            for (size_t i = 0; i < alpha.data.size(); ++i)
                alpha.data[i] = float(
                    ora_alpha_mode == "compress"
                        ? compress_accuracy(am.value.data[i], cfg.alpha_acc)
                        : scale_add_accuracy(am.value.data[i], cfg.alpha_acc, cfg.k));
            save_pfm(alpha, ora_alpha_out);
        }
        write_metadata(ora_out, cfg,
                       {{"command", "oracle"}, {"alpha_mode", ora_alpha_mode}});
    });

    // ---- render ----
    auto* ren = app.add_subcommand("render", "adaptive global-illumination render");
    CommonOpts ren_c;
    ren_c.attach(ren);
    std::string ren_scene, ren_out, ren_mode = "uniform", ren_aleph, ren_thresh,
                ren_stats;
    int ren_frame = 0, ren_w = 128, ren_h = 128;
    ren->add_option("--scene", ren_scene, "scene file")->required();
    ren->add_option("--frame", ren_frame, "frame number");
    ren->add_option("--width", ren_w);
    ren->add_option("--height", ren_h);
    ren->add_option("--mode", ren_mode, "uniform | aleph-alpha | avt | asp")
        ->check(CLI::IsMember({"uniform", "aleph-alpha", "avt", "asp"}));
    ren->add_option("--aleph", ren_aleph, "tolerance map (aleph-alpha, asp)");
    ren->add_option("--threshold", ren_thresh, "threshold map (avt)");
    ren->add_option("-o,--out", ren_out, "output image (.pfm or .ppm)")->required();
    ren->add_option("--stats", ren_stats, "write sampling statistics (key=value)");
    ren->callback([&] {
        const PipelineConfig cfg = ren_c.resolve();
        const Scene sc = load_scene(ren_scene);
        RenderMode mode = RenderMode::Uniform;
        if (ren_mode == "aleph-alpha") mode = RenderMode::AlephAlpha;
        else if (ren_mode == "avt") mode = RenderMode::Avt;
        else if (ren_mode == "asp") mode = RenderMode::Asp;

        AlephMap am;
        ThresholdMap tm;
        RenderInputs inputs;
        if (!ren_aleph.empty()) {
            am.value = load_frame(ren_aleph);
            inputs.aleph = &am;
        }
        if (!ren_thresh.empty()) {
            tm.delta_l = load_frame(ren_thresh);
            inputs.threshold = &tm;
        }
        RenderParams params;
        params.width = ren_w;
        params.height = ren_h;
        params.max_spp = (mode == RenderMode::Avt || mode == RenderMode::Asp)
                             ? cfg.max_samples
                             : cfg.direct_spp;
        params.floor_spp = cfg.floor_samples;
        params.hemi_samples = cfg.hemi_samples;
        params.alpha_acc = cfg.alpha_acc;
        params.seed = cfg.seed;
        auto [img, stats] = render(sc, ren_frame, mode, inputs, params);
        save_frame(img, ren_out);
        if (!ren_stats.empty()) write_stats(ren_stats, stats);
        write_metadata(ren_out, cfg,
                       {{"command", "render"},
                        {"render_mode", ren_mode},
                        {"frame", std::to_string(ren_frame)},
                        {"cache_created", std::to_string(stats.cache_created)},
                        {"direct_samples", std::to_string(stats.direct_samples)}});
    });

    // ---- noisemap ----
    auto* noi = app.add_subcommand("noisemap", "threshold-bounded noise injection");
    CommonOpts noi_c;
    noi_c.attach(noi);
    std::string noi_ref, noi_thresh, noi_out;
    noi->add_option("--reference", noi_ref, "reference frame or luminance plane")
        ->required();
    noi->add_option("--threshold", noi_thresh, "threshold map PFM")->required();
    noi->add_option("-o,--out", noi_out, "perturbed luminance PFM")->required();
    noi->callback([&] {
        const PipelineConfig cfg = noi_c.resolve();
        const ImageBuffer ref = as_abs_luminance(load_frame(noi_ref), cfg.geom);
        ThresholdMap t;
        t.delta_l = load_frame(noi_thresh);
        const ImageBuffer noisy = noise_inject(ref, t, cfg.seed);
        save_pfm(noisy, noi_out);
        write_metadata(noi_out, cfg, {{"command", "noisemap"}});
    });

    // ---- compare ----
    auto* cmp = app.add_subcommand("compare", "byte and perceptual diff");
    CommonOpts cmp_c;
    cmp_c.attach(cmp);
    std::string cmp_a, cmp_b, cmp_thresh, cmp_out;
    cmp->add_option("--a", cmp_a, "first image")->required();
    cmp->add_option("--b", cmp_b, "second image")->required();
    cmp->add_option("--threshold", cmp_thresh, "threshold map PFM");
    cmp->add_option("-o,--out", cmp_out, "per-pixel |diff|/threshold PFM");
    cmp->callback([&] {
        const PipelineConfig cfg = cmp_c.resolve();
        auto slurp = [](const std::string& p) {
            std::ifstream in(p, std::ios::binary);
            if (!in) throw std::runtime_error(p + ": cannot open");
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        };
        const bool identical = slurp(cmp_a) == slurp(cmp_b);
        std::cout << "bytes_identical=" << (identical ? "true" : "false") << "\n";
        if (cmp_thresh.empty()) return;

        const ImageBuffer a = as_abs_luminance(load_frame(cmp_a), cfg.geom);
        const ImageBuffer b = as_abs_luminance(load_frame(cmp_b), cfg.geom);
        ThresholdMap t;
        t.delta_l = load_frame(cmp_thresh);
        if (!a.same_shape(b) || !a.same_shape(t.delta_l))
            throw std::runtime_error("compare: image sizes differ");
        ImageBuffer ratio(a.width, a.height, 1, ColorSpace::Scalar);
        double max_ratio = 0;
        long within = 0;
        for (size_t i = 0; i < ratio.data.size(); ++i) {
            const double dl = t.delta_l.data[i];
            const double d = std::abs(double(a.data[i]) - double(b.data[i]));
            const double r = dl > 0 ? d / dl : (d > 0 ? 1e30 : 0.0);
            ratio.data[i] = float(r);
            max_ratio = std::max(max_ratio, r);
            if (d < dl) ++within;
        }
        std::printf("max_ratio=%.6g\nwithin_threshold=%.4f\n", max_ratio,
                    double(within) / double(ratio.data.size()));
        if (!cmp_out.empty()) save_pfm(ratio, cmp_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;  // usage
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;  // data / runtime
    }
    return 0;
}
