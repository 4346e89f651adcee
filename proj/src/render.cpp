#include "aleph/render.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace aleph {

namespace {

uint32_t mix_seed(uint32_t seed, uint32_t a, uint32_t b, uint32_t stream) {
    uint64_t z = (uint64_t(seed) << 32) ^ (uint64_t(a) << 20) ^ (uint64_t(b) << 4) ^ stream;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return uint32_t(z ^ (z >> 31));
}

double uniform01(std::mt19937& rng) {
    return double(rng() >> 8) * (1.0 / 16777216.0);
}

struct LightList {
    struct Entry {
        int prim;
        double area;
        double cdf;
    };
    std::vector<Entry> entries;
    double total_area = 0;
};

LightList collect_lights(const Scene& scene, const FrameScene& fs) {
    LightList ll;
    for (int i = 0; i < int(scene.prims.size()); ++i) {
        const Material& m = scene.materials[scene.prims[i].material];
        if (!m.emissive()) continue;
        double area;
        if (scene.prims[i].kind == Primitive::Kind::Tri) {
            const auto& w = fs.world[i];
            area = 0.5 * (w.v1 - w.v0).cross(w.v2 - w.v0).length();
        } else {
            area = 4.0 * M_PI * fs.world[i].radius * fs.world[i].radius;
        }
        ll.total_area += area;
        ll.entries.push_back({i, area, ll.total_area});
    }
    return ll;
}

struct LightSample {
    int prim;
    Vec3 pos, normal;
};

LightSample sample_light(const LightList& ll, const FrameScene& fs, std::mt19937& rng) {
    const double pick = uniform01(rng) * ll.total_area;
    size_t idx = 0;
    while (idx + 1 < ll.entries.size() && ll.entries[idx].cdf <= pick) ++idx;
    const auto& e = ll.entries[idx];
    const auto& w = fs.world[e.prim];
    LightSample s;
    s.prim = e.prim;
    if (fs.scene->prims[e.prim].kind == Primitive::Kind::Tri) {
        double u = uniform01(rng), v = uniform01(rng);
        if (u + v > 1) {
            u = 1 - u;
            v = 1 - v;
        }
        s.pos = w.v0 + (w.v1 - w.v0) * u + (w.v2 - w.v0) * v;
        s.normal = (w.v1 - w.v0).cross(w.v2 - w.v0).normalized();
    } else {
        const double z = 1.0 - 2.0 * uniform01(rng);
        const double phi = 2.0 * M_PI * uniform01(rng);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 d{r * std::cos(phi), r * std::sin(phi), z};
        s.pos = w.center + d * w.radius;
        s.normal = d;
    }
    return s;
}

void tangent_basis(const Vec3& n, Vec3& t, Vec3& b) {
    const Vec3 a = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    t = n.cross(a).normalized();
    b = n.cross(t);
}

struct Tracer {
    const Scene& scene;
    const FrameScene& fs;
    LightList lights;
    double shadow_eps;
    double far_distance;
    double r_min, r_max;

    Tracer(const Scene& sc, const FrameScene& f) : scene(sc), fs(f) {
        lights = collect_lights(sc, f);
        Vec3 c;
        double r;
        sc.bounding_sphere(f.frame, c, r);
        shadow_eps = 1e-5 * r;
        far_distance = 100.0 * r;
        r_min = 0.05 * r;
        r_max = r;
    }

    const Material& material(int prim) const {
        return scene.materials[scene.prims[prim].material];
    }

    // One area-sampled direct-light sample of outgoing radiance at the hit.
    Vec3 direct_sample(const Hit& hit, const Vec3& wo, std::mt19937& rng,
                       bool with_gloss) const {
        if (lights.entries.empty() || lights.total_area <= 0) return {};
        const LightSample ls = sample_light(lights, fs, rng);
        if (ls.prim == hit.prim) return {};
        Vec3 to_l = ls.pos - hit.pos;
        const double d2 = to_l.dot(to_l);
        if (d2 <= 0) return {};
        const double d = std::sqrt(d2);
        const Vec3 wi = to_l * (1.0 / d);
        const double cos_p = hit.normal.dot(wi);
        const double cos_q = std::abs(ls.normal.dot(wi));  // two-sided emitters
        if (cos_p <= 0 || cos_q <= 0) return {};
        if (occluded(fs, {hit.pos + wi * shadow_eps, wi}, d - 2 * shadow_eps, hit.prim,
                     ls.prim))
            return {};
        const Material& m = material(hit.prim);
        Vec3 f = m.diffuse * (1.0 / M_PI);
        if (with_gloss && m.has_gloss()) {
            const Vec3 refl =
                (hit.normal * (2.0 * hit.normal.dot(wo)) - wo).normalized();
            const double c = std::max(0.0, refl.dot(wi));
            if (c > 0)
                f += m.glossy *
                     ((m.gloss_exp + 2.0) / (2.0 * M_PI) * std::pow(c, m.gloss_exp));
        }
        const Material& lm = material(ls.prim);
        const double geom = cos_p * cos_q / d2 * lights.total_area;
        return f * lm.emission * geom;
    }

    // Radiance seen along a secondary ray: direct lighting at whatever it
    // hits (one light sample); emission only when asked (gathers that feed
    // the irradiance estimate count emitters, reflection lobes do not since
    // area sampling already covered them).
    Vec3 secondary_radiance(const Ray& ray, std::mt19937& rng, bool count_emission,
                            double* dist) const {
        const auto hit = intersect(fs, ray, shadow_eps);
        if (!hit) {
            if (dist) *dist = far_distance;
            return {};
        }
        if (dist) *dist = hit->t;
        const Material& m = material(hit->prim);
        Vec3 l;
        if (count_emission) l += m.emission;
        if (m.diffuse.max_component() > 0)
            l += direct_sample(*hit, ray.dir * -1.0, rng, false);
        return l;
    }

    IrradianceSample gather(const Vec3& p, const Vec3& n, int n_samples,
                            std::mt19937& rng, bool count_emission,
                            RenderStats* stats) const {
        Vec3 t, b;
        tangent_basis(n, t, b);
        Vec3 acc;
        double inv_d_sum = 0;
        for (int k = 0; k < n_samples; ++k) {
            const double u1 = uniform01(rng), u2 = uniform01(rng);
            const double r = std::sqrt(u1), phi = 2.0 * M_PI * u2;
            const double z = std::sqrt(std::max(0.0, 1.0 - u1));
            const Vec3 dir = t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * z;
            double dist = far_distance;
            acc += secondary_radiance({p + n * shadow_eps, dir}, rng, count_emission,
                                      &dist);
            inv_d_sum += 1.0 / std::max(dist, 1e-9);
            if (stats) ++stats->hemi_rays;
        }
        IrradianceSample s;
        s.e = acc * (M_PI / double(n_samples));
        s.r_harmonic = double(n_samples) / inv_d_sum;
        return s;
    }

    // Glossy reflection of indirect surroundings via lobe sampling.
    Vec3 glossy_indirect(const Hit& hit, const Vec3& wo, int n_samples,
                         std::mt19937& rng) const {
        const Material& m = material(hit.prim);
        if (!m.has_gloss() || n_samples < 1) return {};
        const Vec3 refl = (hit.normal * (2.0 * hit.normal.dot(wo)) - wo).normalized();
        Vec3 t, b;
        tangent_basis(refl, t, b);
        Vec3 acc;
        for (int k = 0; k < n_samples; ++k) {
            const double u1 = uniform01(rng), u2 = uniform01(rng);
            const double ct = std::pow(u1, 1.0 / (m.gloss_exp + 1.0));
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double phi = 2.0 * M_PI * u2;
            const Vec3 dir =
                t * (st * std::cos(phi)) + b * (st * std::sin(phi)) + refl * ct;
            const double cos_n = hit.normal.dot(dir);
            if (cos_n <= 0) continue;
            const Vec3 l = secondary_radiance({hit.pos + hit.normal * shadow_eps, dir},
                                              rng, false, nullptr);
            // f/pdf = ks (exp+2)/(exp+1) cos_n for the normalized lobe.
            acc += l * ((m.gloss_exp + 2.0) / (m.gloss_exp + 1.0) * cos_n);
        }
        return m.glossy * acc * (1.0 / double(n_samples));
    }
};

double luminance(const Vec3& c) {
    return 0.2126 * c.x + 0.7152 * c.y + 0.0722 * c.z;
}

}  // namespace

std::optional<Vec3> irradiance_lookup(const IrradianceCache& cache, const Vec3& p,
                                      const Vec3& n, double alpha_local) {
    if (alpha_local <= 0) throw std::invalid_argument("irradiance_lookup: alpha <= 0");
    Vec3 acc;
    double wsum = 0;
    const double w_min = 1.0 / alpha_local;
    for (const auto& rec : cache.records) {
        const double d = (p - rec.pos).length();
        const double angular = std::sqrt(std::max(0.0, 1.0 - n.dot(rec.normal)));
        const double denom = d / rec.r + angular;
        if (denom <= 0) return rec.e;  // exact revisit
        const double w = 1.0 / denom;
        if (w > w_min) {
            acc += rec.e * w;
            wsum += w;
        }
    }
    if (wsum <= 0) return std::nullopt;
    return acc * (1.0 / wsum);
}

IrradianceSample irradiance_sample(const Scene& scene, int frame, const Vec3& p,
                                   const Vec3& n, int n_samples, uint32_t seed,
                                   bool count_emission) {
    if (n_samples < 8)
        throw std::invalid_argument("irradiance_sample: n_samples must be >= 8");
    const FrameScene fs = prepare_frame(scene, frame);
    const Tracer tr(scene, fs);
    std::mt19937 rng(mix_seed(seed, 0, 0, 2));
    IrradianceSample s = tr.gather(p, n, n_samples, rng, count_emission, nullptr);
    s.r_harmonic = std::clamp(s.r_harmonic, tr.r_min, tr.r_max);
    return s;
}

ImageBuffer trace_direct(const Scene& scene, int frame, int width, int height,
                         int spp, uint32_t seed) {
    if (spp < 1) throw std::invalid_argument("trace_direct: spp must be >= 1");
    const FrameScene fs = prepare_frame(scene, frame);
    const Tracer tr(scene, fs);
    const Camera& cam = scene.camera_at(frame);
    ImageBuffer img = ImageBuffer::rgb(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::mt19937 rng(mix_seed(seed, x, y, 0));
            const Ray ray = camera_ray(cam, width, height, x, y);
            Vec3 c;
            if (const auto hit = intersect(fs, ray)) {
                const Material& m = tr.material(hit->prim);
                c = m.emission;
                if (m.diffuse.max_component() > 0 || m.has_gloss()) {
                    Vec3 acc;
                    for (int s = 0; s < spp; ++s)
                        acc += tr.direct_sample(*hit, ray.dir * -1.0, rng, true);
                    c += acc * (1.0 / double(spp));
                }
            }
            img.at(0, x, y) = float(c.x);
            img.at(1, x, y) = float(c.y);
            img.at(2, x, y) = float(c.z);
        }
    return img;
}

std::pair<ImageBuffer, RenderStats> render(const Scene& scene, int frame,
                                           RenderMode mode, const RenderInputs& in,
                                           const RenderParams& params) {
    const int w = params.width, h = params.height;
    if (params.max_spp < 1 || params.floor_spp < 1 || params.hemi_samples < 1)
        throw std::invalid_argument("render: sample counts must be >= 1");
    if ((mode == RenderMode::AlephAlpha || mode == RenderMode::Asp) &&
        (!in.aleph || in.aleph->value.width != w || in.aleph->value.height != h))
        throw std::invalid_argument("render: mode needs a matching tolerance map");
    if (mode == RenderMode::Avt &&
        (!in.threshold || in.threshold->delta_l.width != w ||
         in.threshold->delta_l.height != h))
        throw std::invalid_argument("render: avt needs a matching threshold map");

    const FrameScene fs = prepare_frame(scene, frame);
    const Tracer tr(scene, fs);
    const Camera& cam = scene.camera_at(frame);
    IrradianceCache cache;
    RenderStats stats;
    ImageBuffer img = ImageBuffer::rgb(w, h);

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t pix = size_t(y) * w + x;
            std::mt19937 rng(mix_seed(params.seed, x, y, 1));
            const Ray ray = camera_ray(cam, w, h, x, y);
            ++stats.primary_rays;
            const auto hit = intersect(fs, ray);
            Vec3 c;
            if (hit) {
                const Material& m = tr.material(hit->prim);
                c = m.emission;
                const Vec3 wo = ray.dir * -1.0;

                if (m.diffuse.max_component() > 0 || m.has_gloss()) {
                    int budget = params.max_spp;
                    if (mode == RenderMode::Asp)
                        budget = asp_budget(params.max_spp, in.aleph->value.data[pix],
                                            params.floor_spp);
                    Vec3 acc;
                    SampleAccumulator lum_acc;
                    int taken = 0;
                    const double dl =
                        mode == RenderMode::Avt ? in.threshold->delta_l.data[pix] : 0;
                    for (int s = 0; s < budget; ++s) {
                        const Vec3 one = tr.direct_sample(*hit, wo, rng, true);
                        acc += one;
                        ++taken;
                        ++stats.direct_samples;
                        if (mode == RenderMode::Avt) {
                            lum_acc.add(luminance(one));
                            if (lum_acc.n >= 2 && variance_test(lum_acc, dl)) break;
                        }
                    }
                    c += acc * (1.0 / double(taken));

                    if (m.diffuse.max_component() > 0) {
                        const double alpha =
                            mode == RenderMode::AlephAlpha
                                ? compress_accuracy(in.aleph->value.data[pix],
                                                    params.alpha_acc)
                                : params.alpha_acc;
                        ++stats.cache_lookups;
                        Vec3 e;
                        if (const auto reuse =
                                irradiance_lookup(cache, hit->pos, hit->normal, alpha)) {
                            e = *reuse;
                            ++stats.cache_interpolated;
                        } else {
                            std::mt19937 grng(mix_seed(params.seed, x, y, 2));
                            const IrradianceSample samp =
                                tr.gather(hit->pos, hit->normal, params.hemi_samples,
                                          grng, false, &stats);
                            e = samp.e;
                            IrradianceRecord rec;
                            rec.pos = hit->pos;
                            rec.normal = hit->normal;
                            rec.e = samp.e;
                            rec.r = std::clamp(samp.r_harmonic, tr.r_min, tr.r_max);
                            cache.records.push_back(rec);
                            ++stats.cache_created;
                        }
                        c += m.diffuse * e * (1.0 / M_PI);
                    }
                    if (m.has_gloss()) {
                        std::mt19937 srng(mix_seed(params.seed, x, y, 3));
                        c += tr.glossy_indirect(*hit, wo, taken, srng);
                    }
                }
            }
            img.at(0, x, y) = float(c.x);
            img.at(1, x, y) = float(c.y);
            img.at(2, x, y) = float(c.z);
        }
    return {std::move(img), stats};
}

}  // namespace aleph
