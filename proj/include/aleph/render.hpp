#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "aleph/aleph.hpp"
#include "aleph/image.hpp"
#include "aleph/oracle.hpp"
#include "aleph/scene.hpp"

namespace aleph {

struct IrradianceRecord {
    Vec3 pos, normal;
    Vec3 e;    // irradiance per color plane
    double r;  // validity radius (clamped harmonic mean distance)
};

struct IrradianceCache {
    std::vector<IrradianceRecord> records;
};

// Weighted reuse of cached records at (p, n): weight 1/(d/R_i + sqrt(1-N.Ni)),
// records kept when weight > 1/alpha_local. A zero denominator short-circuits
// to that record's value. Returns nullopt when no record qualifies.
std::optional<Vec3> irradiance_lookup(const IrradianceCache& cache, const Vec3& p,
                                      const Vec3& n, double alpha_local);

struct IrradianceSample {
    Vec3 e;
    double r_harmonic;
};

// Cosine-weighted hemisphere gather at (p, n): E = pi * mean radiance,
// R = harmonic mean hit distance clamped to [5%, 100%] of the scene bounding
// radius (misses count at the far distance). count_emission includes light
// sources seen by gather rays; the renderer turns it off because area
// sampling already accounts for them.
IrradianceSample irradiance_sample(const Scene& scene, int frame, const Vec3& p,
                                   const Vec3& n, int n_samples, uint32_t seed = 1,
                                   bool count_emission = true);

struct RenderStats {
    long primary_rays = 0;
    long direct_samples = 0;
    long hemi_rays = 0;
    long cache_lookups = 0;
    long cache_interpolated = 0;
    long cache_created = 0;
};

// Direct-light-only estimate of a frame; the per-frame reference image
// generator. Radiance units are treated as cd/m^2 downstream.
ImageBuffer trace_direct(const Scene& scene, int frame, int width, int height,
                         int spp, uint32_t seed = 1);

enum class RenderMode { Uniform, AlephAlpha, Avt, Asp };

struct RenderParams {
    int width = 128, height = 128;
    int max_spp = 16;       // direct samples per pixel (cap for avt)
    int floor_spp = 16;     // asp floor
    int hemi_samples = 64;  // rays per new irradiance record
    double alpha_acc = 0.1;
    uint32_t seed = 1;
};

struct RenderInputs {
    const AlephMap* aleph = nullptr;        // aleph-alpha, asp
    const ThresholdMap* threshold = nullptr;  // avt
};

// Direct area-light sampling plus irradiance-cached indirect diffuse, with
// per-pixel effort steered by the chosen mode. Deterministic for a given
// seed: single-threaded, scanline order, per-pixel generators.
std::pair<ImageBuffer, RenderStats> render(const Scene& scene, int frame,
                                           RenderMode mode, const RenderInputs& in,
                                           const RenderParams& params);

}  // namespace aleph
