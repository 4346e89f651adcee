#pragma once

#include <cstdint>
#include <string>

#include "aleph/aleph.hpp"
#include "aleph/image.hpp"

namespace aleph {

// Detection threshold (cd/m^2) at adaptation luminance la (cd/m^2), from the
// piecewise log-log threshold-vs-intensity fit published with the
// visibility-matching tone reproduction operator (Ward Larson, Rushmeier,
// Piatko 1997). Nonpositive la returns the scotopic floor.
double tvi_threshold(double la);

// Accuracy compression alpha1 = aleph / (aleph - 1 + 1/alpha_acc), a value in
// [alpha_acc, 1]. Requires alpha_acc in (0, 1].
double compress_accuracy(double aleph_v, double alpha_acc);

// Scale-and-add alternative alpha2 = alpha_acc + aleph / k.
double scale_add_accuracy(double aleph_v, double alpha_acc, double k = 100.0);

// Per-pixel mean of absolute luminance over a disk one degree across
// (diameter = pixels_per_degree), intersected with the image at borders.
ImageBuffer adaptation_luminance(const ImageBuffer& abs_luminance,
                                 const DisplayGeometry& geom);

struct ThresholdMap {
    ImageBuffer delta_l;  // cd/m^2
    std::string source;   // provenance note for sidecars
};

// delta_l = aleph * tvi(adapt_lum), pixelwise.
ThresholdMap threshold_map(const AlephMap& aleph_map, const ImageBuffer& adapt_lum);

// 1 where |a - b| < delta_l (strict), else 0.
ImageBuffer convergence_test(const ImageBuffer& a, const ImageBuffer& b,
                             const ThresholdMap& t);

struct SampleAccumulator {
    long n = 0;
    double sum = 0, sum_sq = 0;

    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    // Biased (population) variance (1/N)(sum_sq - sum^2/N), clamped to >= 0.
    double variance() const;
};

// True when the luminance deviation sqrt(variance) is below delta_l.
// Requires at least two samples.
bool variance_test(const SampleAccumulator& acc, double delta_l);

// max(round(max_samples / aleph), floor_samples).
int asp_budget(int max_samples, double aleph_v, int floor_samples);

// reference + delta_l * U with U uniform in [0,1) per pixel (seeded,
// bit-reproducible). The perturbed value is nudged down where float rounding
// would otherwise let |out - reference| reach delta_l, so the result always
// passes convergence_test against its reference.
ImageBuffer noise_inject(const ImageBuffer& reference, const ThresholdMap& t,
                         uint32_t seed);

}  // namespace aleph
