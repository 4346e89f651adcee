#pragma once

#include <array>
#include <vector>

#include "aleph/image.hpp"

namespace aleph {

enum class PyramidKind { Gaussian, Laplacian };

struct Pyramid {
    PyramidKind kind = PyramidKind::Gaussian;
    std::vector<ImageBuffer> levels;  // Laplacian levels are all full resolution
    int base_width = 0;
    int base_height = 0;

    int depth() const { return int(levels.size()); }
};

inline constexpr std::array<double, 5> kPyramidFilter = {0.05, 0.25, 0.4, 0.25, 0.05};

// Band center frequencies in cycles/degree for band_weights planes 0..6,
// assuming the default 31 pixels/degree.
inline constexpr std::array<double, 7> kBandPeakCpd = {16, 8, 4, 2, 1, 0.5, 0.25};

// Level 0 is the input; each next level is the 5-tap separable blur
// (clamped edges) decimated 2x, sized by ceiling division.
Pyramid gaussian_pyramid(const ImageBuffer& scalar, int depth);

// Seven absolute-difference bands, each |up(A(i)) - up(A(i+1))| at full
// resolution. Needs at least 8 Gaussian levels.
Pyramid laplacian_bands(const Pyramid& gauss);

// Per-pixel band fractions R(0..6), summing to 1. Pixels whose band sum is
// within 1e-6 of zero (relative to the largest sum in the frame) put all
// weight on the lowest band R(6).
struct BandWeights {
    std::array<ImageBuffer, 7> r;
    int width = 0;
    int height = 0;
};

BandWeights band_weights(const Pyramid& laplacian);

// Bilinear resize of a pyramid level back to full resolution. Level pixel j
// sits at full-resolution coordinate j * 2^level.
ImageBuffer upsample_to(const ImageBuffer& level, int full_w, int full_h);

}  // namespace aleph
