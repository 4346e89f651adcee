#include "aleph/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aleph {

namespace {

ImageBuffer blur5(const ImageBuffer& in) {
    const int w = in.width, h = in.height;
    ImageBuffer tmp(w, h, 1, in.space);
    ImageBuffer out(w, h, 1, in.space);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int t = -2; t <= 2; ++t)
                acc += kPyramidFilter[t + 2] * in.at_clamped(0, x + t, y);
            tmp.at(0, x, y) = float(acc);
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int t = -2; t <= 2; ++t)
                acc += kPyramidFilter[t + 2] * tmp.at_clamped(0, x, y + t);
            out.at(0, x, y) = float(acc);
        }
    return out;
}

ImageBuffer decimate2(const ImageBuffer& in) {
    const int w = (in.width + 1) / 2, h = (in.height + 1) / 2;
    ImageBuffer out(w, h, 1, in.space);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(0, x, y) = in.at(0, 2 * x, 2 * y);
    return out;
}

// Number of ceil-halvings from the full size down to this level's size. The
// +1 from ceiling division matters for tiny levels, so replay the halvings
// instead of rounding a log ratio.
int level_shift(int full, int lvl) {
    int w = full, k = 0;
    while (w > lvl && k < 30) {
        w = (w + 1) / 2;
        ++k;
    }
    if (w != lvl)
        throw std::invalid_argument("upsample_to: level size does not divide from full");
    return k;
}

}  // namespace

Pyramid gaussian_pyramid(const ImageBuffer& scalar, int depth) {
    if (scalar.planes != 1)
        throw std::invalid_argument("gaussian_pyramid: expects a single plane");
    if (depth < 1) throw std::invalid_argument("gaussian_pyramid: depth < 1");
    if (std::min(scalar.width, scalar.height) < (1 << (depth - 1)))
        throw std::invalid_argument("gaussian_pyramid: image too small for depth");
    Pyramid p;
    p.kind = PyramidKind::Gaussian;
    p.base_width = scalar.width;
    p.base_height = scalar.height;
    p.levels.reserve(depth);
    p.levels.push_back(scalar);
    for (int i = 1; i < depth; ++i)
        p.levels.push_back(decimate2(blur5(p.levels.back())));
    return p;
}

ImageBuffer upsample_to(const ImageBuffer& level, int full_w, int full_h) {
    if (level.width == full_w && level.height == full_h) return level;
    const int kx = level_shift(full_w, level.width);
    const int ky = level_shift(full_h, level.height);
    const double sx = 1.0 / double(1 << kx);
    const double sy = 1.0 / double(1 << ky);
    ImageBuffer out(full_w, full_h, 1, level.space);
    for (int y = 0; y < full_h; ++y) {
        const double fy = std::min(y * sy, double(level.height - 1));
        const int y0 = int(fy);
        const int y1 = std::min(y0 + 1, level.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < full_w; ++x) {
            const double fx = std::min(x * sx, double(level.width - 1));
            const int x0 = int(fx);
            const int x1 = std::min(x0 + 1, level.width - 1);
            const double wx = fx - x0;
            const double v =
                (1 - wy) * ((1 - wx) * level.at(0, x0, y0) + wx * level.at(0, x1, y0)) +
                wy * ((1 - wx) * level.at(0, x0, y1) + wx * level.at(0, x1, y1));
            out.at(0, x, y) = float(v);
        }
    }
    return out;
}

Pyramid laplacian_bands(const Pyramid& gauss) {
    if (gauss.kind != PyramidKind::Gaussian)
        throw std::invalid_argument("laplacian_bands: expects a Gaussian pyramid");
    if (gauss.depth() < 8)
        throw std::invalid_argument("laplacian_bands: needs at least 8 levels");
    const int w = gauss.base_width, h = gauss.base_height;
    Pyramid out;
    out.kind = PyramidKind::Laplacian;
    out.base_width = w;
    out.base_height = h;
    ImageBuffer up_prev = upsample_to(gauss.levels[0], w, h);
    for (int i = 0; i < 7; ++i) {
        ImageBuffer up_next = upsample_to(gauss.levels[i + 1], w, h);
        ImageBuffer band(w, h, 1, ColorSpace::Scalar);
        for (size_t j = 0; j < band.data.size(); ++j)
            band.data[j] = std::abs(up_prev.data[j] - up_next.data[j]);
        out.levels.push_back(std::move(band));
        up_prev = std::move(up_next);
    }
    return out;
}

BandWeights band_weights(const Pyramid& laplacian) {
    if (laplacian.kind != PyramidKind::Laplacian || laplacian.depth() != 7)
        throw std::invalid_argument("band_weights: expects 7 Laplacian bands");
    const int w = laplacian.base_width, h = laplacian.base_height;
    BandWeights bw;
    bw.width = w;
    bw.height = h;
    for (auto& plane : bw.r) plane = ImageBuffer::scalar(w, h);

    const size_t n = size_t(w) * h;
    std::vector<double> sums(n, 0.0);
    for (int i = 0; i < 7; ++i)
        for (size_t j = 0; j < n; ++j) sums[j] += laplacian.levels[i].data[j];
    double sum_max = 0.0;
    for (double s : sums) sum_max = std::max(sum_max, s);
    const double eps = 1e-6 * sum_max;

    for (size_t j = 0; j < n; ++j) {
        if (sums[j] <= eps) {
            bw.r[6].data[j] = 1.0f;
        } else {
            for (int i = 0; i < 7; ++i)
                bw.r[i].data[j] = float(laplacian.levels[i].data[j] / sums[j]);
        }
    }
    return bw;
}

}  // namespace aleph
