#include "aleph/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace aleph {

double tvi_threshold(double la) {
    // Segment formulas from the 1997 operator; the two inner joints sit at
    // the curves' crossing/closest-approach abscissas so the fit is
    // continuous to better than 1e-3 in log10 space.
    double logl;
    if (la <= 0) {
        logl = -5.0;  // below the scotopic floor
    } else {
        logl = std::log10(la);
    }
    double logt;
    if (logl < -3.94)
        logt = -2.86;
    else if (logl < -1.2066)
        logt = std::pow(0.405 * logl + 1.6, 2.18) - 2.86;
    else if (logl < -0.0184)
        logt = logl - 0.395;
    else if (logl < 1.9176)
        logt = std::pow(0.249 * logl + 0.65, 2.7) - 0.72;
    else
        logt = logl - 1.255;
    return std::pow(10.0, logt);
}

double compress_accuracy(double aleph_v, double alpha_acc) {
    if (alpha_acc <= 0 || alpha_acc > 1)
        throw std::invalid_argument("compress_accuracy: alpha_acc must be in (0,1]");
    if (aleph_v < 1) aleph_v = 1;
    return aleph_v / (aleph_v - 1.0 + 1.0 / alpha_acc);
}

double scale_add_accuracy(double aleph_v, double alpha_acc, double k) {
    if (k <= 0) throw std::invalid_argument("scale_add_accuracy: k must be > 0");
    return alpha_acc + aleph_v / k;
}

ImageBuffer adaptation_luminance(const ImageBuffer& abs_luminance,
                                 const DisplayGeometry& geom) {
    if (abs_luminance.planes != 1)
        throw std::invalid_argument("adaptation_luminance: expects a single plane");
    const int w = abs_luminance.width, h = abs_luminance.height;
    const int diameter = std::max(1, int(std::lround(geom.pixels_per_degree)));
    const int r = diameter / 2;
    const double r2 = 0.25 * double(diameter) * double(diameter);

    // Row extents of the disk, then row-range sums via prefix sums.
    std::vector<int> half(2 * r + 1, 0);
    for (int dy = -r; dy <= r; ++dy) {
        int hw = -1;
        for (int dx = 0; dx <= r; ++dx)
            if (dx * dx + dy * dy <= r2) hw = dx;
        half[dy + r] = hw;
    }

    std::vector<double> prefix(size_t(w + 1) * h);
    for (int y = 0; y < h; ++y) {
        double acc = 0;
        prefix[size_t(y) * (w + 1)] = 0;
        for (int x = 0; x < w; ++x) {
            acc += abs_luminance.at(0, x, y);
            prefix[size_t(y) * (w + 1) + x + 1] = acc;
        }
    }

    ImageBuffer out(w, h, 1, ColorSpace::Scalar);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double sum = 0;
            long count = 0;
            for (int dy = -r; dy <= r; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                const int hw = half[dy + r];
                if (hw < 0) continue;
                const int x0 = std::max(0, x - hw);
                const int x1 = std::min(w - 1, x + hw);
                if (x1 < x0) continue;
                sum += prefix[size_t(yy) * (w + 1) + x1 + 1] -
                       prefix[size_t(yy) * (w + 1) + x0];
                count += x1 - x0 + 1;
            }
            out.at(0, x, y) = float(sum / double(count));
        }
    return out;
}

ThresholdMap threshold_map(const AlephMap& aleph_map, const ImageBuffer& adapt_lum) {
    if (!aleph_map.value.same_shape(adapt_lum))
        throw std::invalid_argument("threshold_map: plane size mismatch");
    ThresholdMap t;
    t.delta_l = ImageBuffer::scalar(adapt_lum.width, adapt_lum.height);
    for (size_t i = 0; i < t.delta_l.data.size(); ++i)
        t.delta_l.data[i] =
            float(double(aleph_map.value.data[i]) * tvi_threshold(adapt_lum.data[i]));
    return t;
}

ImageBuffer convergence_test(const ImageBuffer& a, const ImageBuffer& b,
                             const ThresholdMap& t) {
    if (!a.same_shape(b) || !a.same_shape(t.delta_l))
        throw std::invalid_argument("convergence_test: plane size mismatch");
    ImageBuffer out(a.width, a.height, 1, ColorSpace::Scalar);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::abs(a.data[i] - b.data[i]) < t.delta_l.data[i] ? 1.0f : 0.0f;
    return out;
}

double SampleAccumulator::variance() const {
    if (n < 2) return 0;
    const double v = (sum_sq - sum * sum / double(n)) / double(n);
    return std::max(v, 0.0);
}

bool variance_test(const SampleAccumulator& acc, double delta_l) {
    if (acc.n < 2) throw std::invalid_argument("variance_test: needs at least 2 samples");
    return std::sqrt(acc.variance()) < delta_l;
}

int asp_budget(int max_samples, double aleph_v, int floor_samples) {
    if (max_samples < 1 || floor_samples < 1)
        throw std::invalid_argument("asp_budget: sample counts must be >= 1");
    if (aleph_v < 1) aleph_v = 1;
    const long scaled = std::lround(double(max_samples) / aleph_v);
    return int(std::max<long>(scaled, floor_samples));
}

ImageBuffer noise_inject(const ImageBuffer& reference, const ThresholdMap& t,
                         uint32_t seed) {
    if (!reference.same_shape(t.delta_l))
        throw std::invalid_argument("noise_inject: plane size mismatch");
    ImageBuffer out = reference;
    std::mt19937 rng(seed);
    for (size_t i = 0; i < out.data.size(); ++i) {
        // 24-bit mantissa draw keeps the stream identical across platforms.
        const float u = float(rng() >> 8) * (1.0f / 16777216.0f);
        const float ref = reference.data[i];
        const float dl = t.delta_l.data[i];
        float v = ref + dl * u;
        while (std::abs(v - ref) >= dl && v != ref)
            v = std::nextafter(v, ref);
        out.data[i] = v;
    }
    return out;
}

}  // namespace aleph
