#include "aleph/saliency.hpp"

#include <cmath>
#include <stdexcept>

namespace aleph {

namespace {

std::vector<ImageBuffer> upsampled_levels(const Pyramid& gauss) {
    std::vector<ImageBuffer> up(gauss.depth());
    for (int i = 0; i < gauss.depth(); ++i)
        up[i] = upsample_to(gauss.levels[i], gauss.base_width, gauss.base_height);
    return up;
}

ImageBuffer abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    ImageBuffer out(a.width, a.height, 1, ColorSpace::Scalar);
    for (size_t i = 0; i < out.data.size(); ++i)
        out.data[i] = std::abs(a.data[i] - b.data[i]);
    return out;
}

ImageBuffer normalize01(const ImageBuffer& plane) {
    float lo = plane.data[0], hi = plane.data[0];
    for (float v : plane.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ImageBuffer out(plane.width, plane.height, 1, ColorSpace::Scalar);
    if (hi > lo) {
        const float s = 1.0f / (hi - lo);
        for (size_t i = 0; i < out.data.size(); ++i)
            out.data[i] = (plane.data[i] - lo) * s;
    }
    return out;
}

}  // namespace

FeatureMapSet center_surround_maps(const Pyramid& gauss, FeatureChannel tag) {
    if (gauss.depth() < 9)
        throw std::invalid_argument("center_surround_maps: needs 9 pyramid levels");
    const auto up = upsampled_levels(gauss);
    FeatureMapSet set;
    set.channel = tag;
    for (const auto& [c, s] : kCenterSurround) {
        FeatureMap fm;
        fm.center = c;
        fm.surround = s;
        fm.map = abs_diff(up[c], up[s]);
        set.maps.push_back(std::move(fm));
    }
    return set;
}

ImageBuffer oriented_energy(const ImageBuffer& plane, double angle_deg) {
    // Second derivative of a Gaussian along the direction normal to the
    // structure angle, so angle 0 fires on horizontal bars.
    constexpr int kR = 4;
    constexpr double kSigma = 1.5;
    const double th = angle_deg * M_PI / 180.0;
    const double nx = -std::sin(th), ny = std::cos(th);
    double kern[2 * kR + 1][2 * kR + 1];
    double mean = 0;
    for (int j = -kR; j <= kR; ++j)
        for (int i = -kR; i <= kR; ++i) {
            const double u = i * nx + j * ny;
            const double g = std::exp(-(i * i + j * j) / (2 * kSigma * kSigma));
            kern[j + kR][i + kR] =
                (u * u / (kSigma * kSigma * kSigma * kSigma) - 1.0 / (kSigma * kSigma)) * g;
            mean += kern[j + kR][i + kR];
        }
    mean /= double((2 * kR + 1) * (2 * kR + 1));
    for (auto& row : kern)
        for (double& v : row) v -= mean;  // exactly zero response to constants

    ImageBuffer out(plane.width, plane.height, 1, ColorSpace::Scalar);
    for (int y = 0; y < plane.height; ++y)
        for (int x = 0; x < plane.width; ++x) {
            double acc = 0;
            for (int j = -kR; j <= kR; ++j)
                for (int i = -kR; i <= kR; ++i)
                    acc += kern[j + kR][i + kR] * plane.at_clamped(0, x + i, y + j);
            out.at(0, x, y) = float(std::abs(acc));
        }
    return out;
}

FeatureMapSet orientation_maps(const Pyramid& achromatic_gauss) {
    if (achromatic_gauss.depth() < 9)
        throw std::invalid_argument("orientation_maps: needs 9 pyramid levels");
    FeatureMapSet set;
    set.channel = FeatureChannel::Orientation;
    for (double angle : {0.0, 45.0, 90.0, 135.0}) {
        Pyramid oriented;
        oriented.kind = PyramidKind::Gaussian;
        oriented.base_width = achromatic_gauss.base_width;
        oriented.base_height = achromatic_gauss.base_height;
        for (const auto& lvl : achromatic_gauss.levels)
            oriented.levels.push_back(oriented_energy(lvl, angle));
        const auto up = upsampled_levels(oriented);
        for (const auto& [c, s] : kCenterSurround) {
            FeatureMap fm;
            fm.center = c;
            fm.surround = s;
            fm.angle_deg = angle;
            fm.map = abs_diff(up[c], up[s]);
            set.maps.push_back(std::move(fm));
        }
    }
    return set;
}

ImageBuffer lateral_inhibition(const ImageBuffer& plane) {
    ImageBuffer norm = normalize01(plane);
    const int w = norm.width, h = norm.height;

    float global_max = 0;
    size_t argmax = 0;
    for (size_t i = 0; i < norm.data.size(); ++i)
        if (norm.data[i] > global_max) {
            global_max = norm.data[i];
            argmax = i;
        }
    if (global_max <= 0) return norm;  // constant input

    double peak_sum = 0;
    long peak_count = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const size_t i = size_t(y) * w + x;
            if (i == argmax) continue;
            const float v = norm.data[i];
            bool is_max = true;
            for (int j = -1; j <= 1 && is_max; ++j)
                for (int k = -1; k <= 1; ++k) {
                    if (j == 0 && k == 0) continue;
                    const int nx = x + k, ny = y + j;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    if (norm.at(0, nx, ny) >= v) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) {
                peak_sum += v;
                ++peak_count;
            }
        }
    const double mbar = peak_count > 0 ? peak_sum / peak_count : 0.0;
    const double scale = (global_max - mbar) * (global_max - mbar);
    for (float& v : norm.data) v = float(v * scale);
    return norm;
}

ImageBuffer conspicuity_combine(const FeatureMapSet& set) {
    if (set.maps.empty())
        throw std::invalid_argument("conspicuity_combine: empty feature set");
    ImageBuffer acc = lateral_inhibition(set.maps[0].map);
    for (size_t m = 1; m < set.maps.size(); ++m) {
        const ImageBuffer n = lateral_inhibition(set.maps[m].map);
        for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += n.data[i];
    }
    return acc;
}

SaliencyBreakdown compute_saliency_detail(const ImageBuffer& opponent,
                                          const VelocityField& vel) {
    if (opponent.planes != 3 || opponent.space != ColorSpace::OpponentAC1C2)
        throw std::invalid_argument("compute_saliency: expects an opponent frame");
    if (vel.width != opponent.width || vel.height != opponent.height)
        throw std::invalid_argument("compute_saliency: velocity size mismatch");

    auto plane_of = [&](int p) {
        ImageBuffer b(opponent.width, opponent.height, 1, ColorSpace::Scalar);
        std::copy(opponent.plane(p), opponent.plane(p) + b.plane_size(), b.plane(0));
        return b;
    };
    constexpr int kDepth = 9;
    const Pyramid pa = gaussian_pyramid(plane_of(0), kDepth);
    const Pyramid pc1 = gaussian_pyramid(plane_of(1), kDepth);
    const Pyramid pc2 = gaussian_pyramid(plane_of(2), kDepth);
    const Pyramid pv = gaussian_pyramid(vel.magnitude(), kDepth);

    FeatureMapSet intensity = center_surround_maps(pa, FeatureChannel::Intensity);
    FeatureMapSet color = center_surround_maps(pc1, FeatureChannel::Color);
    {
        FeatureMapSet c2 = center_surround_maps(pc2, FeatureChannel::Color);
        for (auto& m : c2.maps) color.maps.push_back(std::move(m));
    }
    FeatureMapSet orient = orientation_maps(pa);
    FeatureMapSet motion = center_surround_maps(pv, FeatureChannel::Motion);

    SaliencyBreakdown out;
    out.feature_map_count = int(intensity.maps.size() + color.maps.size() +
                                orient.maps.size() + motion.maps.size());
    out.conspicuity[0] = conspicuity_combine(intensity);
    out.conspicuity[1] = conspicuity_combine(color);
    out.conspicuity[2] = conspicuity_combine(orient);
    out.conspicuity[3] = conspicuity_combine(motion);

    ImageBuffer raw(opponent.width, opponent.height, 1, ColorSpace::Scalar);
    for (const auto& c : out.conspicuity) {
        const ImageBuffer n = lateral_inhibition(c);
        for (size_t i = 0; i < raw.data.size(); ++i) raw.data[i] += n.data[i];
    }
    out.s.s = normalize01(raw);
    return out;
}

SaliencyMap compute_saliency(const ImageBuffer& opponent, const VelocityField& vel) {
    return compute_saliency_detail(opponent, vel).s;
}

}  // namespace aleph
