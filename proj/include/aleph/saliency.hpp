#pragma once

#include <vector>

#include "aleph/image.hpp"
#include "aleph/motion.hpp"
#include "aleph/pyramid.hpp"

namespace aleph {

enum class FeatureChannel { Intensity, Color, Orientation, Motion };

struct FeatureMap {
    ImageBuffer map;  // full resolution
    int center = 0, surround = 0;
    double angle_deg = -1;  // orientation channel only
};

struct FeatureMapSet {
    FeatureChannel channel = FeatureChannel::Intensity;
    std::vector<FeatureMap> maps;
};

// Center-surround scale pairs shared by every channel.
inline constexpr int kCenterSurround[6][2] = {{2, 5}, {2, 6}, {3, 6},
                                              {3, 7}, {4, 7}, {4, 8}};

// |up(level c) - up(level s)| at full resolution for the six scale pairs.
// Needs a 9-level Gaussian pyramid.
FeatureMapSet center_surround_maps(const Pyramid& gauss, FeatureChannel tag);

// Oriented contrast at 0/45/90/135 degrees: each Gaussian level is filtered
// with a second-derivative-of-Gaussian kernel tuned to the angle (0 degrees
// responds to horizontal structure), rectified, then center-surround
// differenced. 24 maps.
FeatureMapSet orientation_maps(const Pyramid& achromatic_gauss);

// Oriented response of one plane (rectified), exposed for tuning tests.
ImageBuffer oriented_energy(const ImageBuffer& plane, double angle_deg);

// Iterative-competition normalization: rescale to [0,1] (constant planes
// become zero), then multiply by (M - mbar)^2 where M is the global max and
// mbar the mean of the remaining strict local maxima.
ImageBuffer lateral_inhibition(const ImageBuffer& plane);

// Sum of normalized maps in the set.
ImageBuffer conspicuity_combine(const FeatureMapSet& set);

struct SaliencyMap {
    ImageBuffer s;  // [0,1]

    bool empty() const { return s.empty(); }
};

struct SaliencyBreakdown {
    SaliencyMap s;
    ImageBuffer conspicuity[4];  // intensity, color, orientation, motion
    int feature_map_count = 0;
};

// Opponent frame + velocity field -> saliency in [0,1] from 48 feature maps
// (6 intensity, 12 color, 24 orientation, 6 motion).
SaliencyBreakdown compute_saliency_detail(const ImageBuffer& opponent,
                                          const VelocityField& vel);
SaliencyMap compute_saliency(const ImageBuffer& opponent, const VelocityField& vel);

}  // namespace aleph
