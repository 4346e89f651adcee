#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "aleph/image.hpp"

namespace aleph {

// 8-bit census signature per pixel over the 3x3 neighborhood, bit order
// TL,T,TR,L,R,BL,B,BR from most to least significant; a bit is set when the
// neighbor is >= the center. Borders clamp to the edge pixel.
struct CensusMap {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    uint8_t at(int x, int y) const { return bits[size_t(y) * width + x]; }
};

CensusMap census_transform(const ImageBuffer& scalar);

int hamming_distance(uint8_t a, uint8_t b);
// Bit-string form; the strings must have equal length.
int hamming_distance(std::string_view a, std::string_view b);

struct DisplacementField {
    int width = 0;
    int height = 0;
    std::vector<float> dx, dy;
    std::vector<uint8_t> valid;

    size_t size() const { return dx.size(); }
};

// Hierarchical census block matching between two frames of equal size:
// exhaustive +-8 search on pyramid level 2, then a 4/2/1 three-step
// refinement at levels 1 and 0. Costs aggregate Hamming distance over a 3x3
// block; ties prefer the smaller displacement magnitude, then lexicographic
// (dx,dy). Displacement components never exceed 53 px.
DisplacementField match_image_motion(const ImageBuffer& frame_n,
                                     const ImageBuffer& frame_n1);

struct VelocityField {
    int width = 0;
    int height = 0;
    std::vector<float> vx, vy;  // deg/s

    ImageBuffer magnitude() const;
};

VelocityField displacement_to_velocity(const DisplacementField& d,
                                       const DisplayGeometry& geom);

}  // namespace aleph
