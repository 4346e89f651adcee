#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace aleph {

enum class ColorSpace { LinearRGB, OpponentAC1C2, Scalar };

// Planar float image: plane p starts at data[p * width * height].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int planes = 0;
    ColorSpace space = ColorSpace::Scalar;
    std::vector<float> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int p, ColorSpace s);

    static ImageBuffer scalar(int w, int h, float fill = 0.0f);
    static ImageBuffer rgb(int w, int h);

    bool empty() const { return data.empty(); }
    size_t plane_size() const { return size_t(width) * size_t(height); }

    float& at(int plane, int x, int y) {
        return data[size_t(plane) * plane_size() + size_t(y) * width + x];
    }
    float at(int plane, int x, int y) const {
        return data[size_t(plane) * plane_size() + size_t(y) * width + x];
    }
    // Border reads clamp to the nearest edge pixel.
    float at_clamped(int plane, int x, int y) const;

    float* plane(int p) { return data.data() + size_t(p) * plane_size(); }
    const float* plane(int p) const { return data.data() + size_t(p) * plane_size(); }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && planes == o.planes;
    }
};

struct DisplayGeometry {
    double pixels_per_degree = 31.0;
    double frames_per_second = 30.0;
    double max_display_luminance = 100.0;  // cd/m^2 for a pixel value of 1
};

// Linear RGB -> opponent (A, C1, C2). A is the Rec. 709 luminance weighting,
// C1 a red-green difference, C2 a blue-yellow difference; the chromatic rows
// sum to zero so gray inputs carry no chromatic signal.
extern const std::array<std::array<double, 3>, 3> kRgbToOpponent;

ImageBuffer rgb_to_opponent(const ImageBuffer& rgb);

// Achromatic plane, relative units (pixel value 1 = display max).
ImageBuffer luminance_of(const ImageBuffer& img);
// Achromatic plane in cd/m^2.
ImageBuffer luminance_of(const ImageBuffer& img, const DisplayGeometry& geom);

ImageBuffer mirror_horizontal(const ImageBuffer& img);

}  // namespace aleph
