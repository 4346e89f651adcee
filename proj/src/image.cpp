#include "aleph/image.hpp"

#include <algorithm>
#include <stdexcept>

namespace aleph {

ImageBuffer::ImageBuffer(int w, int h, int p, ColorSpace s)
    : width(w), height(h), planes(p), space(s) {
    if (w <= 0 || h <= 0 || (p != 1 && p != 3))
        throw std::invalid_argument("ImageBuffer: bad dimensions");
    data.assign(size_t(w) * h * p, 0.0f);
}

ImageBuffer ImageBuffer::scalar(int w, int h, float fill) {
    ImageBuffer b(w, h, 1, ColorSpace::Scalar);
    std::fill(b.data.begin(), b.data.end(), fill);
    return b;
}

ImageBuffer ImageBuffer::rgb(int w, int h) {
    return ImageBuffer(w, h, 3, ColorSpace::LinearRGB);
}

float ImageBuffer::at_clamped(int plane, int x, int y) const {
    x = std::clamp(x, 0, width - 1);
    y = std::clamp(y, 0, height - 1);
    return at(plane, x, y);
}

const std::array<std::array<double, 3>, 3> kRgbToOpponent = {{
    {0.2126, 0.7152, 0.0722},
    {1.0, -1.0, 0.0},
    {-0.5, -0.5, 1.0},
}};

ImageBuffer rgb_to_opponent(const ImageBuffer& rgb) {
    if (rgb.planes != 3 || rgb.space != ColorSpace::LinearRGB)
        throw std::invalid_argument("rgb_to_opponent: expects 3-plane linear RGB");
    ImageBuffer out(rgb.width, rgb.height, 3, ColorSpace::OpponentAC1C2);
    const size_t n = rgb.plane_size();
    const float* r = rgb.plane(0);
    const float* g = rgb.plane(1);
    const float* b = rgb.plane(2);
    for (int p = 0; p < 3; ++p) {
        const auto& row = kRgbToOpponent[p];
        float* o = out.plane(p);
        for (size_t i = 0; i < n; ++i)
            o[i] = float(row[0] * r[i] + row[1] * g[i] + row[2] * b[i]);
    }
    return out;
}

ImageBuffer luminance_of(const ImageBuffer& img) {
    ImageBuffer out(img.width, img.height, 1, ColorSpace::Scalar);
    const size_t n = img.plane_size();
    if (img.planes == 1) {
        std::copy(img.plane(0), img.plane(0) + n, out.plane(0));
        return out;
    }
    if (img.space == ColorSpace::OpponentAC1C2) {
        std::copy(img.plane(0), img.plane(0) + n, out.plane(0));
        return out;
    }
    const auto& row = kRgbToOpponent[0];
    const float* r = img.plane(0);
    const float* g = img.plane(1);
    const float* b = img.plane(2);
    float* o = out.plane(0);
    for (size_t i = 0; i < n; ++i)
        o[i] = float(row[0] * r[i] + row[1] * g[i] + row[2] * b[i]);
    return out;
}

ImageBuffer luminance_of(const ImageBuffer& img, const DisplayGeometry& geom) {
    ImageBuffer out = luminance_of(img);
    const float s = float(geom.max_display_luminance);
    for (float& v : out.data) v *= s;
    return out;
}

ImageBuffer mirror_horizontal(const ImageBuffer& img) {
    ImageBuffer out = img;
    for (int p = 0; p < img.planes; ++p)
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                out.at(p, x, y) = img.at(p, img.width - 1 - x, y);
    return out;
}

}  // namespace aleph
