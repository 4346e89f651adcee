#include "aleph/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace aleph {

namespace {

constexpr int kMaxDim = 1 << 16;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

// Skips whitespace and '#' comment lines, then reads one token.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(char(c));
            while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(char(c));
            break;
        }
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::string& path) {
    int v = 0;
    try {
        v = std::stoi(tok);
    } catch (...) {
        fail(path, "malformed header");
    }
    if (v <= 0 || v > kMaxDim) fail(path, "unreasonable image dimensions");
    return v;
}

ImageBuffer load_ppm(std::istream& in, const std::string& path) {
    const int w = parse_dim(next_token(in), path);
    const int h = parse_dim(next_token(in), path);
    const int maxval = parse_dim(next_token(in), path);
    if (maxval != 255) fail(path, "only 8-bit PPM supported");
    std::vector<unsigned char> raw(size_t(w) * h * 3);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (size_t(in.gcount()) != raw.size()) fail(path, "truncated pixel data");

    static float lut[256];
    static bool lut_ready = false;
    if (!lut_ready) {
        for (int i = 0; i < 256; ++i) lut[i] = std::pow(i / 255.0f, 2.2f);
        lut_ready = true;
    }
    ImageBuffer img = ImageBuffer::rgb(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int p = 0; p < 3; ++p)
                img.at(p, x, y) = lut[raw[(size_t(y) * w + x) * 3 + p]];
    return img;
}

void swap_bytes(float* v, size_t n) {
    auto* b = reinterpret_cast<unsigned char*>(v);
    for (size_t i = 0; i < n; ++i, b += 4) {
        std::swap(b[0], b[3]);
        std::swap(b[1], b[2]);
    }
}

ImageBuffer load_pfm(std::istream& in, const std::string& path, bool color) {
    const int w = parse_dim(next_token(in), path);
    const int h = parse_dim(next_token(in), path);
    double scale = 0.0;
    try {
        scale = std::stod(next_token(in));
    } catch (...) {
        fail(path, "malformed PFM scale");
    }
    if (scale == 0.0) fail(path, "PFM scale must be nonzero");
    const int planes = color ? 3 : 1;
    std::vector<float> raw(size_t(w) * h * planes);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size() * 4));
    if (size_t(in.gcount()) != raw.size() * 4) fail(path, "truncated pixel data");
    if (scale > 0) swap_bytes(raw.data(), raw.size());  // big-endian file

    ImageBuffer img(w, h, planes, color ? ColorSpace::LinearRGB : ColorSpace::Scalar);
    for (int y = 0; y < h; ++y) {
        const int src_y = h - 1 - y;  // PFM rows run bottom to top
        for (int x = 0; x < w; ++x)
            for (int p = 0; p < planes; ++p)
                img.at(p, x, y) = raw[(size_t(src_y) * w + x) * planes + p];
    }
    return img;
}

}  // namespace

ImageBuffer load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    std::string magic = next_token(in);
    if (magic == "P6") return load_ppm(in, path);
    if (magic == "PF") return load_pfm(in, path, true);
    if (magic == "Pf") return load_pfm(in, path, false);
    fail(path, "unsupported format (want P6, PF or Pf)");
}

void save_pfm(const ImageBuffer& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_pfm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << (img.planes == 3 ? "PF" : "Pf") << "\n"
        << img.width << " " << img.height << "\n-1.0\n";
    std::vector<float> row(size_t(img.width) * img.planes);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x)
            for (int p = 0; p < img.planes; ++p)
                row[size_t(x) * img.planes + p] = img.at(p, x, y);
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size() * 4));
    }
    if (!out) fail(path, "write failed");
}

void save_ppm(const ImageBuffer& img, const std::string& path) {
    if (img.empty()) throw std::invalid_argument("save_ppm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> row(size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x)
            for (int p = 0; p < 3; ++p) {
                const float v = img.at(img.planes == 3 ? p : 0, x, y);
                const float c = std::pow(std::clamp(v, 0.0f, 1.0f), 1.0f / 2.2f);
                row[size_t(x) * 3 + p] = (unsigned char)std::lround(c * 255.0f);
            }
        out.write(reinterpret_cast<const char*>(row.data()),
                  std::streamsize(row.size()));
    }
    if (!out) fail(path, "write failed");
}

void save_frame(const ImageBuffer& img, const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".pfm") == 0)
        save_pfm(img, path);
    else if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".ppm") == 0)
        save_ppm(img, path);
    else
        throw std::invalid_argument("save_frame: unknown extension on " + path);
}

}  // namespace aleph
