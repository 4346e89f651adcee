#include "aleph/motion.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "aleph/pyramid.hpp"

namespace aleph {

CensusMap census_transform(const ImageBuffer& scalar) {
    if (scalar.planes != 1)
        throw std::invalid_argument("census_transform: expects a single plane");
    const int w = scalar.width, h = scalar.height;
    CensusMap cm;
    cm.width = w;
    cm.height = h;
    cm.bits.resize(size_t(w) * h);
    static constexpr int off[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                      {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float c = scalar.at(0, x, y);
            uint8_t b = 0;
            for (int i = 0; i < 8; ++i) {
                b <<= 1;
                if (scalar.at_clamped(0, x + off[i][0], y + off[i][1]) >= c) b |= 1;
            }
            cm.bits[size_t(y) * w + x] = b;
        }
    return cm;
}

int hamming_distance(uint8_t a, uint8_t b) {
    return std::popcount(uint8_t(a ^ b));
}

int hamming_distance(std::string_view a, std::string_view b) {
    if (a.size() != b.size())
        throw std::invalid_argument("hamming_distance: length mismatch");
    int d = 0;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

namespace {

struct Candidate {
    int cost;
    int dx, dy;

    bool better_than(const Candidate& o) const {
        if (cost != o.cost) return cost < o.cost;
        const int m = dx * dx + dy * dy, om = o.dx * o.dx + o.dy * o.dy;
        if (m != om) return m < om;
        if (dx != o.dx) return dx < o.dx;
        return dy < o.dy;
    }
};

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// 3x3 aggregated census cost between (x,y) in N and (x+dx,y+dy) in N1,
// sampling both maps with clamped coordinates.
int block_cost(const CensusMap& a, const CensusMap& b, int x, int y, int dx, int dy) {
    int cost = 0;
    for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
            const int ax = clampi(x + i, 0, a.width - 1);
            const int ay = clampi(y + j, 0, a.height - 1);
            const int bx = clampi(x + i + dx, 0, b.width - 1);
            const int by = clampi(y + j + dy, 0, b.height - 1);
            cost += hamming_distance(a.at(ax, ay), b.at(bx, by));
        }
    return cost;
}

Candidate exhaustive_search(const CensusMap& a, const CensusMap& b, int x, int y,
                            int radius) {
    Candidate best{block_cost(a, b, x, y, -radius, -radius), -radius, -radius};
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx == -radius && dy == -radius) continue;
            Candidate c{block_cost(a, b, x, y, dx, dy), dx, dy};
            if (c.better_than(best)) best = c;
        }
    return best;
}

Candidate three_step_search(const CensusMap& a, const CensusMap& b, int x, int y,
                            int start_dx, int start_dy) {
    Candidate best{block_cost(a, b, x, y, start_dx, start_dy), start_dx, start_dy};
    for (int step : {4, 2, 1}) {
        Candidate center = best;
        for (int j = -1; j <= 1; ++j)
            for (int i = -1; i <= 1; ++i) {
                if (i == 0 && j == 0) continue;
                const int dx = center.dx + i * step;
                const int dy = center.dy + j * step;
                Candidate c{block_cost(a, b, x, y, dx, dy), dx, dy};
                if (c.better_than(best)) best = c;
            }
    }
    return best;
}

}  // namespace

DisplacementField match_image_motion(const ImageBuffer& frame_n,
                                     const ImageBuffer& frame_n1) {
    if (frame_n.width != frame_n1.width || frame_n.height != frame_n1.height)
        throw std::invalid_argument("match_image_motion: frames differ in size");
    const ImageBuffer a0 = luminance_of(frame_n);
    const ImageBuffer b0 = luminance_of(frame_n1);
    if (std::min(a0.width, a0.height) < 4)
        throw std::invalid_argument("match_image_motion: frame too small");

    const Pyramid pa = gaussian_pyramid(a0, 3);
    const Pyramid pb = gaussian_pyramid(b0, 3);
    CensusMap ca[3], cb[3];
    for (int i = 0; i < 3; ++i) {
        ca[i] = census_transform(pa.levels[i]);
        cb[i] = census_transform(pb.levels[i]);
    }

    // Coarsest level: exhaustive +-8.
    const int w2 = ca[2].width, h2 = ca[2].height;
    std::vector<int> cdx(size_t(w2) * h2), cdy(size_t(w2) * h2);
    for (int y = 0; y < h2; ++y)
        for (int x = 0; x < w2; ++x) {
            const Candidate c = exhaustive_search(ca[2], cb[2], x, y, 8);
            cdx[size_t(y) * w2 + x] = c.dx;
            cdy[size_t(y) * w2 + x] = c.dy;
        }

    // Refine level by level: double the parent estimate, then three-step.
    for (int lvl = 1; lvl >= 0; --lvl) {
        const CensusMap& a = ca[lvl];
        const CensusMap& b = cb[lvl];
        const int w = a.width, h = a.height;
        const int pw = ca[lvl + 1].width, ph = ca[lvl + 1].height;
        std::vector<int> ndx(size_t(w) * h), ndy(size_t(w) * h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int px = clampi(x / 2, 0, pw - 1);
                const int py = clampi(y / 2, 0, ph - 1);
                const int sdx = 2 * cdx[size_t(py) * pw + px];
                const int sdy = 2 * cdy[size_t(py) * pw + px];
                const Candidate c = three_step_search(a, b, x, y, sdx, sdy);
                ndx[size_t(y) * w + x] = c.dx;
                ndy[size_t(y) * w + x] = c.dy;
            }
        cdx = std::move(ndx);
        cdy = std::move(ndy);
    }

    DisplacementField out;
    out.width = a0.width;
    out.height = a0.height;
    const size_t n = cdx.size();
    out.dx.resize(n);
    out.dy.resize(n);
    out.valid.assign(n, 1);
    for (size_t i = 0; i < n; ++i) {
        out.dx[i] = float(cdx[i]);
        out.dy[i] = float(cdy[i]);
    }
    return out;
}

ImageBuffer VelocityField::magnitude() const {
    ImageBuffer out(width, height, 1, ColorSpace::Scalar);
    for (size_t i = 0; i < vx.size(); ++i)
        out.data[i] = std::hypot(vx[i], vy[i]);
    return out;
}

VelocityField displacement_to_velocity(const DisplacementField& d,
                                       const DisplayGeometry& geom) {
    VelocityField v;
    v.width = d.width;
    v.height = d.height;
    v.vx.resize(d.size());
    v.vy.resize(d.size());
    const double s = geom.frames_per_second / geom.pixels_per_degree;
    for (size_t i = 0; i < d.size(); ++i) {
        v.vx[i] = float(d.dx[i] * s);
        v.vy[i] = float(d.dy[i] * s);
    }
    return v;
}

}  // namespace aleph
