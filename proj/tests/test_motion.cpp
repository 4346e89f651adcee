#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "aleph/image.hpp"
#include "aleph/motion.hpp"
#include "aleph/pyramid.hpp"

using namespace aleph;

namespace {

ImageBuffer noise(int w, int h, uint32_t seed) {
    ImageBuffer img = ImageBuffer::scalar(w, h);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : img.data) v = dist(rng);
    return img;
}

// Noise with octaves at several scales; the hierarchical matcher relies on
// coarse structure surviving into the small pyramid levels, and on fine
// structure giving the census transform stable orderings under 1 px shifts.
ImageBuffer textured_noise(int w, int h, uint32_t seed) {
    ImageBuffer img = ImageBuffer::scalar(w, h);
    for (int shift : {2, 3, 4}) {
        ImageBuffer oct = noise(((w - 1) >> shift) + 1, ((h - 1) >> shift) + 1, seed++);
        ImageBuffer up = upsample_to(oct, w, h);
        for (size_t i = 0; i < img.data.size(); ++i)
            img.data[i] += up.data[i];
    }
    return img;
}

ImageBuffer circular_shift(const ImageBuffer& img, int sx, int sy) {
    ImageBuffer out = ImageBuffer::scalar(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int ox = ((x - sx) % img.width + img.width) % img.width;
            const int oy = ((y - sy) % img.height + img.height) % img.height;
            out.at(0, x, y) = img.at(0, ox, oy);
        }
    return out;
}

}  // namespace

TEST_CASE("census bit pattern on the worked 3x3 patch") {
    const float rows[3][3] = {{1, 2, 7}, {9, 5, 4}, {6, 3, 8}};
    ImageBuffer img = ImageBuffer::scalar(3, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) img.at(0, x, y) = rows[y][x];
    CensusMap c = census_transform(img);
    // Neighbors TL..BR vs center 5: 1,2 below; 7,9 above; 4 below; 6 above;
    // 3 below; 8 above -> 00110101.
    CHECK(c.at(1, 1) == 0b00110101);
}

TEST_CASE("constant image censuses to all ones") {
    CensusMap c = census_transform(ImageBuffer::scalar(5, 4, 0.7f));
    for (uint8_t b : c.bits) CHECK(b == 0xFF);
}

TEST_CASE("monotone ramp sets the right bit and clears the left") {
    ImageBuffer img = ImageBuffer::scalar(8, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 8; ++x) img.at(0, x, y) = float(x);
    CensusMap c = census_transform(img);
    for (int y = 0; y < 3; ++y)
        for (int x = 1; x < 7; ++x) {
            CHECK(((c.at(x, y) >> 3) & 1) == 1);  // right neighbor >= center
            CHECK(((c.at(x, y) >> 4) & 1) == 0);  // left neighbor < center
        }
}

TEST_CASE("hamming distance on bit strings and bytes") {
    CHECK(hamming_distance("1110", "1011") == 2);
    CHECK(hamming_distance("10101010", "10101010") == 0);
    CHECK(hamming_distance(uint8_t(0xFF), uint8_t(0x00)) == 8);
    CHECK(hamming_distance(uint8_t(0x35), uint8_t(0x35)) == 0);
    CHECK(hamming_distance(uint8_t(0x35), uint8_t(0xCA)) == 8);
    CHECK_THROWS_AS(hamming_distance("111", "10"), std::invalid_argument);
}

TEST_CASE("self match is identically zero displacement") {
    ImageBuffer img = noise(64, 64, 21);
    DisplacementField d = match_image_motion(img, img);
    REQUIRE(d.size() == 64 * 64);
    long zeros = 0;
    for (size_t i = 0; i < d.size(); ++i)
        if (d.dx[i] == 0 && d.dy[i] == 0) ++zeros;
    CHECK(double(zeros) / double(d.size()) >= 0.99);
}

TEST_CASE("flat frames resolve to stillness via the tie break") {
    ImageBuffer img = ImageBuffer::scalar(32, 32, 0.5f);
    DisplacementField d = match_image_motion(img, img);
    for (size_t i = 0; i < d.size(); ++i) {
        CHECK(d.dx[i] == 0);
        CHECK(d.dy[i] == 0);
    }
}

double recovered_fraction(const ImageBuffer& a, int sx, int sy) {
    ImageBuffer b = circular_shift(a, sx, sy);
    DisplacementField d = match_image_motion(a, b);
    long exact = 0, n = 0;
    for (int y = 16; y < a.height - 16; ++y)
        for (int x = 16; x < a.width - 16; ++x, ++n) {
            const size_t i = size_t(y) * a.width + x;
            if (d.dx[i] == sx && d.dy[i] == sy) ++exact;
        }
    return double(exact) / double(n);
}

TEST_CASE("known shift is recovered on textured frames") {
    ImageBuffer a = textured_noise(128, 128, 50);

    // A shift that halves exactly at every pyramid level starts the
    // three-step refinement from exact parents and recovers almost
    // everywhere.
    const double even = recovered_fraction(a, 8, 4);
    CHECK_MESSAGE(even >= 0.85, "even shift (8,4) recovered on ", even);

    // An odd shift is not representable at the coarser levels, so the
    // doubled parent starts the three-step search at least one pixel off.
    // On census costs the greedy 4/2/1 steps then lose the true minimum
    // often enough that exact recovery saturates near 45% regardless of
    // texture; see the displacement-search notes in the README.
    const double odd = recovered_fraction(a, 3, 2);
    CHECK_MESSAGE(odd >= 0.85, "odd shift (3,2) recovered on ", odd,
                  " (known ceiling of the greedy refinement)");
}

TEST_CASE("displacements never exceed the search reach") {
    // Unrelated frames produce arbitrary matches that must stay within
    // the 53 px hierarchical search bound.
    ImageBuffer a = noise(96, 96, 5);
    ImageBuffer b = noise(96, 96, 6);
    DisplacementField d = match_image_motion(a, b);
    for (size_t i = 0; i < d.size(); ++i) {
        CHECK(std::abs(d.dx[i]) <= 53.0f);
        CHECK(std::abs(d.dy[i]) <= 53.0f);
    }
}

TEST_CASE("displacement converts to degrees per second") {
    DisplacementField d;
    d.width = 2;
    d.height = 1;
    d.dx = {31.0f, 1.0f};
    d.dy = {0.0f, 0.0f};
    d.valid = {1, 1};
    DisplayGeometry geom;  // 31 ppd, 30 fps
    VelocityField v = displacement_to_velocity(d, geom);
    CHECK(v.vx[0] == doctest::Approx(30.0));
    CHECK(v.vy[0] == doctest::Approx(0.0));
    CHECK(v.vx[1] == doctest::Approx(30.0 / 31.0));

    ImageBuffer mag = v.magnitude();
    CHECK(mag.at(0, 0, 0) == doctest::Approx(30.0));
    CHECK(mag.at(0, 1, 0) == doctest::Approx(30.0 / 31.0));
}

TEST_CASE("diagonal displacement magnitude") {
    DisplacementField d;
    d.width = 1;
    d.height = 1;
    d.dx = {3.0f};
    d.dy = {4.0f};
    d.valid = {1};
    DisplayGeometry geom;
    VelocityField v = displacement_to_velocity(d, geom);
    CHECK(v.magnitude().at(0, 0, 0) == doctest::Approx(5.0 / 31.0 * 30.0));
}

TEST_CASE("mismatched frame sizes are rejected") {
    CHECK_THROWS_AS(match_image_motion(noise(32, 32, 1), noise(64, 64, 2)),
                    std::invalid_argument);
}
