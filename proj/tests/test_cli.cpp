#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "aleph/image_io.hpp"

using namespace aleph;
namespace fs = std::filesystem;

namespace {

const std::string& work_dir() {
    static const std::string dir = [] {
        fs::remove_all("cli_work");
        fs::create_directories("cli_work");
        return std::string("cli_work");
    }();
    return dir;
}

std::string wpath(const std::string& name) { return work_dir() + "/" + name; }

struct RunResult {
    int code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const std::string cap = wpath("capture" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(CLI_BINARY) + " " + args + " > " + cap + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(cap);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

const std::string kBoxScene = FIXTURE_DIR "/box.scene";

}  // namespace

TEST_CASE("version banner and usage errors") {
    RunResult v = run_cli("--version");
    CHECK(v.code == 0);
    CHECK(v.output.find("alephmap") != std::string::npos);
    CHECK(v.output.find("c0=1.14") != std::string::npos);
    CHECK(v.output.find("16 8 4 2 1 0.5 0.25") != std::string::npos);

    CHECK(run_cli("").code == 1);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("estimate --scene " + kBoxScene).code == 1);
    CHECK(run_cli("estimate --no-such-flag").code == 1);

    RunResult missing = run_cli("estimate --scene " + wpath("no.scene") + " -o " +
                                wpath("x.pfm"));
    CHECK(missing.code == 2);
    CHECK(missing.output.find("error:") != std::string::npos);
    CHECK(missing.output.find("cannot open") != std::string::npos);

    CHECK(run_cli("estimate --scene " + kBoxScene + " -o " + wpath("x.pfm") +
                  " --set seedless")
              .code == 1);
    RunResult badkey = run_cli("estimate --scene " + kBoxScene + " -o " +
                               wpath("x.pfm") + " --set nope=1");
    CHECK(badkey.code == 2);
    CHECK(badkey.output.find("unknown key") != std::string::npos);
}

TEST_CASE("estimates are reproducible and carry metadata") {
    const std::string base = "estimate --scene " + kBoxScene +
                             " --width 128 --height 128 ";
    REQUIRE(run_cli(base + "--frame 0 -o " + wpath("est0.pfm")).code == 0);
    ImageBuffer img = load_frame(wpath("est0.pfm"));
    CHECK(img.width == 128);
    CHECK(img.height == 128);
    CHECK(img.planes == 3);

    const std::string meta = slurp(wpath("est0.pfm.meta"));
    auto kv = parse_kv(meta);
    CHECK(kv["command"] == "estimate");
    CHECK(kv["seed"] == "1");
    CHECK(kv["ppd"] == "31");

    REQUIRE(run_cli(base + "--frame 0 -o " + wpath("est0b.pfm")).code == 0);
    CHECK(slurp(wpath("est0.pfm")) == slurp(wpath("est0b.pfm")));

    REQUIRE(run_cli(base + "--frame 0 --set seed=7 -o " + wpath("est7.pfm")).code == 0);
    CHECK(slurp(wpath("est0.pfm")) != slurp(wpath("est7.pfm")));

    REQUIRE(run_cli(base + "--frame 1 -o " + wpath("est1.pfm")).code == 0);
}

TEST_CASE("model motion writes a consistent velocity image") {
    RunResult r = run_cli("motion --scene " + kBoxScene +
                          " --frame 0 --width 64 --height 64 -o " + wpath("vel.pfm"));
    REQUIRE(r.code == 0);
    ImageBuffer v = load_frame(wpath("vel.pfm"));
    CHECK(v.width == 64);
    CHECK(v.planes == 3);
    float vmax = 0;
    for (int y = 0; y < v.height; ++y)
        for (int x = 0; x < v.width; ++x) {
            const float mag = std::hypot(v.at(0, x, y), v.at(1, x, y));
            CHECK(v.at(2, x, y) == doctest::Approx(mag).epsilon(1e-4));
            vmax = std::max(vmax, mag);
        }
    CHECK(vmax > 0.0f);
    CHECK(parse_kv(slurp(wpath("vel.pfm.meta")))["source"] == "model");

    CHECK(run_cli("motion -o " + wpath("vel2.pfm")).code == 1);
}

TEST_CASE("scene-driven tolerance maps are bit-stable") {
    const std::string cmd = "aleph --scene " + kBoxScene +
                            " --frame 0 --width 256 --height 256 -o " +
                            wpath("aleph256.pfm") + " --saliency-out " +
                            wpath("sal256.pfm");
    REQUIRE(run_cli(cmd).code == 0);
    ImageBuffer a = load_frame(wpath("aleph256.pfm"));
    CHECK(a.width == 256);
    CHECK(a.planes == 1);
    for (float x : a.data) {
        CHECK(x >= 1.0f);
        CHECK(x <= 250.0f);
    }
    ImageBuffer s = load_frame(wpath("sal256.pfm"));
    for (float x : s.data) {
        CHECK(x >= 0.0f);
        CHECK(x <= 1.0f);
    }

    const std::string again = "aleph --scene " + kBoxScene +
                              " --frame 0 --width 256 --height 256 -o " +
                              wpath("aleph256b.pfm");
    REQUIRE(run_cli(again).code == 0);
    CHECK(slurp(wpath("aleph256.pfm")) == slurp(wpath("aleph256b.pfm")));
}

TEST_CASE("image-based tolerance pipeline and its input checks") {
    REQUIRE(fs::exists(wpath("est0.pfm")));
    REQUIRE(fs::exists(wpath("est1.pfm")));
    RunResult r = run_cli("aleph --frame-a " + wpath("est0.pfm") + " --frame-b " +
                          wpath("est1.pfm") + " --set mode=zero -o " +
                          wpath("aleph128.pfm"));
    REQUIRE(r.code == 0);
    ImageBuffer a = load_frame(wpath("aleph128.pfm"));
    CHECK(a.width == 128);
    CHECK(a.height == 128);
    for (float x : a.data) {
        CHECK(x >= 1.0f);
        CHECK(x <= 250.0f);
    }

    CHECK(run_cli("aleph --frame-b " + wpath("est1.pfm") + " -o " +
                  wpath("bad.pfm"))
              .code == 1);
    CHECK(run_cli("aleph -o " + wpath("bad.pfm")).code == 1);
}

TEST_CASE("threshold oracle emits positive thresholds and bounded accuracy") {
    REQUIRE(fs::exists(wpath("aleph128.pfm")));
    RunResult r = run_cli("oracle --aleph " + wpath("aleph128.pfm") +
                          " --luminance " + wpath("est0.pfm") + " -o " +
                          wpath("thresh.pfm") + " --alpha-out " + wpath("alpha.pfm"));
    REQUIRE(r.code == 0);
    ImageBuffer t = load_frame(wpath("thresh.pfm"));
    CHECK(t.width == 128);
    for (float x : t.data) CHECK(x > 0.0f);
    ImageBuffer al = load_frame(wpath("alpha.pfm"));
    for (float x : al.data) {
        CHECK(x >= 0.1f);
        CHECK(x <= 1.0f);
    }

    CHECK(run_cli("oracle --aleph " + wpath("aleph128.pfm") + " --luminance " +
                  wpath("est0.pfm") + " -o " + wpath("t2.pfm") +
                  " --alpha-mode bogus")
              .code == 1);
}

TEST_CASE("injected noise stays under the threshold map") {
    REQUIRE(fs::exists(wpath("thresh.pfm")));
    const std::string noi = "noisemap --reference " + wpath("est0.pfm") +
                            " --threshold " + wpath("thresh.pfm") + " -o ";
    REQUIRE(run_cli(noi + wpath("noisy.pfm")).code == 0);
    REQUIRE(run_cli(noi + wpath("noisy2.pfm")).code == 0);
    CHECK(slurp(wpath("noisy.pfm")) == slurp(wpath("noisy2.pfm")));

    RunResult self = run_cli("compare --a " + wpath("noisy.pfm") + " --b " +
                             wpath("noisy.pfm") + " --threshold " + wpath("thresh.pfm"));
    CHECK(self.code == 0);
    CHECK(self.output.find("bytes_identical=true") != std::string::npos);
    CHECK(self.output.find("max_ratio=0\n") != std::string::npos);
    CHECK(self.output.find("within_threshold=1.0000") != std::string::npos);

    RunResult cross = run_cli("compare --a " + wpath("est0.pfm") + " --b " +
                              wpath("noisy.pfm") + " --threshold " + wpath("thresh.pfm") +
                              " -o " + wpath("ratio.pfm"));
    CHECK(cross.code == 0);
    CHECK(cross.output.find("bytes_identical=false") != std::string::npos);
    CHECK(cross.output.find("within_threshold=1.0000") != std::string::npos);
    const auto pos = cross.output.find("max_ratio=");
    REQUIRE(pos != std::string::npos);
    const double max_ratio = std::atof(cross.output.c_str() + pos + 10);
    CHECK(max_ratio < 1.0);
    CHECK(max_ratio > 0.0);
    ImageBuffer ratio = load_frame(wpath("ratio.pfm"));
    for (float x : ratio.data) CHECK(x < 1.0f);

    CHECK(run_cli("compare --a " + wpath("est0.pfm") + " --b " + wpath("vel.pfm") +
                  " --threshold " + wpath("thresh.pfm"))
              .code == 2);
}

TEST_CASE("render command reports its sampling work") {
    const std::string base = "render --scene " + kBoxScene +
                             " --width 48 --height 48 ";
    RunResult uni = run_cli(base + "--mode uniform -o " + wpath("ru.pfm") +
                            " --stats " + wpath("ru.stats"));
    REQUIRE(uni.code == 0);
    ImageBuffer img = load_frame(wpath("ru.pfm"));
    CHECK(img.width == 48);
    auto stats = parse_kv(slurp(wpath("ru.stats")));
    CHECK(stats["primary_rays"] == "2304");
    const long created_uniform = std::atol(stats["cache_created"].c_str());
    CHECK(created_uniform > 0);

    save_pfm(ImageBuffer::scalar(48, 48, 250.0f), wpath("loose.pfm"));
    RunResult acc = run_cli(base + "--mode aleph-alpha --aleph " + wpath("loose.pfm") +
                            " -o " + wpath("ra.pfm") + " --stats " + wpath("ra.stats"));
    REQUIRE(acc.code == 0);
    const long created_loose =
        std::atol(parse_kv(slurp(wpath("ra.stats")))["cache_created"].c_str());
    CHECK(created_loose > 0);
    CHECK(created_loose < created_uniform);

    CHECK(run_cli(base + "--mode aleph-alpha -o " + wpath("rb.pfm")).code == 2);
    CHECK(run_cli(base + "--mode teapot -o " + wpath("rc.pfm")).code == 1);
}
