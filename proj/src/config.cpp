#include "aleph/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aleph {

namespace {

double num(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
    }
}

int integer(const std::string& key, const std::string& value) {
    const double v = num(key, value);
    if (v != double(long(v)))
        throw std::invalid_argument("config: " + key + " must be an integer");
    return int(v);
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

void PipelineConfig::apply(const std::string& key, const std::string& value) {
    if (key == "ppd") geom.pixels_per_degree = num(key, value);
    else if (key == "fps") geom.frames_per_second = num(key, value);
    else if (key == "max_luminance") geom.max_display_luminance = num(key, value);
    else if (key == "motion") {
        if (value != "model" && value != "image")
            throw std::invalid_argument("config: motion must be model or image");
        motion = value;
    } else if (key == "mode") {
        if (value != "zero" && value != "full" && value != "saliency")
            throw std::invalid_argument("config: mode must be zero, full or saliency");
        mode = value;
    } else if (key == "csf_max_mode") {
        if (value == "analytic") csf.max_mode = CsfMaxMode::Analytic;
        else if (value == "literal") csf.max_mode = CsfMaxMode::Literal;
        else throw std::invalid_argument("config: csf_max_mode must be analytic or literal");
    } else if (key == "c0") csf.c0 = num(key, value);
    else if (key == "c1") csf.c1 = num(key, value);
    else if (key == "c2") csf.c2 = num(key, value);
    else if (key == "v_min") csf.v_min = num(key, value);
    else if (key == "v_max") csf.v_max = num(key, value);
    else if (key == "tracking_efficiency") csf.tracking_efficiency = num(key, value);
    else if (key == "alpha_acc") {
        alpha_acc = num(key, value);
        if (alpha_acc <= 0 || alpha_acc > 1)
            throw std::invalid_argument("config: alpha_acc must be in (0,1]");
    } else if (key == "k") k = num(key, value);
    else if (key == "max_samples") max_samples = integer(key, value);
    else if (key == "floor_samples") floor_samples = integer(key, value);
    else if (key == "direct_spp") direct_spp = integer(key, value);
    else if (key == "hemi_samples") hemi_samples = integer(key, value);
    else if (key == "seed") seed = unsigned(integer(key, value));
    else if (key == "jobs") {
        jobs = integer(key, value);
        if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
    } else if (key == "far_distance") far_distance = num(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

CompensationMode PipelineConfig::compensation() const {
    if (mode == "zero") return CompensationMode::Zero;
    if (mode == "full") return CompensationMode::Full;
    return CompensationMode::Saliency;
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::items() const {
    return {
        {"ppd", fmt(geom.pixels_per_degree)},
        {"fps", fmt(geom.frames_per_second)},
        {"max_luminance", fmt(geom.max_display_luminance)},
        {"motion", motion},
        {"mode", mode},
        {"csf_max_mode", csf.max_mode == CsfMaxMode::Analytic ? "analytic" : "literal"},
        {"c0", fmt(csf.c0)},
        {"c1", fmt(csf.c1)},
        {"c2", fmt(csf.c2)},
        {"v_min", fmt(csf.v_min)},
        {"v_max", fmt(csf.v_max)},
        {"tracking_efficiency", fmt(csf.tracking_efficiency)},
        {"alpha_acc", fmt(alpha_acc)},
        {"k", fmt(k)},
        {"max_samples", std::to_string(max_samples)},
        {"floor_samples", std::to_string(floor_samples)},
        {"direct_spp", std::to_string(direct_spp)},
        {"hemi_samples", std::to_string(hemi_samples)},
        {"seed", std::to_string(seed)},
        {"jobs", std::to_string(jobs)},
        {"far_distance", fmt(far_distance)},
    };
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        const auto vb = value.find_first_not_of(" \t");
        value = vb == std::string::npos ? "" : value.substr(vb);
        try {
            cfg.apply(key, value);
        } catch (const std::exception& ex) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                                     ex.what());
        }
    }
    return cfg;
}

void write_metadata(const std::string& output_path, const PipelineConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    std::ofstream out(output_path + ".meta");
    if (!out) throw std::runtime_error(output_path + ".meta: cannot open for writing");
    for (const auto& [k, v] : cfg.items()) out << k << "=" << v << "\n";
    for (const auto& [k, v] : extra) out << k << "=" << v << "\n";
}

}  // namespace aleph
