#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aleph/aleph.hpp"
#include "aleph/image.hpp"

namespace aleph {

// Shared pipeline knobs, settable from a key=value config file and
// overridable by CLI flags. Unknown keys or unparsable values throw.
struct PipelineConfig {
    DisplayGeometry geom;
    CsfParams csf;
    std::string motion = "model";    // model | image
    std::string mode = "saliency";   // zero | full | saliency
    double alpha_acc = 0.1;
    double k = 100.0;
    int max_samples = 512;
    int floor_samples = 16;
    int direct_spp = 16;
    int hemi_samples = 64;
    unsigned seed = 1;
    int jobs = 1;
    double far_distance = 0.0;  // <= 0: derived from the scene bounds

    void apply(const std::string& key, const std::string& value);
    CompensationMode compensation() const;
    // Every knob as key=value pairs, for sidecars and --version.
    std::vector<std::pair<std::string, std::string>> items() const;
};

PipelineConfig load_config(const std::string& path);

// Writes "<output>.meta" listing the full configuration plus extra entries.
void write_metadata(const std::string& output_path, const PipelineConfig& cfg,
                    const std::vector<std::pair<std::string, std::string>>& extra = {});

}  // namespace aleph
