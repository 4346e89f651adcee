#pragma once

#include "aleph/aleph.hpp"
#include "aleph/config.hpp"
#include "aleph/motion.hpp"
#include "aleph/pyramid.hpp"
#include "aleph/saliency.hpp"

namespace aleph {

struct PipelineResult {
    AlephMap aleph;
    BandWeights bands;
    SaliencyMap saliency;  // empty unless mode == saliency
};

// Band weights and tolerance map for one frame given its velocity field.
// frame may be linear RGB or opponent; saliency is computed only when the
// configured compensation mode needs it.
PipelineResult compute_aleph_pipeline(const ImageBuffer& frame,
                                      const VelocityField& vel,
                                      const PipelineConfig& cfg);

}  // namespace aleph
