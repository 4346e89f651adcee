#include "aleph/pipeline.hpp"

#include <stdexcept>

namespace aleph {

PipelineResult compute_aleph_pipeline(const ImageBuffer& frame,
                                      const VelocityField& vel,
                                      const PipelineConfig& cfg) {
    if (frame.width != vel.width || frame.height != vel.height)
        throw std::invalid_argument("pipeline: frame and velocity sizes differ");

    PipelineResult out;
    const ImageBuffer a = luminance_of(frame);
    out.bands = band_weights(laplacian_bands(gaussian_pyramid(a, 8)));

    const CompensationMode mode = cfg.compensation();
    if (mode == CompensationMode::Saliency) {
        const ImageBuffer opp = frame.space == ColorSpace::OpponentAC1C2
                                    ? frame
                                    : rgb_to_opponent(frame);
        out.saliency = compute_saliency(opp, vel);
    }
    out.aleph = compute_aleph(out.bands, vel, out.saliency, mode, cfg.csf, cfg.geom);
    return out;
}

}  // namespace aleph
