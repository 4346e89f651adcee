#pragma once

#include "aleph/motion.hpp"
#include "aleph/scene.hpp"

namespace aleph {

// Displacement of each pixel from frame N to frame N+1 predicted from the
// scene: primary-ray hits are carried through the next frame's object
// transforms and reprojected through the next frame's camera. Pixels that
// miss all geometry track a point at far_distance along the ray (camera
// motion only); far_distance <= 0 picks 100x the scene bounding radius.
// Pixels whose reprojection falls outside the viewport (or behind the
// camera) are flagged invalid and inherit the nearest valid displacement.
DisplacementField project_model_motion(const Scene& scene, int frame, int width,
                                       int height, double far_distance = 0.0);

}  // namespace aleph
