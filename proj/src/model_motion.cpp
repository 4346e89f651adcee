#include "aleph/model_motion.hpp"

#include <deque>

namespace aleph {

DisplacementField project_model_motion(const Scene& scene, int frame, int width,
                                       int height, double far_distance) {
    const Camera& cam_n = scene.camera_at(frame);
    const Camera& cam_n1 = scene.camera_at(frame + 1);
    const FrameScene fs = prepare_frame(scene, frame);
    // Validates that every animated primitive has a next-frame transform.
    for (const auto& pr : scene.prims) pr.xform_at(frame + 1);

    if (far_distance <= 0) {
        Vec3 c;
        double r;
        scene.bounding_sphere(frame, c, r);
        far_distance = 100.0 * r + (c - cam_n.eye).length();
    }

    DisplacementField out;
    out.width = width;
    out.height = height;
    const size_t n = size_t(width) * height;
    out.dx.assign(n, 0.0f);
    out.dy.assign(n, 0.0f);
    out.valid.assign(n, 0);

    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const Ray ray = camera_ray(cam_n, width, height, x, y);
            Vec3 p_next;
            if (auto hit = intersect(fs, ray)) {
                const Vec3 obj = hit->obj_pos(scene, frame);
                p_next = scene.prims[hit->prim].xform_at(frame + 1).point(obj);
            } else {
                p_next = ray.orig + ray.dir * far_distance;
            }
            const auto proj = camera_project(cam_n1, width, height, p_next);
            const size_t i = size_t(y) * width + x;
            if (proj && proj->first >= -0.5 && proj->first <= width - 0.5 &&
                proj->second >= -0.5 && proj->second <= height - 0.5) {
                out.dx[i] = float(proj->first - x);
                out.dy[i] = float(proj->second - y);
                out.valid[i] = 1;
            }
        }

    // Fill invalid pixels from the nearest valid neighbor (multi-source BFS,
    // seeded in scanline order; the flag stays cleared).
    std::deque<std::pair<int, int>> queue;
    std::vector<uint8_t> filled(n, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (out.valid[size_t(y) * width + x]) {
                filled[size_t(y) * width + x] = 1;
                queue.emplace_back(x, y);
            }
    if (!queue.empty()) {
        while (!queue.empty()) {
            const auto [x, y] = queue.front();
            queue.pop_front();
            const size_t i = size_t(y) * width + x;
            for (int j = -1; j <= 1; ++j)
                for (int k = -1; k <= 1; ++k) {
                    const int nx = x + k, ny = y + j;
                    if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
                    const size_t ni = size_t(ny) * width + nx;
                    if (filled[ni]) continue;
                    filled[ni] = 1;
                    out.dx[ni] = out.dx[i];
                    out.dy[ni] = out.dy[i];
                    queue.emplace_back(nx, ny);
                }
        }
    }
    return out;
}

}  // namespace aleph
