#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aleph {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator*(const Vec3& o) const { return {x * o.x, y * o.y, z * o.z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double length() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double l = length();
        return l > 0 ? Vec3{x / l, y / l, z / l} : Vec3{};
    }
    double max_component() const { return std::max(x, std::max(y, z)); }
};

// Row-major affine 4x4; the last row is assumed (0,0,0,1).
struct Mat4 {
    double m[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};

    static Mat4 identity() { return {}; }
    Vec3 point(const Vec3& p) const {
        return {m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
                m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
                m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3]};
    }
    Vec3 vector(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat4 inverse() const;
};

struct Material {
    std::string name;
    Vec3 diffuse;
    Vec3 emission;
    Vec3 glossy;
    double gloss_exp = 0;

    bool emissive() const { return emission.max_component() > 0; }
    bool has_gloss() const { return gloss_exp > 0 && glossy.max_component() > 0; }
};

struct Primitive {
    enum class Kind { Tri, Sphere };
    Kind kind = Kind::Tri;
    int material = 0;
    Vec3 v0, v1, v2;       // triangle vertices, object space
    Vec3 center;           // sphere
    double radius = 0;
    std::map<int, Mat4> xforms;  // empty map means static (identity)

    // Throws if the primitive animates but has no transform for this frame.
    const Mat4& xform_at(int frame) const;
    double area() const;
};

struct Camera {
    Vec3 eye, target, up{0, 1, 0};
    double vfov_deg = 40;
};

struct Ray {
    Vec3 orig, dir;  // dir normalized
};

struct Scene {
    std::vector<Material> materials;
    std::vector<Primitive> prims;
    std::map<int, Camera> cameras;

    const Camera& camera_at(int frame) const;
    // Bounding sphere of the frame's transformed geometry.
    void bounding_sphere(int frame, Vec3& center, double& radius) const;
};

// Parses the line-oriented scene text format; throws with the offending line
// number on malformed input.
Scene load_scene(const std::string& path);
Scene parse_scene(const std::string& text, const std::string& name = "<scene>");

struct Hit {
    int prim = -1;
    double t = 0;
    Vec3 pos;     // world space
    Vec3 normal;  // world space, unit, on the side the ray came from
    double u = 0, v = 0;  // triangle barycentrics

    // Hit location in the primitive's object space, for reprojection.
    Vec3 obj_pos(const Scene& scene, int frame) const;
};

// Geometry snapshot with frame transforms applied.
struct FrameScene {
    const Scene* scene = nullptr;
    int frame = 0;
    struct WorldPrim {
        Vec3 v0, v1, v2;  // triangle
        Vec3 center;      // sphere
        double radius = 0;
    };
    std::vector<WorldPrim> world;
};

FrameScene prepare_frame(const Scene& scene, int frame);

std::optional<Hit> intersect(const FrameScene& fs, const Ray& ray,
                             double tmin = 1e-6, double tmax = 1e30,
                             int skip_prim = -1);
bool occluded(const FrameScene& fs, const Ray& ray, double tmax,
              int skip_a = -1, int skip_b = -1);

// Pinhole camera helpers for a given viewport.
Ray camera_ray(const Camera& cam, int width, int height, double px, double py);
// Pixel coordinates of a world point; nullopt when the point is behind the
// camera. Callers test the viewport bound themselves.
std::optional<std::pair<double, double>> camera_project(const Camera& cam,
                                                        int width, int height,
                                                        const Vec3& p);

}  // namespace aleph
