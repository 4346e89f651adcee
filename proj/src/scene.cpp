#include "aleph/scene.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aleph {

Mat4 Mat4::inverse() const {
    // Invert the 3x3 block, then the translation.
    const double a = m[0][0], b = m[0][1], c = m[0][2];
    const double d = m[1][0], e = m[1][1], f = m[1][2];
    const double g = m[2][0], h = m[2][1], i = m[2][2];
    const double det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    if (std::abs(det) < 1e-12)
        throw std::runtime_error("Mat4::inverse: singular transform");
    const double s = 1.0 / det;
    Mat4 r;
    r.m[0][0] = (e * i - f * h) * s;
    r.m[0][1] = (c * h - b * i) * s;
    r.m[0][2] = (b * f - c * e) * s;
    r.m[1][0] = (f * g - d * i) * s;
    r.m[1][1] = (a * i - c * g) * s;
    r.m[1][2] = (c * d - a * f) * s;
    r.m[2][0] = (d * h - e * g) * s;
    r.m[2][1] = (b * g - a * h) * s;
    r.m[2][2] = (a * e - b * d) * s;
    const Vec3 t{m[0][3], m[1][3], m[2][3]};
    const Vec3 it = r.vector(t);
    r.m[0][3] = -it.x;
    r.m[1][3] = -it.y;
    r.m[2][3] = -it.z;
    return r;
}

namespace {
const Mat4 kIdentity = Mat4::identity();
}

const Mat4& Primitive::xform_at(int frame) const {
    if (xforms.empty()) return kIdentity;
    auto it = xforms.find(frame);
    if (it == xforms.end())
        throw std::runtime_error("scene: primitive has no transform for frame " +
                                 std::to_string(frame));
    return it->second;
}

double Primitive::area() const {
    if (kind == Kind::Tri)
        return 0.5 * (v1 - v0).cross(v2 - v0).length();
    return 4.0 * M_PI * radius * radius;
}

const Camera& Scene::camera_at(int frame) const {
    auto it = cameras.find(frame);
    if (it == cameras.end())
        throw std::runtime_error("scene: no camera for frame " + std::to_string(frame));
    return it->second;
}

void Scene::bounding_sphere(int frame, Vec3& center, double& radius) const {
    Vec3 lo{1e30, 1e30, 1e30}, hi{-1e30, -1e30, -1e30};
    auto grow = [&](const Vec3& p) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    };
    for (const auto& pr : prims) {
        const Mat4& xf = pr.xform_at(frame);
        if (pr.kind == Primitive::Kind::Tri) {
            grow(xf.point(pr.v0));
            grow(xf.point(pr.v1));
            grow(xf.point(pr.v2));
        } else {
            const Vec3 c = xf.point(pr.center);
            grow(c + Vec3{pr.radius, pr.radius, pr.radius});
            grow(c - Vec3{pr.radius, pr.radius, pr.radius});
        }
    }
    center = (lo + hi) * 0.5;
    radius = (hi - lo).length() * 0.5;
    if (radius <= 0) radius = 1.0;
}

namespace {

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

double want_num(std::istringstream& ss, const std::string& name, int line) {
    double v;
    if (!(ss >> v)) parse_fail(name, line, "expected a number");
    return v;
}

Vec3 want_vec(std::istringstream& ss, const std::string& name, int line) {
    Vec3 v;
    v.x = want_num(ss, name, line);
    v.y = want_num(ss, name, line);
    v.z = want_num(ss, name, line);
    return v;
}

}  // namespace

Scene parse_scene(const std::string& text, const std::string& name) {
    Scene sc;
    std::map<std::string, int> mat_index;
    auto find_mat = [&](const std::string& m, int line) {
        auto it = mat_index.find(m);
        if (it == mat_index.end()) parse_fail(name, line, "unknown material '" + m + "'");
        return it->second;
    };

    std::istringstream in(text);
    std::string line_text;
    int line = 0;
    while (std::getline(in, line_text)) {
        ++line;
        const auto hash = line_text.find('#');
        if (hash != std::string::npos) line_text.erase(hash);
        std::istringstream ss(line_text);
        std::string kw;
        if (!(ss >> kw)) continue;

        if (kw == "mat") {
            Material m;
            if (!(ss >> m.name)) parse_fail(name, line, "mat needs a name");
            m.diffuse = want_vec(ss, name, line);
            std::string opt;
            if (ss >> opt) {
                if (opt != "glossy") parse_fail(name, line, "unknown mat option '" + opt + "'");
                m.glossy = want_vec(ss, name, line);
                m.gloss_exp = want_num(ss, name, line);
                if (m.gloss_exp <= 0) parse_fail(name, line, "glossy exponent must be > 0");
            }
            mat_index[m.name] = int(sc.materials.size());
            sc.materials.push_back(m);
        } else if (kw == "light") {
            Material m;
            if (!(ss >> m.name)) parse_fail(name, line, "light needs a name");
            m.emission = want_vec(ss, name, line);
            mat_index[m.name] = int(sc.materials.size());
            sc.materials.push_back(m);
        } else if (kw == "tri") {
            std::string m;
            if (!(ss >> m)) parse_fail(name, line, "tri needs a material");
            Primitive p;
            p.kind = Primitive::Kind::Tri;
            p.material = find_mat(m, line);
            p.v0 = want_vec(ss, name, line);
            p.v1 = want_vec(ss, name, line);
            p.v2 = want_vec(ss, name, line);
            sc.prims.push_back(p);
        } else if (kw == "sphere") {
            std::string m;
            if (!(ss >> m)) parse_fail(name, line, "sphere needs a material");
            Primitive p;
            p.kind = Primitive::Kind::Sphere;
            p.material = find_mat(m, line);
            p.center = want_vec(ss, name, line);
            p.radius = want_num(ss, name, line);
            if (p.radius <= 0) parse_fail(name, line, "sphere radius must be > 0");
            sc.prims.push_back(p);
        } else if (kw == "camera") {
            const int frame = int(want_num(ss, name, line));
            Camera c;
            c.eye = want_vec(ss, name, line);
            c.target = want_vec(ss, name, line);
            c.up = want_vec(ss, name, line);
            c.vfov_deg = want_num(ss, name, line);
            if (c.vfov_deg <= 0 || c.vfov_deg >= 180)
                parse_fail(name, line, "vfov out of range");
            sc.cameras[frame] = c;
        } else if (kw == "xform") {
            const int frame = int(want_num(ss, name, line));
            const int prim = int(want_num(ss, name, line));
            if (prim < 0 || prim >= int(sc.prims.size()))
                parse_fail(name, line, "xform refers to primitive " + std::to_string(prim) +
                                           " which is not defined yet");
            Mat4 xf;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) xf.m[r][c] = want_num(ss, name, line);
            sc.prims[prim].xforms[frame] = xf;
        } else {
            parse_fail(name, line, "unknown directive '" + kw + "'");
        }
    }
    if (sc.prims.empty()) throw std::runtime_error(name + ": scene has no primitives");
    return sc;
}

Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str(), path);
}

FrameScene prepare_frame(const Scene& scene, int frame) {
    FrameScene fs;
    fs.scene = &scene;
    fs.frame = frame;
    fs.world.reserve(scene.prims.size());
    for (const auto& pr : scene.prims) {
        const Mat4& xf = pr.xform_at(frame);
        FrameScene::WorldPrim wp;
        if (pr.kind == Primitive::Kind::Tri) {
            wp.v0 = xf.point(pr.v0);
            wp.v1 = xf.point(pr.v1);
            wp.v2 = xf.point(pr.v2);
        } else {
            wp.center = xf.point(pr.center);
            wp.radius = pr.radius;
        }
        fs.world.push_back(wp);
    }
    return fs;
}

namespace {

bool hit_tri(const FrameScene::WorldPrim& w, const Ray& r, double tmin, double tmax,
             double& t, double& u, double& v) {
    const Vec3 e1 = w.v1 - w.v0, e2 = w.v2 - w.v0;
    const Vec3 p = r.dir.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const Vec3 s = r.orig - w.v0;
    u = s.dot(p) * inv;
    if (u < 0 || u > 1) return false;
    const Vec3 q = s.cross(e1);
    v = r.dir.dot(q) * inv;
    if (v < 0 || u + v > 1) return false;
    t = e2.dot(q) * inv;
    return t > tmin && t < tmax;
}

bool hit_sphere(const FrameScene::WorldPrim& w, const Ray& r, double tmin, double tmax,
                double& t) {
    const Vec3 oc = r.orig - w.center;
    const double b = oc.dot(r.dir);
    const double c = oc.dot(oc) - w.radius * w.radius;
    const double disc = b * b - c;
    if (disc < 0) return false;
    const double sq = std::sqrt(disc);
    t = -b - sq;
    if (t <= tmin) t = -b + sq;
    return t > tmin && t < tmax;
}

}  // namespace

std::optional<Hit> intersect(const FrameScene& fs, const Ray& ray, double tmin,
                             double tmax, int skip_prim) {
    Hit best;
    best.t = tmax;
    for (int i = 0; i < int(fs.world.size()); ++i) {
        if (i == skip_prim) continue;
        const auto& pr = fs.scene->prims[i];
        const auto& w = fs.world[i];
        double t, u = 0, v = 0;
        bool ok = false;
        if (pr.kind == Primitive::Kind::Tri)
            ok = hit_tri(w, ray, tmin, best.t, t, u, v);
        else
            ok = hit_sphere(w, ray, tmin, best.t, t);
        if (ok) {
            best.prim = i;
            best.t = t;
            best.u = u;
            best.v = v;
        }
    }
    if (best.prim < 0) return std::nullopt;

    best.pos = ray.orig + ray.dir * best.t;
    const auto& pr = fs.scene->prims[best.prim];
    const auto& w = fs.world[best.prim];
    Vec3 n;
    if (pr.kind == Primitive::Kind::Tri)
        n = (w.v1 - w.v0).cross(w.v2 - w.v0).normalized();
    else
        n = (best.pos - w.center).normalized();
    if (n.dot(ray.dir) > 0) n = n * -1.0;
    best.normal = n;
    return best;
}

bool occluded(const FrameScene& fs, const Ray& ray, double tmax, int skip_a,
              int skip_b) {
    for (int i = 0; i < int(fs.world.size()); ++i) {
        if (i == skip_a || i == skip_b) continue;
        const auto& pr = fs.scene->prims[i];
        const auto& w = fs.world[i];
        double t, u, v;
        if (pr.kind == Primitive::Kind::Tri) {
            if (hit_tri(w, ray, 1e-6, tmax, t, u, v)) return true;
        } else {
            if (hit_sphere(w, ray, 1e-6, tmax, t)) return true;
        }
    }
    return false;
}

Vec3 Hit::obj_pos(const Scene& scene, int frame) const {
    const auto& pr = scene.prims[prim];
    if (pr.kind == Primitive::Kind::Tri)
        return pr.v0 * (1.0 - u - v) + pr.v1 * u + pr.v2 * v;
    return pr.xform_at(frame).inverse().point(pos);
}

Ray camera_ray(const Camera& cam, int width, int height, double px, double py) {
    const Vec3 f = (cam.target - cam.eye).normalized();
    const Vec3 r = f.cross(cam.up).normalized();
    const Vec3 u = r.cross(f);
    const double th = std::tan(cam.vfov_deg * M_PI / 360.0);
    const double aspect = double(width) / double(height);
    const double nx = ((px + 0.5) / width * 2.0 - 1.0) * th * aspect;
    const double ny = (1.0 - (py + 0.5) / height * 2.0) * th;
    return {cam.eye, (f + r * nx + u * ny).normalized()};
}

std::optional<std::pair<double, double>> camera_project(const Camera& cam, int width,
                                                        int height, const Vec3& p) {
    const Vec3 f = (cam.target - cam.eye).normalized();
    const Vec3 r = f.cross(cam.up).normalized();
    const Vec3 u = r.cross(f);
    const double th = std::tan(cam.vfov_deg * M_PI / 360.0);
    const double aspect = double(width) / double(height);
    const Vec3 d = p - cam.eye;
    const double z = d.dot(f);
    if (z <= 1e-12) return std::nullopt;
    const double nx = d.dot(r) / (z * th * aspect);
    const double ny = d.dot(u) / (z * th);
    const double px = (nx + 1.0) / 2.0 * width - 0.5;
    const double py = (1.0 - ny) / 2.0 * height - 0.5;
    return std::make_pair(px, py);
}

}  // namespace aleph
