#include "pixgrasp/accel.hpp"

#include "pixgrasp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

namespace pixgrasp {

namespace {

constexpr int kBins = 12;
constexpr double kDetEpsilon = 1e-12;
// Node boxes are padded so that rounding in the slab test can never cull a
// triangle the exhaustive search would hit.
constexpr double kBoxPad = 1e-9;

/// Per-ray constants for the watertight ray/triangle test.
struct RayPre {
    int kx, ky, kz;
    double sx, sy, sz;
    Vec3 inv_dir;

    explicit RayPre(const Ray& ray) {
        const Vec3 a = ray.direction.cwiseAbs();
        kz = a.x() > a.y() ? (a.x() > a.z() ? 0 : 2) : (a.y() > a.z() ? 1 : 2);
        kx = (kz + 1) % 3;
        ky = (kx + 1) % 3;
        if (ray.direction[kz] < 0.0) std::swap(kx, ky);
        sx = ray.direction[kx] / ray.direction[kz];
        sy = ray.direction[ky] / ray.direction[kz];
        sz = 1.0 / ray.direction[kz];
        inv_dir = ray.direction.cwiseInverse();
    }
};

struct TriHit {
    double t;
    bool front;
};

/// Watertight intersection (sheared ray space). Edge hits are accepted by
/// both adjacent triangles; parallel rays (|det| < 1e-12) miss.
bool intersect_triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2, const Ray& ray,
                        const RayPre& pre, double t_max, TriHit& out) {
    const Vec3 a = v0 - ray.origin;
    const Vec3 b = v1 - ray.origin;
    const Vec3 c = v2 - ray.origin;
    const double ax = a[pre.kx] - pre.sx * a[pre.kz];
    const double ay = a[pre.ky] - pre.sy * a[pre.kz];
    const double bx = b[pre.kx] - pre.sx * b[pre.kz];
    const double by = b[pre.ky] - pre.sy * b[pre.kz];
    const double cx = c[pre.kx] - pre.sx * c[pre.kz];
    const double cy = c[pre.ky] - pre.sy * c[pre.kz];
    const double u = cx * by - cy * bx;
    const double v = ax * cy - ay * cx;
    const double w = bx * ay - by * ax;
    if ((u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0)) return false;
    const double det = u + v + w;
    if (std::abs(det) < kDetEpsilon) return false;
    const double az = pre.sz * a[pre.kz];
    const double bz = pre.sz * b[pre.kz];
    const double cz = pre.sz * c[pre.kz];
    const double t = (u * az + v * bz + w * cz) / det;
    if (!(t > 0.0) || !(t < t_max)) return false;
    out.t = t;
    // Outward normal is (v1-v0)x(v2-v0); the ray enters when it opposes it.
    out.front = ((v1 - v0).cross(v2 - v0)).dot(ray.direction) < 0.0;
    return true;
}

constexpr double kMiss = std::numeric_limits<double>::infinity();

/// Slab test; returns the entry distance (never beyond t_max) or kMiss. With
/// t_max = inf a hit and a miss must still be told apart, so callers compare
/// against kMiss rather than against t_max.
double slab_entry(const Aabb& box, const Ray& ray, const Vec3& inv_dir, double t_max) {
    double t0 = 0.0, t1 = t_max;
    for (int k = 0; k < 3; ++k) {
        double tn = (box.lo[k] - ray.origin[k]) * inv_dir[k];
        double tf = (box.hi[k] - ray.origin[k]) * inv_dir[k];
        if (std::isnan(tn) || std::isnan(tf)) {
            // Direction component is zero and the origin lies on a slab plane.
            if (ray.origin[k] < box.lo[k] || ray.origin[k] > box.hi[k]) {
                return kMiss;
            }
            continue;
        }
        if (tn > tf) std::swap(tn, tf);
        t0 = std::max(t0, tn);
        t1 = std::min(t1, tf);
        if (t0 > t1) return kMiss;
    }
    return t0;
}

Aabb padded(Aabb b) {
    b.lo.array() -= kBoxPad;
    b.hi.array() += kBoxPad;
    return b;
}

double box_distance_sq(const Aabb& b, const Vec3& p) {
    const Vec3 d = (b.lo - p).cwiseMax(Vec3::Zero()).cwiseMax(p - b.hi);
    return d.squaredNorm();
}

RayHit make_hit(const Ray& ray, double t, const Vec3& geometric_normal, bool front, ObjectId id,
                int tri_index) {
    RayHit hit;
    hit.t = t;
    hit.point = ray.at(t);
    const Vec3 n = geometric_normal.normalized();
    hit.face_normal = front ? n : Vec3(-n);
    hit.object_id = id;
    hit.triangle_index = tri_index;
    hit.front_face = front;
    return hit;
}

}  // namespace

bool hit_precedes(const RayHit& a, const RayHit& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.object_id != b.object_id) return a.object_id < b.object_id;
    return a.triangle_index < b.triangle_index;
}

// ---------------------------------------------------------------------------
// Scene

Scene::Scene(std::vector<SceneObject> objects, bool has_ground_plane)
    : objects_(std::move(objects)), ground_(has_ground_plane) {
    std::set<ObjectId> ids;
    for (const auto& o : objects_) {
        if (!ids.insert(o.mesh.object_id()).second) {
            throw ValidationError("scene object ids must be unique (duplicate " +
                                  std::to_string(o.mesh.object_id()) + ")");
        }
    }
}

bool Scene::contains_object(ObjectId id) const {
    return std::any_of(objects_.begin(), objects_.end(),
                       [id](const SceneObject& o) { return o.mesh.object_id() == id; });
}

Scene Scene::transformed(const Pose& motion) const {
    std::vector<SceneObject> moved = objects_;
    for (auto& o : moved) o.pose = motion.compose(o.pose);
    return Scene(std::move(moved), ground_);
}

// ---------------------------------------------------------------------------
// OrientedBox

Vec3 OrientedBox::corner(int i) const {
    const Vec3 s((i & 1) ? 1.0 : -1.0, (i & 2) ? 1.0 : -1.0, (i & 4) ? 1.0 : -1.0);
    return center + axes * s.cwiseProduct(half_extents);
}

Aabb OrientedBox::bounds() const {
    Aabb b;
    for (int i = 0; i < 8; ++i) b.grow(corner(i));
    return b;
}

// ---------------------------------------------------------------------------
// AcceleratedScene

AcceleratedScene::AcceleratedScene(Scene scene) : scene_(std::move(scene)) {
    if (scene_.empty()) throw ValidationError("cannot accelerate an empty scene");

    std::vector<Tri> world;
    for (const auto& obj : scene_.objects()) {
        const auto& verts = obj.mesh.vertices();
        std::vector<Vec3> wv(verts.size());
        for (std::size_t i = 0; i < verts.size(); ++i) wv[i] = obj.pose.transform_point(verts[i]);
        const auto& tris = obj.mesh.triangles();
        for (std::size_t i = 0; i < tris.size(); ++i) {
            const auto& t = tris[i];
            world.push_back({wv[t[0]], wv[t[1]], wv[t[2]], obj.mesh.object_id(), static_cast<int>(i)});
        }
    }
    if (world.empty()) return;  // ground plane only

    std::vector<BuildPrim> prims(world.size());
    for (std::size_t i = 0; i < world.size(); ++i) {
        Aabb b;
        b.grow(world[i].v0);
        b.grow(world[i].v1);
        b.grow(world[i].v2);
        prims[i] = {b, b.center(), static_cast<int>(i)};
    }
    nodes_.reserve(2 * world.size());
    build(prims, 0, static_cast<int>(prims.size()));
    tris_.reserve(world.size());
    for (const auto& p : prims) tris_.push_back(world[p.tri]);
}

int AcceleratedScene::build(std::vector<BuildPrim>& prims, int first, int count) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Aabb box, cbox;
    for (int i = first; i < first + count; ++i) {
        box.grow(prims[i].box);
        cbox.grow(prims[i].centroid);
    }
    nodes_[index].box = padded(box);

    auto make_leaf = [&] {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    };
    if (count <= kMaxLeafSize) return make_leaf();

    const Vec3 extent = cbox.hi - cbox.lo;
    int axis = 0;
    if (extent.y() > extent[axis]) axis = 1;
    if (extent.z() > extent[axis]) axis = 2;

    int mid = first + count / 2;
    if (extent[axis] > 0.0) {
        struct Bin {
            Aabb box;
            int count = 0;
        };
        std::array<Bin, kBins> bins{};
        const double scale = kBins / extent[axis];
        auto bin_of = [&](const BuildPrim& p) {
            return std::min(kBins - 1, static_cast<int>((p.centroid[axis] - cbox.lo[axis]) * scale));
        };
        for (int i = first; i < first + count; ++i) {
            Bin& b = bins[bin_of(prims[i])];
            b.box.grow(prims[i].box);
            ++b.count;
        }
        std::array<double, kBins - 1> cost{};
        Aabb acc;
        int n = 0;
        for (int i = 0; i < kBins - 1; ++i) {
            acc.grow(bins[i].box);
            n += bins[i].count;
            cost[i] = n * acc.half_area();
        }
        acc = Aabb{};
        n = 0;
        for (int i = kBins - 1; i > 0; --i) {
            acc.grow(bins[i].box);
            n += bins[i].count;
            cost[i - 1] += n * acc.half_area();
        }
        const int best = static_cast<int>(std::min_element(cost.begin(), cost.end()) - cost.begin());
        auto it = std::partition(prims.begin() + first, prims.begin() + first + count,
                                 [&](const BuildPrim& p) { return bin_of(p) <= best; });
        mid = static_cast<int>(it - prims.begin());
    }
    if (mid == first || mid == first + count) {
        // Degenerate split (coincident centroids): fall back to a median split.
        mid = first + count / 2;
        std::nth_element(prims.begin() + first, prims.begin() + mid, prims.begin() + first + count,
                         [&](const BuildPrim& a, const BuildPrim& b) {
                             if (a.centroid[axis] != b.centroid[axis]) return a.centroid[axis] < b.centroid[axis];
                             return a.tri < b.tri;
                         });
    }
    const int left = build(prims, first, mid - first);
    const int right = build(prims, mid, first + count - mid);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

std::size_t AcceleratedScene::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.left < 0; }));
}

Aabb AcceleratedScene::object_bounds(ObjectId id) const {
    Aabb b;
    for (const auto& t : tris_) {
        if (t.object_id != id) continue;
        b.grow(t.v0);
        b.grow(t.v1);
        b.grow(t.v2);
    }
    return b;
}

std::optional<RayHit> AcceleratedScene::raycast(const Ray& ray, double t_max,
                                                std::optional<ObjectId> only) const {
    std::optional<RayHit> best;
    const RayPre pre(ray);
    double limit = t_max;

    auto consider = [&](const Tri& tri) {
        if (only && tri.object_id != *only) return;
        TriHit th;
        // Accept t equal to the current best so ties are resolved by id, as in the
        // exhaustive search.
        const double bound = best ? std::nextafter(best->t, INFINITY) : t_max;
        if (!intersect_triangle(tri.v0, tri.v1, tri.v2, ray, pre, bound, th)) return;
        RayHit cand;
        cand.t = th.t;
        cand.object_id = tri.object_id;
        cand.triangle_index = tri.local_index;
        if (best && !hit_precedes(cand, *best)) return;
        best = make_hit(ray, th.t, (tri.v1 - tri.v0).cross(tri.v2 - tri.v0), th.front, tri.object_id,
                        tri.local_index);
        limit = th.t;
    };

    if (!nodes_.empty()) {
        int stack[256];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const Node& node = nodes_[stack[--sp]];
            if (slab_entry(node.box, ray, pre.inv_dir, limit) == kMiss) continue;
            if (node.left < 0) {
                for (int i = node.first; i < node.first + node.count; ++i) consider(tris_[i]);
                continue;
            }
            const double dl = slab_entry(nodes_[node.left].box, ray, pre.inv_dir, limit);
            const double dr = slab_entry(nodes_[node.right].box, ray, pre.inv_dir, limit);
            // Push the farther child first so the nearer one is visited next.
            if (dl <= dr) {
                if (dr != kMiss) stack[sp++] = node.right;
                if (dl != kMiss) stack[sp++] = node.left;
            } else {
                if (dl != kMiss) stack[sp++] = node.left;
                if (dr != kMiss) stack[sp++] = node.right;
            }
        }
    }

    if (scene_.has_ground_plane() && (!only || *only == kGroundObjectId) && ray.direction.z() != 0.0) {
        const double t = -ray.origin.z() / ray.direction.z();
        if (t > 0.0 && t < t_max) {
            RayHit cand;
            cand.t = t;
            cand.object_id = kGroundObjectId;
            cand.triangle_index = -1;
            if (!best || hit_precedes(cand, *best)) {
                const bool from_above = ray.direction.z() < 0.0;
                best = make_hit(ray, t, Vec3(0.0, 0.0, 1.0), from_above, kGroundObjectId, -1);
                best->point.z() = 0.0;
            }
        }
    }
    return best;
}

std::optional<RayHit> AcceleratedScene::raycast_brute_force(const Ray& ray, double t_max,
                                                            std::optional<ObjectId> only) const {
    std::optional<RayHit> best;
    const RayPre pre(ray);
    for (const auto& tri : tris_) {
        if (only && tri.object_id != *only) continue;
        TriHit th;
        if (!intersect_triangle(tri.v0, tri.v1, tri.v2, ray, pre, t_max, th)) continue;
        RayHit cand;
        cand.t = th.t;
        cand.object_id = tri.object_id;
        cand.triangle_index = tri.local_index;
        if (best && !hit_precedes(cand, *best)) continue;
        best = make_hit(ray, th.t, (tri.v1 - tri.v0).cross(tri.v2 - tri.v0), th.front, tri.object_id,
                        tri.local_index);
    }
    if (scene_.has_ground_plane() && (!only || *only == kGroundObjectId) && ray.direction.z() != 0.0) {
        const double t = -ray.origin.z() / ray.direction.z();
        if (t > 0.0 && t < t_max) {
            RayHit cand;
            cand.t = t;
            cand.object_id = kGroundObjectId;
            if (!best || hit_precedes(cand, *best)) {
                best = make_hit(ray, t, Vec3(0.0, 0.0, 1.0), ray.direction.z() < 0.0, kGroundObjectId, -1);
                best->point.z() = 0.0;
            }
        }
    }
    return best;
}

std::vector<RayHit> AcceleratedScene::intersect_all(const Ray& ray, ObjectId id, double t_max) const {
    std::vector<RayHit> hits;
    if (nodes_.empty()) return hits;
    const RayPre pre(ray);
    int stack[256];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (slab_entry(node.box, ray, pre.inv_dir, t_max) == kMiss) continue;
        if (node.left >= 0) {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
            continue;
        }
        for (int i = node.first; i < node.first + node.count; ++i) {
            const Tri& tri = tris_[i];
            if (tri.object_id != id) continue;
            TriHit th;
            if (!intersect_triangle(tri.v0, tri.v1, tri.v2, ray, pre, t_max, th)) continue;
            hits.push_back(make_hit(ray, th.t, (tri.v1 - tri.v0).cross(tri.v2 - tri.v0), th.front,
                                    tri.object_id, tri.local_index));
        }
    }
    std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
        if (a.t != b.t) return a.t < b.t;
        if (a.front_face != b.front_face) return a.front_face;
        return a.triangle_index < b.triangle_index;
    });
    std::vector<RayHit> unique;
    unique.reserve(hits.size());
    for (const auto& h : hits) {
        if (!unique.empty() && unique.back().front_face == h.front_face &&
            std::abs(unique.back().t - h.t) <= 1e-12 * std::max(1.0, h.t)) {
            continue;
        }
        unique.push_back(h);
    }
    return unique;
}

bool AcceleratedScene::contains(const Vec3& p, ObjectId id) const {
    // Fixed, axis-free direction keeps edge and vertex crossings unlikely.
    static const Vec3 kDir = Vec3(0.5421, 0.6123, 0.5754).normalized();
    const auto hits = intersect_all(Ray{p, kDir}, id);
    int net = 0;
    for (const auto& h : hits) net += h.front_face ? -1 : 1;
    return net > 0;
}

double AcceleratedScene::distance_to_surface(const Vec3& p, ObjectId id) const {
    double best_sq = std::numeric_limits<double>::infinity();
    if (nodes_.empty()) return best_sq;
    int stack[256];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (box_distance_sq(node.box, p) >= best_sq) continue;
        if (node.left >= 0) {
            const double dl = box_distance_sq(nodes_[node.left].box, p);
            const double dr = box_distance_sq(nodes_[node.right].box, p);
            if (dl <= dr) {
                stack[sp++] = node.right;
                stack[sp++] = node.left;
            } else {
                stack[sp++] = node.left;
                stack[sp++] = node.right;
            }
            continue;
        }
        for (int i = node.first; i < node.first + node.count; ++i) {
            const Tri& tri = tris_[i];
            if (tri.object_id != id) continue;
            best_sq = std::min(best_sq, (closest_point_on_triangle(p, tri.v0, tri.v1, tri.v2) - p).squaredNorm());
        }
    }
    return std::sqrt(best_sq);
}

bool AcceleratedScene::box_touches_surface(const OrientedBox& box, ObjectId id) const {
    if (nodes_.empty()) return false;
    const Aabb query = box.bounds();
    int stack[256];
    int sp = 0;
    stack[sp++] = 0;
    while (sp > 0) {
        const Node& node = nodes_[stack[--sp]];
        if (!node.box.overlaps(query)) continue;
        if (node.left >= 0) {
            stack[sp++] = node.left;
            stack[sp++] = node.right;
            continue;
        }
        for (int i = node.first; i < node.first + node.count; ++i) {
            const Tri& tri = tris_[i];
            if (tri.object_id == id && triangle_overlaps_box(tri.v0, tri.v1, tri.v2, box)) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Free helpers

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;
    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;
    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;
    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
    }
    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

bool triangle_overlaps_box(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box) {
    const Mat3 rt = box.axes.transpose();
    const std::array<Vec3, 3> v{rt * (a - box.center), rt * (b - box.center), rt * (c - box.center)};
    const Vec3& h = box.half_extents;
    auto separated = [&](const Vec3& axis) {
        if (axis.squaredNorm() < 1e-24) return false;
        const double p0 = v[0].dot(axis), p1 = v[1].dot(axis), p2 = v[2].dot(axis);
        const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) + h.z() * std::abs(axis.z());
        return std::max({p0, p1, p2}) < -r || std::min({p0, p1, p2}) > r;
    };
    for (int k = 0; k < 3; ++k) {
        if (separated(Vec3::Unit(k))) return false;
    }
    const std::array<Vec3, 3> e{v[1] - v[0], v[2] - v[1], v[0] - v[2]};
    if (separated(e[0].cross(e[1]))) return false;
    for (const auto& edge : e) {
        for (int k = 0; k < 3; ++k) {
            if (separated(Vec3::Unit(k).cross(edge))) return false;
        }
    }
    return true;
}

}  // namespace pixgrasp
