#pragma once

#include "pixgrasp/geometry.hpp"
#include "pixgrasp/mesh.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace pixgrasp {

struct SceneObject {
    TriangleMesh mesh;
    Pose pose;  // local -> world
};

/// Immutable collection of posed meshes plus an optional analytic ground plane
/// at world z = 0.
class Scene {
public:
    Scene() = default;
    Scene(std::vector<SceneObject> objects, bool has_ground_plane);

    const std::vector<SceneObject>& objects() const { return objects_; }
    bool has_ground_plane() const { return ground_; }
    bool contains_object(ObjectId id) const;
    bool empty() const { return objects_.empty() && !ground_; }

    /// Every object pose premultiplied by `motion`. The ground plane stays at
    /// z = 0, so only motions that preserve it (XY translation, yaw) keep the
    /// scene physically equivalent.
    Scene transformed(const Pose& motion) const;

private:
    std::vector<SceneObject> objects_;
    bool ground_ = false;
};

struct RayHit {
    double t = 0.0;
    Vec3 point = Vec3::Zero();
    Vec3 face_normal = Vec3::Zero();  // unit, faces the ray origin
    ObjectId object_id = kBackgroundId;
    int triangle_index = -1;          // index into the object's mesh; -1 for ground
    bool front_face = true;           // ray enters through the outward side
};

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    void grow(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void grow(const Aabb& b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool valid() const { return (lo.array() <= hi.array()).all(); }
    bool overlaps(const Aabb& b) const {
        return (lo.array() <= b.hi.array()).all() && (b.lo.array() <= hi.array()).all();
    }
    double half_area() const {
        if (!valid()) return 0.0;
        const Vec3 d = hi - lo;
        return d.x() * d.y() + d.y() * d.z() + d.z() * d.x();
    }
    Vec3 center() const { return 0.5 * (lo + hi); }
};

/// Oriented box: center, axes (columns are unit axes), half extents.
struct OrientedBox {
    Vec3 center = Vec3::Zero();
    Mat3 axes = Mat3::Identity();
    Vec3 half_extents = Vec3::Zero();

    Aabb bounds() const;
    Vec3 corner(int i) const;
};

/// World-space triangle soup with a bounding volume hierarchy (binned SAH,
/// at most four triangles per leaf).
class AcceleratedScene {
public:
    static constexpr int kMaxLeafSize = 4;

    /// Throws ValidationError when the scene has neither meshes nor a ground plane.
    explicit AcceleratedScene(Scene scene);

    const Scene& scene() const { return scene_; }
    std::size_t triangle_count() const { return tris_.size(); }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t leaf_count() const;
    Aabb object_bounds(ObjectId id) const;

    /// Nearest hit with t in (0, t_max). Ties in t resolve to the smaller
    /// (object_id, triangle_index). `only` restricts to one object id.
    std::optional<RayHit> raycast(const Ray& ray,
                                  double t_max = std::numeric_limits<double>::infinity(),
                                  std::optional<ObjectId> only = std::nullopt) const;

    /// Same contract as raycast, testing every triangle without the hierarchy.
    std::optional<RayHit> raycast_brute_force(
        const Ray& ray, double t_max = std::numeric_limits<double>::infinity(),
        std::optional<ObjectId> only = std::nullopt) const;

    /// All mesh hits of one object along the ray, sorted by t. Coincident hits
    /// with the same facing (a ray through a shared edge) are reported once.
    std::vector<RayHit> intersect_all(const Ray& ray, ObjectId id,
                                      double t_max = std::numeric_limits<double>::infinity()) const;

    /// Point-in-solid test for a closed, outward-wound object.
    bool contains(const Vec3& p, ObjectId id) const;

    /// Unsigned distance from p to the object's surface.
    double distance_to_surface(const Vec3& p, ObjectId id) const;

    /// True when any triangle of `id` overlaps the oriented box.
    bool box_touches_surface(const OrientedBox& box, ObjectId id) const;

private:
    struct Tri {
        Vec3 v0, v1, v2;
        ObjectId object_id;
        int local_index;
    };
    struct Node {
        Aabb box;
        int left = -1;  // interior: child indices; leaf: -1
        int right = -1;
        int first = 0;  // leaf: range into tris_
        int count = 0;
    };
    struct BuildPrim {
        Aabb box;
        Vec3 centroid;
        int tri;
    };

    int build(std::vector<BuildPrim>& prims, int first, int count);

    Scene scene_;
    std::vector<Tri> tris_;
    std::vector<Node> nodes_;
};

/// True if `a` should replace `b` as the nearest hit.
bool hit_precedes(const RayHit& a, const RayHit& b);

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Separating-axis overlap test between a triangle and an oriented box.
bool triangle_overlaps_box(const Vec3& a, const Vec3& b, const Vec3& c, const OrientedBox& box);

}  // namespace pixgrasp
