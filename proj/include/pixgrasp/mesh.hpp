#pragma once

#include "pixgrasp/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace pixgrasp {

using ObjectId = std::int32_t;

/// Segmentation value for background pixels. Mesh objects use ids in [1, kGroundObjectId).
inline constexpr ObjectId kBackgroundId = 0;
/// Reserved id reported for hits on the analytic ground plane.
inline constexpr ObjectId kGroundObjectId = 65535;

using TriangleIndices = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh in its local frame. Construction validates indices
/// and drops zero-area triangles; the object is immutable afterwards.
class TriangleMesh {
public:
    TriangleMesh() = default;
    TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles,
                 ObjectId object_id = 1);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<TriangleIndices>& triangles() const { return triangles_; }
    ObjectId object_id() const { return object_id_; }
    std::size_t dropped_degenerate() const { return dropped_; }

    TriangleMesh with_object_id(ObjectId id) const;

    double surface_area() const;
    std::size_t edge_count() const;
    /// V - E + F.
    long euler_characteristic() const;
    /// Every undirected edge is shared by exactly two triangles.
    bool is_watertight() const;

private:
    std::vector<Vec3> vertices_;
    std::vector<TriangleIndices> triangles_;
    ObjectId object_id_ = 1;
    std::size_t dropped_ = 0;
};

enum class PrimitiveKind { Sphere, Cylinder, Box, Plane };

PrimitiveKind parse_primitive_kind(const std::string& name);

/// Primitive generator. Dimensions (meters):
///   sphere   {radius}
///   cylinder {radius, height}   axis along local +Z, centered at the origin
///   box      {size_x, size_y, size_z}
///   plane    {size_x, size_y}   single rectangle in local XY, normal +Z
/// `tessellation` is the number of segments around curved primitives (>= 3);
/// the sphere uses tessellation / 2 latitude bands. Winding is outward (CCW).
TriangleMesh make_primitive(PrimitiveKind kind, const std::vector<double>& dimensions,
                            int tessellation = 64, ObjectId object_id = 1);

/// Wavefront OBJ: `v` and triangular `f` records; everything else is ignored.
TriangleMesh load_obj(const std::filesystem::path& path, ObjectId object_id = 1);

}  // namespace pixgrasp
