#include "pixgrasp/errors.hpp"
#include "pixgrasp/mesh.hpp"

#include "support.hpp"

#include <fstream>

using namespace pixgrasp;

namespace {

// Divergence theorem: sum of signed tetra volumes; positive for outward winding.
double signed_volume(const TriangleMesh& m) {
    double v = 0.0;
    for (const auto& t : m.triangles()) {
        v += m.vertices()[t[0]].dot(m.vertices()[t[1]].cross(m.vertices()[t[2]])) / 6.0;
    }
    return v;
}

}  // namespace

TEST(Mesh, ClosedPrimitivesAreWatertightSpheres) {
    for (const auto& [kind, dims] : std::vector<std::pair<PrimitiveKind, std::vector<double>>>{
             {PrimitiveKind::Sphere, {0.5}}, {PrimitiveKind::Cylinder, {0.04, 0.3}}, {PrimitiveKind::Box, {1, 2, 3}}}) {
        const TriangleMesh m = make_primitive(kind, dims, 32);
        EXPECT_TRUE(m.is_watertight());
        EXPECT_EQ(m.euler_characteristic(), 2);
        EXPECT_GT(signed_volume(m), 0.0);
        EXPECT_EQ(m.dropped_degenerate(), 0u);
    }
}

TEST(Mesh, VolumesAndAreasConvergeToAnalytic) {
    const double pi = std::numbers::pi;
    const TriangleMesh s = make_primitive(PrimitiveKind::Sphere, {1.0}, 256);
    EXPECT_NEAR(signed_volume(s), 4.0 / 3.0 * pi, 4.0 / 3.0 * pi * 1e-3);
    EXPECT_NEAR(s.surface_area(), 4.0 * pi, 4.0 * pi * 1e-3);

    const int n = 64;
    const TriangleMesh c = make_primitive(PrimitiveKind::Cylinder, {0.04, 0.3}, n);
    // Regular n-gon prism, exactly.
    const double polygon_area = 0.5 * n * 0.04 * 0.04 * std::sin(2.0 * pi / n);
    EXPECT_NEAR(signed_volume(c), polygon_area * 0.3, 1e-15);

    const TriangleMesh b = make_primitive(PrimitiveKind::Box, {1, 2, 3});
    EXPECT_NEAR(signed_volume(b), 6.0, 1e-12);
    EXPECT_NEAR(b.surface_area(), 22.0, 1e-12);
}

TEST(Mesh, TriangleCounts) {
    EXPECT_EQ(make_primitive(PrimitiveKind::Cylinder, {1, 1}, 250).triangles().size(), 1000u);
    EXPECT_EQ(make_primitive(PrimitiveKind::Box, {1, 1, 1}).triangles().size(), 12u);
    const TriangleMesh plane = make_primitive(PrimitiveKind::Plane, {2, 3});
    EXPECT_EQ(plane.triangles().size(), 2u);
    EXPECT_NEAR(plane.surface_area(), 6.0, 1e-15);
    EXPECT_FALSE(plane.is_watertight());
}

TEST(Mesh, PlaneNormalIsPlusZ) {
    const TriangleMesh p = make_primitive(PrimitiveKind::Plane, {1, 1});
    for (const auto& t : p.triangles()) {
        const Vec3 n = (p.vertices()[t[1]] - p.vertices()[t[0]]).cross(p.vertices()[t[2]] - p.vertices()[t[0]]);
        EXPECT_GT(n.z(), 0.0);
    }
}

TEST(Mesh, Errors) {
    EXPECT_THROW(make_primitive(PrimitiveKind::Sphere, {-1.0}), ValidationError);
    EXPECT_THROW(make_primitive(PrimitiveKind::Cylinder, {1.0}), ValidationError);
    EXPECT_THROW(make_primitive(PrimitiveKind::Sphere, {1.0}, 2), ValidationError);
    EXPECT_THROW(parse_primitive_kind("torus"), ValidationError);
    EXPECT_THROW(TriangleMesh({Vec3::Zero()}, {{0, 0, 1}}), ValidationError);
    EXPECT_THROW(TriangleMesh({}, {}, 0), ValidationError);
    EXPECT_THROW(TriangleMesh({}, {}, kGroundObjectId), ValidationError);
    const TriangleMesh degenerate({Vec3::Zero(), Vec3::UnitX(), 2.0 * Vec3::UnitX()}, {{0, 1, 2}});
    EXPECT_EQ(degenerate.triangles().size(), 0u);
    EXPECT_EQ(degenerate.dropped_degenerate(), 1u);
}

TEST(Mesh, LoadObj) {
    testsupport::TempDir dir;
    {
        std::ofstream f(dir / "tet.obj");
        f << "# tetrahedron\n"
             "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
             "vn 0 0 1\n"
             "f 1//1 3//1 2//1\n"
             "f 1/1 2/1 4/1\n"
             "f -3 -2 -1\n"
             "f 1 4 3\n";
    }
    const TriangleMesh m = load_obj(dir / "tet.obj", 7);
    EXPECT_EQ(m.object_id(), 7);
    EXPECT_EQ(m.vertices().size(), 4u);
    EXPECT_EQ(m.triangles().size(), 4u);
    EXPECT_TRUE(m.is_watertight());
    EXPECT_NEAR(signed_volume(m), 1.0 / 6.0, 1e-15);

    {
        std::ofstream f(dir / "bad.obj");
        f << "v 0 0 0\nf 1 2 3\n";
    }
    EXPECT_THROW(load_obj(dir / "bad.obj"), ValidationError);
    {
        std::ofstream f(dir / "quad.obj");
        f << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    }
    EXPECT_THROW(load_obj(dir / "quad.obj"), ValidationError);
    EXPECT_THROW(load_obj(dir / "missing.obj"), IoError);
}
