#include "pixgrasp/mesh.hpp"

#include "pixgrasp/errors.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

namespace pixgrasp {

namespace {

std::pair<std::uint32_t, std::uint32_t> edge_key(std::uint32_t a, std::uint32_t b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_use(
    const std::vector<TriangleIndices>& tris) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> uses;
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) ++uses[edge_key(t[k], t[(k + 1) % 3])];
    }
    return uses;
}

void require_positive(const std::vector<double>& dims, std::size_t n, const char* what) {
    if (dims.size() != n) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(n) +
                              " dimensions, got " + std::to_string(dims.size()));
    }
    for (double d : dims) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw ValidationError(std::string(what) + ": dimensions must be positive");
        }
    }
}

TriangleMesh make_sphere(double r, int tess, ObjectId id) {
    const int slices = tess;
    const int stacks = std::max(2, tess / 2);
    std::vector<Vec3> v;
    std::vector<TriangleIndices> f;
    v.emplace_back(0.0, 0.0, r);
    for (int i = 1; i < stacks; ++i) {
        const double theta = std::numbers::pi * i / stacks;
        for (int j = 0; j < slices; ++j) {
            const double phi = 2.0 * std::numbers::pi * j / slices;
            v.emplace_back(r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                           r * std::cos(theta));
        }
    }
    v.emplace_back(0.0, 0.0, -r);
    const auto south = static_cast<std::uint32_t>(v.size() - 1);
    auto ring = [&](int i, int j) {
        return static_cast<std::uint32_t>(1 + (i - 1) * slices + (j % slices));
    };
    for (int j = 0; j < slices; ++j) f.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            f.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            f.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    for (int j = 0; j < slices; ++j) f.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
    return TriangleMesh(std::move(v), std::move(f), id);
}

TriangleMesh make_cylinder(double r, double h, int tess, ObjectId id) {
    std::vector<Vec3> v;
    std::vector<TriangleIndices> f;
    const double zb = -0.5 * h, zt = 0.5 * h;
    for (int j = 0; j < tess; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / tess;
        v.emplace_back(r * std::cos(phi), r * std::sin(phi), zb);
    }
    for (int j = 0; j < tess; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / tess;
        v.emplace_back(r * std::cos(phi), r * std::sin(phi), zt);
    }
    const auto cb = static_cast<std::uint32_t>(v.size());
    v.emplace_back(0.0, 0.0, zb);
    const auto ct = static_cast<std::uint32_t>(v.size());
    v.emplace_back(0.0, 0.0, zt);
    const auto n = static_cast<std::uint32_t>(tess);
    for (std::uint32_t j = 0; j < n; ++j) {
        const std::uint32_t j1 = (j + 1) % n;
        f.push_back({j, j1, n + j1});
        f.push_back({j, n + j1, n + j});
        f.push_back({cb, j1, j});
        f.push_back({ct, n + j, n + j1});
    }
    return TriangleMesh(std::move(v), std::move(f), id);
}

TriangleMesh make_box(double sx, double sy, double sz, ObjectId id) {
    const double hx = 0.5 * sx, hy = 0.5 * sy, hz = 0.5 * sz;
    std::vector<Vec3> v{{-hx, -hy, -hz}, {hx, -hy, -hz}, {hx, hy, -hz}, {-hx, hy, -hz},
                        {-hx, -hy, hz},  {hx, -hy, hz},  {hx, hy, hz},  {-hx, hy, hz}};
    std::vector<TriangleIndices> f{
        {0, 2, 1}, {0, 3, 2},  // -z
        {4, 5, 6}, {4, 6, 7},  // +z
        {0, 1, 5}, {0, 5, 4},  // -y
        {3, 7, 6}, {3, 6, 2},  // +y
        {0, 4, 7}, {0, 7, 3},  // -x
        {1, 2, 6}, {1, 6, 5},  // +x
    };
    return TriangleMesh(std::move(v), std::move(f), id);
}

TriangleMesh make_plane(double sx, double sy, ObjectId id) {
    const double hx = 0.5 * sx, hy = 0.5 * sy;
    std::vector<Vec3> v{{-hx, -hy, 0.0}, {hx, -hy, 0.0}, {hx, hy, 0.0}, {-hx, hy, 0.0}};
    std::vector<TriangleIndices> f{{0, 1, 2}, {0, 2, 3}};
    return TriangleMesh(std::move(v), std::move(f), id);
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<TriangleIndices> triangles,
                           ObjectId object_id)
    : vertices_(std::move(vertices)), object_id_(object_id) {
    if (object_id <= kBackgroundId || object_id >= kGroundObjectId) {
        throw ValidationError("mesh object_id must be in [1, 65534]");
    }
    for (const auto& p : vertices_) {
        if (!p.allFinite()) throw ValidationError("mesh vertex is not finite");
    }
    triangles_.reserve(triangles.size());
    for (const auto& t : triangles) {
        for (auto idx : t) {
            if (idx >= vertices_.size()) throw ValidationError("mesh triangle index out of range");
        }
        const Vec3 n = (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]);
        if (n.norm() <= 0.0) {
            ++dropped_;
            continue;
        }
        triangles_.push_back(t);
    }
}

TriangleMesh TriangleMesh::with_object_id(ObjectId id) const {
    TriangleMesh copy = *this;
    if (id <= kBackgroundId || id >= kGroundObjectId) {
        throw ValidationError("mesh object_id must be in [1, 65534]");
    }
    copy.object_id_ = id;
    return copy;
}

double TriangleMesh::surface_area() const {
    double area = 0.0;
    for (const auto& t : triangles_) {
        area += 0.5 * (vertices_[t[1]] - vertices_[t[0]]).cross(vertices_[t[2]] - vertices_[t[0]]).norm();
    }
    return area;
}

std::size_t TriangleMesh::edge_count() const { return edge_use(triangles_).size(); }

long TriangleMesh::euler_characteristic() const {
    return static_cast<long>(vertices_.size()) - static_cast<long>(edge_count()) +
           static_cast<long>(triangles_.size());
}

bool TriangleMesh::is_watertight() const {
    if (triangles_.empty()) return false;
    for (const auto& [edge, count] : edge_use(triangles_)) {
        if (count != 2) return false;
    }
    return true;
}

PrimitiveKind parse_primitive_kind(const std::string& name) {
    if (name == "sphere") return PrimitiveKind::Sphere;
    if (name == "cylinder") return PrimitiveKind::Cylinder;
    if (name == "box") return PrimitiveKind::Box;
    if (name == "plane") return PrimitiveKind::Plane;
    throw ValidationError("unknown primitive kind '" + name + "'");
}

TriangleMesh make_primitive(PrimitiveKind kind, const std::vector<double>& dims, int tessellation,
                            ObjectId object_id) {
    switch (kind) {
        case PrimitiveKind::Sphere:
            require_positive(dims, 1, "sphere");
            if (tessellation < 3) throw ValidationError("sphere: tessellation must be >= 3");
            return make_sphere(dims[0], tessellation, object_id);
        case PrimitiveKind::Cylinder:
            require_positive(dims, 2, "cylinder");
            if (tessellation < 3) throw ValidationError("cylinder: tessellation must be >= 3");
            return make_cylinder(dims[0], dims[1], tessellation, object_id);
        case PrimitiveKind::Box:
            require_positive(dims, 3, "box");
            return make_box(dims[0], dims[1], dims[2], object_id);
        case PrimitiveKind::Plane:
            require_positive(dims, 2, "plane");
            return make_plane(dims[0], dims[1], object_id);
    }
    throw ValidationError("unknown primitive kind");
}

TriangleMesh load_obj(const std::filesystem::path& path, ObjectId object_id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open OBJ file " + path.string());

    std::vector<Vec3> vertices;
    std::vector<TriangleIndices> triangles;
    std::string line;
    std::size_t line_no = 0;
    auto resolve = [&](const std::string& token) -> std::uint32_t {
        // "i", "i/t", "i//n", "i/t/n"; negative indices are relative to the end.
        const long idx = std::stol(token.substr(0, token.find('/')));
        const long n = static_cast<long>(vertices.size());
        const long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (idx == 0 || zero_based < 0 || zero_based >= n) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": face index out of range");
        }
        return static_cast<std::uint32_t>(zero_based);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad vertex");
            }
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::string> tokens;
            for (std::string tok; ls >> tok;) tokens.push_back(tok);
            if (tokens.size() != 3) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                      ": only triangular faces are supported");
            }
            try {
                triangles.push_back({resolve(tokens[0]), resolve(tokens[1]), resolve(tokens[2])});
            } catch (const std::logic_error&) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": bad face");
            }
        }
    }
    if (triangles.empty()) throw ValidationError(path.string() + ": no triangles");
    return TriangleMesh(std::move(vertices), std::move(triangles), object_id);
}

}  // namespace pixgrasp
