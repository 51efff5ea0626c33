#include "pixgrasp/scene_config.hpp"

#include "pixgrasp/errors.hpp"

#include <set>

namespace fs = std::filesystem;

namespace pixgrasp {

namespace {

const char* kind_name(const ObjectSpec& o) { return o.kind.c_str(); }

ObjectSpec object_from_json(const Json& j, const fs::path& base_dir, ObjectId default_id) {
    if (!j.is_object()) throw ValidationError("scene object must be a JSON object");
    ObjectSpec o;
    try {
        o.id = j.value("id", default_id);
        if (j.contains("kind") == j.contains("obj_path")) {
            throw ValidationError("scene object needs exactly one of 'kind' or 'obj_path'");
        }
        if (j.contains("kind")) {
            o.kind = j.at("kind").get<std::string>();
            parse_primitive_kind(o.kind);
        } else {
            fs::path p = j.at("obj_path").get<std::string>();
            o.obj_path = p.is_relative() ? base_dir / p : p;
        }
        if (j.contains("dimensions")) o.dimensions = j.at("dimensions").get<std::vector<double>>();
        o.tessellation = j.value("tessellation", o.tessellation);
        if (j.contains("pose")) o.pose = pose_from_json(j.at("pose"));
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("scene object: ") + e.what());
    }
    if (o.id < 1 || o.id >= kGroundObjectId) throw ValidationError("object id out of range");
    return o;
}

}  // namespace

const ObjectSpec& SceneConfig::target() const {
    for (const ObjectSpec& o : objects) {
        if (o.id == target_id) return o;
    }
    throw ValidationError("target_id " + std::to_string(target_id) + " does not name a scene object");
}

SceneConfig scene_config_from_json(const Json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ValidationError("scene config must be a JSON object");
    SceneConfig c;
    try {
        if (!j.contains("objects") || !j.at("objects").is_array() || j.at("objects").empty()) {
            throw ValidationError("scene config needs a non-empty 'objects' array");
        }
        std::set<ObjectId> ids;
        ObjectId next_id = 1;
        for (const Json& oj : j.at("objects")) {
            ObjectSpec o = object_from_json(oj, base_dir, next_id);
            if (!ids.insert(o.id).second) throw ValidationError("duplicate object id " + std::to_string(o.id));
            next_id = o.id + 1;
            c.objects.push_back(std::move(o));
        }
        c.ground_plane = j.value("ground_plane", true);
        c.target_id = j.value("target_id", c.objects.front().id);
        if (j.contains("gripper")) c.gripper = gripper_from_json(j.at("gripper"));
        if (j.contains("grasp")) {
            c.grasp.surface_offset = j.at("grasp").value("surface_offset", c.grasp.surface_offset);
            c.grasp.staging_distance = j.at("grasp").value("staging_distance", c.grasp.staging_distance);
        }
        c.grid_target = c.target().pose.position;
        if (j.contains("grid")) {
            c.grid = grid_from_json(j.at("grid"));
            if (j.at("grid").contains("target")) c.grid_target = vec3_from_json(j.at("grid").at("target"));
        }
        if (j.contains("intrinsics")) c.intrinsics = intrinsics_from_json(j.at("intrinsics"));
        c.stride = j.value("stride", 1);
        c.depth_normalization_scale = j.value("depth_normalization_scale", c.depth_normalization_scale);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("scene config: ") + e.what());
    }
    c.target();
    if (c.stride < 1) throw ValidationError("stride must be >= 1");
    if (!(c.depth_normalization_scale > 0.0)) throw ValidationError("depth_normalization_scale must be > 0");
    return c;
}

SceneConfig load_scene_config(const fs::path& path) {
    return scene_config_from_json(read_json_file(path), path.parent_path());
}

Json scene_config_to_json(const SceneConfig& c) {
    Json objects = Json::array();
    for (const ObjectSpec& o : c.objects) {
        Json oj{{"id", o.id}, {"pose", pose_to_json(o.pose)}, {"tessellation", o.tessellation}};
        if (o.kind.empty()) {
            oj["obj_path"] = o.obj_path.generic_string();
        } else {
            oj["kind"] = kind_name(o);
        }
        Json dims = Json::array();
        for (double d : o.dimensions) dims.push_back(round9(d));
        oj["dimensions"] = dims;
        objects.push_back(oj);
    }
    Json grid = grid_to_json(c.grid);
    grid["target"] = vec3_to_json(c.grid_target);
    return Json{{"objects", objects},
                {"ground_plane", c.ground_plane},
                {"target_id", c.target_id},
                {"gripper", gripper_to_json(c.gripper)},
                {"grasp", {{"surface_offset", round9(c.grasp.surface_offset)},
                           {"staging_distance", round9(c.grasp.staging_distance)}}},
                {"grid", grid},
                {"intrinsics", intrinsics_to_json(c.intrinsics)},
                {"stride", c.stride},
                {"depth_normalization_scale", round9(c.depth_normalization_scale)}};
}

Scene build_scene(const SceneConfig& config) {
    std::vector<SceneObject> objects;
    for (const ObjectSpec& o : config.objects) {
        TriangleMesh mesh = o.kind.empty()
                                ? load_obj(o.obj_path, o.id)
                                : make_primitive(parse_primitive_kind(o.kind), o.dimensions, o.tessellation, o.id);
        objects.push_back({std::move(mesh), o.pose});
    }
    return Scene(std::move(objects), config.ground_plane);
}

SceneConfig canonical_cylinder_config(int tessellation) {
    SceneConfig c;
    ObjectSpec cyl;
    cyl.id = 1;
    cyl.kind = "cylinder";
    cyl.dimensions = {0.04, 0.30};
    cyl.tessellation = tessellation;
    cyl.pose.position = Vec3(0.0, 0.0, 0.15);
    c.objects.push_back(cyl);
    c.target_id = 1;
    c.grid_target = cyl.pose.position;
    c.grid.z_range = {0.05, 0.5};
    return c;
}

}  // namespace pixgrasp
