#include <fstream>
#include <sstream>
#include <stdexcept>

#include "radarkit/radar_sim.hpp"

#include <json.hpp>

namespace radarkit::sim {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const char* context) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw std::invalid_argument(std::string("unknown field '") + key + "' in " + context);
    }
}

double require_number(const json& obj, const char* key, const char* context) {
    if (!obj.contains(key))
        throw std::invalid_argument(std::string("missing field '") + key + "' in " + context);
    if (!obj[key].is_number())
        throw std::invalid_argument(std::string("field '") + key + "' in " + context +
                                    " must be a number");
    return obj[key].get<double>();
}

double optional_number(const json& obj, const char* key, double fallback, const char* context) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw std::invalid_argument(std::string("field '") + key + "' in " + context +
                                    " must be a number");
    return obj[key].get<double>();
}

}  // namespace

Scene parse_scene_json(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw std::invalid_argument("scene file is not valid JSON");
    if (!doc.is_object()) throw std::invalid_argument("scene document must be a JSON object");
    reject_unknown_keys(doc, {"targets", "noise_std", "front_end", "coupling_amplitude"},
                        "scene");

    Scene scene;
    if (!doc.contains("targets") || !doc["targets"].is_array())
        throw std::invalid_argument("scene requires a 'targets' array");
    for (const auto& t : doc["targets"]) {
        if (!t.is_object()) throw std::invalid_argument("each target must be a JSON object");
        reject_unknown_keys(t, {"range_m", "velocity_mps", "amplitude", "bearing_deg"}, "target");
        PointTarget target;
        target.range_m = require_number(t, "range_m", "target");
        target.amplitude_v = require_number(t, "amplitude", "target");
        target.velocity_mps = optional_number(t, "velocity_mps", 0.0, "target");
        target.bearing_deg = optional_number(t, "bearing_deg", 0.0, "target");
        scene.targets.push_back(target);
    }
    scene.noise_std_v = optional_number(doc, "noise_std", 0.0, "scene");
    scene.coupling_amplitude_v = optional_number(doc, "coupling_amplitude", 0.0, "scene");

    if (!doc.contains("front_end") || !doc["front_end"].is_string())
        throw std::invalid_argument("scene requires a 'front_end' string");
    const std::string fe = doc["front_end"].get<std::string>();
    if (fe == "IVS947")
        scene.front_end = FrontEndKind::IVS947;
    else if (fe == "IVS565")
        scene.front_end = FrontEndKind::IVS565;
    else
        throw std::invalid_argument("front_end must be \"IVS947\" or \"IVS565\"");

    scene.validate();
    return scene;
}

Scene load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene_json(buf.str());
}

std::string scene_to_json(const Scene& scene) {
    json doc;
    doc["targets"] = json::array();
    for (const auto& t : scene.targets) {
        doc["targets"].push_back({{"range_m", t.range_m},
                                  {"velocity_mps", t.velocity_mps},
                                  {"amplitude", t.amplitude_v},
                                  {"bearing_deg", t.bearing_deg}});
    }
    doc["noise_std"] = scene.noise_std_v;
    if (scene.coupling_amplitude_v != 0.0) doc["coupling_amplitude"] = scene.coupling_amplitude_v;
    doc["front_end"] = std::string(to_string(scene.front_end));
    return doc.dump(2);
}

}  // namespace radarkit::sim
