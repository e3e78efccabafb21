#include "greid/harness/dataset.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "greid/error.hpp"

namespace greid::harness {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw Error("invalid-dataset", field + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) bad(where + "." + key, "missing");
    return obj.at(key);
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where, "expected a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) bad(where, "expected a string");
    return v.get<std::string>();
}

}  // namespace

std::vector<int> Dataset::evaluable_groups() const {
    std::map<int, std::set<std::string>> seen;
    for (const auto& img : images) seen[img.group_id].insert(img.camera_id);
    std::vector<int> out;
    for (const auto& [g, cams] : seen)
        if (cams.size() >= 2) out.push_back(g);
    return out;
}

bool Dataset::is_evaluable(int group_id) const {
    std::set<std::string> cams;
    for (const auto& img : images)
        if (img.group_id == group_id) cams.insert(img.camera_id);
    return cams.size() >= 2;
}

int Dataset::index_of(const std::string& image_id) const {
    for (std::size_t i = 0; i < images.size(); ++i)
        if (images[i].image_id == image_id) return static_cast<int>(i);
    return -1;
}

Dataset parse_dataset(const std::string& content) {
    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::parse_error& e) {
        bad("$", std::string("not valid JSON (") + e.what() + ")");
    }
    if (!doc.is_object()) bad("$", "expected an object");
    Dataset ds;
    const json& version = require(doc, "version", "$");
    if (!version.is_number_integer()) bad("$.version", "expected an integer");
    ds.version = version.get<int>();
    if (ds.version != 1) bad("$.version", "unsupported version " + std::to_string(ds.version));

    const json& cameras = require(doc, "cameras", "$");
    if (!cameras.is_array() || cameras.empty()) bad("$.cameras", "expected a non-empty array");
    std::set<std::string> camera_set;
    for (std::size_t c = 0; c < cameras.size(); ++c) {
        const std::string name = text(cameras[c], "$.cameras[" + std::to_string(c) + "]");
        if (!camera_set.insert(name).second) bad("$.cameras[" + std::to_string(c) + "]", "duplicate camera");
        ds.cameras.push_back(name);
    }

    const json& images = require(doc, "images", "$");
    if (!images.is_array()) bad("$.images", "expected an array");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < images.size(); ++k) {
        const std::string where = "$.images[" + std::to_string(k) + "]";
        const json& im = images[k];
        if (!im.is_object()) bad(where, "expected an object");
        GroupObservation obs;
        obs.image_id = text(require(im, "id", where), where + ".id");
        if (!ids.insert(obs.image_id).second) bad(where + ".id", "duplicate image id '" + obs.image_id + "'");
        obs.camera_id = text(require(im, "camera", where), where + ".camera");
        if (!camera_set.contains(obs.camera_id)) bad(where + ".camera", "unknown camera '" + obs.camera_id + "'");
        const json& gid = require(im, "group_id", where);
        if (!gid.is_number_integer()) bad(where + ".group_id", "expected an integer");
        obs.group_id = gid.get<int>();
        if (im.contains("path") && !im.at("path").is_null()) obs.image_path = text(im.at("path"), where + ".path");

        const json& size = require(im, "image_size", where);
        if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() || !size[1].is_number_integer())
            bad(where + ".image_size", "expected [width, height]");
        obs.image_size = {size[0].get<int>(), size[1].get<int>()};
        if (obs.image_size.width <= 0 || obs.image_size.height <= 0) bad(where + ".image_size", "must be positive");

        const json& boxes = require(im, "boxes", where);
        if (!boxes.is_array() || boxes.empty()) bad(where + ".boxes", "expected a non-empty array");
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            const std::string bw = where + ".boxes[" + std::to_string(b) + "]";
            const json& box = boxes[b];
            obs.boxes.push_back({number(require(box, "x", bw), bw + ".x"), number(require(box, "y", bw), bw + ".y"),
                                 number(require(box, "w", bw), bw + ".w"), number(require(box, "h", bw), bw + ".h")});
        }
        try {
            obs.validate();
        } catch (const Error& e) {
            bad(where + ".boxes", e.what());
        }
        ds.images.push_back(std::move(obs));
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing-file", "cannot read dataset " + path.string(), ErrorKind::runtime);
    std::stringstream buf;
    buf << in.rdbuf();
    Dataset ds = parse_dataset(buf.str());
    ds.base_dir = path.parent_path();
    return ds;
}

std::string dataset_to_json(const Dataset& ds) {
    json doc;
    doc["version"] = ds.version;
    doc["cameras"] = ds.cameras;
    doc["images"] = json::array();
    for (const auto& obs : ds.images) {
        json im;
        im["id"] = obs.image_id;
        im["camera"] = obs.camera_id;
        im["group_id"] = obs.group_id;
        if (obs.image_path) im["path"] = *obs.image_path;
        im["image_size"] = {obs.image_size.width, obs.image_size.height};
        im["boxes"] = json::array();
        for (const auto& b : obs.boxes) im["boxes"].push_back({{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}});
        doc["images"].push_back(std::move(im));
    }
    return doc.dump(1) + "\n";
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("unwritable-path", "cannot write " + path.string(), ErrorKind::runtime);
    out << dataset_to_json(ds);
    if (!out) throw Error("unwritable-path", "cannot write " + path.string(), ErrorKind::runtime);
}

std::filesystem::path resolve_image_path(const Dataset& ds, const GroupObservation& obs) {
    if (!obs.image_path) throw Error("missing-image", "image " + obs.image_id + " has no path");
    const std::filesystem::path p(*obs.image_path);
    return p.is_absolute() ? p : ds.base_dir / p;
}

void check_image_paths(const Dataset& ds) {
    for (const auto& obs : ds.images) {
        const auto p = resolve_image_path(ds, obs);
        if (!std::filesystem::exists(p)) throw Error("missing-image", "image " + obs.image_id + ": " + p.string());
    }
}

}  // namespace greid::harness
