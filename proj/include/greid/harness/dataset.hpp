#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "greid/core.hpp"

namespace greid::harness {

struct Dataset {
    int version = 1;
    std::vector<std::string> cameras;
    std::vector<GroupObservation> images;
    std::filesystem::path base_dir;  // image paths are relative to this

    /// Groups seen by at least two cameras, ascending.
    std::vector<int> evaluable_groups() const;
    bool is_evaluable(int group_id) const;
    int index_of(const std::string& image_id) const;  // -1 when absent
};

// Schema: {"version":1,"cameras":[..],"images":[{"id","camera","group_id","path"?,
// "image_size":[w,h],"boxes":[{"x","y","w","h"},..]},..]}. Violations throw
// "invalid-dataset" naming the offending field.
Dataset parse_dataset(const std::string& text);
Dataset load_dataset(const std::filesystem::path& path);
std::string dataset_to_json(const Dataset& dataset);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Throws "missing-image" when an image has no path or its file does not exist.
void check_image_paths(const Dataset& dataset);
std::filesystem::path resolve_image_path(const Dataset& dataset, const GroupObservation& obs);

}  // namespace greid::harness
