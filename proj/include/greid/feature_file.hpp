#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "greid/core.hpp"
#include "greid/descriptors.hpp"

namespace greid {

struct FeatureRecord {
    Vector global;
    std::vector<Vector> persons;                    // box order
    std::optional<std::vector<Vector>> edges;       // pair-rank order, optional
};

/// Precomputed per-image features keyed by image id.
struct FeatureFile {
    int version = 1;
    std::size_t dim = 0;
    std::map<std::string, FeatureRecord> records;
};

enum class FeatureFileFormat { text, binary };

// Text form: {"version":1,"dim":d,"images":{"<id>":{"global":[...],"persons":[[...],...]}}}
// Binary form (little-endian): "GRFB", u32 version, u32 dim, u32 edge_dim, u32 count, then
// per record: u32 id_len, id bytes, u32 n_persons, f32 global[dim], f32 persons[n*dim],
// and f32 edges[C(n,2)*edge_dim] when edge_dim > 0.
FeatureFile read_feature_file(const std::filesystem::path& path);
void write_feature_file(const FeatureFile& file, const std::filesystem::path& path,
                        FeatureFileFormat format);
/// Binary when the extension is .bin, text otherwise.
FeatureFileFormat format_for_path(const std::filesystem::path& path);

/// Builds one bundle per observation. Throws "missing-features" when an image id has no
/// record and "inconsistent-feature-dim" when vector dimensions disagree.
std::vector<FeatureBundle> load_external_features(const FeatureFile& file,
                                                  std::span<const GroupObservation> observations,
                                                  const SpatialHistogramConfig& cfg = {});

}  // namespace greid
