#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "greid/descriptors.hpp"
#include "greid/importance.hpp"
#include "greid/matcher.hpp"

namespace greid::harness {

/// Every tunable of the engine, readable from a key/value text file.
struct EngineConfig {
    MatchConfig match;
    ImportanceConfig importance;
    SpatialHistogramConfig spatial;
    StripeDescriptorConfig stripes;
    bool global_whole_image = false;

    int splits = 5;
    std::uint64_t seed = 0;
    std::vector<int> ranks{1, 5, 10, 15, 20};

    void validate() const;
};

// File format: one `key = value` per line, `#` starts a comment. Booleans are
// true/false/1/0, lists are comma separated. Unknown keys are rejected.
//
//   solver.prune_k solver.unpruned_limit solver.jump_prob solver.max_rw_iters
//   solver.rw_tol solver.eps_dist solver.sinkhorn_iters
//   match.lambda_r match.similarity_threshold match.inter_order match.prune
//   match.use_first match.use_second match.use_third match.use_global
//   match.weight_first match.weight_second match.weight_third match.weight_global
//   importance.k_density importance.ratio_floor importance.stability_eps
//   importance.max_iter importance.tol importance.enabled
//   spatial.n_dist_bins spatial.n_angle_bins spatial.sigma_dist spatial.sigma_angle
//   spatial.d_min spatial.d_max
//   stripes.n_stripes stripes.width stripes.height stripes.color_bins stripes.gradient_bins
//   global.whole_image
//   eval.splits eval.seed eval.ranks
void set_config_value(EngineConfig& cfg, const std::string& key, const std::string& value);
void parse_config_text(EngineConfig& cfg, const std::string& text);
EngineConfig load_config(const std::filesystem::path& path);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace greid::harness
