#pragma once

#include <cstdint>
#include <filesystem>

#include "greid/feature_file.hpp"
#include "greid/harness/dataset.hpp"

namespace greid::harness {

struct SynthConfig {
    int n_groups = 50;
    int min_size = 2;
    int max_size = 6;
    int feature_dim = 32;
    double feature_noise = 0.0;       // sigma_f, per component added to a unit-norm identity
    double layout_jitter = 0.0;       // sigma_pos, in unit-square coordinates
    double member_change_prob = 0.0;  // p_mem
    // Global descriptors mix the members with a scene term drawn per image, weighted
    // against the unit-norm member mean. Zero gives a members-only global feature.
    double background_weight = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthData {
    Dataset dataset;
    FeatureFile features;
};

// Two cameras "A" and "B", one image per group and camera. Camera A shows the latent
// identities; camera B perturbs features and positions, drops each member with
// probability p_mem/2 and adds a fresh distractor with probability p_mem/2, and lists
// its persons in shuffled order. The global feature of an image is the normalized sum of
// the unit member mean and background_weight times a random unit scene vector.
SynthData synthesize(const SynthConfig& cfg);

/// Writes dataset.json and features.json into dir.
void write_synth(const SynthData& data, const std::filesystem::path& dir);

}  // namespace greid::harness
