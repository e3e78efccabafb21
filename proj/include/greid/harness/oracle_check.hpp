#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "greid/core.hpp"
#include "greid/importance.hpp"
#include "greid/matcher.hpp"

namespace greid::harness {

/// A random probe/gallery pair with features and importance weights.
struct RandomPair {
    GroupObservation probe_obs, gallery_obs;
    FeatureBundle probe_features, gallery_features;
    ImportanceMap probe_weights, gallery_weights;

    GroupView probe() const { return {probe_obs, probe_features, probe_weights}; }
    GroupView gallery() const { return {gallery_obs, gallery_features, gallery_weights}; }
};

/// Independent random groups: uniform box positions, standard normal appearance vectors of
/// dimension dim, random dynamic weight terms.
RandomPair random_pair(std::mt19937_64& rng, int n_probe, int n_gallery, int dim = 8);

/// Random point set of the given size and dimension, standard normal coordinates.
std::vector<Vector> random_points(std::mt19937_64& rng, int n, int dim);

struct OracleCheckConfig {
    int trials = 200;             // matching instances
    int w1_trials = 1000;
    int max_size = 4;             // group sizes drawn from [2, max_size]; W1 sets from [1, min(max_size, 4)]
    std::uint64_t seed = 0;
};

struct OracleCheckReport {
    std::vector<double> w1_gaps;          // |production - oracle| per trial
    std::vector<double> objective_ratios; // solver Q / optimal Q per trial
    std::vector<char> mapping_equal;      // per trial
    double w1_seconds = 0.0;
    double match_seconds = 0.0;

    double w1_max_gap() const;
    double fraction_within(double ratio) const;  // trials with Q >= ratio * optimal
    double fraction_mapping_equal() const;
};

/// Solver settings come from match; pruning is always disabled.
OracleCheckReport run_oracle_check(const OracleCheckConfig& cfg, const MatchConfig& match = {});

/// Per-trial gap listing and summary lines with pass/fail against the given thresholds.
std::string format_oracle_report(const OracleCheckReport& report, bool& passed);

}  // namespace greid::harness
