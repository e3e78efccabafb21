#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "greid/descriptors.hpp"
#include "greid/error.hpp"
#include "greid/feature_file.hpp"
#include "greid/harness/config.hpp"
#include "greid/harness/dataset.hpp"
#include "greid/harness/evaluation.hpp"
#include "greid/harness/image_io.hpp"
#include "greid/harness/oracle_check.hpp"
#include "greid/harness/report.hpp"
#include "greid/harness/synth.hpp"
#include "greid/iterate.hpp"

using namespace greid;
using namespace greid::harness;

namespace {

std::vector<FeatureBundle> load_features(const Dataset& ds, const std::string& features_path, const EngineConfig& cfg) {
    if (!features_path.empty()) return load_external_features(read_feature_file(features_path), ds.images, cfg.spatial);
    check_image_paths(ds);
    std::vector<FeatureBundle> out;
    for (const auto& obs : ds.images) {
        const RgbImage img = load_image(resolve_image_path(ds, obs));
        out.push_back(extract_bundle(img, obs, cfg.stripes, cfg.spatial, cfg.global_whole_image));
    }
    return out;
}

FeatureFile extract_feature_file(const Dataset& ds, const EngineConfig& cfg) {
    check_image_paths(ds);
    FeatureFile file;
    file.dim = cfg.stripes.dimension();
    for (const auto& obs : ds.images) {
        const RgbImage img = load_image(resolve_image_path(ds, obs));
        FeatureRecord rec;
        for (const auto& box : obs.boxes) rec.persons.push_back(stripe_appearance_feature(crop(img, box), cfg.stripes));
        rec.global = global_feature(img, obs, cfg.stripes, cfg.global_whole_image);
        file.records.emplace(obs.image_id, std::move(rec));
    }
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group re-identification engine"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "key = value file with engine tunables");
    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "override one tunable, key=value (repeatable)");

    std::string dataset_path, features_path, out_path;

    auto* match = app.add_subcommand("match", "match one probe image against every image of a camera");
    std::string probe_id, gallery_camera;
    match->add_option("--dataset", dataset_path)->required();
    match->add_option("--features", features_path);
    match->add_option("--probe", probe_id)->required();
    match->add_option("--gallery-camera", gallery_camera)->required();
    match->add_option("--out", out_path)->required();

    auto* eval = app.add_subcommand("eval", "CMC evaluation over random splits");
    std::optional<int> splits;
    std::optional<std::uint64_t> seed;
    std::string ranks, variant = "full";
    eval->add_option("--dataset", dataset_path)->required();
    eval->add_option("--features", features_path);
    eval->add_option("--splits", splits);
    eval->add_option("--seed", seed);
    eval->add_option("--ranks", ranks, "comma separated, e.g. 1,5,10,15,20");
    eval->add_option("--variant", variant, "global, fine, fine+medium, fine+medium+coarse or full");
    eval->add_option("--out", out_path, ".csv for the table, anything else for JSON")->required();

    auto* synth = app.add_subcommand("synth", "generate a synthetic two-camera dataset");
    SynthConfig sc;
    synth->add_option("--groups", sc.n_groups);
    synth->add_option("--noise", sc.feature_noise);
    synth->add_option("--jitter", sc.layout_jitter);
    synth->add_option("--member-change", sc.member_change_prob);
    synth->add_option("--dim", sc.feature_dim);
    synth->add_option("--min-size", sc.min_size);
    synth->add_option("--max-size", sc.max_size);
    synth->add_option("--seed", sc.seed);
    synth->add_option("--out", out_path)->required();

    auto* oracle = app.add_subcommand("oracle-check", "compare production paths with brute-force oracles");
    OracleCheckConfig oc;
    oracle->add_option("--trials", oc.trials);
    oracle->add_option("--w1-trials", oc.w1_trials);
    oracle->add_option("--max-size", oc.max_size);
    oracle->add_option("--seed", oc.seed);

    auto* features = app.add_subcommand("features", "extract hand-crafted descriptors for a dataset");
    features->add_option("--dataset", dataset_path)->required();
    features->add_option("--out", out_path, ".bin for binary, anything else for JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        EngineConfig cfg = config_path.empty() ? EngineConfig{} : load_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error("invalid-config", "--set expects key=value");
            set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (splits) cfg.splits = *splits;
        if (seed) cfg.seed = *seed;
        if (!ranks.empty()) cfg.ranks = parse_int_list(ranks);
        cfg.validate();

        if (*match) {
            const Dataset ds = load_dataset(dataset_path);
            const int probe = ds.index_of(probe_id);
            if (probe < 0) throw Error("invalid-argument", "unknown probe image '" + probe_id + "'");
            std::vector<PairTask> tasks;
            for (std::size_t i = 0; i < ds.images.size(); ++i)
                if (ds.images[i].camera_id == gallery_camera && static_cast<int>(i) != probe)
                    tasks.push_back({probe, static_cast<int>(i)});
            if (tasks.empty()) throw Error("invalid-argument", "camera '" + gallery_camera + "' has no images");
            const auto bundles = load_features(ds, features_path, cfg);
            const WeightIteration it = iterate_weights(ds.images, bundles, tasks, cfg.match, cfg.importance);
            std::string doc = "[\n";
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                doc += match_result_json(it.results[t], probe_id,
                                         ds.images[static_cast<std::size_t>(tasks[t].gallery)].image_id);
                doc += t + 1 < tasks.size() ? ",\n" : "\n";
            }
            write_text_file(out_path, doc + "]\n");
        } else if (*eval) {
            const Dataset ds = load_dataset(dataset_path);
            const auto bundles = load_features(ds, features_path, cfg);
            const CmcReport report = run_evaluation(ds, bundles, cfg, parse_variant(variant));
            emit_report(report, out_path, format_for_report(out_path));
            std::cout << report_csv(report);
        } else if (*synth) {
            write_synth(synthesize(sc), out_path);
        } else if (*oracle) {
            bool passed = false;
            std::cout << format_oracle_report(run_oracle_check(oc, cfg.match), passed);
            return passed ? 0 : 2;
        } else if (*features) {
            const Dataset ds = load_dataset(dataset_path);
            write_feature_file(extract_feature_file(ds, cfg), out_path, format_for_path(out_path));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
