#include "greid/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "greid/error.hpp"

namespace greid::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
    T v{};
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw Error("invalid-config", "bad value for " + key + ": '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw Error("invalid-config", "bad boolean for " + key + ": '" + text + "'");
}

using Setter = std::function<void(EngineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    auto n = [](auto member) -> Setter {
        return [member](EngineConfig& c, const std::string& k, const std::string& v) {
            member(c) = parse_number<std::remove_reference_t<decltype(member(c))>>(k, v);
        };
    };
    auto b = [](auto member) -> Setter {
        return [member](EngineConfig& c, const std::string& k, const std::string& v) { member(c) = parse_bool(k, v); };
    };
    static const std::map<std::string, Setter> table{
        {"solver.prune_k", n([](EngineConfig& c) -> int& { return c.match.solver.prune_k; })},
        {"solver.unpruned_limit", n([](EngineConfig& c) -> int& { return c.match.solver.unpruned_limit; })},
        {"solver.jump_prob", n([](EngineConfig& c) -> double& { return c.match.solver.jump_prob; })},
        {"solver.max_rw_iters", n([](EngineConfig& c) -> int& { return c.match.solver.max_rw_iters; })},
        {"solver.rw_tol", n([](EngineConfig& c) -> double& { return c.match.solver.rw_tol; })},
        {"solver.eps_dist", n([](EngineConfig& c) -> double& { return c.match.solver.eps_dist; })},
        {"solver.sinkhorn_iters", n([](EngineConfig& c) -> int& { return c.match.solver.sinkhorn_iters; })},
        {"solver.inflation", n([](EngineConfig& c) -> double& { return c.match.solver.inflation; })},
        {"match.lambda_r", n([](EngineConfig& c) -> double& { return c.match.lambda_r; })},
        {"match.similarity_threshold", n([](EngineConfig& c) -> double& { return c.match.similarity_threshold; })},
        {"match.inter_order", b([](EngineConfig& c) -> bool& { return c.match.inter_order; })},
        {"match.prune", b([](EngineConfig& c) -> bool& { return c.match.prune; })},
        {"match.relative_importance", b([](EngineConfig& c) -> bool& { return c.match.relative_importance; })},
        {"match.normalized_similarity", b([](EngineConfig& c) -> bool& { return c.match.normalized_similarity; })},
        {"match.importance_share", b([](EngineConfig& c) -> bool& { return c.match.importance_share; })},
        {"match.use_first", b([](EngineConfig& c) -> bool& { return c.match.use_order[kFirst]; })},
        {"match.use_second", b([](EngineConfig& c) -> bool& { return c.match.use_order[kSecond]; })},
        {"match.use_third", b([](EngineConfig& c) -> bool& { return c.match.use_order[kThird]; })},
        {"match.use_global", b([](EngineConfig& c) -> bool& { return c.match.use_order[kGlobal]; })},
        {"match.weight_first", n([](EngineConfig& c) -> double& { return c.match.order_weight[kFirst]; })},
        {"match.weight_second", n([](EngineConfig& c) -> double& { return c.match.order_weight[kSecond]; })},
        {"match.weight_third", n([](EngineConfig& c) -> double& { return c.match.order_weight[kThird]; })},
        {"match.weight_global", n([](EngineConfig& c) -> double& { return c.match.order_weight[kGlobal]; })},
        {"importance.k_density", n([](EngineConfig& c) -> int& { return c.importance.k_density; })},
        {"importance.ratio_floor", n([](EngineConfig& c) -> double& { return c.importance.ratio_floor; })},
        {"importance.stability_eps", n([](EngineConfig& c) -> double& { return c.importance.stability_eps; })},
        {"importance.max_iter", n([](EngineConfig& c) -> int& { return c.importance.max_iter; })},
        {"importance.tol", n([](EngineConfig& c) -> double& { return c.importance.tol; })},
        {"importance.enabled", b([](EngineConfig& c) -> bool& { return c.importance.enabled; })},
        {"spatial.n_dist_bins", n([](EngineConfig& c) -> int& { return c.spatial.n_dist_bins; })},
        {"spatial.n_angle_bins", n([](EngineConfig& c) -> int& { return c.spatial.n_angle_bins; })},
        {"spatial.sigma_dist", n([](EngineConfig& c) -> double& { return c.spatial.sigma_dist; })},
        {"spatial.sigma_angle", n([](EngineConfig& c) -> double& { return c.spatial.sigma_angle; })},
        {"spatial.d_min", n([](EngineConfig& c) -> double& { return c.spatial.d_min; })},
        {"spatial.d_max", n([](EngineConfig& c) -> double& { return c.spatial.d_max; })},
        {"stripes.n_stripes", n([](EngineConfig& c) -> int& { return c.stripes.n_stripes; })},
        {"stripes.width", n([](EngineConfig& c) -> int& { return c.stripes.resize_width; })},
        {"stripes.height", n([](EngineConfig& c) -> int& { return c.stripes.resize_height; })},
        {"stripes.color_bins", n([](EngineConfig& c) -> int& { return c.stripes.color_bins; })},
        {"stripes.gradient_bins", n([](EngineConfig& c) -> int& { return c.stripes.gradient_bins; })},
        {"global.whole_image", b([](EngineConfig& c) -> bool& { return c.global_whole_image; })},
        {"eval.splits", n([](EngineConfig& c) -> int& { return c.splits; })},
        {"eval.seed", n([](EngineConfig& c) -> std::uint64_t& { return c.seed; })},
        {"eval.ranks", [](EngineConfig& c, const std::string&, const std::string& v) { c.ranks = parse_int_list(v); }},
    };
    return table;
}

}  // namespace

void EngineConfig::validate() const {
    match.validate();
    importance.validate();
    spatial.validate();
    if (stripes.n_stripes < 1 || stripes.resize_width < 1 || stripes.resize_height < stripes.n_stripes ||
        stripes.color_bins < 1 || stripes.gradient_bins < 1) {
        throw Error("invalid-config", "stripe descriptor settings out of range");
    }
    if (splits < 1) throw Error("invalid-config", "eval.splits must be at least 1");
    if (ranks.empty() || std::any_of(ranks.begin(), ranks.end(), [](int r) { return r < 1; })) {
        throw Error("invalid-config", "eval.ranks must be positive");
    }
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<int>("list", item));
    if (out.empty()) throw Error("invalid-config", "empty list");
    return out;
}

void set_config_value(EngineConfig& cfg, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw Error("invalid-config", "unknown key '" + key + "'");
    it->second(cfg, key, value);
}

void parse_config_text(EngineConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int number = 0;
    while (std::getline(ss, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("invalid-config", "line " + std::to_string(number) + ": expected key = value");
        }
        set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("missing-file", "cannot read config " + path.string(), ErrorKind::runtime);
    std::stringstream buf;
    buf << in.rdbuf();
    EngineConfig cfg;
    parse_config_text(cfg, buf.str());
    cfg.validate();
    return cfg;
}

}  // namespace greid::harness
