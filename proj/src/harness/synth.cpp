#include "greid/harness/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "greid/error.hpp"

namespace greid::harness {

namespace {

constexpr int kImageWidth = 640;
constexpr int kImageHeight = 480;
constexpr double kBoxW = 40.0;
constexpr double kBoxH = 100.0;

struct Person {
    Vector feature;
    Point position;  // unit square
};

Vector unit(Vector v) {
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n > 0.0)
        for (double& x : v) x /= n;
    return v;
}

BoundingBox box_at(Point p) {
    const double cx = 40.0 + p.x * (kImageWidth - 80.0);
    const double cy = 60.0 + p.y * (kImageHeight - 120.0);
    return {cx - kBoxW / 2, cy - kBoxH / 2, kBoxW, kBoxH};
}

}  // namespace

void SynthConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n_groups < 1 || min_size < 1 || max_size < min_size || feature_dim < 1 || !(feature_noise >= 0.0) ||
        !(layout_jitter >= 0.0) || !prob(member_change_prob) || !(background_weight >= 0.0)) {
        throw Error("invalid-config", "synthetic dataset settings out of range");
    }
}

SynthData synthesize(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(cfg.min_size, cfg.max_size);
    const auto dim = static_cast<std::size_t>(cfg.feature_dim);

    auto latent = [&] {
        Vector v(dim);
        for (double& x : v) x = gauss(rng);
        return unit(std::move(v));
    };
    auto view = [&](const std::vector<Person>& persons, const std::string& id, const std::string& camera, int gid,
                    SynthData& out) {
        GroupObservation obs{id, camera, gid, {}, {kImageWidth, kImageHeight}, std::nullopt};
        FeatureRecord rec;
        Vector sum(dim, 0.0);
        for (const auto& p : persons) {
            obs.boxes.push_back(box_at(p.position));
            rec.persons.push_back(p.feature);
            for (std::size_t k = 0; k < dim; ++k) sum[k] += p.feature[k];
        }
        sum = unit(std::move(sum));
        const Vector scene = latent();
        for (std::size_t k = 0; k < dim; ++k) sum[k] += cfg.background_weight * scene[k];
        rec.global = unit(std::move(sum));
        out.dataset.images.push_back(std::move(obs));
        out.features.records.emplace(id, std::move(rec));
    };

    SynthData out;
    out.dataset.cameras = {"A", "B"};
    out.features.dim = dim;
    const double p_half = cfg.member_change_prob / 2.0;
    for (int g = 0; g < cfg.n_groups; ++g) {
        const int n = size_dist(rng);
        std::vector<Vector> identities;
        std::vector<Person> a, b;
        for (int i = 0; i < n; ++i) {
            identities.push_back(latent());
            a.push_back({unit(identities.back()), {uniform(rng), uniform(rng)}});
        }
        for (int i = 0; i < n; ++i) {
            const bool dropped = uniform(rng) < p_half;
            Vector f = identities[static_cast<std::size_t>(i)];
            for (double& x : f) x += cfg.feature_noise * gauss(rng);
            Point pos = a[static_cast<std::size_t>(i)].position;
            pos.x = std::clamp(pos.x + cfg.layout_jitter * gauss(rng), 0.0, 1.0);
            pos.y = std::clamp(pos.y + cfg.layout_jitter * gauss(rng), 0.0, 1.0);
            if (!dropped) b.push_back({unit(std::move(f)), pos});
        }
        // Keep at least one shared member so the two views stay the same group.
        if (b.empty()) {
            Vector f = identities[0];
            for (double& x : f) x += cfg.feature_noise * gauss(rng);
            b.push_back({unit(std::move(f)), a[0].position});
        }
        if (uniform(rng) < p_half) {
            Vector f = latent();
            b.push_back({unit(std::move(f)), {uniform(rng), uniform(rng)}});
        }
        std::shuffle(b.begin(), b.end(), rng);
        view(a, "g" + std::to_string(g) + "_cA", "A", g, out);
        view(b, "g" + std::to_string(g) + "_cB", "B", g, out);
    }
    return out;
}

void write_synth(const SynthData& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("unwritable-path", "cannot create " + dir.string(), ErrorKind::runtime);
    save_dataset(data.dataset, dir / "dataset.json");
    write_feature_file(data.features, dir / "features.json", FeatureFileFormat::text);
}

}  // namespace greid::harness
