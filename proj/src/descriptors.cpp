#include "greid/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "greid/error.hpp"
#include "parallel.hpp"

namespace greid {

RgbImage crop(const RgbImage& image, const BoundingBox& box) {
    const int x0 = std::max(0, static_cast<int>(std::floor(box.x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(box.y)));
    const int x1 = std::min(image.width, static_cast<int>(std::ceil(box.x + box.w)));
    const int y1 = std::min(image.height, static_cast<int>(std::ceil(box.y + box.h)));
    if (x1 <= x0 || y1 <= y0) return {};
    RgbImage out(x1 - x0, y1 - y0);
    for (int y = y0; y < y1; ++y) {
        std::copy_n(image.at(x0, y), static_cast<std::size_t>(out.width) * 3, out.at(0, y - y0));
    }
    return out;
}

RgbImage resize_bilinear(const RgbImage& image, int width, int height) {
    RgbImage out(width, height);
    const double sx = static_cast<double>(image.width) / width;
    const double sy = static_cast<double>(image.height) / height;
    for (int y = 0; y < height; ++y) {
        const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, image.height - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, image.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, image.width - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, image.width - 1);
            const double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                const double top = (1.0 - wx) * image.at(x0, y0)[c] + wx * image.at(x1, y0)[c];
                const double bottom = (1.0 - wx) * image.at(x0, y1)[c] + wx * image.at(x1, y1)[c];
                const double v = (1.0 - wy) * top + wy * bottom;
                out.at(x, y)[c] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

namespace {

struct Hsv {
    double h, s, v;  // h in [0, 360), s and v in [0, 1]
};

Hsv to_hsv(double r, double g, double b) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    double h = 0.0;
    if (delta > 0.0) {
        if (mx == r) {
            h = 60.0 * std::fmod((g - b) / delta, 6.0);
        } else if (mx == g) {
            h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (h < 0.0) h += 360.0;
    }
    return {h, mx > 0.0 ? delta / mx : 0.0, mx};
}

struct Lab {
    double l, a, b;
};

double srgb_to_linear(double c) {
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

// sRGB (D65) to CIE L*a*b*.
Lab to_lab(double r, double g, double b) {
    const double rl = srgb_to_linear(r), gl = srgb_to_linear(g), bl = srgb_to_linear(b);
    const double x = (0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl) / 0.95047;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = (0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl) / 1.08883;
    const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

int bin_of(double value, double lo, double hi, int bins) {
    const int k = static_cast<int>(std::floor((value - lo) / (hi - lo) * bins));
    return std::clamp(k, 0, bins - 1);
}

void normalize_or_uniform(std::span<double> h) {
    double total = 0.0;
    for (double v : h) total += v;
    if (total > 0.0) {
        for (double& v : h) v /= total;
    } else {
        for (double& v : h) v = 1.0 / static_cast<double>(h.size());
    }
}

void normalize_unit_sum(Vector& v) {
    double total = 0.0;
    for (double x : v) total += x;
    for (double& x : v) x /= total;
}

}  // namespace

Vector stripe_appearance_feature(const RgbImage& crop_image, const StripeDescriptorConfig& cfg) {
    if (crop_image.empty()) throw Error("empty-crop", "appearance crop has no pixels");
    if (cfg.n_stripes < 1 || cfg.n_stripes > crop_image.height || cfg.n_stripes > cfg.resize_height) {
        throw Error("invalid-stripes", "stripe count " + std::to_string(cfg.n_stripes) +
                                           " exceeds crop height " + std::to_string(crop_image.height));
    }
    const RgbImage img = resize_bilinear(crop_image, cfg.resize_width, cfg.resize_height);
    const int W = img.width, H = img.height;
    const int cb = cfg.color_bins, gb = cfg.gradient_bins;
    const std::size_t per_stripe = static_cast<std::size_t>(9 * cb + gb);

    std::vector<double> gray(static_cast<std::size_t>(W) * H);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            const auto* p = img.at(x, y);
            gray[static_cast<std::size_t>(y) * W + x] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    auto g = [&](int x, int y) {
        x = std::clamp(x, 0, W - 1);
        y = std::clamp(y, 0, H - 1);
        return gray[static_cast<std::size_t>(y) * W + x];
    };

    Vector out(per_stripe * static_cast<std::size_t>(cfg.n_stripes), 0.0);
    for (int s = 0; s < cfg.n_stripes; ++s) {
        const int row0 = s * H / cfg.n_stripes;
        const int row1 = (s + 1) * H / cfg.n_stripes;
        double* hist = out.data() + per_stripe * static_cast<std::size_t>(s);
        for (int y = row0; y < row1; ++y) {
            for (int x = 0; x < W; ++x) {
                const auto* p = img.at(x, y);
                const double r = p[0] / 255.0, gr = p[1] / 255.0, b = p[2] / 255.0;
                hist[0 * cb + p[0] * cb / 256] += 1.0;
                hist[1 * cb + p[1] * cb / 256] += 1.0;
                hist[2 * cb + p[2] * cb / 256] += 1.0;
                const Hsv hsv = to_hsv(r, gr, b);
                hist[3 * cb + bin_of(hsv.h, 0.0, 360.0, cb)] += 1.0;
                hist[4 * cb + bin_of(hsv.s, 0.0, 1.0, cb)] += 1.0;
                hist[5 * cb + bin_of(hsv.v, 0.0, 1.0, cb)] += 1.0;
                const Lab lab = to_lab(r, gr, b);
                hist[6 * cb + bin_of(lab.l, 0.0, 100.0, cb)] += 1.0;
                hist[7 * cb + bin_of(lab.a, -128.0, 128.0, cb)] += 1.0;
                hist[8 * cb + bin_of(lab.b, -128.0, 128.0, cb)] += 1.0;

                const double gx = g(x + 1, y) - g(x - 1, y);
                const double gy = g(x, y + 1) - g(x, y - 1);
                const double mag = std::hypot(gx, gy);
                if (mag > 0.0) {
                    double theta = std::atan2(gy, gx);
                    if (theta < 0.0) theta += std::numbers::pi;
                    hist[9 * cb + bin_of(theta, 0.0, std::numbers::pi, gb)] += mag;
                }
            }
        }
        for (int c = 0; c < 9; ++c) normalize_or_uniform({hist + c * cb, static_cast<std::size_t>(cb)});
        normalize_or_uniform({hist + 9 * cb, static_cast<std::size_t>(gb)});
    }
    return out;
}

Vector global_feature(const RgbImage& image, const GroupObservation& obs,
                      const StripeDescriptorConfig& cfg, bool whole_image) {
    if (whole_image || obs.boxes.empty()) return stripe_appearance_feature(image, cfg);
    double x0 = obs.boxes.front().x, y0 = obs.boxes.front().y;
    double x1 = x0 + obs.boxes.front().w, y1 = y0 + obs.boxes.front().h;
    for (const auto& b : obs.boxes) {
        x0 = std::min(x0, b.x);
        y0 = std::min(y0, b.y);
        x1 = std::max(x1, b.x + b.w);
        y1 = std::max(y1, b.y + b.h);
    }
    return stripe_appearance_feature(crop(image, {x0, y0, x1 - x0, y1 - y0}), cfg);
}

void SpatialHistogramConfig::validate() const {
    if (n_dist_bins < 2 || n_angle_bins < 2 || !(sigma_dist > 0.0) || !(sigma_angle > 0.0) ||
        !(d_min > 0.0) || !(d_min < d_max)) {
        throw Error("invalid-config", "spatial histogram configuration out of range");
    }
}

Vector log_distance_histogram(double rho, const SpatialHistogramConfig& cfg) {
    if (std::isnan(rho)) throw Error("invalid-argument", "log-distance is NaN");
    const double lo = std::log(cfg.d_min), hi = std::log(cfg.d_max);
    const int n = cfg.n_dist_bins;
    const int m = bin_of(std::clamp(rho, lo, hi), lo, hi, n);
    Vector h(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double d = k - m;
        h[static_cast<std::size_t>(k)] = std::exp(-d * d / (2.0 * cfg.sigma_dist * cfg.sigma_dist));
    }
    normalize_unit_sum(h);
    return h;
}

Vector angle_histogram(double theta, const SpatialHistogramConfig& cfg) {
    if (!std::isfinite(theta)) throw Error("invalid-argument", "angle is not finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0.0) theta += two_pi;
    const int n = cfg.n_angle_bins;
    const int m = bin_of(theta, 0.0, two_pi, n);
    const double denom = 2.0 * cfg.sigma_angle * cfg.sigma_angle;
    Vector h(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double d = k - m;
        h[static_cast<std::size_t>(k)] =
            std::exp(-d * d / denom) + std::exp(-(d - n) * (d - n) / denom) +
            std::exp(-(d + n) * (d + n) / denom);
    }
    normalize_unit_sum(h);
    return h;
}

Vector edge_spatial_feature(const BoundingBox& a, const BoundingBox& b, ImageSize image_size,
                            const SpatialHistogramConfig& cfg) {
    Point p = a.center(), q = b.center();
    if (q.x < p.x || (q.x == p.x && q.y < p.y)) std::swap(p, q);
    const double dx = q.x - p.x, dy = q.y - p.y;
    const double dist = std::hypot(dx, dy);
    const double diag = image_size.diagonal() > 0.0 ? image_size.diagonal() : 1.0;
    double rho = std::log(cfg.d_min);
    double theta = 0.0;
    if (dist > 0.0) {
        rho = std::log(dist / diag);
        theta = std::atan2(dy, dx);
    }
    Vector out = log_distance_histogram(rho, cfg);
    const Vector ang = angle_histogram(theta, cfg);
    out.insert(out.end(), ang.begin(), ang.end());
    return out;
}

namespace {

Vector mean_of(std::span<const Vector* const> vs) {
    Vector out(vs.front()->size(), 0.0);
    for (const Vector* v : vs)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += (*v)[k];
    for (double& x : out) x /= static_cast<double>(vs.size());
    return out;
}

}  // namespace

SubgroupFeature aggregate_subgroup(const FeatureBundle& bundle, const GranularObject& object) {
    const int n = bundle.size();
    const auto& m = object.members;
    if (m.size() < 2 || m.size() > 3) {
        throw Error("invalid-argument", "subgroup aggregation needs a 2- or 3-person object");
    }
    std::vector<const Vector*> app;
    for (int i : m) app.push_back(&bundle.person_appearance.at(static_cast<std::size_t>(i)));
    std::vector<const Vector*> edges;
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            edges.push_back(&bundle.edge_spatial.at(static_cast<std::size_t>(pair_rank(n, m[a], m[b]))));
    // Sum in member-sorted order so the result does not depend on how members were listed.
    std::sort(app.begin(), app.end());
    std::sort(edges.begin(), edges.end());
    return {mean_of(app), mean_of(edges)};
}

FeatureBundle assemble_bundle(const GroupObservation& obs, std::vector<Vector> person_appearance,
                              Vector global_appearance, std::optional<std::vector<Vector>> edge_spatial,
                              const SpatialHistogramConfig& cfg) {
    const int n = obs.size();
    if (static_cast<int>(person_appearance.size()) != n) {
        throw Error("feature-count-mismatch", "image '" + obs.image_id + "' has " + std::to_string(n) +
                                                  " boxes but " + std::to_string(person_appearance.size()) +
                                                  " person features");
    }
    FeatureBundle bundle;
    bundle.person_appearance = std::move(person_appearance);
    bundle.global_appearance = std::move(global_appearance);
    if (edge_spatial) {
        if (static_cast<int>(edge_spatial->size()) != pair_count(n)) {
            throw Error("feature-count-mismatch", "image '" + obs.image_id + "' edge vector count");
        }
        bundle.edge_spatial = std::move(*edge_spatial);
    } else {
        for (const auto& p : all_pairs(n)) {
            bundle.edge_spatial.push_back(edge_spatial_feature(obs.boxes[static_cast<std::size_t>(p[0])],
                                                               obs.boxes[static_cast<std::size_t>(p[1])],
                                                               obs.image_size, cfg));
        }
    }
    for (const auto& p : all_pairs(n)) {
        bundle.pairs.push_back(aggregate_subgroup(bundle, {Granularity::medium, {p[0], p[1]}, n == 2}));
    }
    for (const auto& t : all_triples(n)) {
        bundle.triples.push_back(aggregate_subgroup(bundle, {Granularity::coarse, {t[0], t[1], t[2]}, false}));
    }
    bundle.validate();
    return bundle;
}

FeatureBundle extract_bundle(const RgbImage& image, const GroupObservation& obs,
                             const StripeDescriptorConfig& stripe_cfg,
                             const SpatialHistogramConfig& spatial_cfg, bool global_whole_image) {
    std::vector<Vector> persons;
    persons.reserve(obs.boxes.size());
    for (const auto& box : obs.boxes) persons.push_back(stripe_appearance_feature(crop(image, box), stripe_cfg));
    return assemble_bundle(obs, std::move(persons), global_feature(image, obs, stripe_cfg, global_whole_image),
                           std::nullopt, spatial_cfg);
}

std::vector<FeatureBundle> extract_bundles(std::span<const RgbImage> images,
                                           std::span<const GroupObservation> observations,
                                           const StripeDescriptorConfig& stripe_cfg,
                                           const SpatialHistogramConfig& spatial_cfg) {
    if (images.size() != observations.size()) throw Error("invalid-argument", "image/observation count mismatch");
    std::vector<FeatureBundle> out(observations.size());
    detail::parallel_for(static_cast<std::ptrdiff_t>(observations.size()), [&](std::ptrdiff_t i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = extract_bundle(images[k], observations[k], stripe_cfg, spatial_cfg);
    });
    return out;
}

std::vector<FeatureBundle> extract_bundles_serial(std::span<const RgbImage> images,
                                                  std::span<const GroupObservation> observations,
                                                  const StripeDescriptorConfig& stripe_cfg,
                                                  const SpatialHistogramConfig& spatial_cfg) {
    if (images.size() != observations.size()) throw Error("invalid-argument", "image/observation count mismatch");
    std::vector<FeatureBundle> out;
    out.reserve(observations.size());
    for (std::size_t k = 0; k < observations.size(); ++k) {
        out.push_back(extract_bundle(images[k], observations[k], stripe_cfg, spatial_cfg));
    }
    return out;
}

}  // namespace greid
