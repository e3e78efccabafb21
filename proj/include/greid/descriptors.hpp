#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "greid/core.hpp"

namespace greid {

/// Interleaved 8-bit RGB image.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    bool empty() const { return width <= 0 || height <= 0; }
    std::uint8_t* at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

/// Sub-image under the box, clipped to the image bounds.
RgbImage crop(const RgbImage& image, const BoundingBox& box);
RgbImage resize_bilinear(const RgbImage& image, int width, int height);

struct StripeDescriptorConfig {
    int n_stripes = 18;
    int resize_width = 48;
    int resize_height = 128;
    int color_bins = 16;
    int gradient_bins = 8;

    std::size_t dimension() const {
        return static_cast<std::size_t>(n_stripes) * (9 * color_bins + gradient_bins);
    }
};

// Per horizontal stripe: 16-bin histograms of R,G,B,H,S,V,L,a,b and an 8-bin
// magnitude-weighted gradient orientation histogram, each normalized to unit sum.
// 18 stripes x 152 = 2736 values with the defaults.
Vector stripe_appearance_feature(const RgbImage& crop, const StripeDescriptorConfig& cfg = {});

/// Stripe descriptor of the union box of all persons, or of the whole image.
Vector global_feature(const RgbImage& image, const GroupObservation& obs,
                      const StripeDescriptorConfig& cfg = {}, bool whole_image = false);

struct SpatialHistogramConfig {
    int n_dist_bins = 10;
    int n_angle_bins = 9;
    double sigma_dist = 1.0;   // in bins
    double sigma_angle = 1.0;  // in bins
    double d_min = 0.01;       // center distance / image diagonal
    double d_max = 1.4142135623730951;

    void validate() const;
    std::size_t dimension() const { return static_cast<std::size_t>(n_dist_bins + n_angle_bins); }
};

Vector log_distance_histogram(double rho, const SpatialHistogramConfig& cfg = {});
Vector angle_histogram(double theta, const SpatialHistogramConfig& cfg = {});

/// [distance histogram, angle histogram] for the edge between two boxes; symmetric in its arguments.
Vector edge_spatial_feature(const BoundingBox& a, const BoundingBox& b, ImageSize image_size,
                            const SpatialHistogramConfig& cfg = {});

/// Mean of member appearances and mean of the internal edge vectors.
SubgroupFeature aggregate_subgroup(const FeatureBundle& bundle, const GranularObject& object);

/// Completes a bundle from per-person and global appearance vectors. Edge vectors are
/// computed from the boxes unless supplied (in pair-rank order).
FeatureBundle assemble_bundle(const GroupObservation& obs, std::vector<Vector> person_appearance,
                              Vector global_appearance,
                              std::optional<std::vector<Vector>> edge_spatial = std::nullopt,
                              const SpatialHistogramConfig& cfg = {});

/// Hand-crafted descriptors for every granular object of one observation.
FeatureBundle extract_bundle(const RgbImage& image, const GroupObservation& obs,
                             const StripeDescriptorConfig& stripe_cfg = {},
                             const SpatialHistogramConfig& spatial_cfg = {},
                             bool global_whole_image = false);

// Batch extraction over many images. The parallel version distributes images over
// OpenMP threads; the serial one is the reference it is tested against.
std::vector<FeatureBundle> extract_bundles(std::span<const RgbImage> images,
                                           std::span<const GroupObservation> observations,
                                           const StripeDescriptorConfig& stripe_cfg = {},
                                           const SpatialHistogramConfig& spatial_cfg = {});
std::vector<FeatureBundle> extract_bundles_serial(std::span<const RgbImage> images,
                                                  std::span<const GroupObservation> observations,
                                                  const StripeDescriptorConfig& stripe_cfg = {},
                                                  const SpatialHistogramConfig& spatial_cfg = {});

}  // namespace greid
