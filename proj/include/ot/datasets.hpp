#ifndef OT_DATASETS_HPP
#define OT_DATASETS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ot/core.hpp"

namespace ot {

// Weighted point cloud in R^dim, the common carrier for every generator.
// Coordinates are stored flat, point p occupies coords[p*dim .. p*dim+dim).
struct PointCloudDistribution {
  int32_t dim = 0;
  std::vector<double> coords;
  std::vector<int64_t> weights;

  int32_t size() const { return static_cast<int32_t>(weights.size()); }
  const double* point(int32_t p) const { return coords.data() + static_cast<size_t>(p) * dim; }
};

// Real geometric distances become integer costs via round(scale * distance).
struct QuantizationPolicy {
  double scale = 1.0;
};

// Default scales per source family, sized so cost magnitudes land in the
// bands the benchmark suite expects.
inline constexpr double kCircleSquareScale = 1e4;
inline constexpr double kImageScale = 6.0;
inline constexpr double kColorScale = 292.0;
inline constexpr double kEmbeddingScale = 1e6;

struct GrayImage {
  int32_t width = 0;
  int32_t height = 0;
  std::vector<int32_t> pixels;  // row-major, nonnegative intensities

  int32_t at(int32_t x, int32_t y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

struct RgbImage {
  int32_t width = 0;
  int32_t height = 0;
  std::vector<std::array<int32_t, 3>> pixels;  // row-major
};

// Supply cloud: the s x s grid of integral points around the origin, where
// s = sqrt(k) (k must be a perfect square). For even s an exactly centered
// integral grid does not exist; offsets run i - floor((s-1)/2).
// Demand cloud: the k integral points closest to the origin, ordered by
// (radius, angle from the positive x axis, x, y). Unit weights on both sides.
std::pair<PointCloudDistribution, PointCloudDistribution>
gen_circle_square_points(int64_t k);

// The unit-capacity instance over those clouds, named "cs<k>".
OTInstance gen_circle_square(int64_t k, double scale = kCircleSquareScale);

// One point per nonzero pixel at its (x, y) position, weighted
// max(1, floor(intensity * total_mass / sum_of_intensities)).
// Pairs produced this way need rebalance_totals before build_instance.
PointCloudDistribution image_to_distribution(const GrayImage& img,
                                             int64_t total_mass = 1000000);

// One point per pixel as (x, y, r, g, b), every coordinate min-max scaled
// to [0, 1] across the image (constant coordinates map to 0). Unit weights.
PointCloudDistribution color_image_to_points(const RgbImage& img);

// Equalizes the two totals by raising the largest weight on the lighter side.
void rebalance_totals(PointCloudDistribution& a, PointCloudDistribution& b);

// Dense instance over two clouds of equal dimension and equal total weight;
// costs are round(policy.scale * euclidean_distance).
OTInstance build_instance(const PointCloudDistribution& supply,
                          const PointCloudDistribution& demand,
                          QuantizationPolicy policy, std::string name);

// Plain-text parsers. load_pgm accepts P2, load_ppm accepts P3, both with
// '#' comments. load_embedding_cloud reads one point per line formatted as
// "<count> <v1> ... <vd>" with a consistent dimension across lines.
GrayImage load_pgm(const std::string& path);
RgbImage load_ppm(const std::string& path);
PointCloudDistribution load_embedding_cloud(const std::string& path);

}  // namespace ot

#endif
