#include "ot/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ot {

namespace {

double euclidean(const double* a, const double* b, int32_t dim) {
  double s = 0.0;
  for (int32_t d = 0; d < dim; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

// angle in [0, 2*pi) from the positive x axis; (0, 0) maps to 0
double angle_of(int64_t x, int64_t y) {
  if (x == 0 && y == 0) return 0.0;
  double a = std::atan2(static_cast<double>(y), static_cast<double>(x));
  if (a < 0.0) a += 2.0 * 3.14159265358979323846;
  return a;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// skips whitespace and '#' comment lines in PNM headers and payloads
int64_t next_pnm_int(std::istream& in, const std::string& path) {
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      in.unget();
      int64_t v;
      if (in >> v) return v;
      break;
    }
  }
  throw std::runtime_error("truncated image file " + path);
}

}  // namespace

std::pair<PointCloudDistribution, PointCloudDistribution>
gen_circle_square_points(int64_t k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  const int64_t s = std::llround(std::sqrt(static_cast<double>(k)));
  if (s * s != k) throw std::invalid_argument("k must be a perfect square");

  PointCloudDistribution square;
  square.dim = 2;
  square.weights.assign(k, 1);
  square.coords.reserve(2 * k);
  const int64_t off = (s - 1) / 2;
  for (int64_t y = 0; y < s; ++y)
    for (int64_t x = 0; x < s; ++x) {
      square.coords.push_back(static_cast<double>(x - off));
      square.coords.push_back(static_cast<double>(y - off));
    }

  // every candidate within radius ceil(sqrt(k)) + 2 is enough, the disk of
  // that radius holds more than pi * k integral points
  const int64_t R = s + 2;
  struct Cand {
    int64_t r2;
    double angle;
    int64_t x, y;
  };
  std::vector<Cand> cands;
  cands.reserve(static_cast<size_t>((2 * R + 1) * (2 * R + 1)));
  for (int64_t y = -R; y <= R; ++y)
    for (int64_t x = -R; x <= R; ++x) {
      const int64_t r2 = x * x + y * y;
      if (r2 <= R * R) cands.push_back({r2, angle_of(x, y), x, y});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.r2 != b.r2) return a.r2 < b.r2;
    if (a.angle != b.angle) return a.angle < b.angle;
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  });
  if (static_cast<int64_t>(cands.size()) < k)
    throw std::logic_error("candidate disk too small");

  PointCloudDistribution circle;
  circle.dim = 2;
  circle.weights.assign(k, 1);
  circle.coords.reserve(2 * k);
  for (int64_t p = 0; p < k; ++p) {
    circle.coords.push_back(static_cast<double>(cands[p].x));
    circle.coords.push_back(static_cast<double>(cands[p].y));
  }
  return {std::move(square), std::move(circle)};
}

OTInstance gen_circle_square(int64_t k, double scale) {
  auto [square, circle] = gen_circle_square_points(k);
  return build_instance(square, circle, {scale}, "cs" + std::to_string(k));
}

PointCloudDistribution image_to_distribution(const GrayImage& img,
                                             int64_t total_mass) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw std::invalid_argument("malformed image");
  if (total_mass <= 0) throw std::invalid_argument("total mass must be positive");

  int64_t intensity_sum = 0;
  for (int32_t v : img.pixels) {
    if (v < 0) throw std::invalid_argument("negative pixel intensity");
    intensity_sum += v;
  }
  if (intensity_sum == 0)
    throw std::invalid_argument("image has no nonzero pixels");

  PointCloudDistribution out;
  out.dim = 2;
  for (int32_t y = 0; y < img.height; ++y)
    for (int32_t x = 0; x < img.width; ++x) {
      const int64_t v = img.at(x, y);
      if (v == 0) continue;
      out.coords.push_back(static_cast<double>(x));
      out.coords.push_back(static_cast<double>(y));
      out.weights.push_back(std::max<int64_t>(1, v * total_mass / intensity_sum));
    }
  return out;
}

PointCloudDistribution color_image_to_points(const RgbImage& img) {
  if (img.width <= 0 || img.height <= 0 ||
      img.pixels.size() != static_cast<size_t>(img.width) * img.height)
    throw std::invalid_argument("malformed image");

  const int32_t np = img.width * img.height;
  std::vector<std::array<double, 5>> raw(np);
  for (int32_t y = 0, p = 0; y < img.height; ++y)
    for (int32_t x = 0; x < img.width; ++x, ++p) {
      const auto& px = img.pixels[p];
      raw[p] = {static_cast<double>(x), static_cast<double>(y),
                static_cast<double>(px[0]), static_cast<double>(px[1]),
                static_cast<double>(px[2])};
    }

  for (int32_t d = 0; d < 5; ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : raw) {
      lo = std::min(lo, r[d]);
      hi = std::max(hi, r[d]);
    }
    const double span = hi - lo;
    for (auto& r : raw) r[d] = span > 0.0 ? (r[d] - lo) / span : 0.0;
  }

  PointCloudDistribution out;
  out.dim = 5;
  out.weights.assign(np, 1);
  out.coords.reserve(static_cast<size_t>(np) * 5);
  for (const auto& r : raw) out.coords.insert(out.coords.end(), r.begin(), r.end());
  return out;
}

void rebalance_totals(PointCloudDistribution& a, PointCloudDistribution& b) {
  const int64_t ta = std::accumulate(a.weights.begin(), a.weights.end(), int64_t{0});
  const int64_t tb = std::accumulate(b.weights.begin(), b.weights.end(), int64_t{0});
  if (ta == tb) return;
  PointCloudDistribution& lighter = ta < tb ? a : b;
  auto largest = std::max_element(lighter.weights.begin(), lighter.weights.end());
  *largest += std::abs(ta - tb);
}

OTInstance build_instance(const PointCloudDistribution& supply,
                          const PointCloudDistribution& demand,
                          QuantizationPolicy policy, std::string name) {
  if (supply.dim != demand.dim)
    throw std::invalid_argument("point dimensions differ");
  if (supply.size() == 0 || demand.size() == 0)
    throw std::invalid_argument("empty distribution");
  if (!(policy.scale > 0.0))
    throw std::invalid_argument("quantization scale must be positive");
  const int64_t ts = std::accumulate(supply.weights.begin(), supply.weights.end(), int64_t{0});
  const int64_t td = std::accumulate(demand.weights.begin(), demand.weights.end(), int64_t{0});
  if (ts != td)
    throw std::invalid_argument("totals differ, rebalance_totals first");

  OTInstance inst;
  inst.n = supply.size();
  inst.m = demand.size();
  inst.supplies = supply.weights;
  inst.demands = demand.weights;
  inst.name = std::move(name);
  inst.cost.resize(static_cast<size_t>(inst.n) * inst.m);
  for (int32_t i = 0; i < inst.n; ++i) {
    const double* pi = supply.point(i);
    int64_t* row = inst.cost.data() + static_cast<size_t>(i) * inst.m;
    for (int32_t j = 0; j < inst.m; ++j)
      row[j] = std::llround(policy.scale * euclidean(pi, demand.point(j), supply.dim));
  }
  if (auto err = validate_instance(inst))
    throw std::runtime_error("generated instance invalid: " + *err);
  return inst;
}

GrayImage load_pgm(const std::string& path) {
  auto in = open_or_throw(path);
  std::string magic;
  in >> magic;
  if (magic != "P2") throw std::runtime_error(path + ": expected plain PGM (P2)");
  GrayImage img;
  img.width = static_cast<int32_t>(next_pnm_int(in, path));
  img.height = static_cast<int32_t>(next_pnm_int(in, path));
  const int64_t maxval = next_pnm_int(in, path);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0)
    throw std::runtime_error(path + ": bad PGM header");
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  for (auto& px : img.pixels) px = static_cast<int32_t>(next_pnm_int(in, path));
  return img;
}

RgbImage load_ppm(const std::string& path) {
  auto in = open_or_throw(path);
  std::string magic;
  in >> magic;
  if (magic != "P3") throw std::runtime_error(path + ": expected plain PPM (P3)");
  RgbImage img;
  img.width = static_cast<int32_t>(next_pnm_int(in, path));
  img.height = static_cast<int32_t>(next_pnm_int(in, path));
  const int64_t maxval = next_pnm_int(in, path);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0)
    throw std::runtime_error(path + ": bad PPM header");
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  for (auto& px : img.pixels)
    for (int c = 0; c < 3; ++c) px[c] = static_cast<int32_t>(next_pnm_int(in, path));
  return img;
}

PointCloudDistribution load_embedding_cloud(const std::string& path) {
  auto in = open_or_throw(path);
  PointCloudDistribution out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    int64_t w;
    if (!(ls >> w) || w <= 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected positive count");
    std::vector<double> vec;
    double v;
    while (ls >> v) vec.push_back(v);
    if (vec.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected embedding coordinates");
    if (out.dim == 0) out.dim = static_cast<int32_t>(vec.size());
    if (static_cast<int32_t>(vec.size()) != out.dim)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": inconsistent embedding dimension");
    out.weights.push_back(w);
    out.coords.insert(out.coords.end(), vec.begin(), vec.end());
  }
  if (out.weights.empty()) throw std::runtime_error(path + ": no points");
  return out;
}

}  // namespace ot
