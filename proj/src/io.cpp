#include "ot/io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace ot {

namespace {

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

OTInstance load_dense(std::istream& in, int32_t n, const std::string& path) {
  OTInstance inst;
  int32_t m;
  if (!(in >> m)) fail(path, "missing m");
  inst.n = n;
  inst.m = m;
  if (n <= 0 || m <= 0) fail(path, "dimensions must be positive");
  inst.supplies.resize(n);
  inst.demands.resize(m);
  inst.cost.resize(static_cast<size_t>(n) * m);
  for (auto& s : inst.supplies)
    if (!(in >> s)) fail(path, "truncated supplies");
  for (auto& d : inst.demands)
    if (!(in >> d)) fail(path, "truncated demands");
  for (auto& c : inst.cost)
    if (!(in >> c)) fail(path, "truncated cost matrix");
  inst.name = stem_of(path);
  return inst;
}

PointCloudDistribution read_cloud(std::istream& in, int32_t count, int32_t dim,
                                  const std::string& path) {
  PointCloudDistribution cloud;
  cloud.dim = dim;
  cloud.weights.resize(count);
  cloud.coords.resize(static_cast<size_t>(count) * dim);
  for (int32_t p = 0; p < count; ++p) {
    if (!(in >> cloud.weights[p])) fail(path, "truncated point weights");
    for (int32_t d = 0; d < dim; ++d)
      if (!(in >> cloud.coords[static_cast<size_t>(p) * dim + d]))
        fail(path, "truncated point coordinates");
  }
  return cloud;
}

OTInstance load_points(std::istream& in, const std::string& path) {
  int32_t d, n, m;
  double scale;
  if (!(in >> d)) fail(path, "missing dimension after POINTS");
  if (!(in >> n >> m >> scale)) fail(path, "missing n m scale line");
  if (d <= 0) fail(path, "dimension must be positive");
  if (n <= 0 || m <= 0) fail(path, "dimensions must be positive");
  auto supply = read_cloud(in, n, d, path);
  auto demand = read_cloud(in, m, d, path);
  return build_instance(supply, demand, {scale}, stem_of(path));
}

}  // namespace

OTInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string head;
  if (!(in >> head)) fail(path, "empty file");

  OTInstance inst;
  if (head == "POINTS") {
    inst = load_points(in, path);
  } else {
    int32_t n;
    try {
      n = static_cast<int32_t>(std::stol(head));
    } catch (const std::exception&) {
      fail(path, "unrecognized header token '" + head + "'");
    }
    inst = load_dense(in, n, path);
  }
  if (auto err = validate_instance(inst)) fail(path, *err);
  return inst;
}

void save_instance_dense(const OTInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << inst.n << ' ' << inst.m << '\n';
  for (int32_t i = 0; i < inst.n; ++i)
    out << inst.supplies[i] << (i + 1 < inst.n ? ' ' : '\n');
  for (int32_t j = 0; j < inst.m; ++j)
    out << inst.demands[j] << (j + 1 < inst.m ? ' ' : '\n');
  for (int32_t i = 0; i < inst.n; ++i) {
    const int64_t* row = inst.cost.data() + static_cast<size_t>(i) * inst.m;
    for (int32_t j = 0; j < inst.m; ++j)
      out << row[j] << (j + 1 < inst.m ? ' ' : '\n');
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

void save_instance_points(const PointCloudDistribution& supply,
                          const PointCloudDistribution& demand, double scale,
                          const std::string& path) {
  if (supply.dim != demand.dim)
    throw std::invalid_argument("point dimensions differ");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  out << "POINTS " << supply.dim << '\n'
      << supply.size() << ' ' << demand.size() << ' ' << scale << '\n';
  auto emit = [&](const PointCloudDistribution& cloud) {
    for (int32_t p = 0; p < cloud.size(); ++p) {
      out << cloud.weights[p];
      const double* pt = cloud.point(p);
      for (int32_t d = 0; d < cloud.dim; ++d) out << ' ' << pt[d];
      out << '\n';
    }
  };
  emit(supply);
  emit(demand);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace ot
