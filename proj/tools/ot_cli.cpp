// Command-line front end: solve single instances, run benchmark suites,
// derive performance profiles, sweep eta, calibrate parameters, and generate
// the dataset families.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ot/auction.hpp"
#include "ot/bench.hpp"
#include "ot/core.hpp"
#include "ot/datasets.hpp"
#include "ot/hungarian.hpp"
#include "ot/io.hpp"
#include "ot/netsimplex.hpp"
#include "ot/scaling.hpp"

namespace {

std::vector<ot::OTInstance> load_suite(const std::string& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<ot::OTInstance> instances;
  for (const auto& p : paths) instances.push_back(ot::load_instance(p.string()));
  if (instances.empty())
    throw std::runtime_error("no instance files in " + dir);
  return instances;
}

void print_result(const ot::OTInstance& inst, const ot::SolveResult& res) {
  std::printf("instance     %s (%d x %d)\n", inst.name.c_str(), inst.n, inst.m);
  std::printf("objective    %.10g\n", res.objective);
  std::printf("residue      %.6g\n", res.residue);
  std::printf("iterations   %lld\n", static_cast<long long>(res.iterations));
  std::printf("wall_seconds %.6g\n", res.wall_seconds);
  std::printf("exact        %s\n", res.exact ? "yes" : "no");
  std::printf("converged    %s\n", res.converged ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal transport solver suite"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  std::string solve_file, solver_name = "netsimplex";
  double opt_eta = 0.0, opt_eps = 0.0, opt_eps_final = 0.0, opt_budget = 0.0;
  int64_t opt_B = 0;
  bool opt_round = false;
  solve->add_option("instance", solve_file, "instance file")->required();
  solve->add_option("--solver", solver_name,
                    "netsimplex|km|batched_km|auction|auction_scaled|"
                    "sinkhorn|greenkhorn");
  solve->add_option("--eta", opt_eta, "scaling solvers: regularization eta");
  solve->add_option("--epsilon", opt_eps, "auction: bid increment");
  solve->add_option("--epsilon-final", opt_eps_final,
                    "auction_scaled: final epsilon");
  solve->add_option("--B", opt_B, "batched_km: quantization level");
  solve->add_flag("--round", opt_round, "scaling solvers: round the plan");
  solve->add_option("--time-budget", opt_budget, "seconds, 0 = unlimited");

  // bench
  auto* bench = app.add_subcommand("bench", "timed suite run, CSV output");
  std::string bench_dir, bench_out = "results.csv", bench_solvers =
      "netsimplex,sinkhorn,greenkhorn";
  std::string bench_calib;
  int bench_repeats = 3;
  double bench_timeout = 3600.0;
  bench->add_option("--suite", bench_dir, "directory of instance files")
      ->required();
  bench->add_option("--solvers", bench_solvers, "comma-separated solver names");
  bench->add_option("--out", bench_out, "output CSV path");
  bench->add_option("--calibration", bench_calib,
                    "parameter cache CSV from `calibrate`");
  bench->add_option("--repeats", bench_repeats, "timing repeats (median)");
  bench->add_option("--timeout", bench_timeout, "per-run timeout seconds");

  // profile
  auto* profile = app.add_subcommand("profile", "performance profile from CSV");
  std::string profile_in, profile_out = "profile.csv";
  profile->add_option("--in", profile_in, "results CSV")->required();
  profile->add_option("--out", profile_out, "output CSV path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "eta sweep for scaling solvers");
  std::string sweep_file, sweep_out = "sweep.csv", sweep_etas =
      "8,16,32,64,128,256,512,1024";
  sweep->add_option("--instance", sweep_file, "instance file")->required();
  sweep->add_option("--etas", sweep_etas, "comma-separated eta grid");
  sweep->add_option("--out", sweep_out, "output CSV path");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "parameter calibration");
  std::string calib_dir, calib_out = "params.csv";
  double calib_target = 1.1;
  calibrate->add_option("--suite", calib_dir, "directory of instance files")
      ->required();
  calibrate->add_option("--out", calib_out, "cache CSV (reused if present)");
  calibrate->add_option("--target", calib_target, "approximation ratio target");

  // gen
  auto* gen = app.add_subcommand("gen", "dataset generation");
  gen->require_subcommand(1);
  auto* gen_cs = gen->add_subcommand("circlesquare", "grid-vs-disk instance");
  int64_t cs_k = 100;
  double cs_scale = ot::kCircleSquareScale;
  std::string cs_out = "cs.txt";
  gen_cs->add_option("--k", cs_k, "number of points (perfect square)")
      ->required();
  gen_cs->add_option("--scale", cs_scale, "distance-to-cost scale");
  gen_cs->add_option("--out", cs_out, "output instance file");

  auto* gen_img = gen->add_subcommand("image", "grayscale image pair (PGM)");
  std::string img_a, img_b, img_out = "image.txt";
  double img_scale = ot::kImageScale;
  int64_t img_mass = 1000000;
  gen_img->add_option("--a", img_a, "supply-side PGM")->required();
  gen_img->add_option("--b", img_b, "demand-side PGM")->required();
  gen_img->add_option("--scale", img_scale, "distance-to-cost scale");
  gen_img->add_option("--total-mass", img_mass, "weight normalization target");
  gen_img->add_option("--out", img_out, "output instance file");

  auto* gen_cloud = gen->add_subcommand(
      "cloud", "point-cloud pair: PPM color images or embedding files");
  std::string cloud_a, cloud_b, cloud_out = "cloud.txt";
  double cloud_scale = 0.0;
  gen_cloud->add_option("--a", cloud_a, "supply-side file")->required();
  gen_cloud->add_option("--b", cloud_b, "demand-side file")->required();
  gen_cloud->add_option("--scale", cloud_scale,
                        "distance-to-cost scale (default by file kind)");
  gen_cloud->add_option("--out", cloud_out, "output instance file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      const ot::OTInstance inst = ot::load_instance(solve_file);
      ot::SolveResult res;
      if (solver_name == "netsimplex") {
        ot::NetSimplexConfig cfg;
        cfg.time_budget_s = opt_budget;
        res = ot::solve_network_simplex(inst, cfg);
      } else if (solver_name == "km") {
        res = ot::solve_km(inst, nullptr, nullptr, opt_budget);
      } else if (solver_name == "batched_km") {
        ot::BatchedKMConfig cfg;
        if (opt_B > 0) cfg.B = opt_B;
        cfg.time_budget_s = opt_budget;
        res = ot::solve_batched_km(inst, cfg);
      } else if (solver_name == "auction") {
        ot::AuctionConfig cfg;
        if (opt_eps > 0) cfg.epsilon = opt_eps;
        cfg.time_budget_s = opt_budget;
        res = ot::solve_auction(inst, cfg);
      } else if (solver_name == "auction_scaled") {
        ot::AuctionScaledConfig cfg;
        if (opt_eps_final > 0) cfg.epsilon_final = opt_eps_final;
        cfg.time_budget_s = opt_budget;
        res = ot::solve_auction_scaled(inst, cfg);
      } else if (solver_name == "sinkhorn" || solver_name == "greenkhorn") {
        ot::ScalingConfig cfg;
        if (opt_eta > 0) cfg.eta = opt_eta;
        cfg.round_output = opt_round;
        cfg.time_budget_s = opt_budget;
        res = solver_name == "sinkhorn" ? ot::sinkhorn(inst, cfg)
                                        : ot::greenkhorn(inst, cfg);
      } else {
        throw std::invalid_argument("unknown solver: " + solver_name);
      }
      print_result(inst, res);
    } else if (bench->parsed()) {
      const std::vector<ot::OTInstance> instances = load_suite(bench_dir);
      ot::CalibrationCache cache;
      if (!bench_calib.empty()) cache = ot::CalibrationCache(bench_calib);
      std::vector<std::string> names;
      std::stringstream ss(bench_solvers);
      std::string name;
      while (std::getline(ss, name, ','))
        if (!name.empty()) names.push_back(name);
      ot::BenchConfig cfg;
      cfg.repeats = bench_repeats;
      cfg.timeout_s = bench_timeout;
      // calibration is per instance, so the roster is rebuilt per instance
      // with that instance's cache entry (when present)
      std::vector<ot::BenchRecord> records;
      for (const ot::OTInstance& inst : instances) {
        const ot::CalibrationEntry* entry =
            cache.find(inst.name, ot::instance_content_hash(inst));
        std::vector<ot::SolverSpec> specs;
        for (const std::string& s : names)
          specs.push_back(ot::make_solver(s, entry));
        const auto part = ot::run_suite({inst}, specs, cfg);
        records.insert(records.end(), part.begin(), part.end());
      }
      ot::write_records_csv(records, bench_out);
      std::printf("wrote %zu records to %s\n", records.size(),
                  bench_out.c_str());
    } else if (profile->parsed()) {
      const auto records = ot::read_records_csv(profile_in);
      const auto curves = ot::performance_profile(records);
      ot::write_profile_csv(curves, profile_out);
      std::printf("wrote %zu curves to %s\n", curves.size(),
                  profile_out.c_str());
    } else if (sweep->parsed()) {
      const ot::OTInstance inst = ot::load_instance(sweep_file);
      std::vector<double> etas;
      std::stringstream ss(sweep_etas);
      std::string tok;
      while (std::getline(ss, tok, ','))
        if (!tok.empty()) etas.push_back(std::stod(tok));
      const auto rows = ot::eta_sweep(inst, etas);
      ot::write_sweep_csv(rows, sweep_out);
      std::printf("wrote %zu rows to %s\n", rows.size(), sweep_out.c_str());
    } else if (calibrate->parsed()) {
      const std::vector<ot::OTInstance> instances = load_suite(calib_dir);
      ot::CalibrationCache cache(calib_out);
      const auto entries = ot::calibrate_all(instances, &cache, calib_target);
      for (const auto& e : entries) {
        if (e.ok)
          std::printf("%s: eta=%.6g B=%lld auction_eps=%.6g\n",
                      e.instance.c_str(), e.eta,
                      static_cast<long long>(e.B), e.auction_eps);
        else
          std::printf("%s: FAILED (%s)\n", e.instance.c_str(),
                      e.error.c_str());
      }
      std::printf("cache written to %s\n", calib_out.c_str());
    } else if (gen->parsed()) {
      if (gen_cs->parsed()) {
        const auto [supply, demand] = ot::gen_circle_square_points(cs_k);
        ot::save_instance_points(supply, demand, cs_scale, cs_out);
        std::printf("wrote %s (n=%d m=%d)\n", cs_out.c_str(), supply.size(),
                    demand.size());
      } else if (gen_img->parsed()) {
        const ot::GrayImage a = ot::load_pgm(img_a);
        const ot::GrayImage b = ot::load_pgm(img_b);
        ot::PointCloudDistribution da = ot::image_to_distribution(a, img_mass);
        ot::PointCloudDistribution db = ot::image_to_distribution(b, img_mass);
        ot::rebalance_totals(da, db);
        const ot::OTInstance inst = ot::build_instance(
            da, db, ot::QuantizationPolicy{img_scale},
            std::filesystem::path(img_out).stem().string());
        ot::save_instance_dense(inst, img_out);
        std::printf("wrote %s (n=%d m=%d)\n", img_out.c_str(), inst.n, inst.m);
      } else if (gen_cloud->parsed()) {
        const auto ext = std::filesystem::path(cloud_a).extension().string();
        ot::PointCloudDistribution da, db;
        double scale = cloud_scale;
        if (ext == ".ppm") {
          da = ot::color_image_to_points(ot::load_ppm(cloud_a));
          db = ot::color_image_to_points(ot::load_ppm(cloud_b));
          if (scale <= 0) scale = ot::kColorScale;
        } else {
          da = ot::load_embedding_cloud(cloud_a);
          db = ot::load_embedding_cloud(cloud_b);
          if (scale <= 0) scale = ot::kEmbeddingScale;
        }
        ot::rebalance_totals(da, db);
        const ot::OTInstance inst = ot::build_instance(
            da, db, ot::QuantizationPolicy{scale},
            std::filesystem::path(cloud_out).stem().string());
        ot::save_instance_dense(inst, cloud_out);
        std::printf("wrote %s (n=%d m=%d)\n", cloud_out.c_str(), inst.n,
                    inst.m);
      }
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
