#include <omp.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "shelf/errors.hpp"
#include "shelf/harness.hpp"

using namespace shelf;

namespace {

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  omp_set_num_threads(worker_count());

  CLI::App app{"Lateral-access shelf search toolkit"};
  app.require_subcommand(1);

  DatasetConfig ds;
  std::string ds_out;
  auto* gen = app.add_subcommand("gen-dataset", "Scenes, depth renders and occupancy distributions");
  gen->add_option("--count", ds.count, "Number of scenes")->required();
  gen->add_option("--seed", ds.seed, "Master seed")->required();
  gen->add_option("--out", ds_out, "Output directory")->required();
  gen->add_flag("--exhaustive", ds.exhaustive, "Use the exhaustive ray-cast placement search");
  gen->add_option("--grid-spacing", ds.grid_spacing, "Placement grid spacing, meters")->check(CLI::PositiveNumber);

  std::string cfg_file, bench_out, policies, psi_mode;
  double psi = 0.0, v = 0.0;
  auto* bench = app.add_subcommand("bench", "Run policy rollouts and aggregate metrics");
  bench->add_option("--config", cfg_file, "JSON config")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Output directory")->required();
  bench->add_option("--policies", policies, "Comma-separated: dar,der3,bluction-dar,oracle-p,oracle-ps");
  bench->add_option("--psi", psi, "Suction cost weight");
  bench->add_option("--psi-mode", psi_mode, "divide | multiply-literal");
  bench->add_option("--v", v, "Visibility threshold");

  std::string scene_file, render_prefix;
  auto* render = app.add_subcommand("render", "Depth PFM, PGM preview and overhead SVG for a scene");
  render->add_option("--scene", scene_file, "Scene JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_prefix, "Output prefix")->required();

  int k = 0, n_objects = 0;
  std::uint64_t scenes_seed = 0;
  std::string scenes_out;
  auto* scenes = app.add_subcommand("gen-scenes", "Benchmark scenes with a hidden target");
  scenes->add_option("--n", k, "Number of scenes")->required();
  scenes->add_option("--objects", n_objects, "Occluders per scene")->required();
  scenes->add_option("--seed", scenes_seed, "Master seed")->required();
  scenes->add_option("--out", scenes_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const auto s = cmd_gen_dataset(ds, ds_out);
      std::printf("wrote %d scenes (%d failed) in %.2f s\n", s.written, s.failed, s.seconds);
    } else if (*bench) {
      std::ifstream f(cfg_file);
      std::stringstream text;
      text << f.rdbuf();
      BenchConfig cfg = BenchConfig::from_json(text.str());
      if (!policies.empty()) {
        cfg.policies.clear();
        for (const auto& p : split_commas(policies)) cfg.policies.push_back(policy_from_name(p));
      }
      if (bench->count("--psi")) cfg.psi = psi;
      if (bench->count("--v")) cfg.v = v;
      if (!psi_mode.empty()) {
        if (psi_mode == "divide") cfg.psi_mode = PsiMode::Divide;
        else if (psi_mode == "multiply-literal") cfg.psi_mode = PsiMode::MultiplyLiteral;
        else throw ShelfError("bad --psi-mode: " + psi_mode);
      }
      const auto res = cmd_bench(cfg, bench_out);
      std::fputs(metrics_csv(res.rows).c_str(), stdout);
    } else if (*render) {
      cmd_render(scene_file, render_prefix);
    } else if (*scenes) {
      cmd_gen_scenes(k, n_objects, scenes_seed, scenes_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
