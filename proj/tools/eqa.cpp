// eqa command-line driver: run, sweep, validate, gen-suite.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqa/eqa.hpp"

namespace fs = std::filesystem;
using namespace eqa;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

world::GridScene load_scene_file(const fs::path& p) { return world::load_scene(read_file(p), p.stem().string()); }

oracles::OracleMode oracle_mode(const std::string& s) {
  return s == "remote" ? oracles::OracleMode::remote : oracles::OracleMode::mock;
}

int cmd_run(const std::string& scene_path, int qa_id, double alpha, double beta, const std::string& offset,
            std::uint64_t seed, const std::string& oracle, const std::string& trace_path, const std::string& render_dir,
            int render_every) {
  const auto scene = load_scene_file(scene_path);
  if (qa_id < 0 || qa_id >= static_cast<int>(scene.qa_items.size())) {
    throw ValidationError("qa id " + std::to_string(qa_id) + " out of range (scene has " +
                          std::to_string(scene.qa_items.size()) + ")");
  }
  harness::EpisodeConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.start_offset = *world::start_offset_from(offset);
  cfg.seed = seed;
  cfg.oracle_mode = oracle_mode(oracle);
  auto orc = oracles::make_oracle(oracles::OracleConfig::from_env(cfg.oracle_mode));
  harness::RunOptions opts;
  if (!render_dir.empty()) opts.snapshot_every = render_every;

  const auto out = harness::run_episode(scene, qa_id, cfg, *orc, opts);
  const auto& r = out.result;
  if (!trace_path.empty()) write_file(trace_path, harness::trace_to_jsonl(out.trace));
  if (!render_dir.empty()) {
    const auto frames = harness::render_trace(out.trace, out.final_map, out.map_snapshots);
    for (const auto& f : frames) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04d", f.step);
      write_file(fs::path(render_dir) / (std::string(name) + ".txt"), harness::frame_to_string(f));
      harness::write_ppm(f, (fs::path(render_dir) / (std::string(name) + ".ppm")).string());
    }
    write_file(fs::path(render_dir) / "map.json", mapper::map_channels_json(out.final_map).dump(2) + "\n");
  }

  auto j = harness::result_to_json(r);
  std::cout << j.dump(2) << "\n";
  return r.error ? 2 : 0;
}

int cmd_sweep(const std::string& dir, const std::string& grid, const std::string& offsets, std::uint64_t seed,
              const std::string& out_path, const std::string& baseline, unsigned workers, const std::string& oracle) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Error("no scene files in " + dir);
  std::vector<world::GridScene> scenes;
  for (const auto& f : files) scenes.push_back(load_scene_file(f));

  harness::SweepSpec spec;
  spec.grid = harness::parse_grid(grid);
  spec.offsets = harness::parse_offsets(offsets);
  spec.seed = seed;
  spec.baseline = baseline == "vqa-only";
  spec.workers = workers;
  const auto mode = oracle_mode(oracle);
  if (mode == oracles::OracleMode::remote) spec.workers = 1;
  const auto res = harness::run_sweep(scenes, spec, [mode] {
    return oracles::make_oracle(oracles::OracleConfig::from_env(mode));
  });
  const std::string table = harness::render_table(res.table);
  std::cout << table;
  if (!out_path.empty()) {
    write_file(out_path, harness::sweep_to_json(res, spec).dump(2) + "\n");
    fs::path txt(out_path);
    txt.replace_extension(".txt");
    write_file(txt, table);
  }
  return 0;
}

int cmd_validate(const std::string& scene_path) {
  const auto scene = load_scene_file(scene_path);
  std::cout << "ok: " << scene.id << " " << scene.frame.width << "x" << scene.frame.height << " cells, "
            << scene.objects.size() << " objects, " << scene.rooms.size() << " rooms, " << scene.qa_items.size()
            << " questions\n";
  return 0;
}

int cmd_gen_suite(int n, std::uint64_t seed, const std::string& out_dir) {
  const auto docs = harness::generate_suite_json(n, seed);
  for (const auto& d : docs) {
    write_file(fs::path(out_dir) / (d["id"].get<std::string>() + ".json"), d.dump() + "\n");
  }
  std::cout << "wrote " << docs.size() << " scenes to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Embodied question answering on a gridworld"};
  app.require_subcommand(1);

  const std::vector<std::string> offset_names{"t10", "t30", "t50", "random"};

  auto* run = app.add_subcommand("run", "Run one episode");
  std::string scene, offset = "t10", oracle = "mock", trace, render;
  int qa_id = 0, render_every = 10;
  double alpha = 0.1, beta = 0.2;
  std::uint64_t seed = 0;
  run->add_option("--scene", scene, "Scene file")->required()->check(CLI::ExistingFile);
  run->add_option("--qa-id", qa_id, "Question index within the scene");
  run->add_option("--alpha", alpha, "Detection confidence threshold");
  run->add_option("--beta", beta, "ITM stop threshold");
  run->add_option("--offset", offset, "Start offset")->check(CLI::IsMember(offset_names));
  run->add_option("--seed", seed, "Episode seed");
  run->add_option("--oracle", oracle, "Oracle backend")->check(CLI::IsMember({"mock", "remote"}));
  run->add_option("--trace", trace, "JSONL trace output");
  run->add_option("--render", render, "Directory for rendered frames");
  run->add_option("--render-every", render_every, "Map snapshot interval in steps");

  auto* sweep = app.add_subcommand("sweep", "Run an (alpha, beta) x offset sweep");
  std::string scenes_dir, grid = "0.3:0.0,0.2:0.1,0.1:0.2", offsets = "t10,t30,t50,random", out, baseline;
  std::string sweep_oracle = "mock";
  std::uint64_t sweep_seed = 0;
  unsigned workers = 0;
  sweep->add_option("--scenes", scenes_dir, "Directory of scene files")->required()->check(CLI::ExistingDirectory);
  sweep->add_option("--grid", grid, "alpha:beta pairs");
  sweep->add_option("--offsets", offsets, "Comma-separated offsets");
  sweep->add_option("--seed", sweep_seed, "Sweep seed");
  sweep->add_option("--out", out, "Results JSON (a .txt table is written beside it)");
  sweep->add_option("--baseline", baseline, "Add a baseline row")->check(CLI::IsMember({"vqa-only"}));
  sweep->add_option("--workers", workers, "Worker threads (0: all cores)");
  sweep->add_option("--oracle", sweep_oracle, "Oracle backend")->check(CLI::IsMember({"mock", "remote"}));

  auto* validate = app.add_subcommand("validate", "Check a scene file");
  std::string validate_scene;
  validate->add_option("--scene", validate_scene, "Scene file")->required()->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen-suite", "Generate a seeded scene suite");
  int n = 50;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", n, "Number of scenes")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(scene, qa_id, alpha, beta, offset, seed, oracle, trace, render, render_every);
    if (*sweep) return cmd_sweep(scenes_dir, grid, offsets, sweep_seed, out, baseline, workers, sweep_oracle);
    if (*validate) return cmd_validate(validate_scene);
    if (*gen) return cmd_gen_suite(n, gen_seed, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
