#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "haris/backend.hpp"
#include "haris/detection_eval.hpp"
#include "haris/live.hpp"
#include "haris/messages.hpp"
#include "haris/runtime.hpp"
#include "haris/scenarios.hpp"

namespace {

std::atomic<bool> g_stop{false};

void configure_logging() {
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("HARIS_LOG_LEVEL")) {
    const std::string s = lvl;
    if (s == "error") spdlog::set_level(spdlog::level::err);
    else if (s == "warn") spdlog::set_level(spdlog::level::warn);
    else if (s == "info") spdlog::set_level(spdlog::level::info);
    else if (s == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("HARIS_LOG_LEVEL '{}' not recognized (error, warn, info, debug)", s);
  }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Haris parking-lot robot simulator"};
  app.require_subcommand(1);

  // run
  haris::ScenarioConfig run_cfg;
  std::string run_world, run_mission, run_mode = "fused", run_out = "out";
  auto* run = app.add_subcommand("run", "Run one scenario and write its artifacts");
  run->add_option("--world", run_world, "World JSON file")->required();
  run->add_option("--mission", run_mission, "Mission JSON file");
  run->add_option("--seed", run_cfg.seed, "Random seed");
  run->add_option("--mode", run_mode, "Localization mode: gps_only, fused, odom");
  run->add_option("--speed", run_cfg.speed, "Navigation speed limit (m/s)");
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--duration", run_cfg.duration, "Simulated time limit (s)");
  run->add_option("--dt", run_cfg.dt, "Tick length (s)");
  run->add_option("--particles", run_cfg.particles, "Particle count in fused mode");
  run->add_option("--gps-rate", run_cfg.gps_rate_hz, "GPS fix rate (Hz)");

  // experiment
  std::string exp_world, exp_out = "experiment", exp_modes = "gps_only,fused";
  std::vector<double> exp_speeds{0.25, 0.5, 1.0};
  int exp_seeds = 5;
  std::uint64_t exp_seed = 1;
  std::size_t exp_particles = 200;
  double exp_gps_std = 10.0;
  auto* exp = app.add_subcommand("experiment", "Path-error comparison of localization modes across speeds");
  exp->add_option("--world", exp_world, "World JSON (default: built-in pillar hall)");
  exp->add_option("--speed", exp_speeds, "Speeds (m/s)")->delimiter(',');
  exp->add_option("--seeds", exp_seeds, "Number of seeds per speed");
  exp->add_option("--seed", exp_seed, "First seed");
  exp->add_option("--modes", exp_modes, "Comma-separated localization modes");
  exp->add_option("--particles", exp_particles, "Particle count in fused mode");
  exp->add_option("--gps-std", exp_gps_std, "GPS error per axis (m)");
  exp->add_option("--out", exp_out, "Output directory");

  // eval
  std::string eval_dets, eval_gts, eval_out, eval_pr;
  double eval_iou = 0.5;
  auto* ev = app.add_subcommand("eval", "Evaluate detections against ground truth");
  ev->add_option("detections", eval_dets, "Detections CSV")->required();
  ev->add_option("groundtruth", eval_gts, "Ground-truth CSV")->required();
  ev->add_option("--out", eval_out, "Write the report CSV here");
  ev->add_option("--pr", eval_pr, "Write PR-curve points here");
  ev->add_option("--iou", eval_iou, "IoU threshold");

  // genworld
  int gw_rows = 2, gw_cols = 10;
  double gw_spacing = 3.0;
  std::uint64_t gw_seed = 1;
  std::string gw_out = "world.json", gw_mission;
  auto* gw = app.add_subcommand("genworld", "Generate a parking-lot world");
  gw->add_option("--rows", gw_rows, "Rows of bays")->check(CLI::PositiveNumber);
  gw->add_option("--cols", gw_cols, "Bays per row")->check(CLI::PositiveNumber);
  gw->add_option("--spacing", gw_spacing, "Bay spacing (m)");
  gw->add_option("--seed", gw_seed, "Random seed");
  gw->add_option("--out", gw_out, "World JSON output");
  gw->add_option("--mission", gw_mission, "Also write a sweep mission covering every row");

  // serve
  haris::ScenarioConfig srv_cfg;
  std::string srv_world, srv_mode = "fused", srv_journal = "sightings.jsonl", srv_address = "127.0.0.1";
  unsigned short srv_port = 8080;
  double srv_rate = 1.0;
  auto* srv = app.add_subcommand("serve", "Run the live simulation with the HTTP/WebSocket backend");
  srv->add_option("--world", srv_world, "World JSON file")->required();
  srv->add_option("--port", srv_port, "Listen port");
  srv->add_option("--address", srv_address, "Listen address");
  srv->add_option("--seed", srv_cfg.seed, "Random seed");
  srv->add_option("--mode", srv_mode, "Localization mode");
  srv->add_option("--speed", srv_cfg.speed, "Navigation speed limit (m/s)");
  srv->add_option("--journal", srv_journal, "Sighting journal (JSON lines)");
  srv->add_option("--rate", srv_rate, "Simulated seconds per wall-clock second");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      run_cfg.world_path = run_world;
      if (!run_mission.empty()) run_cfg.mission_path = run_mission;
      run_cfg.mode = haris::parse_localization_mode(run_mode);
      run_cfg.output_dir = run_out;
      const haris::RunResult r = haris::run_scenario(run_cfg);
      if (r.phase == haris::Phase::Aborted) spdlog::error("mission aborted: {}", r.reason);
      return r.exit_code;
    }

    if (*exp) {
      haris::ExperimentConfig cfg;
      cfg.world = exp_world.empty() ? haris::corridor_world() : haris::load_world(exp_world);
      cfg.world.noise.gps_std = exp_gps_std;
      cfg.path = {{0.0, 0.0}, {20.0, 0.0}};
      cfg.speeds = exp_speeds;
      cfg.seeds.clear();
      for (int i = 0; i < exp_seeds; ++i) cfg.seeds.push_back(exp_seed + static_cast<std::uint64_t>(i));
      cfg.modes.clear();
      std::stringstream ss(exp_modes);
      for (std::string m; std::getline(ss, m, ',');) cfg.modes.push_back(haris::parse_localization_mode(m));
      cfg.particles = exp_particles;
      const auto runs = haris::experiment_path_error(cfg);
      const auto summary = haris::summarize(runs);
      write_text(std::filesystem::path(exp_out) / "runs.csv", haris::experiment_runs_csv(runs));
      const std::string table = haris::experiment_summary_csv(summary);
      write_text(std::filesystem::path(exp_out) / "summary.csv", table);
      std::cout << table;
      return 0;
    }

    if (*ev) {
      const auto dets = haris::load_detections_csv(eval_dets);
      const auto gts = haris::load_ground_truth_csv(eval_gts);
      const haris::EvalReport report = haris::evaluate(dets, gts, eval_iou);
      const std::string csv = haris::report_csv(report);
      if (!eval_out.empty()) write_text(eval_out, csv);
      if (!eval_pr.empty()) write_text(eval_pr, haris::export_pr_curve(report));
      std::cout << csv;
      return 0;
    }

    if (*gw) {
      const haris::WorldModel w = haris::genworld(gw_rows, gw_cols, gw_spacing, gw_seed);
      haris::save_world(w, gw_out);
      if (!gw_mission.empty())
        write_text(gw_mission, haris::dump_json(haris::mission_to_json(
                                   haris::boustrophedon_mission(w, gw_rows, gw_cols, gw_spacing)), 2) + "\n");
      spdlog::info("wrote {} with {} vehicles", gw_out, w.parked_cars.size());
      return 0;
    }

    if (*srv) {
      srv_cfg.mode = haris::parse_localization_mode(srv_mode);
      haris::Bus bus;
      auto store = haris::PlateStore::restore(srv_journal);
      haris::BackendService service(bus, *store);
      haris::LiveSimulation sim(haris::load_world(srv_world), srv_cfg, bus, srv_rate);
      haris::HttpServer server(service, srv_address, srv_port);
      std::signal(SIGINT, [](int) { g_stop = true; });
      std::signal(SIGTERM, [](int) { g_stop = true; });
      service.start();
      server.start();
      sim.start();
      spdlog::info("listening on http://{}:{}", srv_address, server.port());
      while (!g_stop) {
        std::this_thread::sleep_for(std::chrono::milliseconds(500));
        store->flush();
      }
      sim.stop();
      server.stop();
      service.stop();
      store->flush();
      return 0;
    }
  } catch (const haris::ScenarioError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const haris::EvalParseError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
