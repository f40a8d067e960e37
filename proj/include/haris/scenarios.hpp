#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haris/mission.hpp"
#include "haris/runtime.hpp"
#include "haris/world.hpp"

namespace haris {

struct LotLayout {
  double bay_depth = 7.5;     // m, room for the longest vehicle
  double aisle = 7.0;         // m between row pairs
  double lane_offset = 1.5;   // m from vehicle fronts to the driving line
  double end_margin = 6.0;    // m beyond the first/last bay
  std::array<double, 4> class_weights{0.80, 0.12, 0.06, 0.02};  // car, truck, bus, motorbike
};

/// Nominal footprint (length, width) of a vehicle class.
std::pair<double, double> vehicle_dimensions(VehicleClass c);

/// Rows of `cols` bays `spacing` meters apart, grouped back to back in pairs,
/// with random numeric plates and classes drawn from the layout weights.
WorldModel genworld(int rows, int cols, double spacing, std::uint64_t seed, const LotLayout& layout = {});

/// Driving line beside each row, eastbound for even rows and westbound for odd
/// ones, so the left-facing camera always looks at the row.
std::vector<Point2D> boustrophedon_waypoints(const WorldModel& lot, int rows, int cols, double spacing,
                                             const LotLayout& layout = {});

/// The same waypoints as a GPS mission through the lot's surveyed reference.
Mission boustrophedon_mission(const WorldModel& lot, int rows, int cols, double spacing, const LotLayout& layout = {});

/// Open hall with pillar rows on both sides of a straight 20 m line from the
/// station at the origin along +x.
WorldModel corridor_world(std::uint64_t seed = 1);

/// Empty rectangular room [0, size]^2 with the station at (start).
WorldModel room_world(double size, Pose2D start);

struct ExperimentConfig {
  WorldModel world;
  std::vector<Point2D> path;
  std::vector<double> speeds{0.25, 0.5, 1.0};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<LocalizationMode> modes{LocalizationMode::GpsOnly, LocalizationMode::Fused};
  std::size_t particles = 200;
  double dt = 0.05;
};

struct ExperimentRun {
  LocalizationMode mode;
  double speed;
  std::uint64_t seed;
  double rms_true;      // cross-track of the driven path
  double rms_reported;  // cross-track of the reported positions
  double sim_time;
  bool reached_end;
};

struct ExperimentSummary {
  LocalizationMode mode;
  double speed;
  std::size_t runs;
  double rms_true_mean;
  double rms_true_max;
  double rms_true_min;
  double rms_reported_mean;
};

/// Drives the reference path once per (mode, speed, seed).
std::vector<ExperimentRun> experiment_path_error(const ExperimentConfig& cfg);
std::vector<ExperimentSummary> summarize(const std::vector<ExperimentRun>& runs);

std::string experiment_runs_csv(const std::vector<ExperimentRun>& runs);
std::string experiment_summary_csv(const std::vector<ExperimentSummary>& rows);

}  // namespace haris
