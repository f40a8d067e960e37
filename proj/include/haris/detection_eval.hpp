#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haris/world.hpp"

namespace haris {

/// Axis-aligned pixel box, top-left corner plus size.
struct BBox {
  double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
};

double iou(const BBox& a, const BBox& b);

struct DetectionRecord {
  std::string frame_id;
  VehicleClass cls = VehicleClass::Car;
  BBox box;
  double confidence = 1.0;
};

struct GroundTruthRecord {
  std::string frame_id;
  VehicleClass cls = VehicleClass::Car;
  BBox box;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

/// One row of the report. Undefined metrics (no labels, or no detections for
/// precision) are empty.
struct ClassMetrics {
  std::string name;
  std::size_t images = 0;
  std::size_t labels = 0;
  std::size_t detections = 0;
  std::size_t true_positives = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
  std::optional<double> ap;
  /// (recall, precision) after each group of equal-confidence detections.
  std::vector<PrPoint> curve;
};

struct EvalReport {
  ClassMetrics all;                  // pooled over classes
  std::vector<ClassMetrics> classes; // Car, Truck, Bus, Motorbike
  std::optional<double> map;         // mean AP over classes with labels
  double iou_threshold = 0.5;
};

/// Greedy confidence-ordered matching within frame and class, all-points
/// interpolated AP.
EvalReport evaluate(const std::vector<DetectionRecord>& dets, const std::vector<GroundTruthRecord>& gts,
                    double iou_threshold = 0.5);

/// Area under the max-envelope of a PR curve, recall starting at 0.
double average_precision(const std::vector<PrPoint>& curve);

/// Envelope points with strictly increasing recall, anchored at recall 0.
std::vector<PrPoint> pr_envelope(const std::vector<PrPoint>& curve);

/// CSV "class,recall,precision" of every row's envelope.
std::string export_pr_curve(const EvalReport& report);

/// Table-style CSV: Class,Images,Labels,P,R,F1,mAP@.5
std::string report_csv(const EvalReport& report);

class EvalParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<DetectionRecord> parse_detections_csv(const std::string& text);
std::vector<GroundTruthRecord> parse_ground_truth_csv(const std::string& text);
std::vector<DetectionRecord> load_detections_csv(const std::filesystem::path& p);
std::vector<GroundTruthRecord> load_ground_truth_csv(const std::filesystem::path& p);

}  // namespace haris
