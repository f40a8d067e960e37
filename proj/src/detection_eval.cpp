#include "haris/detection_eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace haris {

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double average_precision(const std::vector<PrPoint>& curve) {
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    double env = 0.0;
    for (std::size_t j = i; j < curve.size(); ++j) env = std::max(env, curve[j].precision);
    ap += (curve[i].recall - prev_recall) * env;
    prev_recall = curve[i].recall;
  }
  return ap;
}

std::vector<PrPoint> pr_envelope(const std::vector<PrPoint>& curve) {
  std::vector<PrPoint> out;
  if (curve.empty()) return out;
  std::vector<double> env(curve.size());
  double best = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    best = std::max(best, curve[i].precision);
    env[i] = best;
  }
  out.push_back({0.0, env.front()});
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (curve[i].recall > out.back().recall) out.push_back({curve[i].recall, env[i]});
  }
  return out;
}

namespace {

struct Scored {
  std::size_t det;
  bool tp;
};

// Matches detections (already in evaluation order) to ground truth within
// frame and class. Returns TP flags in the same order.
std::vector<bool> match(const std::vector<const DetectionRecord*>& order, const std::vector<GroundTruthRecord>& gts,
                        double threshold) {
  std::map<std::pair<std::string, VehicleClass>, std::vector<std::size_t>> by_key;
  for (std::size_t i = 0; i < gts.size(); ++i) by_key[{gts[i].frame_id, gts[i].cls}].push_back(i);
  std::vector<bool> used(gts.size(), false);
  std::vector<bool> tp(order.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto it = by_key.find({order[k]->frame_id, order[k]->cls});
    if (it == by_key.end()) continue;
    double best = -1.0;
    std::size_t best_gt = 0;
    for (std::size_t g : it->second) {
      if (used[g]) continue;
      const double v = iou(order[k]->box, gts[g].box);
      if (v >= threshold && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best >= 0.0) {
      used[best_gt] = true;
      tp[k] = true;
    }
  }
  return tp;
}

ClassMetrics score(const std::string& name, std::vector<const DetectionRecord*> dets,
                   const std::vector<GroundTruthRecord>& gts, double threshold) {
  ClassMetrics m;
  m.name = name;
  m.labels = gts.size();
  m.detections = dets.size();
  std::stable_sort(dets.begin(), dets.end(),
                   [](const DetectionRecord* a, const DetectionRecord* b) { return a->confidence > b->confidence; });
  const std::vector<bool> tp = match(dets, gts, threshold);

  std::size_t ctp = 0, cfp = 0;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    (tp[k] ? ctp : cfp)++;
    const bool group_end = k + 1 == dets.size() || dets[k + 1]->confidence != dets[k]->confidence;
    if (group_end && m.labels > 0) {
      m.curve.push_back({static_cast<double>(ctp) / static_cast<double>(m.labels),
                         static_cast<double>(ctp) / static_cast<double>(ctp + cfp)});
    }
  }
  m.true_positives = ctp;
  if (!dets.empty()) m.precision = static_cast<double>(ctp) / static_cast<double>(dets.size());
  else if (m.labels > 0) m.precision = 0.0;
  if (m.labels > 0) {
    m.recall = static_cast<double>(ctp) / static_cast<double>(m.labels);
    m.ap = average_precision(m.curve);
    const double p = *m.precision, r = *m.recall;
    m.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return m;
}

}  // namespace

EvalReport evaluate(const std::vector<DetectionRecord>& dets, const std::vector<GroundTruthRecord>& gts,
                    double iou_threshold) {
  EvalReport report;
  report.iou_threshold = iou_threshold;

  std::vector<const DetectionRecord*> all_dets;
  for (const auto& d : dets) all_dets.push_back(&d);
  report.all = score("All", all_dets, gts, iou_threshold);
  std::set<std::string> frames;
  for (const auto& g : gts) frames.insert(g.frame_id);
  for (const auto& d : dets) frames.insert(d.frame_id);
  report.all.images = frames.size();

  double ap_sum = 0.0;
  std::size_t ap_count = 0;
  for (VehicleClass c : kVehicleClasses) {
    std::vector<const DetectionRecord*> cd;
    for (const auto& d : dets)
      if (d.cls == c) cd.push_back(&d);
    std::vector<GroundTruthRecord> cg;
    std::set<std::string> cframes;
    for (const auto& g : gts) {
      if (g.cls != c) continue;
      cg.push_back(g);
      cframes.insert(g.frame_id);
    }
    ClassMetrics m = score(to_string(c), cd, cg, iou_threshold);
    m.images = cframes.size();
    if (m.ap) {
      ap_sum += *m.ap;
      ++ap_count;
    }
    report.classes.push_back(std::move(m));
  }
  if (ap_count > 0) report.map = ap_sum / static_cast<double>(ap_count);
  return report;
}

std::string export_pr_curve(const EvalReport& report) {
  std::string out = "class,recall,precision\n";
  auto emit = [&](const ClassMetrics& m) {
    for (const auto& p : pr_envelope(m.curve)) out += fmt::format("{},{:.6f},{:.6f}\n", m.name, p.recall, p.precision);
  };
  emit(report.all);
  for (const auto& m : report.classes) emit(m);
  return out;
}

std::string report_csv(const EvalReport& report) {
  auto num = [](const std::optional<double>& v) { return v ? fmt::format("{:.4f}", *v) : std::string("-"); };
  std::string out = "Class,Images,Labels,P,R,F1,mAP@.5\n";
  auto row = [&](const ClassMetrics& m, const std::optional<double>& ap) {
    out += fmt::format("{},{},{},{},{},{},{}\n", m.name, m.images, m.labels, num(m.precision), num(m.recall),
                       num(m.f1), num(ap));
  };
  row(report.all, report.map);
  for (const auto& m : report.classes) row(m, m.ap);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t row, const char* col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw EvalParseError(fmt::format("row {}: column '{}' is not a number: '{}'", row, col, s));
  }
}

template <class Record>
std::vector<Record> parse_records(const std::string& text, bool with_confidence) {
  const std::vector<std::string> expected =
      with_confidence ? std::vector<std::string>{"frame_id", "class", "x", "y", "w", "h", "confidence"}
                      : std::vector<std::string>{"frame_id", "class", "x", "y", "w", "h"};
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw EvalParseError("empty file: missing header");
  const auto header = split_csv_line(line);
  if (header != expected) {
    std::string want;
    for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
    throw EvalParseError(fmt::format("bad header '{}', expected '{}'", line, want));
  }
  std::vector<Record> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (f.size() != expected.size())
      throw EvalParseError(fmt::format("row {}: expected {} fields, got {}", row, expected.size(), f.size()));
    Record r;
    r.frame_id = f[0];
    try {
      r.cls = parse_vehicle_class(f[1]);
    } catch (const std::invalid_argument&) {
      throw EvalParseError(fmt::format("row {}: unknown class '{}'", row, f[1]));
    }
    r.box = {parse_double(f[2], row, "x"), parse_double(f[3], row, "y"), parse_double(f[4], row, "w"),
             parse_double(f[5], row, "h")};
    if (!(r.box.w > 0.0) || !(r.box.h > 0.0))
      throw EvalParseError(fmt::format("row {}: box width and height must be positive", row));
    if constexpr (std::is_same_v<Record, DetectionRecord>) {
      r.confidence = parse_double(f[6], row, "confidence");
      if (r.confidence < 0.0 || r.confidence > 1.0)
        throw EvalParseError(fmt::format("row {}: confidence must be in [0, 1]", row));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw EvalParseError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<DetectionRecord> parse_detections_csv(const std::string& text) {
  return parse_records<DetectionRecord>(text, true);
}

std::vector<GroundTruthRecord> parse_ground_truth_csv(const std::string& text) {
  return parse_records<GroundTruthRecord>(text, false);
}

std::vector<DetectionRecord> load_detections_csv(const std::filesystem::path& p) {
  try {
    return parse_detections_csv(read_file(p));
  } catch (const EvalParseError& e) {
    throw EvalParseError(p.filename().string() + ": " + e.what());
  }
}

std::vector<GroundTruthRecord> load_ground_truth_csv(const std::filesystem::path& p) {
  try {
    return parse_ground_truth_csv(read_file(p));
  } catch (const EvalParseError& e) {
    throw EvalParseError(p.filename().string() + ": " + e.what());
  }
}

}  // namespace haris
