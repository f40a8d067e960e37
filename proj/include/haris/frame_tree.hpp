#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "haris/geometry.hpp"

namespace haris {

class FrameNotFound : public std::runtime_error {
 public:
  explicit FrameNotFound(const std::string& name)
      : std::runtime_error("frame not found: " + name), frame_(name) {}
  const std::string& frame() const { return frame_; }

 private:
  std::string frame_;
};

/// Named coordinate frames linked parent -> child by planar rigid transforms.
/// Every non-root frame has exactly one parent, so the graph is a tree.
class FrameTree {
 public:
  explicit FrameTree(std::string root = "map");

  const std::string& root() const { return root_; }

  /// Adds `child` under `parent`. `child_in_parent` is the child's pose in parent coordinates.
  void add_frame(const std::string& child, const std::string& parent, const Pose2D& child_in_parent);

  /// Replaces the edge transform of an existing non-root frame.
  void set_transform(const std::string& child, const Pose2D& child_in_parent);

  bool contains(const std::string& name) const;
  const std::string& parent_of(const std::string& name) const;
  std::vector<std::string> frames() const;

  /// Pose T such that p_to = T ∘ p_from for coordinates expressed in `from`.
  Pose2D transform(const std::string& from, const std::string& to) const;

 private:
  struct Edge {
    std::string parent;
    Pose2D child_in_parent;
  };

  Pose2D pose_in_root(const std::string& name) const;

  std::string root_;
  std::map<std::string, Edge> edges_;
};

inline Pose2D frame_transform(const FrameTree& tree, const std::string& from, const std::string& to) {
  return tree.transform(from, to);
}

}  // namespace haris
