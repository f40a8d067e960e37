#include "haris/frame_tree.hpp"

namespace haris {

FrameTree::FrameTree(std::string root) : root_(std::move(root)) {}

void FrameTree::add_frame(const std::string& child, const std::string& parent,
                          const Pose2D& child_in_parent) {
  if (contains(child)) throw std::invalid_argument("frame already exists: " + child);
  if (!contains(parent)) throw FrameNotFound(parent);
  edges_.emplace(child, Edge{parent, child_in_parent});
}

void FrameTree::set_transform(const std::string& child, const Pose2D& child_in_parent) {
  auto it = edges_.find(child);
  if (it == edges_.end()) throw FrameNotFound(child);
  it->second.child_in_parent = child_in_parent;
}

bool FrameTree::contains(const std::string& name) const {
  return name == root_ || edges_.count(name) > 0;
}

const std::string& FrameTree::parent_of(const std::string& name) const {
  auto it = edges_.find(name);
  if (it == edges_.end()) throw FrameNotFound(name);
  return it->second.parent;
}

std::vector<std::string> FrameTree::frames() const {
  std::vector<std::string> out{root_};
  for (const auto& [name, _] : edges_) out.push_back(name);
  return out;
}

Pose2D FrameTree::pose_in_root(const std::string& name) const {
  if (!contains(name)) throw FrameNotFound(name);
  Pose2D acc;
  std::string cur = name;
  while (cur != root_) {
    const Edge& e = edges_.at(cur);
    acc = compose(e.child_in_parent, acc);
    cur = e.parent;
  }
  return acc;
}

Pose2D FrameTree::transform(const std::string& from, const std::string& to) const {
  const Pose2D from_root = pose_in_root(from);
  const Pose2D to_root = pose_in_root(to);
  if (from == to) return Pose2D::identity();
  return compose(inverse(to_root), from_root);
}

}  // namespace haris
