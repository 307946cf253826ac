#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lgw {

using Vertex = std::int32_t;
inline constexpr Vertex no_vertex = -1;

// Rooted plane tree with integer labels. Vertices are numbered in preorder,
// so the root is 0 and children of a vertex appear in increasing index order.
class LabelledPlaneTree {
 public:
  LabelledPlaneTree() : LabelledPlaneTree(single(0)) {}

  static LabelledPlaneTree single(int label);

  // parents[0] must be no_vertex; the sequence must be a preorder numbering.
  // Labels are not checked here (see validate).
  static LabelledPlaneTree from_preorder(std::vector<int> labels, std::vector<Vertex> parents);

  std::size_t vertex_count() const noexcept { return labels_.size(); }
  std::size_t edge_count() const noexcept { return labels_.size() - 1; }
  Vertex root() const noexcept { return 0; }
  int root_label() const noexcept { return labels_[0]; }

  int label(Vertex v) const { return labels_[static_cast<std::size_t>(v)]; }
  Vertex parent(Vertex v) const { return parents_[static_cast<std::size_t>(v)]; }
  std::span<const Vertex> children(Vertex v) const;
  int arity(Vertex v) const {
    return child_begin_[static_cast<std::size_t>(v) + 1] - child_begin_[static_cast<std::size_t>(v)];
  }
  // Label increment from parent; 0 for the root.
  int increment(Vertex v) const { return v == 0 ? 0 : label(v) - label(parent(v)); }

  std::span<const int> labels() const noexcept { return labels_; }
  std::span<const Vertex> parents() const noexcept { return parents_; }

  int min_label() const;
  int max_label() const;

  friend bool operator==(const LabelledPlaneTree& a, const LabelledPlaneTree& b) {
    return a.labels_ == b.labels_ && a.parents_ == b.parents_;
  }

 private:
  struct Raw {};
  explicit LabelledPlaneTree(Raw) {}

  std::vector<int> labels_;
  std::vector<Vertex> parents_;
  std::vector<Vertex> child_begin_;
  std::vector<Vertex> children_;
};

// Appends vertices in preorder; add() returns the new vertex index.
class TreeBuilder {
 public:
  explicit TreeBuilder(int root_label) {
    labels_.push_back(root_label);
    parents_.push_back(no_vertex);
  }
  Vertex add(Vertex parent, int label) {
    labels_.push_back(label);
    parents_.push_back(parent);
    return static_cast<Vertex>(labels_.size() - 1);
  }
  std::size_t size() const noexcept { return labels_.size(); }
  int label(Vertex v) const { return labels_[static_cast<std::size_t>(v)]; }
  LabelledPlaneTree build() && {
    return LabelledPlaneTree::from_preorder(std::move(labels_), std::move(parents_));
  }

 private:
  std::vector<int> labels_;
  std::vector<Vertex> parents_;
};

struct ValidationReport {
  bool ok = true;
  Vertex vertex = no_vertex;
  std::string message;
};

ValidationReport validate(const LabelledPlaneTree& t);

LabelledPlaneTree truncate(const LabelledPlaneTree& t, int level);
LabelledPlaneTree shift_labels(const LabelledPlaneTree& t, int delta);
LabelledPlaneTree reflect_labels(const LabelledPlaneTree& t);

// Integer-indexed table with a fixed lower index; out-of-range reads give 0.
class CountTable {
 public:
  CountTable() = default;
  CountTable(int first, std::size_t size) : first_(first), values_(size, 0) {}

  long long operator[](int k) const {
    const long long i = static_cast<long long>(k) - first_;
    return (i < 0 || i >= static_cast<long long>(values_.size())) ? 0 : values_[static_cast<std::size_t>(i)];
  }
  long long& at(int k) { return values_.at(static_cast<std::size_t>(k - first_)); }
  int first() const noexcept { return first_; }
  int last() const noexcept { return first_ + static_cast<int>(values_.size()) - 1; }
  bool empty() const noexcept { return values_.empty(); }

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  int first_ = 0;
  std::vector<long long> values_;
};

// x_plus[m]: edges (m-1)->m; x_minus[m]: m->(m-1) for m >= 1.
// check_plus[k]: edges -k -> -k+1; check_minus[k]: -k+1 -> -k for k >= 1.
// mass_below[m]: non-root v with label(v) <= m-1 and label(parent) <= m-1.
// vertical[k]: number of vertices labelled k.
struct VerticalEdgeProfile {
  CountTable x_plus;
  CountTable x_minus;
  CountTable check_plus;
  CountTable check_minus;
  CountTable mass_below;
  CountTable vertical;
  long long flat_edges = 0;
  long long edges = 0;
  int max_label = 0;
  int min_label = 0;

  // M_m^- with the convention M_m^- = |t| once m exceeds the label range.
  long long mass(int m) const { return m > mass_below.last() ? edges : mass_below[m]; }
};

VerticalEdgeProfile edge_profile(const LabelledPlaneTree& t);

// Accumulates edges one at a time, so a profile can be built while a tree is
// generated without storing it. The root is labelled 0.
class EdgeTally {
 public:
  void add(int parent_label, int child_label);
  long long edges() const noexcept { return edges_; }
  VerticalEdgeProfile profile() const;

 private:
  // Signed index k is stored at 2|k| - (k < 0).
  static std::size_t slot(int k) noexcept {
    return k >= 0 ? 2 * static_cast<std::size_t>(k) : 2 * static_cast<std::size_t>(-k) - 1;
  }
  static void bump(std::vector<long long>& v, int k);

  std::vector<long long> up_;    // by child label
  std::vector<long long> down_;  // by parent label
  std::vector<long long> flat_;  // by label
  long long edges_ = 0;
  int lo_ = 0;
  int hi_ = 0;
};

std::string encode(const LabelledPlaneTree& t);
LabelledPlaneTree decode(std::string_view text);

}  // namespace lgw
