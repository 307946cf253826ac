#pragma once

#include "lgw/rational.hpp"
#include "lgw/tree.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace lgw {

using Dart = std::int32_t;

// Rooted pointed planar map given by darts. alpha pairs the two darts of an
// edge, sigma turns counterclockwise around the origin vertex. Faces are the
// orbits of phi = sigma o alpha. Vertices are numbered by first appearance
// when scanning darts 0, 1, 2, ...
class Quadrangulation {
 public:
  // Throws an integrity error unless the data describe a connected planar
  // map whose faces all have degree 4.
  static Quadrangulation make(std::vector<Dart> alpha, std::vector<Dart> sigma, Dart root_dart, int pointed_vertex);

  std::size_t dart_count() const noexcept { return alpha_.size(); }
  std::size_t edge_count() const noexcept { return alpha_.size() / 2; }
  std::size_t vertex_count() const noexcept { return vertex_darts_.size(); }
  std::size_t face_count() const noexcept { return faces_.size(); }

  Dart alpha(Dart d) const { return alpha_[static_cast<std::size_t>(d)]; }
  Dart sigma(Dart d) const { return sigma_[static_cast<std::size_t>(d)]; }
  Dart phi(Dart d) const { return sigma(alpha(d)); }
  int vertex(Dart d) const { return vertex_of_[static_cast<std::size_t>(d)]; }
  Dart root_dart() const noexcept { return root_; }
  int pointed_vertex() const noexcept { return pointed_; }

  std::span<const Dart> alphas() const noexcept { return alpha_; }
  std::span<const Dart> sigmas() const noexcept { return sigma_; }
  const std::vector<std::vector<Dart>>& faces() const noexcept { return faces_; }
  // Darts around vertex v in sigma order.
  const std::vector<Dart>& darts_at(int v) const { return vertex_darts_[static_cast<std::size_t>(v)]; }
  // Graph distances from the pointed vertex.
  const std::vector<int>& distances() const noexcept { return dist_; }
  int eccentricity() const;

  // Darts renumbered in breadth-first order from the root dart; two rooted
  // pointed maps are isomorphic iff their canonical keys agree.
  std::vector<int> canonical_key() const;

  friend bool operator==(const Quadrangulation& a, const Quadrangulation& b) {
    return a.canonical_key() == b.canonical_key();
  }

 private:
  Quadrangulation() = default;

  std::vector<Dart> alpha_;
  std::vector<Dart> sigma_;
  Dart root_ = 0;
  int pointed_ = 0;
  std::vector<int> vertex_of_;
  std::vector<std::vector<Dart>> vertex_darts_;
  std::vector<std::vector<Dart>> faces_;
  std::vector<int> dist_;
};

// Root edge orientation: +1 when the root dart leaves the tree root.
Quadrangulation tree_to_map(const LabelledPlaneTree& t, int orientation);

struct TreeWithOrientation {
  LabelledPlaneTree tree;
  int orientation = 1;
};

TreeWithOrientation map_to_tree(const Quadrangulation& q);

// max of the distances from the pointed vertex to the root edge endpoints.
int d_star(const Quadrangulation& q);

struct Ball {
  int radius = 0;
  std::vector<char> kept;  // per dart
  std::vector<std::vector<Dart>> faces;
  std::vector<char> external;  // per face of the ball
  std::size_t external_count() const;
  std::size_t external_degree() const;
};

Ball ball(const Quadrangulation& q, int k);

// P and C over 1 <= k <= eccentricity, with P = 0, C = 1 for k <= 0 and
// P = C = 0 beyond the eccentricity (the ball is then the whole map).
struct BallSummary {
  int d_star = 0;
  int radius = 0;
  std::vector<long> perimeter;   // index k-1
  std::vector<long> components;  // index k-1
  long P(int k) const;
  long C(int k) const;
};

BallSummary ball_profile(const Quadrangulation& q);

struct ProfileReport {
  int checked = 0;
  std::vector<std::string> mismatches;
  bool ok() const noexcept { return mismatches.empty(); }
};

// Compares the ball profile with the edge profile of the associated tree.
// A nonzero shift perturbs d_star on the tree side (negative control).
ProfileReport verify_profile_relations(const Quadrangulation& q, int d_star_shift = 0);

std::string to_csv(const Quadrangulation& q);
Quadrangulation quadrangulation_from_csv(std::string_view text);

// Sum over n <= max_faces of Card(Q_n) 12^-n, with Card(Q_n) obtained by
// counting distinct canonical maps produced from all labelled trees and both
// orientations, plus the tail of the tree-side series.
struct BoltzmannConstant {
  std::vector<Integer> counts;  // index n-1
  Rational partial;
  double tail = 0;
  double estimate = 0;
};

BoltzmannConstant boltzmann_constant(int max_faces);

}  // namespace lgw
