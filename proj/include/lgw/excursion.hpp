#pragma once

#include "lgw/tree.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lgw {

enum class Sign : std::int8_t { minus = -1, plus = 1 };

inline Sign flip(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline char sign_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

// Labelled tree rooted at +1 (or -1) with single-signed labels whose
// label-0 vertices are leaves.
struct Excursion {
  LabelledPlaneTree tree;
  Sign sign = Sign::plus;
  int n = 0;  // number of label-0 vertices

  // Infers the sign from the root label; throws a domain error if t is not an excursion.
  static Excursion make(LabelledPlaneTree t);
};

// Empty when t is a valid excursion; otherwise a description of the first violation.
std::optional<std::string> excursion_violation(const LabelledPlaneTree& t);

struct ForestVertex {
  std::int32_t parent = -1;
  std::vector<std::int32_t> children;
  Excursion decoration;
  Sign sign = Sign::plus;
  // Vertex of the decomposed tree where this excursion's root sits.
  Vertex source = no_vertex;
};

// Plane forest of excursions; vertices are stored in preorder.
struct ExcursionForest {
  std::vector<std::int32_t> roots;
  std::vector<ForestVertex> vertices;
  Sign root_sign = Sign::plus;

  std::size_t size() const noexcept { return vertices.size(); }
  // Nested parentheses, one "()" group per vertex, roots concatenated.
  std::string shape() const;
};

struct ExcursionDecomposition {
  int level = 1;
  LabelledPlaneTree root_component;
  ExcursionForest forest;
};

ExcursionDecomposition decompose(const LabelledPlaneTree& t, int m);

// Structural checks: sign alternation, admissibility, attachment count.
std::optional<std::string> admissibility_violation(const ExcursionDecomposition& d);

LabelledPlaneTree reconstruct(const ExcursionDecomposition& d);

struct ExcursionCounts {
  std::map<std::string, long long> plus;
  std::map<std::string, long long> minus;
};

ExcursionCounts excursion_counts(const ExcursionDecomposition& d);

// up[k] = N_k for k >= 1, down[k] = N_{-k} for k >= 1.
struct FirstHitCounts {
  CountTable up;
  CountTable down;
};

FirstHitCounts first_hit_counts(const LabelledPlaneTree& t);

}  // namespace lgw
