#pragma once

#include "lgw/rational.hpp"
#include "lgw/tree.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lgw {

struct Excursion;

class OffspringDistribution {
 public:
  enum class Kind { finite_table, geometric_half, geometric };

  static OffspringDistribution finite(std::vector<Rational> table);
  static OffspringDistribution geometric_half();
  // xi(k) = p (1-p)^k
  static OffspringDistribution geometric(Rational p);

  Kind kind() const noexcept { return kind_; }
  Rational operator()(int k) const;
  // Largest arity with positive mass; nullopt for unbounded support.
  std::optional<int> max_arity() const;
  Rational mean() const;
  Rational variance() const;
  std::span<const Rational> table() const noexcept { return table_; }
  const Rational& parameter() const noexcept { return p_; }

 private:
  Kind kind_ = Kind::finite_table;
  std::vector<Rational> table_;
  Rational p_;
};

class DisplacementFamily {
 public:
  enum class Kind { iid_uniform_pm1, iid_uniform_pm01, per_arity_table };

  struct Entry {
    std::vector<int> increments;
    Rational prob;
  };

  static DisplacementFamily iid_uniform_pm1();
  static DisplacementFamily iid_uniform_pm01();
  static DisplacementFamily per_arity(std::map<int, std::vector<Entry>> table);

  Kind kind() const noexcept { return kind_; }
  bool iid() const noexcept { return kind_ != Kind::per_arity_table; }

  // eta^(d)(v); 1 for d = 0. Throws a domain error for malformed v.
  Rational prob(std::span<const int> v) const;
  // Single-step law of the iid kinds.
  Rational step_prob(int eps) const;
  // Vectors with positive mass under eta^(d).
  std::vector<Entry> support(int d) const;
  const std::map<int, std::vector<Entry>>& table() const noexcept { return table_; }

  bool symmetric() const;
  bool pm1_only() const;

 private:
  Kind kind_ = Kind::iid_uniform_pm1;
  std::map<int, std::vector<Entry>> table_;
};

struct TreeModel {
  std::string name;
  OffspringDistribution offspring;
  DisplacementFamily displacement;
  bool symmetric = false;
  bool pm1_only = false;

  // Applies validate_model and derives the flags.
  static TreeModel make(std::string name, OffspringDistribution xi, DisplacementFamily eta);
};

// Throws a configuration error describing the first violated invariant.
void validate_model(const TreeModel& model);

TreeModel builtin_model(std::string_view id);
std::vector<std::string> builtin_ids();

// Parses the JSON model file format (finite offspring tables only).
TreeModel model_from_json(std::string_view json_text);
TreeModel load_model_file(const std::string& path);
// Accepts "builtin:<id>" or "file:<path>".
TreeModel resolve_model(std::string_view spec);

Rational displacement_prob(const TreeModel& model, int d, std::span<const int> v);

// Factor xi(k) eta^(k)(increments) contributed by one vertex.
Rational vertex_factor(const TreeModel& model, const LabelledPlaneTree& t, Vertex v);
Rational tree_weight(const TreeModel& model, const LabelledPlaneTree& t);
// Product over the vertices whose label differs from `level` (the Pi^[level] weight).
Rational truncated_weight(const TreeModel& model, const LabelledPlaneTree& t, int level);
Rational excursion_weight(const TreeModel& model, const Excursion& tau);

}  // namespace lgw
