#pragma once

#include "lgw/excursion.hpp"
#include "lgw/genfun.hpp"
#include "lgw/kernel.hpp"
#include "lgw/model.hpp"

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lgw {

struct WeightedEnsemble {
  std::vector<std::pair<LabelledPlaneTree, Rational>> items;
  Rational total;
};

inline constexpr std::size_t default_item_cap = 10'000'000;

// Every positive-weight tree rooted at 0 with exactly `edges` edges, weighted by Pi_0.
WeightedEnsemble enumerate_trees(const TreeModel& model, int edges, std::size_t cap = default_item_cap);
// Number of such trees, without materializing them.
Integer count_trees(const TreeModel& model, int edges);
// Pi_0(|T| = edges), by aggregated recursion.
Rational tree_mass(const TreeModel& model, int edges);

// Every positive-weight excursion of the given sign with `edges` edges, weighted by Pi^sign.
WeightedEnsemble enumerate_excursions(const TreeModel& model, Sign sign, int edges, std::size_t cap = default_item_cap);

using ChainPath = std::vector<CondState>;

// Law of (X_m^+, X_m^-, M_m^-)_{m >= 1} under the uniform law on binary trees
// with V edges; each path stops at its first visit to (0, 0, V).
struct ChainLaw {
  int V = 0;
  std::map<ChainPath, Rational> paths;
};

ChainLaw exact_chain_law(int V, std::size_t cap = default_item_cap);

ChainPath chain_path(const LabelledPlaneTree& t);

using CondKernel = std::function<Rational(CondState, CondState)>;

struct MarkovReport {
  std::size_t histories = 0;
  std::size_t transitions = 0;
  std::vector<std::string> discrepancies;
  bool ok() const noexcept { return discrepancies.empty(); }
};

// Checks that history-conditional laws equal state-conditional laws, and that
// every observed transition (and the full row mass) agrees with `kernel`.
MarkovReport verify_markov_exact(const ChainLaw& law, const CondKernel& kernel);
// Uses cond_transition_prob on the incomplete-binary joint table.
MarkovReport verify_markov_exact(const ChainLaw& law);

// Exhaustive count of S(n, n_plus, n_minus); domain error unless
// sum(n_plus) = q and sum(n_minus) = p - n with 1 <= n <= p.
Integer enumerate_bicoloured_forests(int n, const std::vector<int>& n_plus, const std::vector<int>& n_minus);
Integer counting_lemma_formula(int n, int p, int q);

struct MarkedTree {
  std::vector<Vertex> parents;  // preorder, parents[0] = no_vertex
  std::vector<bool> sigma;      // R membership
  std::vector<bool> iota;       // L membership

  std::size_t edges() const noexcept { return parents.size() - 1; }
  std::size_t count_L() const;
  std::size_t count_R() const;
};

// Label-1 skeleton of a positive incomplete-binary excursion.
MarkedTree to_marked(const Excursion& tau);

struct MarkedCell {
  int q = 0;  // total |L|
  int r = 0;  // total |R|
  friend auto operator<=>(const MarkedCell&, const MarkedCell&) = default;
};

// P(sum |T_k| = s, sum |L_k| = q, sum |R_k| = r) for p independent marked trees.
std::map<MarkedCell, Rational> enumerate_marked_forests(const RationalSeries& nu, int p, int s,
                                                        std::size_t cap = default_item_cap);
Rational marked_forest_formula(const FTable& f, int p, int s, int q, int r);

// First-passage identity for the Lukasiewicz walk with step law mu(k) - 1:
// returns (weight of paths hitting -p first at n = p + s, (p / n) * weight of paths ending at -p).
std::pair<Rational, Rational> kemperman_check(const RationalSeries& mu, int p, int s);

// Plane forests with `trees` components and `edges` edges, as preorder parent arrays
// over a virtual super-root (index 0 omitted: roots have parent no_vertex).
std::vector<std::vector<Vertex>> plane_forests(int trees, int edges);

}  // namespace lgw
