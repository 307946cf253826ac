#pragma once

#include "lgw/excursion.hpp"
#include "lgw/maps.hpp"
#include "lgw/model.hpp"
#include "lgw/oracle.hpp"
#include "lgw/random.hpp"
#include "lgw/series.hpp"

#include <cstdint>
#include <functional>
#include <variant>

namespace lgw {

// Draws arities and increment vectors of a model with double-precision
// tables built once from the exact law.
class ModelSampler {
 public:
  explicit ModelSampler(const TreeModel& model);

  const TreeModel& model() const noexcept { return model_; }
  int arity(Rng& rng) const;
  // Increment vector for a vertex of arity d; may point into scratch.
  std::span<const int> increments(int d, Rng& rng, std::vector<int>& scratch) const;

 private:
  TreeModel model_;
  std::vector<double> offspring_cdf_;
  double geometric_p_ = 0;
  struct ArityLaw {
    std::vector<double> cdf;
    std::vector<std::vector<int>> vectors;
  };
  std::vector<ArityLaw> vectors_;  // indexed by arity
};

LabelledPlaneTree sample_tree(const ModelSampler& s, int root_label, Rng& rng, const SamplerConfig& cfg);
LabelledPlaneTree sample_tree(const TreeModel& model, int root_label, const SamplerConfig& cfg, std::uint64_t stream = 0);

// Generates a Pi_0 tree and returns only its vertical edge profile.
VerticalEdgeProfile sample_profile(const ModelSampler& s, Rng& rng, const SamplerConfig& cfg);

// Shape of the level-m excursion forest of a Pi_0 tree, without storing the
// tree: per forest vertex, its height and number of children.
struct ForestTally {
  std::vector<int> height;
  std::vector<long> children;
};

ForestTally sample_forest_shape(const ModelSampler& s, int m, Rng& rng, const SamplerConfig& cfg);
// The same quantities read off a stored tree.
ForestTally forest_shape(const LabelledPlaneTree& t, int m);

// Label-0 vertices are never expanded.
Excursion sample_excursion(const ModelSampler& s, Sign sign, Rng& rng, const SamplerConfig& cfg);
Excursion sample_excursion(const TreeModel& model, Sign sign, const SamplerConfig& cfg, std::uint64_t stream = 0);
// Number of label-0 leaves of a Pi^sign excursion, without storing it.
long sample_excursion_zeros(const ModelSampler& s, Sign sign, Rng& rng, const SamplerConfig& cfg);

// Whether some tree of the model has exactly `edges` edges.
bool size_attainable(const TreeModel& model, int edges);

// Rejection sampling of Pi_0 conditioned on |T| = edges.
LabelledPlaneTree sample_conditioned(const ModelSampler& s, int edges, Rng& rng, const SamplerConfig& cfg);
LabelledPlaneTree sample_conditioned(const TreeModel& model, int edges, const SamplerConfig& cfg, std::uint64_t stream = 0);

// Offspring law nu for the marked-tree sampler: either a truncated exact
// table (tail mass must stay below the guard) or exact draws of the number
// of label-0 leaves of positive excursions of a model.
class NuSampler {
 public:
  static constexpr double tail_guard = 1e-12;

  static NuSampler from_table(const RationalSeries& nu);
  static NuSampler from_excursions(const TreeModel& model);

  long draw(Rng& rng, const SamplerConfig& cfg) const;
  // Tail mass dropped by a table sampler (0 for the exact sampler).
  double truncated_mass() const noexcept { return tail_; }

 private:
  NuSampler() = default;
  std::vector<double> cdf_;
  double tail_ = 0;
  std::optional<ModelSampler> excursions_;
};

MarkedTree sample_marked_tree(const NuSampler& nu, Rng& rng, const SamplerConfig& cfg);

struct SampledMap {
  LabelledPlaneTree tree;
  int orientation = 1;
  Quadrangulation map;
};

// Geometric(1/2) tree with uniform {-1,0,1} increments conditioned on at
// least one edge, plus a uniform orientation bit, through tree_to_map.
SampledMap sample_quadrangulation(Rng& rng, const SamplerConfig& cfg);
SampledMap sample_quadrangulation(const SamplerConfig& cfg, std::uint64_t stream = 0);

// Runs task(i) for i in [0, count) on `workers` threads. Work is split by
// index, so results indexed by i do not depend on the worker count.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace lgw
