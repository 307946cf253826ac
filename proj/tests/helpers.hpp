#pragma once

#include "lgw/errors.hpp"
#include "lgw/model.hpp"
#include "lgw/oracle.hpp"
#include "lgw/sampler.hpp"
#include "lgw/tree.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lgw::test {

inline constexpr std::uint64_t seed = 20240601;

// Sampler settings for property tests: per-tree checks are deterministic,
// so draws above the cap are simply replaced by the next stream.
inline SamplerConfig small_config() {
  SamplerConfig cfg;
  cfg.seed = seed;
  cfg.vertex_cap = 20'000;
  return cfg;
}

// Calls f on `count` sampled trees of the model rooted at 0.
inline void for_sampled_trees(const TreeModel& model, long count, const std::function<void(const LabelledPlaneTree&)>& f,
                              SamplerConfig cfg = small_config()) {
  const ModelSampler sampler(model);
  long done = 0;
  for (std::uint64_t stream = 0; done < count; ++stream) {
    Rng rng(cfg.seed, stream);
    try {
      const auto t = sample_tree(sampler, 0, rng, cfg);
      f(t);
      ++done;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
    }
  }
}

// Calls f on every positive-weight tree of the model with at most max_edges edges.
inline void for_enumerated_trees(const TreeModel& model, int max_edges,
                                 const std::function<void(const LabelledPlaneTree&, const Rational&)>& f) {
  for (int e = 0; e <= max_edges; ++e)
    for (const auto& [t, w] : enumerate_trees(model, e).items) f(t, w);
}

inline ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::internal;  // nothing thrown
}

}  // namespace lgw::test
