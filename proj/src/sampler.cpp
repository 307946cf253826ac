#include "lgw/sampler.hpp"

#include "lgw/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace lgw {

namespace {

std::size_t pick(const std::vector<double>& cdf, double u) {
  return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

[[noreturn]] void over_cap(std::uint64_t cap) {
  fail(ErrorKind::resource, "vertex cap of " + std::to_string(cap) + " exceeded");
}

}  // namespace

ModelSampler::ModelSampler(const TreeModel& model) : model_(model) {
  const auto& xi = model_.offspring;
  if (xi.kind() == OffspringDistribution::Kind::finite_table) {
    double acc = 0;
    for (const auto& p : xi.table()) offspring_cdf_.push_back(acc += to_double(p));
    offspring_cdf_.back() = 1.0;
  } else {
    geometric_p_ = xi.kind() == OffspringDistribution::Kind::geometric_half ? 0.5 : to_double(xi.parameter());
  }
  if (!model_.displacement.iid())
    for (const auto& [d, entries] : model_.displacement.table()) {
      if (static_cast<std::size_t>(d) >= vectors_.size()) vectors_.resize(static_cast<std::size_t>(d) + 1);
      auto& [cdf, vecs] = vectors_[static_cast<std::size_t>(d)];
      double acc = 0;
      for (const auto& e : entries) {
        if (e.prob == 0) continue;
        cdf.push_back(acc += to_double(e.prob));
        vecs.push_back(e.increments);
      }
      if (!cdf.empty()) cdf.back() = 1.0;
    }
}

int ModelSampler::arity(Rng& rng) const {
  if (!offspring_cdf_.empty()) return static_cast<int>(std::min(pick(offspring_cdf_, rng.uniform()), offspring_cdf_.size() - 1));
  int k = 0;
  if (geometric_p_ == 0.5) {
    while (rng.coin()) ++k;
  } else {
    while (rng.uniform() >= geometric_p_) ++k;
  }
  return k;
}

std::span<const int> ModelSampler::increments(int d, Rng& rng, std::vector<int>& scratch) const {
  switch (model_.displacement.kind()) {
    case DisplacementFamily::Kind::iid_uniform_pm1:
      scratch.resize(static_cast<std::size_t>(d));
      for (auto& x : scratch) x = rng.coin() ? 1 : -1;
      return scratch;
    case DisplacementFamily::Kind::iid_uniform_pm01:
      scratch.resize(static_cast<std::size_t>(d));
      for (auto& x : scratch) x = static_cast<int>(rng.below(3)) - 1;
      return scratch;
    case DisplacementFamily::Kind::per_arity_table: {
      const auto i = static_cast<std::size_t>(d);
      if (i >= vectors_.size() || vectors_[i].cdf.empty())
        fail(ErrorKind::internal, "no displacement law for arity " + std::to_string(d));
      const auto& law = vectors_[i];
      if (law.vectors.size() == 1) return law.vectors.front();
      return law.vectors[std::min(pick(law.cdf, rng.uniform()), law.vectors.size() - 1)];
    }
  }
  fail(ErrorKind::internal, "unknown displacement kind");
}

namespace {

// Depth-first generation in preorder. visit(parent, parent_label, label)
// returns the new vertex index (parent is -1 for the root); expand(label)
// says whether the vertex gets offspring.
template <class Visit, class Expand>
void generate(const ModelSampler& s, int root_label, Rng& rng, std::uint64_t cap, Visit&& visit, Expand&& expand) {
  struct Pending {
    std::int64_t parent;
    int parent_label;
    int label;
  };
  std::vector<Pending> stack{{-1, 0, root_label}};
  std::vector<int> inc;
  std::uint64_t count = 0;
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    if (++count > cap) over_cap(cap);
    const std::int64_t me = visit(p.parent, p.parent_label, p.label);
    if (!expand(p.label)) continue;
    const int d = s.arity(rng);
    if (d == 0) continue;
    const auto v = s.increments(d, rng, inc);
    for (int i = d - 1; i >= 0; --i) stack.push_back({me, p.label, p.label + v[static_cast<std::size_t>(i)]});
  }
}

LabelledPlaneTree build_tree(const ModelSampler& s, int root_label, Rng& rng, std::uint64_t cap, bool stop_at_zero) {
  TreeBuilder b(root_label);
  generate(
      s, root_label, rng, cap,
      [&](std::int64_t parent, int, int label) -> std::int64_t {
        return parent < 0 ? 0 : b.add(static_cast<Vertex>(parent), label);
      },
      [&](int label) { return !(stop_at_zero && label == 0); });
  return std::move(b).build();
}

}  // namespace

LabelledPlaneTree sample_tree(const ModelSampler& s, int root_label, Rng& rng, const SamplerConfig& cfg) {
  return build_tree(s, root_label, rng, cfg.vertex_cap, false);
}

LabelledPlaneTree sample_tree(const TreeModel& model, int root_label, const SamplerConfig& cfg, std::uint64_t stream) {
  Rng rng(cfg.seed, stream);
  return sample_tree(ModelSampler(model), root_label, rng, cfg);
}

VerticalEdgeProfile sample_profile(const ModelSampler& s, Rng& rng, const SamplerConfig& cfg) {
  EdgeTally tally;
  generate(
      s, 0, rng, cfg.vertex_cap,
      [&](std::int64_t parent, int parent_label, int label) -> std::int64_t {
        if (parent >= 0) tally.add(parent_label, label);
        return 0;
      },
      [](int) { return true; });
  return tally.profile();
}

namespace {

// Component bookkeeping shared by the streaming and stored versions. Id 0 is
// the root component; every edge crossing level m - 1/2 opens a new one.
struct ForestBuilder {
  int m;
  ForestTally tally{{-1}, {0}};

  std::int64_t enter(std::int64_t parent_comp, int parent_label, int label) {
    if (parent_comp < 0) return 0;
    const bool crossing = (parent_label == m - 1 && label == m) || (parent_label == m && label == m - 1);
    if (!crossing) return parent_comp;
    const auto pc = static_cast<std::size_t>(parent_comp);
    if (pc != 0) ++tally.children[pc];
    tally.height.push_back(tally.height[pc] + 1);
    tally.children.push_back(0);
    return static_cast<std::int64_t>(tally.height.size() - 1);
  }

  ForestTally finish() && {
    tally.height.erase(tally.height.begin());
    tally.children.erase(tally.children.begin());
    return std::move(tally);
  }
};

}  // namespace

ForestTally sample_forest_shape(const ModelSampler& s, int m, Rng& rng, const SamplerConfig& cfg) {
  if (m < 1) fail(ErrorKind::domain, "forest level must be at least 1");
  ForestBuilder fb{m};
  generate(
      s, 0, rng, cfg.vertex_cap, [&](std::int64_t parent, int pl, int l) { return fb.enter(parent, pl, l); },
      [](int) { return true; });
  return std::move(fb).finish();
}

ForestTally forest_shape(const LabelledPlaneTree& t, int m) {
  if (m < 1) fail(ErrorKind::domain, "forest level must be at least 1");
  ForestBuilder fb{m};
  std::vector<std::int64_t> comp(t.vertex_count());
  comp[0] = fb.enter(-1, 0, t.root_label());
  for (std::size_t i = 1; i < t.vertex_count(); ++i) {
    const auto v = static_cast<Vertex>(i);
    comp[i] = fb.enter(comp[static_cast<std::size_t>(t.parent(v))], t.label(t.parent(v)), t.label(v));
  }
  return std::move(fb).finish();
}

Excursion sample_excursion(const ModelSampler& s, Sign sign, Rng& rng, const SamplerConfig& cfg) {
  return Excursion::make(build_tree(s, static_cast<int>(sign), rng, cfg.vertex_cap, true));
}

Excursion sample_excursion(const TreeModel& model, Sign sign, const SamplerConfig& cfg, std::uint64_t stream) {
  Rng rng(cfg.seed, stream);
  return sample_excursion(ModelSampler(model), sign, rng, cfg);
}

long sample_excursion_zeros(const ModelSampler& s, Sign sign, Rng& rng, const SamplerConfig& cfg) {
  long zeros = 0;
  generate(
      s, static_cast<int>(sign), rng, cfg.vertex_cap,
      [&](std::int64_t, int, int label) -> std::int64_t {
        zeros += label == 0;
        return 0;
      },
      [](int label) { return label != 0; });
  return zeros;
}

bool size_attainable(const TreeModel& model, int edges) {
  if (edges < 0) return false;
  // A tree with V edges exists iff V is a sum of V + 1 usable arities (cycle lemma).
  std::vector<int> usable;
  for (int d = 0; d <= edges; ++d) {
    if (model.offspring(d) == 0) continue;
    if (d > 0 && !model.displacement.iid() && model.displacement.table().count(d) == 0) continue;
    usable.push_back(d);
  }
  std::vector<char> reach(static_cast<std::size_t>(edges) + 1, 0);
  reach[0] = 1;
  for (int step = 0; step <= edges; ++step) {
    std::vector<char> next(reach.size(), 0);
    for (int x = 0; x <= edges; ++x)
      if (reach[static_cast<std::size_t>(x)])
        for (int d : usable)
          if (x + d <= edges) next[static_cast<std::size_t>(x + d)] = 1;
    reach = std::move(next);
  }
  return reach[static_cast<std::size_t>(edges)] != 0;
}

LabelledPlaneTree sample_conditioned(const ModelSampler& s, int edges, Rng& rng, const SamplerConfig& cfg) {
  if (!size_attainable(s.model(), edges))
    fail(ErrorKind::domain, "model " + s.model().name + " has no tree with " + std::to_string(edges) + " edges");
  const std::uint64_t cap = std::min<std::uint64_t>(cfg.vertex_cap, static_cast<std::uint64_t>(edges) + 1);
  for (std::uint64_t attempt = 0; attempt < cfg.rejection_cap; ++attempt) {
    // Generation stops as soon as the tree outgrows the target; that is
    // still exact rejection since such trees would be rejected anyway.
    try {
      auto t = build_tree(s, 0, rng, cap, false);
      if (t.edge_count() == static_cast<std::size_t>(edges)) return t;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
      if (cap < static_cast<std::uint64_t>(edges) + 1) throw;
    }
  }
  fail(ErrorKind::resource, "rejection cap of " + std::to_string(cfg.rejection_cap) + " attempts exceeded");
}

LabelledPlaneTree sample_conditioned(const TreeModel& model, int edges, const SamplerConfig& cfg, std::uint64_t stream) {
  Rng rng(cfg.seed, stream);
  return sample_conditioned(ModelSampler(model), edges, rng, cfg);
}

NuSampler NuSampler::from_table(const RationalSeries& nu) {
  NuSampler out;
  Rational mass = 0;
  for (int k = 0; k <= nu.order(); ++k) {
    mass += nu[k];
    out.cdf_.push_back(to_double(mass));
  }
  out.tail_ = to_double(1 - mass);
  if (out.tail_ >= tail_guard)
    fail(ErrorKind::convergence, "nu table of order " + std::to_string(nu.order()) + " leaves tail mass " +
                                     std::to_string(out.tail_) + ", above the guard 1e-12");
  // Renormalize over the kept support.
  for (auto& c : out.cdf_) c /= out.cdf_.back();
  return out;
}

NuSampler NuSampler::from_excursions(const TreeModel& model) {
  NuSampler out;
  out.excursions_.emplace(model);
  return out;
}

long NuSampler::draw(Rng& rng, const SamplerConfig& cfg) const {
  if (excursions_) return sample_excursion_zeros(*excursions_, Sign::plus, rng, cfg);
  return static_cast<long>(std::min(pick(cdf_, rng.uniform()), cdf_.size() - 1));
}

MarkedTree sample_marked_tree(const NuSampler& nu, Rng& rng, const SamplerConfig& cfg) {
  MarkedTree m;
  std::vector<Vertex> stack{no_vertex};
  while (!stack.empty()) {
    const Vertex parent = stack.back();
    stack.pop_back();
    if (m.parents.size() >= cfg.vertex_cap) over_cap(cfg.vertex_cap);
    const auto me = static_cast<Vertex>(m.parents.size());
    m.parents.push_back(parent);
    const bool sigma = rng.coin();
    const bool iota = rng.coin();
    m.sigma.push_back(sigma);
    m.iota.push_back(iota);
    if (!sigma) continue;
    const long k = nu.draw(rng, cfg);
    if (static_cast<std::uint64_t>(k) > cfg.vertex_cap) over_cap(cfg.vertex_cap);
    stack.insert(stack.end(), static_cast<std::size_t>(k), me);
  }
  return m;
}

SampledMap sample_quadrangulation(Rng& rng, const SamplerConfig& cfg) {
  static const ModelSampler geometric(builtin_model("geom-pm01"));
  for (std::uint64_t attempt = 0; attempt < cfg.rejection_cap; ++attempt) {
    auto t = sample_tree(geometric, 0, rng, cfg);
    if (t.edge_count() == 0) continue;
    const int orientation = rng.coin() ? 1 : -1;
    auto q = tree_to_map(t, orientation);
    return {std::move(t), orientation, std::move(q)};
  }
  fail(ErrorKind::resource, "rejection cap of " + std::to_string(cfg.rejection_cap) + " attempts exceeded");
}

SampledMap sample_quadrangulation(const SamplerConfig& cfg, std::uint64_t stream) {
  Rng rng(cfg.seed, stream);
  return sample_quadrangulation(rng, cfg);
}

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace lgw
