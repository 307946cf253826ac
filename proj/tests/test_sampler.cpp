#include "helpers.hpp"

#include "lgw/excursion.hpp"
#include "lgw/genfun.hpp"
#include "lgw/oracle.hpp"
#include "lgw/sampler.hpp"
#include "lgw/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace lgw;
using lgw::test::kind_of;
using lgw::test::small_config;

namespace {

// Fraction of single-vertex trees. Draws that hit the cap are certainly not
// single vertices, so counting them as misses keeps the estimate unbiased.
double single_vertex_rate(const TreeModel& model, long draws) {
  auto cfg = small_config();
  cfg.vertex_cap = 2'000;
  const ModelSampler s(model);
  long hits = 0;
  for (long i = 0; i < draws; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    try {
      hits += sample_tree(s, 0, rng, cfg).vertex_count() == 1;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

// Histogram of label-0 counts of excursions; index `width` collects larger
// counts and capped draws.
std::vector<long> zero_histogram(const TreeModel& model, Sign sign, long draws, int width, std::uint64_t offset) {
  auto cfg = small_config();
  cfg.vertex_cap = 100'000;
  const ModelSampler s(model);
  std::vector<long> hist(static_cast<std::size_t>(width) + 1, 0);
  for (long i = 0; i < draws; ++i) {
    Rng rng(cfg.seed, offset + static_cast<std::uint64_t>(i));
    long n = width;
    try {
      n = std::min<long>(sample_excursion_zeros(s, sign, rng, cfg), width);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
    }
    ++hist[static_cast<std::size_t>(n)];
  }
  return hist;
}

std::vector<double> head_probabilities(const RationalSeries& nu, int width) {
  std::vector<double> p;
  Rational head = 0;
  for (int k = 0; k < width; ++k) {
    p.push_back(to_double(nu[k]));
    head += nu[k];
  }
  p.push_back(to_double(1 - head));  // overflow cell
  return p;
}

}  // namespace

TEST(Sampler, SingleVertexFrequency) {
  EXPECT_NEAR(single_vertex_rate(builtin_model("incomplete-binary"), 100'000), 0.25, 0.01);
  EXPECT_NEAR(single_vertex_rate(builtin_model("geom-pm1"), 100'000), 0.5, 0.01);
}

TEST(Sampler, SameStreamSameTree) {
  const auto model = builtin_model("geom-pm1");
  auto cfg = small_config();
  int differing = 0;
  for (std::uint64_t stream = 0; stream < 50; ++stream) {
    try {
      const auto a = sample_tree(model, 0, cfg, stream);
      const auto b = sample_tree(model, 0, cfg, stream);
      EXPECT_EQ(encode(a), encode(b));
      differing += encode(a) != encode(sample_tree(model, 0, cfg, stream + 1000));
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::resource);
    }
  }
  EXPECT_GT(differing, 10);
}

TEST(Sampler, ParallelResultsIgnoreWorkerCount) {
  const auto model = builtin_model("incomplete-binary");
  const auto cfg = small_config();
  auto run = [&](unsigned workers) {
    std::vector<std::string> out(200);
    parallel_for(out.size(), workers, [&](std::size_t i) {
      try {
        out[i] = encode(sample_tree(model, 0, cfg, i));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resource) throw;
        out[i] = "capped";
      }
    });
    return out;
  };
  const auto serial = run(1);
  EXPECT_EQ(serial, run(3));
  EXPECT_EQ(serial, run(8));
}

TEST(Sampler, ParallelForPropagatesErrors) {
  EXPECT_EQ(kind_of([] {
              parallel_for(100, 4, [](std::size_t i) {
                if (i == 37) fail(ErrorKind::domain, "boom");
              });
            }),
            ErrorKind::domain);
}

TEST(Sampler, ExcursionsAreExcursions) {
  auto cfg = small_config();
  for (const char* id : {"incomplete-binary", "geom-pm1", "geom-pm01", "complete-binary"}) {
    const auto model = builtin_model(id);
    for (Sign sign : {Sign::plus, Sign::minus}) {
      for (std::uint64_t stream = 0; stream < 300; ++stream) {
        try {
          const auto e = sample_excursion(model, sign, cfg, stream);
          ASSERT_EQ(e.sign, sign);
          ASSERT_EQ(e.tree.root_label(), static_cast<int>(sign));
          ASSERT_FALSE(excursion_violation(e.tree)) << id;
          long zeros = 0;
          for (std::size_t v = 0; v < e.tree.vertex_count(); ++v) {
            const auto x = static_cast<Vertex>(v);
            if (e.tree.label(x) == 0) {
              ++zeros;
              ASSERT_TRUE(e.tree.children(x).empty());
            }
            ASSERT_GE(e.tree.label(x) * static_cast<int>(sign), 0);
          }
          ASSERT_EQ(zeros, e.n);
        } catch (const Error& err) {
          ASSERT_EQ(err.kind(), ErrorKind::resource);
        }
      }
    }
  }
}

TEST(Sampler, StreamingZerosMatchStoredExcursion) {
  const auto model = builtin_model("geom-pm01");
  const ModelSampler s(model);
  auto cfg = small_config();
  for (std::uint64_t stream = 0; stream < 300; ++stream) {
    try {
      Rng a(cfg.seed, stream), b(cfg.seed, stream);
      const auto e = sample_excursion(s, Sign::plus, a, cfg);
      EXPECT_EQ(sample_excursion_zeros(s, Sign::plus, b, cfg), e.n);
    } catch (const Error& err) {
      ASSERT_EQ(err.kind(), ErrorKind::resource);
    }
  }
}

TEST(Sampler, ZeroCountLawMatchesNu) {
  const auto model = builtin_model("incomplete-binary");
  const int width = 12;
  const auto nu = solve_nu_gf(model, width);
  const long draws = 40'000;
  const auto hist = zero_histogram(model, Sign::plus, draws, width, 0);
  EXPECT_NEAR(static_cast<double>(hist[0]) / draws, 0.4, 0.01);
  const auto r = chi_square(hist, head_probabilities(nu, width));
  EXPECT_GT(r.p_value, 1e-3) << r.statistic << " on " << r.dof;
}

TEST(Sampler, MinusExcursionsMirrorPlus) {
  for (const char* id : {"geom-pm1", "incomplete-binary"}) {
    const auto model = builtin_model(id);
    const auto plus = zero_histogram(model, Sign::plus, 20'000, 10, 0);
    const auto minus = zero_histogram(model, Sign::minus, 20'000, 10, 1'000'000);
    const auto r = chi_square_homogeneity({plus, minus});
    EXPECT_GT(r.p_value, 1e-3) << id << ": " << r.statistic;
  }
}

TEST(Sampler, ConditionedOnTwoEdgesFollowsWeights) {
  const auto model = builtin_model("incomplete-binary");
  const auto ensemble = enumerate_trees(model, 2);
  std::map<std::string, std::size_t> index;
  std::vector<double> expected;
  for (const auto& [t, w] : ensemble.items) {
    index[encode(t)] = expected.size();
    expected.push_back(to_double(w / ensemble.total));
  }
  ASSERT_EQ(expected.size(), 5u);
  for (double p : expected) EXPECT_DOUBLE_EQ(p, 0.2);

  const ModelSampler s(model);
  auto cfg = small_config();
  std::vector<long> counts(expected.size(), 0);
  Rng rng(cfg.seed, 0);
  for (int i = 0; i < 10'000; ++i) {
    const auto t = sample_conditioned(s, 2, rng, cfg);
    ASSERT_EQ(t.edge_count(), 2u);
    ++counts.at(index.at(encode(t)));
  }
  const auto r = chi_square(counts, expected);
  EXPECT_GT(r.p_value, 1e-3) << r.statistic;
}

TEST(Sampler, ConditionedEdgeCases) {
  auto cfg = small_config();
  const auto zero = sample_conditioned(builtin_model("geom-pm1"), 0, cfg);
  EXPECT_EQ(zero.vertex_count(), 1u);
  EXPECT_EQ(zero.root_label(), 0);

  const auto complete = builtin_model("complete-binary");
  EXPECT_FALSE(size_attainable(complete, 1));
  EXPECT_TRUE(size_attainable(complete, 2));
  EXPECT_EQ(kind_of([&] { sample_conditioned(complete, 1, cfg); }), ErrorKind::domain);
  const auto two = sample_conditioned(complete, 4, cfg);
  EXPECT_EQ(two.edge_count(), 4u);
}

TEST(Sampler, VertexCapIsAResourceError) {
  auto cfg = small_config();
  cfg.vertex_cap = 3;
  int capped = 0;
  for (std::uint64_t stream = 0; stream < 200; ++stream) {
    try {
      EXPECT_LE(sample_tree(builtin_model("geom-pm1"), 0, cfg, stream).vertex_count(), 3u);
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::resource);
      ++capped;
    }
  }
  EXPECT_GT(capped, 0);
}

TEST(Sampler, MarkedTreeRootCell) {
  const auto nu = NuSampler::from_excursions(builtin_model("incomplete-binary"));
  EXPECT_EQ(nu.truncated_mass(), 0.0);
  auto cfg = small_config();
  const long draws = 100'000;
  long hits = 0;
  for (long i = 0; i < draws; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    try {
      const auto m = sample_marked_tree(nu, rng, cfg);
      hits += m.edges() == 0 && !m.sigma[0];
      // A vertex outside R has no children.
      for (std::size_t v = 0; v < m.parents.size(); ++v)
        if (!m.sigma[v])
          for (std::size_t w = v + 1; w < m.parents.size(); ++w)
            ASSERT_NE(m.parents[w], static_cast<Vertex>(v));
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::resource);
    }
  }
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.5, 0.01);
}

TEST(Sampler, MarkedTreeJointLawMatchesEnumeration) {
  const auto nu_exact = solve_nu_gf(builtin_model("incomplete-binary"), 8);
  const int s_max = 3;
  std::map<std::tuple<int, int, int>, std::size_t> index;
  std::vector<double> expected;
  for (int s = 0; s <= s_max; ++s)
    for (const auto& [cell, w] : enumerate_marked_forests(nu_exact, 1, s)) {
      index[{s, cell.q, cell.r}] = expected.size();
      expected.push_back(to_double(w));
    }
  const auto nu = NuSampler::from_excursions(builtin_model("incomplete-binary"));
  auto cfg = small_config();
  std::vector<long> counts(expected.size() + 1, 0);  // last: |T| > s_max
  for (long i = 0; i < 50'000; ++i) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
    std::size_t cell = expected.size();
    try {
      const auto m = sample_marked_tree(nu, rng, cfg);
      if (m.edges() <= static_cast<std::size_t>(s_max))
        cell = index.at({static_cast<int>(m.edges()), static_cast<int>(m.count_L()), static_cast<int>(m.count_R())});
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::resource);
    }
    ++counts[cell];
  }
  double head = 0;
  for (double p : expected) head += p;
  expected.push_back(1 - head);
  const auto r = chi_square(counts, expected);
  EXPECT_GT(r.p_value, 1e-3) << r.statistic << " on " << r.dof;
}

// Each first hit of level k spawns the first hits of level k+1 below it
// through an independent negative excursion, so N_{k+1} given N_k = 1 is nu.
TEST(Sampler, FirstHitCascadeOffspringIsNu) {
  const auto model = builtin_model("geom-pm1");
  const int width = 8;
  const auto nu = solve_nu_gf(model, width);
  std::vector<long> hist(static_cast<std::size_t>(width) + 1, 0);
  auto cfg = small_config();
  cfg.vertex_cap = 200'000;
  lgw::test::for_sampled_trees(
      model, 40'000,
      [&](const LabelledPlaneTree& t) {
        const auto hits = first_hit_counts(t);
        for (const auto* table : {&hits.up, &hits.down})
          for (int k = 1; k <= table->last(); ++k)
            if ((*table)[k] == 1)
              ++hist[static_cast<std::size_t>(std::min<long long>((*table)[k + 1], width))];
      },
      cfg);
  const auto r = chi_square(hist, head_probabilities(nu, width));
  EXPECT_GT(r.p_value, 1e-3) << r.statistic << " on " << r.dof;
}

TEST(Sampler, StreamingForestShapeMatchesDecomposition) {
  const auto model = builtin_model("incomplete-binary");
  const ModelSampler s(model);
  auto cfg = small_config();
  int checked = 0;
  for (std::uint64_t stream = 0; stream < 400; ++stream) {
    for (int m : {1, 2, 3}) {
      try {
        Rng a(cfg.seed, stream), b(cfg.seed, stream);
        const auto t = sample_tree(s, 0, a, cfg);
        const auto streamed = sample_forest_shape(s, m, b, cfg);
        const auto stored = forest_shape(t, m);
        ASSERT_EQ(streamed.height, stored.height);
        ASSERT_EQ(streamed.children, stored.children);
        const auto d = decompose(t, m);
        ASSERT_EQ(stored.children.size(), d.forest.size());
        for (std::size_t i = 0; i < d.forest.size(); ++i)
          ASSERT_EQ(stored.children[i], static_cast<long>(d.forest.vertices[i].children.size()));
        ++checked;
      } catch (const Error& e) {
        ASSERT_EQ(e.kind(), ErrorKind::resource);
      }
    }
  }
  EXPECT_GT(checked, 1000);
  EXPECT_EQ(kind_of([&] { forest_shape(LabelledPlaneTree{}, 0); }), ErrorKind::domain);
}
