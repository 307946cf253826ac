#include "helpers.hpp"

#include "lgw/genfun.hpp"
#include "lgw/kernel.hpp"
#include "lgw/oracle.hpp"

#include <gtest/gtest.h>

namespace lgw {
namespace {

Integer factorial(long n) {
  Integer r = 1;
  for (long k = 2; k <= n; ++k) r *= k;
  return r;
}

TEST(Oracle, EnumerationExamples) {
  const auto ib = builtin_model("incomplete-binary");
  const auto e0 = enumerate_trees(ib, 0);
  ASSERT_EQ(e0.items.size(), 1u);
  EXPECT_EQ(e0.items[0].second, Rational(1, 4));
  const auto e1 = enumerate_trees(ib, 1);
  ASSERT_EQ(e1.items.size(), 2u);
  for (const auto& [t, w] : e1.items) EXPECT_EQ(w, Rational(1, 16));
  const auto g1 = enumerate_trees(builtin_model("geom-pm1"), 1);
  ASSERT_EQ(g1.items.size(), 2u);
  for (const auto& [t, w] : g1.items) EXPECT_EQ(w, Rational(1, 16));
  EXPECT_EQ(test::kind_of([&] { enumerate_trees(builtin_model("geom-pm01"), 8, 1000); }), ErrorKind::resource);
}

TEST(Oracle, EnsemblesAreDistinctPositiveAndSummed) {
  for (const auto& id : builtin_ids()) {
    const auto m = builtin_model(id);
    for (int e = 0; e <= 5; ++e) {
      const auto ens = enumerate_trees(m, e);
      std::set<std::string> seen;
      Rational sum = 0;
      for (const auto& [t, w] : ens.items) {
        ASSERT_GT(w, 0);
        ASSERT_EQ(t.edge_count(), static_cast<std::size_t>(e));
        ASSERT_EQ(t.root_label(), 0);
        ASSERT_EQ(w, tree_weight(m, t));
        ASSERT_TRUE(seen.insert(encode(t)).second) << "duplicate " << encode(t);
        sum += w;
      }
      ASSERT_EQ(sum, ens.total);
      ASSERT_EQ(Integer(static_cast<long>(ens.items.size())), count_trees(m, e)) << id << " E=" << e;
      ASSERT_EQ(tree_mass(m, e), ens.total) << id << " E=" << e;
    }
  }
}

TEST(Oracle, KnownTreeCounts) {
  // Incomplete binary trees are counted by Catalan numbers; geom-pm1 adds a sign per edge.
  const long catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  for (int e = 0; e <= 7; ++e) {
    EXPECT_EQ(count_trees(builtin_model("incomplete-binary"), e), Integer(catalan[e + 1]));
    EXPECT_EQ(count_trees(builtin_model("geom-pm1"), e), Integer(catalan[e] << e));
  }
  EXPECT_EQ(count_trees(builtin_model("complete-binary"), 1), Integer(0));
  EXPECT_EQ(count_trees(builtin_model("complete-binary"), 2), Integer(1));
}

TEST(Oracle, MassAccumulatesBelowOne) {
  for (const auto& id : builtin_ids()) {
    const auto m = builtin_model(id);
    Rational cumulative = 0;
    for (int e = 0; e <= 8; ++e) {
      const Rational before = cumulative;
      cumulative += tree_mass(m, e);
      ASSERT_LE(cumulative, 1) << id;
      if (id != "complete-binary" || e % 2 == 0) ASSERT_GT(cumulative, before) << id << " E=" << e;
    }
  }
}

TEST(Oracle, ExcursionEnumerationMatchesWeights) {
  for (const auto& id : builtin_ids()) {
    const auto m = builtin_model(id);
    for (Sign sign : {Sign::plus, Sign::minus})
      for (int e = 0; e <= 5; ++e)
        for (const auto& [t, w] : enumerate_excursions(m, sign, e).items) {
          const auto tau = Excursion::make(t);
          ASSERT_EQ(tau.sign, sign);
          ASSERT_EQ(excursion_weight(m, tau), w) << id << " " << encode(t);
        }
  }
}

TEST(Oracle, ExactChainLawSmallCases) {
  const auto v0 = exact_chain_law(0);
  ASSERT_EQ(v0.paths.size(), 1u);
  EXPECT_EQ(v0.paths.begin()->second, Rational(1));
  for (const auto& s : v0.paths.begin()->first) EXPECT_EQ(s, (CondState{0, 0, 0}));
  EXPECT_TRUE(verify_markov_exact(v0).ok());

  // Five equally likely trees; two of them share a state path.
  const auto v2 = exact_chain_law(2);
  EXPECT_EQ(v2.paths.size(), 4u);
  Rational total = 0;
  for (const auto& [path, w] : v2.paths) {
    total += w;
    EXPECT_TRUE(w == Rational(1, 5) || w == Rational(2, 5));
  }
  EXPECT_EQ(total, Rational(1));
}

TEST(Oracle, ChainLawFirstStateMarginalSumsToOne) {
  for (int V = 1; V <= 6; ++V) {
    const auto law = exact_chain_law(V);
    std::map<CondState, Rational> first;
    for (const auto& [path, w] : law.paths) first[path.front()] += w;
    Rational total = 0;
    for (const auto& [s, w] : first) total += w;
    EXPECT_EQ(total, Rational(1)) << V;
  }
}

TEST(Oracle, ChainPathOfEnumeratedTrees) {
  const auto m = builtin_model("incomplete-binary");
  for (const auto& [t, w] : enumerate_trees(m, 4).items) {
    const auto path = chain_path(t);
    const auto prof = edge_profile(t);
    ASSERT_FALSE(path.empty());
    for (std::size_t i = 0; i < path.size(); ++i) {
      const int mm = static_cast<int>(i) + 1;
      ASSERT_EQ(path[i].p, prof.x_plus[mm]);
      ASSERT_EQ(path[i].q, prof.x_minus[mm]);
      ASSERT_EQ(path[i].v, prof.mass(mm));
    }
    ASSERT_EQ(path.back(), (CondState{0, 0, 4}));
  }
}

TEST(Oracle, ConditionedChainIsMarkovWithTheoremKernel) {
  for (int V = 0; V <= 7; ++V) {
    const auto report = verify_markov_exact(exact_chain_law(V));
    EXPECT_TRUE(report.ok()) << "V=" << V << ": " << (report.ok() ? "" : report.discrepancies.front());
    if (V >= 2) EXPECT_GT(report.transitions, 0u);
  }
}

TEST(Oracle, CorruptedKernelIsDetected) {
  constexpr int V = 5;
  const auto law = exact_chain_law(V);
  const auto ft = joint_table(builtin_model("incomplete-binary"), V + 1, V + 1, V);
  const CondKernel off_by_one = [&](CondState a, CondState b) { return cond_transition_prob(ft, V, a, {b.p, b.q, b.v - 1}); };
  EXPECT_FALSE(verify_markov_exact(law, off_by_one).ok());
}

TEST(Oracle, BicolouredForestExamples) {
  EXPECT_EQ(enumerate_bicoloured_forests(1, {0}, {}), Integer(1));
  EXPECT_EQ(enumerate_bicoloured_forests(1, {1, 0}, {1}), Integer(1));
  EXPECT_EQ(enumerate_bicoloured_forests(2, {1, 0, 0}, {1}), Integer(4));
  EXPECT_EQ(counting_lemma_formula(2, 3, 1), Integer(4));
  EXPECT_EQ(test::kind_of([] { enumerate_bicoloured_forests(1, {0, 0}, {}); }), ErrorKind::domain);
}

void weak_compositions(int total, int parts, std::vector<int>& cur, const std::function<void()>& f) {
  if (static_cast<int>(cur.size()) == parts) {
    if (total == 0) f();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur.push_back(k);
    weak_compositions(total - k, parts, cur, f);
    cur.pop_back();
  }
}

TEST(Oracle, CountingLemmaSweep) {
  long tuples = 0;
  for (int p = 1; p <= 6; ++p)
    for (int q = 0; p + q <= 6; ++q)
      for (int n = 1; n <= p; ++n) {
        std::vector<int> plus, minus;
        // p = n + sum n^-, q = sum n^+.
        weak_compositions(p - n, q, minus, [&] {
          weak_compositions(q, p, plus, [&] {
            ++tuples;
            const Integer expected = factorial(q) * factorial(p - 1) * n;
            ASSERT_EQ(counting_lemma_formula(n, p, q), expected);
            ASSERT_EQ(enumerate_bicoloured_forests(n, plus, minus), expected) << "n=" << n << " p=" << p << " q=" << q;
          });
        });
      }
  EXPECT_GT(tuples, 100);
}

TEST(Oracle, MarkedForestSingleTree) {
  const auto nu = solve_nu_gf(builtin_model("incomplete-binary"), 4);
  const auto cells = enumerate_marked_forests(nu, 1, 0);
  const Rational quarter(1, 4);
  EXPECT_EQ(cells.at({0, 0}), quarter);
  EXPECT_EQ(cells.at({1, 0}), quarter);
  EXPECT_EQ(cells.at({0, 1}), quarter * nu[0]);
  EXPECT_EQ(cells.at({1, 1}), quarter * nu[0]);
}

TEST(Oracle, MarkedForestMatchesFormula) {
  const auto nu = solve_nu_gf(builtin_model("incomplete-binary"), 8);
  const FTable f(nu, 8, 8);
  for (int p = 1; p <= 3; ++p)
    for (int s = 0; s <= 4; ++s) {
      const auto cells = enumerate_marked_forests(nu, p, s);
      for (int q = 0; q <= p + s; ++q)
        for (int r = 0; r <= p + s; ++r) {
          const auto it = cells.find({q, r});
          const Rational got = it == cells.end() ? Rational(0) : it->second;
          ASSERT_EQ(got, marked_forest_formula(f, p, s, q, r)) << p << " " << s << " " << q << " " << r;
          // Dividing by f_p(q) must give the free kernel cell.
          if (f(p, q) > 0 && f.covers(r, s))
            ASSERT_EQ(got / f(p, q), transition_prob(f, {p, q}, {r, s}));
        }
    }
}

TEST(Oracle, KempermanIdentity) {
  const auto nu = solve_nu_gf(builtin_model("incomplete-binary"), 8);
  for (int p = 1; p <= 4; ++p)
    for (int s = 0; s <= 5; ++s) {
      const auto [direct, scaled] = kemperman_check(nu, p, s);
      ASSERT_EQ(direct, scaled) << p << "," << s;
    }
}

TEST(Oracle, ToMarkedExamples) {
  const auto single = to_marked(Excursion::make(decode("1()")));
  ASSERT_EQ(single.parents.size(), 1u);
  EXPECT_FALSE(single.sigma[0]);
  EXPECT_FALSE(single.iota[0]);
  const auto left = to_marked(Excursion::make(decode("1(-())")));
  ASSERT_EQ(left.parents.size(), 1u);
  EXPECT_TRUE(left.iota[0]);
  EXPECT_FALSE(left.sigma[0]);
  EXPECT_EQ(left.count_L(), 1u);
}

void check_marked(const Excursion& tau) {
  const auto mt = to_marked(tau);
  long y_plus = 0, y_minus = 0;
  const auto& t = tau.tree;
  for (Vertex v = 1; v < static_cast<Vertex>(t.vertex_count()); ++v) {
    const int a = t.label(t.parent(v)), b = t.label(v);
    y_plus += a == 1 && b == 2;
    y_minus += a == 2 && b == 1;
  }
  ASSERT_EQ(static_cast<long>(mt.edges()), y_minus) << encode(t);
  ASSERT_EQ(static_cast<long>(mt.count_L()), tau.n) << encode(t);
  ASSERT_EQ(static_cast<long>(mt.count_R()), y_plus) << encode(t);
  ASSERT_EQ(mt.parents.size(), static_cast<std::size_t>(std::ranges::count(t.labels(), 1)));
  std::vector<int> kids(mt.parents.size(), 0);
  for (std::size_t v = 1; v < mt.parents.size(); ++v) ++kids[static_cast<std::size_t>(mt.parents[v])];
  for (std::size_t v = 0; v < kids.size(); ++v)
    if (!mt.sigma[v]) ASSERT_EQ(kids[v], 0) << encode(t);
}

TEST(Oracle, ToMarkedIdentitiesOnEnumeratedExcursions) {
  const auto m = builtin_model("incomplete-binary");
  for (int e = 0; e <= 7; ++e)
    for (const auto& [t, w] : enumerate_excursions(m, Sign::plus, e).items) check_marked(Excursion::make(t));
}

TEST(Oracle, ToMarkedIdentitiesOnSampledExcursions) {
  const ModelSampler sampler(builtin_model("incomplete-binary"));
  auto cfg = test::small_config();
  long done = 0;
  for (std::uint64_t stream = 0; done < 10'000; ++stream) {
    Rng rng(cfg.seed, stream);
    try {
      check_marked(sample_excursion(sampler, Sign::plus, rng, cfg));
      ++done;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
    }
  }
}

TEST(Oracle, PlaneForestCounts) {
  // k trees with e edges in total: k/(2e+k) C(2e+k, e).
  EXPECT_EQ(plane_forests(1, 3).size(), 5u);
  EXPECT_EQ(plane_forests(2, 2).size(), 5u);
  EXPECT_EQ(plane_forests(3, 2).size(), 9u);
}

}  // namespace
}  // namespace lgw
