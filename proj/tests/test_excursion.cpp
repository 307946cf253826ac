#include "helpers.hpp"

#include "lgw/excursion.hpp"
#include "lgw/genfun.hpp"
#include "lgw/stats.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace lgw {
namespace {

long zeros_in(const std::string& key) {
  const auto t = decode(key);
  return std::ranges::count(t.labels(), 0);
}

long total(const std::map<std::string, long long>& c) {
  return std::accumulate(c.begin(), c.end(), 0L, [](long s, const auto& kv) { return s + static_cast<long>(kv.second); });
}

TEST(Excursion, DecomposeSingleVertex) {
  const auto d = decompose(LabelledPlaneTree::single(0), 1);
  EXPECT_EQ(d.root_component, LabelledPlaneTree::single(0));
  EXPECT_EQ(d.forest.size(), 0u);
  EXPECT_EQ(reconstruct(d), LabelledPlaneTree::single(0));
  const auto c = excursion_counts(d);
  EXPECT_TRUE(c.plus.empty());
  EXPECT_TRUE(c.minus.empty());
}

TEST(Excursion, DecomposePathToOne) {
  const auto t = decode("0(+())");
  const auto d = decompose(t, 1);
  EXPECT_EQ(d.root_component, t);
  ASSERT_EQ(d.forest.size(), 1u);
  ASSERT_EQ(d.forest.roots.size(), 1u);
  const auto& v = d.forest.vertices[0];
  EXPECT_EQ(v.sign, Sign::plus);
  EXPECT_EQ(encode(v.decoration.tree), "1()");
  EXPECT_EQ(v.decoration.n, 0);
  const auto c = excursion_counts(d);
  EXPECT_EQ(c.plus, (std::map<std::string, long long>{{"1()", 1}}));
  EXPECT_TRUE(c.minus.empty());
}

TEST(Excursion, DecomposeTwoLeaves) {
  const auto t = decode("0(+()+())");
  const auto d = decompose(t, 1);
  EXPECT_EQ(d.forest.roots.size(), 2u);
  EXPECT_EQ(d.forest.size(), 2u);
  EXPECT_EQ(excursion_counts(d).plus.at("1()"), 2);
  EXPECT_EQ(edge_profile(t).x_plus[1], 2);
}

TEST(Excursion, DecompositionAlternatesSigns) {
  // 0 -> 1 -> 0 -> 1: one positive excursion with a zero leaf, whose child is negative.
  const auto t = decode("0(+(-(+())))");
  const auto d = decompose(t, 1);
  ASSERT_EQ(d.forest.size(), 3u);
  for (const auto& v : d.forest.vertices) {
    const bool even = v.parent < 0 || d.forest.vertices[static_cast<std::size_t>(v.parent)].parent >= 0;
    EXPECT_EQ(v.sign, even ? Sign::plus : Sign::minus);
    EXPECT_EQ(static_cast<std::size_t>(v.decoration.n), v.children.size());
  }
  EXPECT_EQ(reconstruct(d), t);
}

TEST(Excursion, ReconstructRejectsForgedDecoration) {
  auto d = decompose(decode("0(+(-(+())))"), 1);
  // Swap in a decoration with two zero leaves at a vertex with one child.
  auto& root = d.forest.vertices[static_cast<std::size_t>(d.forest.roots[0])];
  root.decoration = Excursion::make(decode("1(-()-())"));
  EXPECT_EQ(test::kind_of([&] { reconstruct(d); }), ErrorKind::reconstruction);
}

TEST(Excursion, FirstHitExamples) {
  const auto single = first_hit_counts(LabelledPlaneTree::single(0));
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(single.up[k], 0);
  const auto p = first_hit_counts(decode("0(+(+()))"));
  EXPECT_EQ(p.up[1], 1);
  EXPECT_EQ(p.up[2], 1);
  EXPECT_EQ(p.up[3], 0);
}

void check_decomposition(const LabelledPlaneTree& t) {
  const auto prof = edge_profile(t);
  const auto hits = first_hit_counts(t);
  for (int m = t.min_label() - 1; m <= t.max_label() + 1; ++m) {
    if (m == 0) continue;
    const auto d = decompose(t, m);
    ASSERT_FALSE(admissibility_violation(d)) << encode(t) << " m=" << m;
    ASSERT_EQ(reconstruct(d), t) << encode(t) << " m=" << m;
    // Root component: leaves at level m, one per forest root, nothing else at m.
    long at_level = 0;
    for (Vertex v = 0; v < static_cast<Vertex>(d.root_component.vertex_count()); ++v)
      if (d.root_component.label(v) == m) {
        ++at_level;
        ASSERT_EQ(d.root_component.arity(v), 0);
      }
    ASSERT_EQ(at_level, static_cast<long>(d.forest.roots.size()));
    ASSERT_EQ(d.root_component, truncate(t, m));
    ASSERT_EQ(static_cast<long long>(d.forest.roots.size()), m > 0 ? hits.up[m] : hits.down[-m]);

    // Outward excursions (away from zero) carry the forest-root sign.
    const auto c = excursion_counts(d);
    const auto& outward = m > 0 ? c.plus : c.minus;
    const auto& inward = m > 0 ? c.minus : c.plus;
    const long long x_out = m > 0 ? prof.x_plus[m] : prof.check_minus[-m];
    const long long x_in = m > 0 ? prof.x_minus[m] : prof.check_plus[-m];
    long weighted_in = 0, weighted_out = 0;
    for (const auto& [k, n] : inward) weighted_in += static_cast<long>(n) * zeros_in(k);
    for (const auto& [k, n] : outward) weighted_out += static_cast<long>(n) * zeros_in(k);
    ASSERT_EQ(total(outward), x_out) << encode(t) << " m=" << m;
    ASSERT_EQ(total(inward), x_in) << encode(t) << " m=" << m;
    ASSERT_EQ(x_out, static_cast<long long>(d.forest.roots.size()) + weighted_in);
    ASSERT_EQ(x_in, weighted_out);

    // Mirror: level -m of the reflected tree gives the reflected excursions.
    const auto mirrored = excursion_counts(decompose(reflect_labels(t), -m));
    ASSERT_EQ(mirrored.plus.size(), c.minus.size());
    ASSERT_EQ(mirrored.minus.size(), c.plus.size());
    for (const auto& [k, n] : c.plus) ASSERT_EQ(mirrored.minus.at(encode(reflect_labels(decode(k)))), n);
    for (const auto& [k, n] : c.minus) ASSERT_EQ(mirrored.plus.at(encode(reflect_labels(decode(k)))), n);

    ASSERT_EQ(d.forest.root_sign, m > 0 ? Sign::plus : Sign::minus);
    for (const auto& v : d.forest.vertices) {
      const auto& e = v.decoration;
      ASSERT_EQ(e.tree.root_label(), e.sign == Sign::plus ? 1 : -1);
      ASSERT_EQ(e.sign, v.sign);
      if (v.parent < 0) ASSERT_EQ(v.sign, d.forest.root_sign);
      else ASSERT_EQ(v.sign, flip(d.forest.vertices[static_cast<std::size_t>(v.parent)].sign));
    }
  }
}

TEST(Excursion, RoundTripAndIdentitiesOnEnumeratedTrees) {
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    test::for_enumerated_trees(model, 5, [&](const LabelledPlaneTree& t, const Rational&) { check_decomposition(t); });
  }
}

TEST(Excursion, RoundTripAndIdentitiesOnSampledTrees) {
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    auto cfg = test::small_config();
    cfg.vertex_cap = 2000;
    test::for_sampled_trees(model, 1500, [&](const LabelledPlaneTree& t) { check_decomposition(t); }, cfg);
  }
}

TEST(Excursion, ExcursionValidity) {
  EXPECT_FALSE(excursion_violation(decode("1(-()+(+()))")));
  EXPECT_TRUE(excursion_violation(decode("1(-(+()))")));   // zero with a child
  EXPECT_TRUE(excursion_violation(decode("1(-(-()))")));   // label below zero
  EXPECT_TRUE(excursion_violation(decode("2()")));
  EXPECT_FALSE(excursion_violation(decode("-1(+())")));
  EXPECT_EQ(Excursion::make(decode("-1(+()0(+()))")).n, 2);
  EXPECT_EQ(Excursion::make(decode("-1(+()0(+()))")).sign, Sign::minus);
}

// Given (X_1^+, X_1^-) = (1, 0), the single positive excursion at level 1 has
// the law of one Pi^+ excursion conditioned on carrying no zero leaf.
TEST(Excursion, ConditionalExcursionLawAtLevelOne) {
  const auto model = builtin_model("incomplete-binary");
  const Rational nu0 = solve_nu_gf(model, 0)[0];
  ASSERT_EQ(nu0, Rational(2, 5));

  std::map<std::string, double> expected_prob;
  constexpr int max_edges = 4;
  for (int e = 0; e <= max_edges; ++e)
    for (const auto& [t, w] : enumerate_excursions(model, Sign::plus, e).items)
      if (std::ranges::count(t.labels(), 0) == 0) expected_prob[encode(t)] = to_double(w / nu0);

  std::map<std::string, long> seen;
  long hits = 0, overflow = 0;
  auto cfg = test::small_config();
  cfg.vertex_cap = 200'000;
  test::for_sampled_trees(model, 60'000, [&](const LabelledPlaneTree& t) {
    const auto p = edge_profile(t);
    if (p.x_plus[1] != 1 || p.x_minus[1] != 0) return;
    ++hits;
    const auto c = excursion_counts(decompose(t, 1));
    const auto& key = c.plus.begin()->first;
    if (expected_prob.contains(key)) ++seen[key];
    else ++overflow;
  }, cfg);
  ASSERT_GT(hits, 1000);

  std::vector<long> observed;
  std::vector<double> expected;
  double mass = 0;
  for (const auto& [key, prob] : expected_prob) {
    observed.push_back(seen[key]);
    expected.push_back(prob);
    mass += prob;
  }
  observed.push_back(overflow);
  expected.push_back(1 - mass);
  const auto r = chi_square(observed, expected);
  EXPECT_FALSE(r.skipped);
  EXPECT_GT(r.p_value, 1e-3) << "chi2=" << r.statistic << " dof=" << r.dof << " hits=" << hits;
}

}  // namespace
}  // namespace lgw
