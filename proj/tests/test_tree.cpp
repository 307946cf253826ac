#include "helpers.hpp"

#include <gtest/gtest.h>

namespace lgw {
namespace {

LabelledPlaneTree path(std::vector<int> labels) {
  std::vector<Vertex> parents{no_vertex};
  for (Vertex v = 1; v < static_cast<Vertex>(labels.size()); ++v) parents.push_back(v - 1);
  return LabelledPlaneTree::from_preorder(std::move(labels), std::move(parents));
}

TEST(Tree, ValidateExamples) {
  EXPECT_TRUE(validate(LabelledPlaneTree::single(7)).ok);
  EXPECT_TRUE(validate(path({0, 1, 0})).ok);
  const auto jump = validate(LabelledPlaneTree::from_preorder({0, 1, 3}, {no_vertex, 0, 1}));
  EXPECT_FALSE(jump.ok);
  EXPECT_EQ(jump.vertex, 2);
  EXPECT_FALSE(jump.message.empty());
}

TEST(Tree, StructureAccessors) {
  const auto t = decode("0(+(-()+())-())");
  ASSERT_EQ(t.vertex_count(), 5u);
  EXPECT_EQ(t.edge_count(), 4u);
  EXPECT_EQ(t.arity(0), 2);
  EXPECT_EQ(t.arity(1), 2);
  EXPECT_EQ(t.label(3), 2);
  EXPECT_EQ(t.parent(4), 0);
  EXPECT_EQ(t.increment(4), -1);
  EXPECT_EQ(t.min_label(), -1);
  EXPECT_EQ(t.max_label(), 2);
}

TEST(Tree, PreorderViolationIsDomainError) {
  EXPECT_EQ(test::kind_of([] { LabelledPlaneTree::from_preorder({0, 0}, {0, 0}); }), ErrorKind::domain);
  EXPECT_EQ(test::kind_of([] { LabelledPlaneTree::from_preorder({0, 1, 1}, {no_vertex, 2, 0}); }), ErrorKind::domain);
}

TEST(Tree, TruncateExamples) {
  const auto t = path({0, 1, 2});
  EXPECT_EQ(truncate(t, 5), t);
  EXPECT_EQ(truncate(t, 1), path({0, 1}));
  EXPECT_EQ(truncate(LabelledPlaneTree::single(3), 3), LabelledPlaneTree::single(3));
  // Root labelled l: everything below is cut.
  EXPECT_EQ(encode(truncate(decode("0(+()-())"), 0)), "0()");
}

TEST(Tree, TruncateIsIdempotentAndKeepsNoDescendantOfLevel) {
  test::for_enumerated_trees(builtin_model("geom-pm01"), 5, [](const LabelledPlaneTree& t, const Rational&) {
    for (int l = t.min_label(); l <= t.max_label(); ++l) {
      const auto once = truncate(t, l);
      ASSERT_EQ(truncate(once, l), once);
      for (Vertex v = 1; v < static_cast<Vertex>(once.vertex_count()); ++v)
        for (Vertex a = once.parent(v); a != no_vertex; a = once.parent(a)) ASSERT_NE(once.label(a), l);
    }
  });
}

TEST(Tree, EdgeProfileExamples) {
  const auto p = edge_profile(path({0, 1, 2}));
  EXPECT_EQ(p.x_plus[1], 1);
  EXPECT_EQ(p.x_plus[2], 1);
  for (int m = 1; m <= 3; ++m) EXPECT_EQ(p.x_minus[m], 0);
  EXPECT_EQ(p.mass(1), 0);
  EXPECT_EQ(p.mass(2), 1);

  const auto q = edge_profile(decode("0(-())"));
  EXPECT_EQ(q.check_minus[1], 1);
  EXPECT_EQ(q.check_plus[1], 0);
  EXPECT_EQ(q.x_plus[1], 0);
  EXPECT_EQ(q.x_minus[1], 0);
  EXPECT_EQ(q.flat_edges, 0);

  const auto s = edge_profile(LabelledPlaneTree::single(0));
  EXPECT_EQ(s.vertical[0], 1);
  EXPECT_EQ(s.x_plus[1], 0);
  EXPECT_EQ(s.edges, 0);
  EXPECT_EQ(test::kind_of([] { edge_profile(LabelledPlaneTree::single(1)); }), ErrorKind::domain);
}

void check_profile_identities(const TreeModel& model, const LabelledPlaneTree& t) {
  const auto p = edge_profile(t);
  long long total = p.flat_edges;
  for (int m = 1; m <= std::max(p.max_label, -p.min_label) + 1; ++m)
    total += p.x_plus[m] + p.x_minus[m] + p.check_plus[m] + p.check_minus[m];
  ASSERT_EQ(total, static_cast<long long>(t.edge_count())) << encode(t);
  for (int m = p.max_label + 1; m <= p.max_label + 3; ++m) ASSERT_EQ(p.x_plus[m], 0);
  if (model.pm1_only)
    for (int k = 1; k <= p.max_label + 1; ++k) ASSERT_EQ(p.vertical[k], p.x_plus[k] + p.x_minus[k + 1]) << encode(t) << " k=" << k;
  if (model.name == "incomplete-binary")
    for (int m = 1; m <= p.max_label + 1; ++m) ASSERT_EQ(p.mass(m + 1), p.mass(m) + p.x_plus[m] + p.x_minus[m]) << encode(t);
  // Direct count of M_m^-: non-root vertices with both endpoints at most m-1.
  for (int m = 1; m <= p.max_label + 2; ++m) {
    long long direct = 0;
    for (Vertex v = 1; v < static_cast<Vertex>(t.vertex_count()); ++v)
      direct += t.label(v) <= m - 1 && t.label(t.parent(v)) <= m - 1;
    ASSERT_EQ(p.mass(m), direct) << encode(t) << " m=" << m;
  }
}

TEST(Tree, ProfileIdentitiesOnEnumeratedTrees) {
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    test::for_enumerated_trees(model, 6, [&](const LabelledPlaneTree& t, const Rational&) { check_profile_identities(model, t); });
  }
}

TEST(Tree, ProfileIdentitiesOnSampledTrees) {
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    test::for_sampled_trees(model, 2000, [&](const LabelledPlaneTree& t) { check_profile_identities(model, t); });
  }
}

TEST(Tree, EdgeTallyMatchesProfile) {
  test::for_sampled_trees(builtin_model("geom-pm01"), 500, [](const LabelledPlaneTree& t) {
    EdgeTally tally;
    for (Vertex v = 1; v < static_cast<Vertex>(t.vertex_count()); ++v) tally.add(t.label(t.parent(v)), t.label(v));
    const auto a = tally.profile();
    const auto b = edge_profile(t);
    ASSERT_EQ(tally.edges(), static_cast<long long>(t.edge_count()));
    ASSERT_EQ(a.x_plus, b.x_plus);
    ASSERT_EQ(a.x_minus, b.x_minus);
    ASSERT_EQ(a.check_plus, b.check_plus);
    ASSERT_EQ(a.check_minus, b.check_minus);
    ASSERT_EQ(a.mass_below, b.mass_below);
    ASSERT_EQ(a.flat_edges, b.flat_edges);
  });
}

TEST(Tree, EncodeExamples) {
  EXPECT_EQ(encode(LabelledPlaneTree::single(0)), "0()");
  EXPECT_EQ(encode(path({0, 1, 0})), "0(+(-()))");
  EXPECT_EQ(encode(LabelledPlaneTree::single(-12)), "-12()");
  EXPECT_EQ(decode("-12()").root_label(), -12);
}

TEST(Tree, DecodeErrorsCarryOffsets) {
  for (const char* bad : {"0(+()", "0(+())x", "", "(", "0(*())", "0 ()", "x()", "0(+(-())"}) {
    try {
      decode(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const ParseError& e) {
      EXPECT_LE(e.offset(), std::string_view(bad).size()) << bad;
    }
  }
}

TEST(Tree, EncodingRoundTripIsCanonical) {
  test::for_enumerated_trees(builtin_model("geom-pm01"), 5, [](const LabelledPlaneTree& t, const Rational&) {
    const auto text = encode(t);
    ASSERT_EQ(decode(text), t);
    ASSERT_EQ(encode(decode(text)), text);
  });
}

TEST(Tree, ShiftAndReflect) {
  const auto t = decode("0(+(+()0())-())");
  EXPECT_EQ(encode(shift_labels(t, 3)), "3(+(+()0())-())");
  EXPECT_EQ(encode(reflect_labels(t)), "0(-(-()0())+())");
  EXPECT_EQ(reflect_labels(reflect_labels(t)), t);
}

}  // namespace
}  // namespace lgw
