#include "helpers.hpp"

#include "lgw/genfun.hpp"
#include "lgw/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace lgw {
namespace {

TEST(Stats, ChiSquareExamples) {
  const std::vector<long> obs{25, 25, 25, 25};
  const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  const auto r = chi_square(obs, uniform);
  EXPECT_DOUBLE_EQ(r.statistic, 0);
  EXPECT_DOUBLE_EQ(r.p_value, 1);
  EXPECT_EQ(r.dof, 3);

  const std::vector<long> prop{10, 30, 60};
  const std::vector<double> e{0.1, 0.3, 0.6};
  EXPECT_NEAR(chi_square(prop, e).statistic, 0, 1e-12);

  const std::vector<long> one{40};
  const std::vector<double> certain{1.0};
  const auto single = chi_square(one, certain);
  EXPECT_TRUE(single.skipped);
  EXPECT_EQ(single.dof, 0);
}

TEST(Stats, ChiSquareKnownValue) {
  // (60-50)^2/50 + (40-50)^2/50 = 4 with one degree of freedom.
  const std::vector<long> obs{60, 40};
  const std::vector<double> e{0.5, 0.5};
  const auto r = chi_square(obs, e);
  EXPECT_NEAR(r.statistic, 4.0, 1e-12);
  EXPECT_NEAR(r.p_value, 0.0455002638963584, 1e-9);
}

TEST(Stats, ChiSquareErrorsAndImpossibleCells) {
  const std::vector<long> none{0, 0};
  const std::vector<double> half{0.5, 0.5};
  EXPECT_EQ(test::kind_of([&] { chi_square(none, half); }), ErrorKind::domain);
  const std::vector<long> three{1, 2, 3};
  EXPECT_EQ(test::kind_of([&] { chi_square(three, half); }), ErrorKind::domain);
  const std::vector<long> stray{50, 50, 1};
  const std::vector<double> zero_cell{0.5, 0.5, 0.0};
  const auto r = chi_square(stray, zero_cell);
  EXPECT_TRUE(std::isinf(r.statistic));
  EXPECT_EQ(r.p_value, 0);
}

TEST(Stats, SmallCellsArePooled) {
  // Expected counts 2, 2, 2 pool into one cell of 6; 94 stays alone.
  const std::vector<long> obs{1, 0, 2, 97};
  const std::vector<double> e{0.02, 0.02, 0.02, 0.94};
  const auto r = chi_square(obs, e);
  EXPECT_EQ(r.cells, 2u);
  EXPECT_EQ(r.dof, 1);
  // A pool still below five absorbs the next smallest cell.
  const std::vector<double> tiny{0.01, 0.01, 0.01, 0.97};
  EXPECT_TRUE(chi_square(obs, tiny).skipped);
  // Missing expected mass becomes its own (unobserved) cell.
  const std::vector<long> two{50, 50};
  const std::vector<double> partial{0.45, 0.45};
  EXPECT_EQ(chi_square(two, partial).cells, 3u);
}

TEST(Stats, HomogeneityExamples) {
  const auto same = chi_square_homogeneity({{10, 20, 30}, {20, 40, 60}});
  EXPECT_NEAR(same.statistic, 0, 1e-12);
  EXPECT_NEAR(same.p_value, 1, 1e-12);
  const auto apart = chi_square_homogeneity({{100, 0}, {0, 100}});
  EXPECT_LT(apart.p_value, 1e-10);
  EXPECT_TRUE(chi_square_homogeneity({{5, 5}}).skipped);
  EXPECT_EQ(test::kind_of([] { chi_square_homogeneity({{1, 2}, {1, 2, 3}}); }), ErrorKind::domain);
}

TEST(Stats, Bonferroni) {
  EXPECT_DOUBLE_EQ(bonferroni_threshold(1e-3, 10), 1e-4);
  EXPECT_DOUBLE_EQ(bonferroni_threshold(1e-3, 0), 1e-3);
}

TEST(Stats, CensusBookkeeping) {
  TransitionCensus c;
  c.add({1, 0}, {0, 0});
  c.add({1, 0}, {1, 1}, 3);
  c.add({2, 1}, {1, 0});
  EXPECT_EQ(c.row_total({1, 0}), 4);
  EXPECT_EQ(c.row_total({5, 5}), 0);
  EXPECT_EQ(c.total(), 5);
  EXPECT_EQ(census_csv(c),
            "from_plus,from_minus,to_plus,to_minus,count\n"
            "1,0,0,0,1\n1,0,1,1,3\n2,1,1,0,1\n");
}

TEST(Stats, CensusMergeIsOrderFree) {
  std::vector<LabelledPlaneTree> trees;
  test::for_sampled_trees(builtin_model("incomplete-binary"), 900, [&](const LabelledPlaneTree& t) { trees.push_back(t); });
  const std::span<const LabelledPlaneTree> all(trees);
  const auto whole = markov_census(all, 1, 30);
  const auto a = markov_census(all.subspan(0, 300), 1, 30);
  const auto b = markov_census(all.subspan(300, 300), 1, 30);
  const auto c = markov_census(all.subspan(600), 1, 30);
  TransitionCensus ab_c = a, c_ba = c;
  ab_c.merge(b);
  ab_c.merge(c);
  TransitionCensus ba = b;
  ba.merge(a);
  c_ba.merge(ba);
  EXPECT_EQ(ab_c, whole);
  EXPECT_EQ(c_ba, whole);
  EXPECT_EQ(whole.total(), 900L * 30);
  // (0,0) only ever moves to (0,0).
  for (const auto& [to, n] : whole.rows().at({0, 0})) EXPECT_EQ(to, (PairState{0, 0}));
}

TEST(Stats, RowOneZeroMatchesKernel) {
  const ModelSampler sampler(builtin_model("incomplete-binary"));
  auto cfg = test::small_config();
  cfg.vertex_cap = 100'000;
  TransitionCensus census;
  long kept = 0;
  for (std::uint64_t stream = 0; kept < 20'000; ++stream) {
    Rng rng(cfg.seed, stream);
    try {
      const auto p = sample_profile(sampler, rng, cfg);
      add_to_census(census, p, 1, 1);
      ++kept;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
    }
  }
  const FTable f(solve_nu_gf(builtin_model("incomplete-binary"), default_row_s_cap), 2 + default_row_s_cap, default_row_s_cap);
  const auto& row = census.rows().at({1, 0});
  const auto r = kernel_row_test(f, {1, 0}, row);
  EXPECT_GT(r.p_value, 1e-3) << r.statistic;
  // A neighbouring row's kernel is rejected.
  EXPECT_LT(kernel_row_test(f, {2, 0}, row).p_value, 1e-3);
}

TEST(Stats, HistoryHomogeneityDetectsMemory) {
  HistoryCensus memoryless, memory;
  for (PairState prev : {PairState{1, 0}, PairState{2, 1}}) {
    memoryless[{prev, {1, 0}}] = {{{0, 0}, 600}, {{1, 0}, 400}};
    memory[{prev, {1, 0}}] = prev.first == 1 ? std::map<PairState, long>{{{0, 0}, 900}, {{1, 0}, 100}}
                                             : std::map<PairState, long>{{{0, 0}, 100}, {{1, 0}, 900}};
  }
  const auto ok = history_homogeneity(memoryless, 500, 1e-3);
  EXPECT_TRUE(ok.ok());
  EXPECT_EQ(ok.rows_tested, 1u);
  const auto bad = history_homogeneity(memory, 500, 1e-3);
  EXPECT_FALSE(bad.ok());
  // Rows below the visit threshold are not tested.
  EXPECT_EQ(history_homogeneity(memory, 5000, 1e-3).rows_tested, 0u);
}

}  // namespace
}  // namespace lgw
