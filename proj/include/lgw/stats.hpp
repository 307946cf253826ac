#pragma once

#include "lgw/genfun.hpp"
#include "lgw/tree.hpp"

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lgw {

inline constexpr double pooling_threshold = 5.0;

struct ChiSquareResult {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  bool skipped = false;  // fewer than two cells after pooling
  std::size_t cells = 0;
};

// Pearson goodness of fit. Cells whose expected count is below 5 are pooled;
// missing probability mass (sum < 1) becomes one extra cell with zero count.
// An observation on a zero-probability cell gives statistic inf and p = 0.
ChiSquareResult chi_square(std::span<const long> observed, std::span<const double> expected);

// Homogeneity of several count vectors over a common set of columns.
ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<long>>& rows);

inline double bonferroni_threshold(double alpha, std::size_t tests) {
  return tests == 0 ? alpha : alpha / static_cast<double>(tests);
}

using PairState = std::pair<long, long>;

class TransitionCensus {
 public:
  void add(PairState from, PairState to, long count = 1);
  void merge(const TransitionCensus& other);
  const std::map<PairState, std::map<PairState, long>>& rows() const noexcept { return rows_; }
  long row_total(PairState from) const;
  long total() const;
  friend bool operator==(const TransitionCensus&, const TransitionCensus&) = default;

 private:
  std::map<PairState, std::map<PairState, long>> rows_;
};

// Transitions (X_m^+, X_m^-) -> (X_{m+1}^+, X_{m+1}^-) pooled over m in [first, last].
TransitionCensus markov_census(std::span<const LabelledPlaneTree> trees, int first, int last);
void add_to_census(TransitionCensus& census, const VerticalEdgeProfile& profile, int first, int last);

// Same transitions split by the previous state: key (previous, current).
using HistoryCensus = std::map<std::pair<PairState, PairState>, std::map<PairState, long>>;
void add_to_history_census(HistoryCensus& census, const VerticalEdgeProfile& profile, int first, int last);

struct HomogeneityReport {
  std::size_t rows_tested = 0;
  double min_p = 1;
  double threshold = 0;
  std::vector<std::string> failures;
  bool ok() const noexcept { return failures.empty(); }
};

// For every current state, compares its successor histograms across
// previous states (each with at least min_visits), Bonferroni corrected.
HomogeneityReport history_homogeneity(const HistoryCensus& census, long min_visits, double alpha);

// Successor counts of `from` against the binary kernel row. Successors with
// s > s_cap share one overflow cell carrying the row's remaining mass, so f
// only needs to cover p + s_cap and q up to max(s_cap, from q).
inline constexpr int default_row_s_cap = 40;
ChiSquareResult kernel_row_test(const FTable& f, PairState from, const std::map<PairState, long>& successors,
                                int s_cap = default_row_s_cap);

// Columns: from_plus,from_minus,to_plus,to_minus,count
std::string census_csv(const TransitionCensus& census);

}  // namespace lgw
