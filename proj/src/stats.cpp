#include "lgw/stats.hpp"

#include "lgw/errors.hpp"
#include "lgw/kernel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lgw {

namespace {

double upper_tail(double statistic, int dof) {
  if (!std::isfinite(statistic)) return 0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

}  // namespace

ChiSquareResult chi_square(std::span<const long> observed, std::span<const double> expected) {
  if (observed.size() != expected.size()) fail(ErrorKind::domain, "observed and expected differ in length");
  const long n = std::accumulate(observed.begin(), observed.end(), 0L);
  if (n <= 0) fail(ErrorKind::domain, "chi-square on an empty observation");
  std::vector<std::pair<double, long>> cells;  // (expected count, observed)
  double mass = 0;
  ChiSquareResult res;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] < 0) fail(ErrorKind::domain, "negative expected probability");
    if (expected[i] == 0 && observed[i] > 0) {
      res.statistic = std::numeric_limits<double>::infinity();
      res.p_value = 0;
      res.dof = static_cast<int>(observed.size()) - 1;
      res.cells = observed.size();
      return res;
    }
    mass += expected[i];
    if (expected[i] > 0) cells.emplace_back(expected[i] * static_cast<double>(n), observed[i]);
  }
  if (mass < 1 - 1e-12) cells.emplace_back((1 - mass) * static_cast<double>(n), 0);

  // Pool every small cell; if the pool itself stays small, absorb the
  // smallest remaining cells until it reaches the threshold.
  std::sort(cells.begin(), cells.end());
  std::vector<std::pair<double, long>> pooled;
  double pool_e = 0;
  long pool_o = 0;
  std::size_t i = 0;
  for (; i < cells.size() && cells[i].first < pooling_threshold; ++i) {
    pool_e += cells[i].first;
    pool_o += cells[i].second;
  }
  for (; i < cells.size() && pool_e > 0 && pool_e < pooling_threshold; ++i) {
    pool_e += cells[i].first;
    pool_o += cells[i].second;
  }
  if (pool_e > 0) pooled.emplace_back(pool_e, pool_o);
  for (; i < cells.size(); ++i) pooled.push_back(cells[i]);

  res.cells = pooled.size();
  res.dof = static_cast<int>(pooled.size()) - 1;
  if (res.dof <= 0) {
    res.dof = 0;
    res.skipped = true;
    return res;
  }
  for (const auto& [e, o] : pooled) res.statistic += (static_cast<double>(o) - e) * (static_cast<double>(o) - e) / e;
  res.p_value = upper_tail(res.statistic, res.dof);
  return res;
}

ChiSquareResult chi_square_homogeneity(const std::vector<std::vector<long>>& input) {
  std::vector<std::vector<long>> rows;
  for (const auto& r : input)
    if (std::accumulate(r.begin(), r.end(), 0L) > 0) rows.push_back(r);
  ChiSquareResult res;
  if (rows.size() < 2) {
    res.skipped = true;
    return res;
  }
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) fail(ErrorKind::domain, "homogeneity rows differ in length");
  std::vector<long> row_tot, col_tot(cols, 0);
  long total = 0;
  for (const auto& r : rows) {
    row_tot.push_back(std::accumulate(r.begin(), r.end(), 0L));
    total += row_tot.back();
    for (std::size_t c = 0; c < cols; ++c) col_tot[c] += r[c];
  }
  const long min_row = *std::min_element(row_tot.begin(), row_tot.end());
  auto min_expected = [&](long col_total) {
    return static_cast<double>(min_row) * static_cast<double>(col_total) / static_cast<double>(total);
  };
  // Merge small columns (by total) into one pooled column.
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return col_tot[a] < col_tot[b]; });
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> pool;
  long pool_tot = 0;
  std::size_t k = 0;
  for (; k < cols && (min_expected(col_tot[order[k]]) < pooling_threshold || (pool_tot > 0 && min_expected(pool_tot) < pooling_threshold)); ++k) {
    if (col_tot[order[k]] == 0) continue;
    pool.push_back(order[k]);
    pool_tot += col_tot[order[k]];
  }
  if (!pool.empty()) groups.push_back(pool);
  for (; k < cols; ++k) groups.push_back({order[k]});

  res.cells = groups.size();
  if (groups.size() < 2) {
    res.skipped = true;
    return res;
  }
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& g : groups) {
      long obs = 0, ct = 0;
      for (std::size_t c : g) {
        obs += rows[r][c];
        ct += col_tot[c];
      }
      const double e = static_cast<double>(row_tot[r]) * static_cast<double>(ct) / static_cast<double>(total);
      res.statistic += (static_cast<double>(obs) - e) * (static_cast<double>(obs) - e) / e;
    }
  res.dof = static_cast<int>((rows.size() - 1) * (groups.size() - 1));
  res.p_value = upper_tail(res.statistic, res.dof);
  return res;
}

void TransitionCensus::add(PairState from, PairState to, long count) {
  if (count < 0) fail(ErrorKind::domain, "negative census count");
  rows_[from][to] += count;
}

void TransitionCensus::merge(const TransitionCensus& other) {
  for (const auto& [from, row] : other.rows_)
    for (const auto& [to, c] : row) rows_[from][to] += c;
}

long TransitionCensus::row_total(PairState from) const {
  auto it = rows_.find(from);
  if (it == rows_.end()) return 0;
  long t = 0;
  for (const auto& [to, c] : it->second) t += c;
  return t;
}

long TransitionCensus::total() const {
  long t = 0;
  for (const auto& [from, row] : rows_)
    for (const auto& [to, c] : row) t += c;
  return t;
}

void add_to_census(TransitionCensus& census, const VerticalEdgeProfile& p, int first, int last) {
  for (int m = first; m <= last; ++m) census.add({p.x_plus[m], p.x_minus[m]}, {p.x_plus[m + 1], p.x_minus[m + 1]});
}

TransitionCensus markov_census(std::span<const LabelledPlaneTree> trees, int first, int last) {
  TransitionCensus census;
  for (const auto& t : trees) add_to_census(census, edge_profile(t), first, last);
  return census;
}

void add_to_history_census(HistoryCensus& census, const VerticalEdgeProfile& p, int first, int last) {
  for (int m = std::max(first, 2); m <= last; ++m)
    census[{{p.x_plus[m - 1], p.x_minus[m - 1]}, {p.x_plus[m], p.x_minus[m]}}][{p.x_plus[m + 1], p.x_minus[m + 1]}] += 1;
}

HomogeneityReport history_homogeneity(const HistoryCensus& census, long min_visits, double alpha) {
  // Group rows by current state.
  std::map<PairState, std::vector<const std::map<PairState, long>*>> by_state;
  for (const auto& [key, row] : census) {
    long tot = 0;
    for (const auto& [to, c] : row) tot += c;
    if (tot >= min_visits) by_state[key.second].push_back(&row);
  }
  HomogeneityReport rep;
  std::vector<std::pair<PairState, ChiSquareResult>> results;
  for (const auto& [state, rows] : by_state) {
    if (rows.size() < 2) continue;
    std::map<PairState, std::size_t> col;
    for (const auto* r : rows)
      for (const auto& [to, c] : *r) col.emplace(to, col.size());
    std::vector<std::vector<long>> table(rows.size(), std::vector<long>(col.size(), 0));
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (const auto& [to, c] : *rows[i]) table[i][col[to]] = c;
    const auto res = chi_square_homogeneity(table);
    if (!res.skipped) results.emplace_back(state, res);
  }
  rep.rows_tested = results.size();
  rep.threshold = bonferroni_threshold(alpha, results.size());
  for (const auto& [state, res] : results) {
    rep.min_p = std::min(rep.min_p, res.p_value);
    if (res.p_value <= rep.threshold)
      rep.failures.push_back("state (" + std::to_string(state.first) + "," + std::to_string(state.second) +
                             "): p = " + std::to_string(res.p_value));
  }
  return rep;
}

std::string census_csv(const TransitionCensus& census) {
  std::ostringstream out;
  out << "from_plus,from_minus,to_plus,to_minus,count\n";
  for (const auto& [from, row] : census.rows())
    for (const auto& [to, c] : row)
      out << from.first << ',' << from.second << ',' << to.first << ',' << to.second << ',' << c << '\n';
  return out.str();
}

ChiSquareResult kernel_row_test(const FTable& f, PairState from, const std::map<PairState, long>& successors,
                                int s_cap) {
  const KernelRow row = kernel_row(f, {static_cast<int>(from.first), static_cast<int>(from.second)}, s_cap);
  std::map<PairState, std::size_t> cell_of;
  std::vector<long> observed;
  std::vector<double> expected;
  for (const auto& c : row.cells) {
    cell_of[{c.to.p, c.to.q}] = observed.size();
    observed.push_back(0);
    expected.push_back(to_double(c.prob));
  }
  const std::size_t overflow = observed.size();
  observed.push_back(0);
  expected.push_back(to_double(1 - row.mass));
  long stray = 0;  // successors the kernel cannot produce
  for (const auto& [to, count] : successors) {
    if (to.second > s_cap) observed[overflow] += count;
    else if (auto it = cell_of.find(to); it != cell_of.end()) observed[it->second] += count;
    else stray += count;
  }
  if (stray > 0) {
    observed.push_back(stray);
    expected.push_back(0);
  }
  return chi_square(observed, expected);
}

}  // namespace lgw
