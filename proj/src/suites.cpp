#include "lgw/suites.hpp"

#include "lgw/errors.hpp"
#include "lgw/excursion.hpp"
#include "lgw/genfun.hpp"
#include "lgw/kernel.hpp"
#include "lgw/maps.hpp"
#include "lgw/oracle.hpp"
#include "lgw/sampler.hpp"
#include "lgw/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>

namespace lgw {

namespace {

constexpr std::size_t kept_failures = 10;

std::string fmt(double x, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<std::vector<int>> weak_compositions(int total, int parts) {
  std::vector<std::vector<int>> out;
  if (parts == 0) {
    if (total == 0) out.emplace_back();
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == parts - 1) {
      cur[static_cast<std::size_t>(i)] = left;
      out.push_back(cur);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      cur[static_cast<std::size_t>(i)] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, total);
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

// Splits [0, count) into fixed blocks so that merged results do not depend
// on the number of workers.
template <class Partial, class Fill>
std::vector<Partial> blocks(long count, unsigned workers, Fill&& fill) {
  constexpr long block = 1000;
  const long nblocks = (count + block - 1) / block;
  std::vector<Partial> out(static_cast<std::size_t>(nblocks));
  parallel_for(static_cast<std::size_t>(nblocks), workers, [&](std::size_t b) {
    const long lo = static_cast<long>(b) * block;
    fill(lo, std::min(count, lo + block), out[b]);
  });
  return out;
}

}  // namespace

void SuiteReport::fail_with(std::string what) {
  passed = false;
  if (failures.size() < kept_failures) failures.push_back(std::move(what));
}

SuiteReport genfun_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "genfun"};
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    const auto solved = solve_nu_gf(model, opt.series_order);
    const auto closed = closed_form_series(model, opt.series_order);
    ++rep.checks;
    if (opt.mutate) {
      // Perturbs one coefficient of the solver output.
      auto bad = solved;
      bad[opt.series_order] += Rational(1, 1000000);
      if (bad != closed) rep.fail_with(id + ": perturbed series differs from the closed form");
    } else if (solved != closed) {
      for (int k = 0; k <= opt.series_order; ++k)
        if (solved[k] != closed[k]) {
          rep.fail_with(id + ": coefficient " + std::to_string(k) + " solver " + to_string(solved[k]) + " closed form " +
                        to_string(closed[k]));
          break;
        }
    }
    rep.notes.push_back(id + " nu(0) = " + to_string(solved[0]) + ", nu(1) = " + to_string(solved[1]));
  }
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport counting_lemma_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "counting-lemma"};
  for (int p = 1; p <= opt.max_pq; ++p)
    for (int q = 0; p + q <= opt.max_pq; ++q)
      for (int n = 1; n <= p; ++n) {
        if (q == 0 && n != p) continue;
        const auto minus_choices = weak_compositions(p - n, q);
        for (const auto& n_plus : weak_compositions(q, p))
          for (const auto& n_minus : minus_choices) {
            ++rep.checks;
            const Integer count = enumerate_bicoloured_forests(n, n_plus, n_minus);
            Integer formula = counting_lemma_formula(n, p, q);
            if (opt.mutate) formula *= p;  // q! p! n instead of q! (p-1)! n
            if (count != formula)
              rep.fail_with("n=" + std::to_string(n) + " n+=" + join(n_plus) + " n-=" + join(n_minus) + ": count " +
                            count.get_str() + " formula " + formula.get_str());
          }
      }
  rep.notes.push_back(std::to_string(rep.checks) + " admissible tuples with p+q <= " + std::to_string(opt.max_pq));
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport marked_forest_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "marked-forest"};
  const int top = opt.max_p + opt.max_s;
  const auto nu = solve_nu_gf(builtin_model("incomplete-binary"), top);
  const FTable f(nu, top, top);
  long kernel_checks = 0, kemperman_checks = 0;
  for (int p = 1; p <= opt.max_p; ++p)
    for (int s = 0; s <= opt.max_s; ++s) {
      const auto law = enumerate_marked_forests(nu, p, s);
      for (int q = 0; q <= p + s; ++q)
        for (int r = 0; r <= p + s; ++r) {
          ++rep.checks;
          auto it = law.find({q, r});
          const Rational exact = it == law.end() ? Rational(0) : it->second;
          Rational formula = marked_forest_formula(f, p, s, q, r);
          if (opt.mutate) formula *= ratio(p + s, p);  // drops the p/(p+s) factor
          if (exact != formula)
            rep.fail_with("p=" + std::to_string(p) + " s=" + std::to_string(s) + " q=" + std::to_string(q) +
                          " r=" + std::to_string(r) + ": exhaustive " + to_string(exact) + " formula " + to_string(formula));
          if (!opt.mutate && f(p, q) != 0) {
            ++kernel_checks;
            const Rational k = transition_prob(f, {p, q}, {r, s});
            if (exact / f(p, q) != k)
              rep.fail_with("kernel mismatch from (" + std::to_string(p) + "," + std::to_string(q) + ") to (" +
                            std::to_string(r) + "," + std::to_string(s) + ")");
          }
        }
      ++kemperman_checks;
      const auto [hit, scaled] = kemperman_check(nu, p, s);
      if (hit != scaled)
        rep.fail_with("Kemperman identity fails at p=" + std::to_string(p) + " s=" + std::to_string(s) + ": " +
                      to_string(hit) + " vs " + to_string(scaled));
    }
  rep.checks += kernel_checks + kemperman_checks;
  rep.notes.push_back(std::to_string(kernel_checks) + " kernel cells and " + std::to_string(kemperman_checks) +
                      " first-passage identities checked");
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport conditioned_kernel_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "conditioned-kernel"};
  const auto model = builtin_model("incomplete-binary");
  for (int V = opt.min_v; V <= opt.max_v; ++V) {
    const auto law = exact_chain_law(V);
    const auto ft = joint_table(model, V + 1, V + 1, V);
    const FTable f(solve_nu_gf(model, V + 2), V + 2, V + 2);
    CondKernel kernel = [&ft, V](CondState a, CondState b) { return cond_transition_prob(ft, V, a, b); };
    if (opt.mutate)
      kernel = [&ft, V](CondState a, CondState b) { return cond_transition_prob(ft, V, a, {b.p, b.q, b.v - 1}); };
    const auto report = verify_markov_exact(law, kernel);
    rep.checks += static_cast<long>(report.histories + report.transitions);
    for (const auto& d : report.discrepancies) rep.fail_with("V=" + std::to_string(V) + ": " + d);
    // Doob transform: conditioned kernel = H(to)/H(from) * free kernel.
    std::set<std::pair<CondState, CondState>> seen;
    for (const auto& [path, w] : law.paths)
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const auto a = path[i], b = path[i + 1];
        if (a.p == 0 || !seen.insert({a, b}).second) continue;
        ++rep.checks;
        const Rational ha = harmonic_H(f, ft, V, a);
        const Rational hb = b.p == 0 ? Rational(1) : harmonic_H(f, ft, V, b);
        const Rational doob = hb / ha * transition_prob(f, {a.p, a.q}, {b.p, b.q});
        if (!opt.mutate && doob != cond_transition_prob(ft, V, a, b))
          rep.fail_with("V=" + std::to_string(V) + ": h-transform identity fails");
      }
    rep.notes.push_back("V=" + std::to_string(V) + ": " + std::to_string(law.paths.size()) + " distinct state paths, " +
                        std::to_string(report.transitions) + " transitions");
  }
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport kernel_mc_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "kernel-mc"};
  const ModelSampler sampler(builtin_model("incomplete-binary"));
  struct Partial {
    TransitionCensus census;
    HistoryCensus history;
    long discarded = 0;
  };
  auto parts = blocks<Partial>(opt.trees, opt.workers, [&](long lo, long hi, Partial& out) {
    for (long i = lo; i < hi; ++i) {
      Rng rng(opt.sampler.seed, static_cast<std::uint64_t>(i));
      try {
        const auto prof = sample_profile(sampler, rng, opt.sampler);
        add_to_census(out.census, prof, 1, prof.max_label);
        add_to_history_census(out.history, prof, 1, prof.max_label);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resource) throw;
        ++out.discarded;
      }
    }
  });
  TransitionCensus census;
  HistoryCensus history;
  long discarded = 0;
  for (auto& part : parts) {
    census.merge(part.census);
    for (const auto& [key, row] : part.history)
      for (const auto& [to, c] : row) history[key][to] += c;
    discarded += part.discarded;
  }
  rep.notes.push_back(std::to_string(discarded) + " trees over the vertex cap discarded");

  // Rows with enough visits; the table must cover p + s_cap and their q.
  const int s_cap = default_row_s_cap;
  int P = 1, Q = s_cap;
  std::vector<PairState> tested;
  for (const auto& [from, row] : census.rows()) {
    if (from.first == 0 || census.row_total(from) < opt.min_visits) continue;
    tested.push_back(from);
    P = std::max<int>(P, static_cast<int>(from.first));
    Q = std::max<int>(Q, static_cast<int>(from.second));
  }
  // The mutation tests each row against the kernel of the neighbouring state.
  const int shift = opt.mutate ? 1 : 0;
  const FTable f(solve_nu_gf(builtin_model("incomplete-binary"), Q), P + shift + s_cap, Q);
  double min_p = 1;
  for (const auto& from : tested) {
    ++rep.checks;
    const auto res = kernel_row_test(f, {from.first + shift, from.second}, census.rows().at(from), s_cap);
    min_p = std::min(min_p, res.p_value);
    if (!res.skipped && res.p_value <= opt.alpha)
      rep.fail_with("row (" + std::to_string(from.first) + "," + std::to_string(from.second) + "): chi2 " +
                    fmt(res.statistic) + " dof " + std::to_string(res.dof) + " p " + fmt(res.p_value));
  }
  rep.notes.push_back(std::to_string(tested.size()) + " rows with >= " + std::to_string(opt.min_visits) +
                      " visits, smallest p-value " + fmt(min_p));

  ++rep.checks;
  const long visits = census.row_total({1, 0});
  const auto& row10 = census.rows().count({1, 0}) ? census.rows().at({1, 0}) : std::map<PairState, long>{};
  const long to_zero = row10.count({0, 0}) ? row10.at({0, 0}) : 0;
  const double freq = visits ? static_cast<double>(to_zero) / static_cast<double>(visits) : 0;
  rep.notes.push_back("(1,0)->(0,0) frequency " + fmt(freq) + " over " + std::to_string(visits) + " visits");
  if (std::abs(freq - 0.625) > 0.01) rep.fail_with("(1,0)->(0,0) frequency " + fmt(freq) + " outside 0.625 +- 0.01");

  const auto homog = history_homogeneity(history, opt.min_visits, opt.alpha);
  rep.checks += static_cast<long>(homog.rows_tested);
  rep.notes.push_back("history homogeneity: " + std::to_string(homog.rows_tested) + " states, smallest p " +
                      fmt(homog.min_p) + ", Bonferroni threshold " + fmt(homog.threshold));
  for (const auto& fl : homog.failures) rep.fail_with("history dependence at " + fl);
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport round_trip_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "round-trip"};
  auto check = [&](const LabelledPlaneTree& t, const std::string& model) {
    const int lo = t.min_label() - 1, hi = t.max_label() + 1;
    for (int m = lo; m <= hi; ++m) {
      if (m == 0) continue;
      ++rep.checks;
      const auto d = decompose(t, m);
      if (auto why = admissibility_violation(d)) {
        rep.fail_with(model + " " + encode(t) + " m=" + std::to_string(m) + ": " + *why);
        continue;
      }
      auto input = d;
      if (opt.mutate) input.level += input.level > 0 ? 1 : -1;  // rebuilds at the wrong level
      try {
        if (reconstruct(input) != t)
          rep.fail_with(model + " " + encode(t) + " m=" + std::to_string(m) + ": reconstruction differs");
      } catch (const Error& e) {
        rep.fail_with(model + " " + encode(t) + " m=" + std::to_string(m) + ": " + e.what());
      }
    }
  };
  // Same reasoning as for maps: checks are per tree, so huge draws are replaced.
  SamplerConfig cfg = opt.sampler;
  cfg.vertex_cap = std::min<std::uint64_t>(cfg.vertex_cap, opt.check_vertex_cap);
  long discarded = 0;
  for (const auto& id : builtin_ids()) {
    const auto model = builtin_model(id);
    long trees = 0;
    for (int e = 0; e <= opt.max_edges; ++e)
      for (const auto& [t, w] : enumerate_trees(model, e).items) {
        check(t, id);
        ++trees;
      }
    const ModelSampler sampler(model);
    for (std::uint64_t stream = 0, accepted = 0; accepted < static_cast<std::uint64_t>(opt.samples); ++stream) {
      Rng rng(cfg.seed, stream);
      try {
        check(sample_tree(sampler, 0, rng, cfg), id);
        ++accepted;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resource) throw;
        ++discarded;
      }
    }
    rep.notes.push_back(id + ": " + std::to_string(trees) + " enumerated trees and " + std::to_string(opt.samples) + " samples");
  }
  rep.notes.push_back(std::to_string(discarded) + " draws above " + std::to_string(cfg.vertex_cap) + " vertices replaced");
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport forest_law_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "forest-law"};
  constexpr int bins = 40;  // children counts 0..bins-1 plus one overflow bin
  const auto model = builtin_model("geom-pm1");
  const ModelSampler sampler(model);
  struct Partial {
    std::vector<long> even = std::vector<long>(bins + 1, 0);
    std::vector<long> odd = std::vector<long>(bins + 1, 0);
    long discarded = 0;
  };
  auto parts = blocks<Partial>(opt.trees, opt.workers, [&](long lo, long hi, Partial& out) {
    for (long i = lo; i < hi; ++i) {
      Rng rng(opt.sampler.seed, static_cast<std::uint64_t>(i));
      try {
        const auto shape = sample_forest_shape(sampler, 1, rng, opt.sampler);
        for (std::size_t v = 0; v < shape.height.size(); ++v) {
          auto& hist = shape.height[v] % 2 == 0 ? out.even : out.odd;
          ++hist[static_cast<std::size_t>(std::min<long>(shape.children[v], bins))];
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resource) throw;
        ++out.discarded;
      }
    }
  });
  std::vector<long> even(bins + 1, 0), odd(bins + 1, 0);
  long discarded = 0;
  for (const auto& part : parts) {
    for (int k = 0; k <= bins; ++k) {
      even[static_cast<std::size_t>(k)] += part.even[static_cast<std::size_t>(k)];
      odd[static_cast<std::size_t>(k)] += part.odd[static_cast<std::size_t>(k)];
    }
    discarded += part.discarded;
  }
  const auto nu = solve_nu_gf(model, bins - 1);
  std::vector<double> expected;
  Rational mass = 0;
  for (int k = 0; k < bins; ++k) {
    expected.push_back(to_double(nu[k]));
    mass += nu[k];
  }
  expected.push_back(to_double(1 - mass));
  if (opt.mutate) std::swap(expected[0], expected[1]);
  for (const auto& [name, hist] : {std::pair{"even", &even}, std::pair{"odd", &odd}}) {
    ++rep.checks;
    const auto res = chi_square(*hist, expected);
    rep.notes.push_back(std::string(name) + " heights: chi2 " + fmt(res.statistic) + " dof " + std::to_string(res.dof) +
                        " p " + fmt(res.p_value));
    if (res.skipped || res.p_value <= opt.alpha) rep.fail_with(std::string(name) + " heights: p " + fmt(res.p_value));
  }
  rep.notes.push_back(std::to_string(discarded) + " trees over the vertex cap discarded");
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport schaeffer_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "schaeffer"};
  const int shift = opt.mutate ? 1 : 0;
  long control_hits = 0, maps = 0;
  auto check_map = [&](const Quadrangulation& q, const LabelledPlaneTree& t, int o, bool control) {
    rep.checks += 2;
    const auto back = map_to_tree(q);
    if (!(back.tree == t) || back.orientation != o)
      rep.fail_with("round trip fails for " + encode(t) + " orientation " + std::to_string(o));
    if (q.face_count() != t.edge_count()) rep.fail_with("face count differs from edge count for " + encode(t));
    const auto report = verify_profile_relations(q, shift);
    if (!report.ok()) rep.fail_with(encode(t) + " orientation " + std::to_string(o) + ": " + report.mismatches.front());
    if (control && !opt.mutate) {
      ++maps;
      if (!verify_profile_relations(q, 1).ok()) ++control_hits;
    }
  };
  long exhaustive = 0;
  const auto model = builtin_model("geom-pm01");
  for (int e = 1; e <= opt.max_edges; ++e)
    for (const auto& [t, w] : enumerate_trees(model, e).items)
      for (int o : {1, -1}) {
        check_map(tree_to_map(t, o), t, o, true);
        ++exhaustive;
      }
  // Per-map checks are deterministic, so a smaller cap trades coverage of
  // huge maps for runtime; over-cap draws are replaced by fresh streams.
  SamplerConfig cfg = opt.sampler;
  cfg.vertex_cap = std::min<std::uint64_t>(cfg.vertex_cap, opt.check_vertex_cap);
  long accepted = 0, discarded = 0;
  for (std::uint64_t stream = 0; accepted < opt.samples; ++stream) {
    try {
      const auto s = sample_quadrangulation(cfg, stream);
      check_map(s.map, s.tree, s.orientation, false);
      ++accepted;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resource) throw;
      ++discarded;
    }
  }
  rep.notes.push_back(std::to_string(exhaustive) + " enumerated maps and " + std::to_string(accepted) +
                      " sampled maps (" + std::to_string(discarded) + " draws above " +
                      std::to_string(cfg.vertex_cap) + " vertices replaced)");
  if (!opt.mutate) {
    rep.notes.push_back("shifting d_star by one breaks the relations on " + std::to_string(control_hits) + " of " +
                        std::to_string(maps) + " enumerated maps");
    ++rep.checks;
    if (control_hits != maps) rep.fail_with("shifted d_star went unnoticed on some maps");
  }
  rep.seconds = timer.seconds();
  return rep;
}

SuiteReport profile_count_suite(const SuiteOptions& opt) {
  Timer timer;
  SuiteReport rep{.name = "profile-count"};
  const auto model = builtin_model("incomplete-binary");
  using Key = std::pair<std::vector<ProfileEntry>, std::vector<ProfileEntry>>;
  std::map<Key, long> counts;
  for (int e = 0; e <= opt.profile_edges; ++e)
    for (const auto& [t, w] : enumerate_trees(model, e).items) {
      const auto prof = edge_profile(t);
      Key key;
      for (int k = 1; k <= prof.max_label; ++k) key.first.push_back({prof.x_plus[k], prof.x_minus[k]});
      for (int k = 1; k <= -prof.min_label; ++k) key.second.push_back({prof.check_plus[k], prof.check_minus[k]});
      ++counts[key];
    }
  for (const auto& [key, count] : counts) {
    ++rep.checks;
    Rational formula = count_profile(key.first, key.second);
    if (opt.mutate) formula += 1;
    if (formula != count) {
      std::string desc;
      for (const auto& e : key.first) desc += "(" + std::to_string(e.plus) + "," + std::to_string(e.minus) + ")";
      desc += " | ";
      for (const auto& e : key.second) desc += "(" + std::to_string(e.plus) + "," + std::to_string(e.minus) + ")";
      rep.fail_with(desc + ": formula " + to_string(formula) + " exhaustive " + std::to_string(count));
    }
  }
  rep.notes.push_back(std::to_string(counts.size()) + " distinct profiles over trees with <= " +
                      std::to_string(opt.profile_edges) + " edges");
  rep.seconds = timer.seconds();
  return rep;
}

const std::vector<SuiteInfo>& suites() {
  static const std::vector<SuiteInfo> all{
      {"genfun", "solver series against closed forms for the built-in models", genfun_suite},
      {"counting-lemma", "bicoloured forest counts against q!(p-1)!n", counting_lemma_suite},
      {"marked-forest", "marked forest joint law, kernel cells and first-passage identity", marked_forest_suite},
      {"conditioned-kernel", "exact chain law against the conditioned kernel, Markov property", conditioned_kernel_suite},
      {"kernel-mc", "Monte Carlo transition rows against the free kernel", kernel_mc_suite},
      {"round-trip", "decompose then reconstruct at every level", round_trip_suite},
      {"forest-law", "excursion forest offspring histograms against nu", forest_law_suite},
      {"schaeffer", "tree/map round trip and ball profile relations", schaeffer_suite},
      {"profile-count", "binary tree counts per vertical edge profile", profile_count_suite},
  };
  return all;
}

const SuiteInfo& find_suite(const std::string& name) {
  for (const auto& s : suites())
    if (s.name == name) return s;
  fail(ErrorKind::config, "unknown suite '" + name + "'");
}

}  // namespace lgw
