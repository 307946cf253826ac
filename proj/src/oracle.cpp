#include "lgw/oracle.hpp"

#include "lgw/errors.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace lgw {

namespace {

// Subtree code: "(" followed by (increment char, child code) pairs, then ")".
struct Piece {
  std::string code;
  Rational weight;
};

char inc_char(int d) { return d > 0 ? '+' : d < 0 ? '-' : '0'; }

// Calls visit(parts) for every weak composition of `total` into `k` parts.
template <class F>
void compositions(int total, int k, F&& visit) {
  std::vector<int> parts(static_cast<std::size_t>(k), 0);
  if (k == 0) {
    if (total == 0) visit(parts);
    return;
  }
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == k - 1) {
      parts[static_cast<std::size_t>(i)] = left;
      visit(parts);
      return;
    }
    for (int x = 0; x <= left; ++x) {
      parts[static_cast<std::size_t>(i)] = x;
      self(self, i + 1, left - x);
    }
  };
  rec(rec, 0, total);
}

class Enumerator {
 public:
  Enumerator(const TreeModel& model, bool stop_at_zero, std::size_t cap)
      : model_(model), stop_at_zero_(stop_at_zero), cap_(cap) {}

  const std::vector<Piece>& build(int label, int budget) {
    const int key_label = stop_at_zero_ ? label : 0;
    if (auto it = memo_.find({key_label, budget}); it != memo_.end()) return it->second;
    std::vector<Piece> out;
    if (stop_at_zero_ && label == 0) {
      if (budget == 0) out.push_back({"()", 1});
      return memo_.emplace(std::make_pair(key_label, budget), std::move(out)).first->second;
    }
    const auto& xi = model_.offspring;
    const int dmax = xi.max_arity() ? std::min(*xi.max_arity(), budget) : budget;
    for (int d = 0; d <= dmax; ++d) {
      const Rational xd = xi(d);
      if (xd == 0) continue;
      for (const auto& entry : model_.displacement.support(d)) {
        const Rational base = xd * entry.prob;
        compositions(budget - d, d, [&](const std::vector<int>& sizes) {
          std::vector<const std::vector<Piece>*> lists;
          for (int i = 0; i < d; ++i) {
            lists.push_back(&build(label + entry.increments[static_cast<std::size_t>(i)], sizes[static_cast<std::size_t>(i)]));
            if (lists.back()->empty()) return;
          }
          std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
          while (true) {
            Piece p{"(", base};
            for (int i = 0; i < d; ++i) {
              const Piece& c = (*lists[static_cast<std::size_t>(i)])[idx[static_cast<std::size_t>(i)]];
              p.code.push_back(inc_char(entry.increments[static_cast<std::size_t>(i)]));
              p.code += c.code;
              p.weight *= c.weight;
            }
            p.code.push_back(')');
            out.push_back(std::move(p));
            if (out.size() > cap_) fail(ErrorKind::resource, "enumeration exceeds the item cap of " + std::to_string(cap_));
            int k = d;
            while (k > 0 && ++idx[static_cast<std::size_t>(k - 1)] == lists[static_cast<std::size_t>(k - 1)]->size())
              idx[static_cast<std::size_t>(--k)] = 0;
            if (k == 0) break;
          }
        });
      }
    }
    return memo_.emplace(std::make_pair(key_label, budget), std::move(out)).first->second;
  }

 private:
  const TreeModel& model_;
  bool stop_at_zero_;
  std::size_t cap_;
  std::map<std::pair<int, int>, std::vector<Piece>> memo_;
};

// [x^n] of prod of power series given by coefficient vectors, restricted to degree <= n.
template <class T>
std::vector<T> poly_pow(const std::vector<T>& a, int k, int n) {
  std::vector<T> r(static_cast<std::size_t>(n) + 1, T(0));
  r[0] = 1;
  for (int i = 0; i < k; ++i) {
    std::vector<T> next(static_cast<std::size_t>(n) + 1, T(0));
    for (int x = 0; x <= n; ++x)
      if (r[static_cast<std::size_t>(x)] != 0)
        for (int y = 0; x + y <= n; ++y) next[static_cast<std::size_t>(x + y)] += r[static_cast<std::size_t>(x)] * a[static_cast<std::size_t>(y)];
    r = std::move(next);
  }
  return r;
}

}  // namespace

Integer count_trees(const TreeModel& model, int edges) {
  std::vector<Integer> cnt(static_cast<std::size_t>(edges) + 1, Integer(0));
  const auto& xi = model.offspring;
  for (int n = 0; n <= edges; ++n) {
    Integer total = 0;
    const int dmax = xi.max_arity() ? std::min(*xi.max_arity(), n) : n;
    for (int d = 0; d <= dmax; ++d) {
      if (xi(d) == 0) continue;
      const auto support = static_cast<long>(model.displacement.support(d).size());
      total += poly_pow(cnt, d, n)[static_cast<std::size_t>(n - d)] * support;
    }
    cnt[static_cast<std::size_t>(n)] = total;
  }
  return cnt[static_cast<std::size_t>(edges)];
}

Rational tree_mass(const TreeModel& model, int edges) {
  std::vector<Rational> mass(static_cast<std::size_t>(edges) + 1, Rational(0));
  const auto& xi = model.offspring;
  for (int n = 0; n <= edges; ++n) {
    Rational total = 0;
    const int dmax = xi.max_arity() ? std::min(*xi.max_arity(), n) : n;
    for (int d = 0; d <= dmax; ++d) {
      if (xi(d) == 0) continue;
      Rational eta_total = 0;
      for (const auto& e : model.displacement.support(d)) eta_total += e.prob;
      total += xi(d) * eta_total * poly_pow(mass, d, n)[static_cast<std::size_t>(n - d)];
    }
    mass[static_cast<std::size_t>(n)] = total;
  }
  return mass[static_cast<std::size_t>(edges)];
}

WeightedEnsemble enumerate_trees(const TreeModel& model, int edges, std::size_t cap) {
  if (edges < 0) fail(ErrorKind::domain, "negative edge count");
  if (count_trees(model, edges) > Integer(static_cast<unsigned long>(cap)))
    fail(ErrorKind::resource, "enumeration exceeds the item cap of " + std::to_string(cap));
  Enumerator en(model, false, cap);
  WeightedEnsemble out;
  out.total = 0;
  for (const auto& piece : en.build(0, edges)) {
    out.items.emplace_back(decode("0" + piece.code), piece.weight);
    out.total += piece.weight;
  }
  return out;
}

WeightedEnsemble enumerate_excursions(const TreeModel& model, Sign sign, int edges, std::size_t cap) {
  if (edges < 0) fail(ErrorKind::domain, "negative edge count");
  Enumerator en(model, true, cap);
  const int root = sign == Sign::plus ? 1 : -1;
  WeightedEnsemble out;
  out.total = 0;
  for (const auto& piece : en.build(root, edges)) {
    out.items.emplace_back(decode(std::to_string(root) + piece.code), piece.weight);
    out.total += piece.weight;
  }
  return out;
}

ChainPath chain_path(const LabelledPlaneTree& t) {
  const auto prof = edge_profile(t);
  const int V = static_cast<int>(t.edge_count());
  ChainPath path;
  for (int m = 1;; ++m) {
    CondState s{static_cast<int>(prof.x_plus[m]), static_cast<int>(prof.x_minus[m]), static_cast<int>(prof.mass(m))};
    path.push_back(s);
    if (s == CondState{0, 0, V}) break;
  }
  return path;
}

ChainLaw exact_chain_law(int V, std::size_t cap) {
  const auto ensemble = enumerate_trees(builtin_model("incomplete-binary"), V, cap);
  ChainLaw law;
  law.V = V;
  for (const auto& [t, w] : ensemble.items) law.paths[chain_path(t)] += w / ensemble.total;
  return law;
}

namespace {

std::string show(const CondState& s) {
  return "(" + std::to_string(s.p) + "," + std::to_string(s.q) + "," + std::to_string(s.v) + ")";
}

std::string show(const ChainPath& h) {
  std::string out;
  for (const auto& s : h) out += show(s);
  return out;
}

}  // namespace

MarkovReport verify_markov_exact(const ChainLaw& law, const CondKernel& kernel) {
  MarkovReport report;
  std::map<ChainPath, std::map<CondState, Rational>> by_history;
  std::map<CondState, std::map<CondState, Rational>> by_state;
  for (const auto& [path, w] : law.paths)
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      ChainPath prefix(path.begin(), path.begin() + static_cast<long>(i) + 1);
      by_history[prefix][path[i + 1]] += w;
      by_state[path[i]][path[i + 1]] += w;
    }
  constexpr std::size_t keep = 20;
  auto note = [&](std::string msg) {
    if (report.discrepancies.size() < keep) report.discrepancies.push_back(std::move(msg));
    else if (report.discrepancies.size() == keep) report.discrepancies.push_back("...");
  };
  std::map<CondState, Rational> state_total;
  for (const auto& [s, row] : by_state) {
    Rational tot = 0;
    for (const auto& [to, w] : row) tot += w;
    state_total[s] = tot;
  }
  for (const auto& [h, row] : by_history) {
    ++report.histories;
    Rational tot = 0;
    for (const auto& [to, w] : row) tot += w;
    const auto& srow = by_state[h.back()];
    const Rational& stot = state_total[h.back()];
    for (const auto& [to, w] : srow) {
      auto it = row.find(to);
      const Rational hist = it == row.end() ? Rational(0) : it->second / tot;
      if (hist != w / stot)
        note("history " + show(h) + " -> " + show(to) + ": " + to_string(hist) + " vs state law " + to_string(w / stot));
    }
  }
  for (const auto& [s, row] : by_state) {
    Rational kernel_mass = 0;
    for (const auto& [to, w] : row) {
      ++report.transitions;
      const Rational k = kernel(s, to);
      kernel_mass += k;
      const Rational empirical = w / state_total[s];
      if (k != empirical)
        note("transition " + show(s) + " -> " + show(to) + ": exact " + to_string(empirical) + " kernel " + to_string(k));
    }
    if (kernel_mass != 1) note("kernel row " + show(s) + " puts mass " + to_string(1 - kernel_mass) + " outside the observed support");
  }
  return report;
}

MarkovReport verify_markov_exact(const ChainLaw& law) {
  const int V = law.V;
  const auto ft = joint_table(builtin_model("incomplete-binary"), V + 1, V + 1, V);
  return verify_markov_exact(law, [&ft, V](CondState a, CondState b) { return cond_transition_prob(ft, V, a, b); });
}

Integer counting_lemma_formula(int n, int p, int q) {
  Integer a, b;
  mpz_fac_ui(a.get_mpz_t(), static_cast<unsigned long>(q));
  mpz_fac_ui(b.get_mpz_t(), static_cast<unsigned long>(p - 1));
  return a * b * n;
}

Integer enumerate_bicoloured_forests(int n, const std::vector<int>& n_plus, const std::vector<int>& n_minus) {
  const int p = static_cast<int>(n_plus.size());
  const int q = static_cast<int>(n_minus.size());
  const int sum_plus = std::accumulate(n_plus.begin(), n_plus.end(), 0);
  const int sum_minus = std::accumulate(n_minus.begin(), n_minus.end(), 0);
  if (n < 1 || n > p || sum_plus != q || sum_minus != p - n ||
      std::any_of(n_plus.begin(), n_plus.end(), [](int x) { return x < 0; }) ||
      std::any_of(n_minus.begin(), n_minus.end(), [](int x) { return x < 0; }))
    fail(ErrorKind::domain, "parameters violate p = n + sum n_minus, q = sum n_plus");
  // Positive vertices are 0..p-1, negative vertices p..p+q-1. Roots are chosen
  // as an ordered n-tuple, then each queued vertex picks its ordered children.
  std::vector<char> used(static_cast<std::size_t>(p + q), 0);
  std::vector<int> queue;
  Integer count = 0;
  auto children_needed = [&](int v) { return v < p ? n_plus[static_cast<std::size_t>(v)] : n_minus[static_cast<std::size_t>(v - p)]; };
  auto process = [&](auto&& self, std::size_t head) -> void {
    if (head == queue.size()) {
      if (queue.size() == static_cast<std::size_t>(p + q)) ++count;
      return;
    }
    const int v = queue[head];
    const int need = children_needed(v);
    const int lo = v < p ? p : 0;
    const int hi = v < p ? p + q : p;
    auto pick = [&](auto&& pick_self, int left) -> void {
      if (left == 0) {
        self(self, head + 1);
        return;
      }
      for (int c = lo; c < hi; ++c) {
        if (used[static_cast<std::size_t>(c)]) continue;
        used[static_cast<std::size_t>(c)] = 1;
        queue.push_back(c);
        pick_self(pick_self, left - 1);
        queue.pop_back();
        used[static_cast<std::size_t>(c)] = 0;
      }
    };
    pick(pick, need);
  };
  auto roots = [&](auto&& self, int left) -> void {
    if (left == 0) {
      process(process, 0);
      return;
    }
    for (int v = 0; v < p; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      queue.push_back(v);
      self(self, left - 1);
      queue.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    }
  };
  roots(roots, n);
  return count;
}

std::size_t MarkedTree::count_L() const { return static_cast<std::size_t>(std::count(iota.begin(), iota.end(), true)); }
std::size_t MarkedTree::count_R() const { return static_cast<std::size_t>(std::count(sigma.begin(), sigma.end(), true)); }

MarkedTree to_marked(const Excursion& tau) {
  const auto& t = tau.tree;
  if (tau.sign != Sign::plus || t.root_label() != 1) fail(ErrorKind::domain, "to_marked needs a positive excursion");
  const std::size_t n = t.vertex_count();
  std::vector<Vertex> skeleton_index(n, no_vertex);
  std::vector<Vertex> nearest(n, no_vertex);  // nearest label-1 ancestor-or-self
  MarkedTree m;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<Vertex>(i);
    const Vertex par = t.parent(v);
    const Vertex above = par == no_vertex ? no_vertex : nearest[static_cast<std::size_t>(par)];
    if (t.label(v) == 1) {
      const auto k = static_cast<Vertex>(m.parents.size());
      skeleton_index[i] = k;
      m.parents.push_back(above == no_vertex ? no_vertex : skeleton_index[static_cast<std::size_t>(above)]);
      bool left = false, right = false;
      for (Vertex c : t.children(v)) {
        const int d = t.increment(c);
        if (d == 0) fail(ErrorKind::domain, "to_marked needs increments in {-1, +1}");
        (d < 0 ? left : right) = true;
      }
      m.iota.push_back(left);
      m.sigma.push_back(right);
      nearest[i] = v;
    } else {
      nearest[i] = above;
    }
  }
  return m;
}

std::vector<std::vector<Vertex>> plane_forests(int trees, int edges) {
  std::vector<std::vector<Vertex>> out;
  const int total = trees + edges;
  std::vector<int> arity;
  auto rec = [&](auto&& self, int slots, int left) -> void {
    const int placed = static_cast<int>(arity.size());
    if (placed == total) {
      if (slots == 0 && left == 0) {
        std::vector<Vertex> parents;
        std::vector<std::pair<Vertex, int>> stack;
        for (int i = 0; i < total; ++i) {
          while (!stack.empty() && stack.back().second == 0) stack.pop_back();
          if (stack.empty()) parents.push_back(no_vertex);
          else {
            parents.push_back(stack.back().first);
            --stack.back().second;
          }
          if (arity[static_cast<std::size_t>(i)] > 0) stack.emplace_back(i, arity[static_cast<std::size_t>(i)]);
        }
        out.push_back(std::move(parents));
      }
      return;
    }
    if (slots <= 0) return;
    for (int k = 0; k <= left; ++k) {
      const int next = slots - 1 + k;
      if (next == 0 && placed + 1 < total) continue;
      arity.push_back(k);
      self(self, next, left - k);
      arity.pop_back();
    }
  };
  rec(rec, trees, edges);
  return out;
}

std::map<MarkedCell, Rational> enumerate_marked_forests(const RationalSeries& nu, int p, int s, std::size_t cap) {
  if (p < 1 || s < 0) fail(ErrorKind::domain, "need p >= 1 and s >= 0");
  if (nu.order() < s) fail(ErrorKind::domain, "nu series shorter than s");
  const int n = p + s;
  if (n > 24) fail(ErrorKind::resource, "marked forest enumeration limited to 24 vertices");
  const auto forests = plane_forests(p, s);
  if (static_cast<double>(forests.size()) * std::ldexp(1.0, 2 * n) > static_cast<double>(cap))
    fail(ErrorKind::resource, "marked forest enumeration exceeds the item cap of " + std::to_string(cap));
  Integer four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, static_cast<unsigned long>(n));
  const Rational unit = 1 / Rational(four_pow);
  std::map<MarkedCell, Rational> law;
  std::vector<int> kids(static_cast<std::size_t>(n));
  for (const auto& parents : forests) {
    std::fill(kids.begin(), kids.end(), 0);
    for (Vertex v : parents)
      if (v != no_vertex) ++kids[static_cast<std::size_t>(v)];
    const std::uint32_t full = (std::uint32_t{1} << n) - 1;
    for (std::uint32_t sigma = 0; sigma <= full; ++sigma) {
      Rational w = unit;
      for (int v = 0; v < n && w != 0; ++v) {
        const bool on = (sigma >> v) & 1U;
        if (on) w *= nu[kids[static_cast<std::size_t>(v)]];
        else if (kids[static_cast<std::size_t>(v)] > 0) w = 0;
      }
      if (w == 0) continue;
      const int r = std::popcount(sigma);
      for (std::uint32_t iota = 0; iota <= full; ++iota) law[{std::popcount(iota), r}] += w;
    }
  }
  return law;
}

Rational marked_forest_formula(const FTable& f, int p, int s, int q, int r) {
  const long n = p + s;
  Integer four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, static_cast<unsigned long>(n));
  const Rational x = ratio(binomial(n, q) * binomial(n, r) * p, n);
  return x / Rational(four_pow) * f(r, s);
}

std::pair<Rational, Rational> kemperman_check(const RationalSeries& mu, int p, int s) {
  if (p < 1 || s < 0 || mu.order() < s) fail(ErrorKind::domain, "kemperman check needs p >= 1 and mu of order >= s");
  const int n = p + s;
  Rational hit = 0, all = 0;
  compositions(s, n, [&](const std::vector<int>& k) {
    Rational w = 1;
    for (int x : k) {
      w *= mu[x];
      if (w == 0) return;
    }
    all += w;
    long walk = 0;
    for (int j = 0; j + 1 < n; ++j) {
      walk += k[static_cast<std::size_t>(j)] - 1;
      if (walk <= -p) return;
    }
    hit += w;
  });
  return {hit, ratio(p, n) * all};
}

}  // namespace lgw
