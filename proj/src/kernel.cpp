#include "lgw/kernel.hpp"

#include "lgw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lgw {

bool in_state_space(State s) noexcept {
  return s.q >= 0 && (s.p > 0 || (s.p == 0 && s.q == 0));
}

bool in_state_space(CondState s, int V) noexcept {
  if (s.p == 0) return s.q == 0 && s.v == V;
  return s.p > 0 && s.q >= 0 && s.v >= 0 && s.v <= V;
}

namespace {

std::string show(State s) { return "(" + std::to_string(s.p) + "," + std::to_string(s.q) + ")"; }

std::string show(CondState s) {
  return "(" + std::to_string(s.p) + "," + std::to_string(s.q) + "," + std::to_string(s.v) + ")";
}

// p 4^{-p-s} / (p+s) C(p+s, r) C(p+s, q)
Rational kernel_prefactor(int p, int q, int r, int s) {
  const long n = p + s;
  Rational x(binomial(n, r) * binomial(n, q) * p, n);
  x.canonicalize();
  Integer four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, static_cast<unsigned long>(n));
  return x / Rational(four_pow);
}

}  // namespace

Rational transition_prob(const FTable& f, State from, State to) {
  if (!in_state_space(from)) fail(ErrorKind::domain, "state " + show(from) + " is outside the state space");
  if (to.p < 0 || to.q < 0) fail(ErrorKind::domain, "negative target state " + show(to));
  if (from.p == 0) return to == State{0, 0} ? 1 : 0;
  if (to.p == 0 && to.q > 0) return 0;
  const Rational& denom = f(from.p, from.q);
  if (denom == 0) fail(ErrorKind::unreachable_state, "state " + show(from) + " has f_p(q) = 0");
  if (to.p > from.p + to.q) return 0;
  const Rational& num = f(to.p, to.q);
  if (num == 0) return 0;
  return kernel_prefactor(from.p, from.q, to.p, to.q) * num / denom;
}

Rational cond_transition_prob(const JointTable& ft, int V, CondState from, CondState to) {
  if (!in_state_space(from, V)) fail(ErrorKind::domain, "state " + show(from) + " is outside the conditioned state space");
  if (from.p == 0) return to == from ? 1 : 0;
  if (to.p < 0 || to.q < 0) fail(ErrorKind::domain, "negative target state " + show(to));
  if (to.v != from.v + from.p + from.q) return 0;
  if (to.p == 0 && to.q > 0) return 0;
  if (to.p > from.p + to.q) return 0;
  const Rational denom = ft(from.p, from.q, V - from.v - from.p);
  if (denom == 0) fail(ErrorKind::unreachable_state, "state " + show(from) + " has zero conditioned mass");
  const Rational num = ft(to.p, to.q, V - to.v - to.p);
  if (num == 0) return 0;
  return kernel_prefactor(from.p, from.q, to.p, to.q) * num / denom;
}

Rational harmonic_H(const FTable& f, const JointTable& ft, int V, CondState s) {
  if (!in_state_space(s, V)) fail(ErrorKind::domain, "state " + show(s) + " is outside the conditioned state space");
  const Rational& denom = f(s.p, s.q);
  if (denom == 0) fail(ErrorKind::unreachable_state, "state " + show(s) + " has f_p(q) = 0");
  return ft(s.p, s.q, V - s.v - s.p) / denom;
}

KernelRow kernel_row(const FTable& f, State from, int s_max) {
  KernelRow row{from, {}, 0};
  if (!in_state_space(from)) fail(ErrorKind::domain, "state " + show(from) + " is outside the state space");
  if (from.p == 0) {
    row.cells.push_back({{0, 0}, 1});
    row.mass = 1;
    return row;
  }
  for (int s = 0; s <= s_max; ++s)
    for (int r = (s == 0 ? 0 : 1); r <= from.p + s; ++r) {
      Rational pr = transition_prob(f, from, {r, s});
      row.mass += pr;
      row.cells.push_back({{r, s}, std::move(pr)});
    }
  return row;
}

ChainSimulator::ChainSimulator(const RationalSeries& nu, std::uint64_t seed, std::uint64_t stream) : rng_(seed, stream) {
  if (nu[0] <= 0) fail(ErrorKind::domain, "chain simulation needs nu(0) > 0");
  const long double nu0 = nu[0].get_d();
  log_nu0_ = std::log(nu0);
  for (int k = 0; k <= nu.order(); ++k) nu_.push_back(static_cast<long double>(nu[k].get_d()) / nu0);
  g_.push_back({1.0L});
  width_ = 1;
}

long double ChainSimulator::log_scaled_f(int p, int q) {
  if (q >= width_) {
    // Widen every row; columns double up to the order of nu.
    width_ = std::min<int>(static_cast<int>(nu_.size()), std::max(q + 1, 2 * width_));
    const std::size_t rows = g_.size();
    g_.assign(1, std::vector<long double>(static_cast<std::size_t>(width_), 0.0L));
    g_[0][0] = 1;
    while (g_.size() < rows) g_.emplace_back();
    for (std::size_t r = 1; r < rows; ++r) g_[r].clear();
  }
  while (g_.size() <= static_cast<std::size_t>(p)) g_.emplace_back();
  for (std::size_t r = 1; r <= static_cast<std::size_t>(p); ++r) {
    if (!g_[r].empty()) continue;
    auto& row = g_[r];
    const auto& prev = g_[r - 1];
    row.assign(static_cast<std::size_t>(width_), 0.0L);
    for (int j = 0; j < width_; ++j) {
      long double acc = 0;
      for (int k = 0; k <= j; ++k) acc += prev[static_cast<std::size_t>(k)] * nu_[static_cast<std::size_t>(j - k)];
      row[static_cast<std::size_t>(j)] = acc;
    }
  }
  const long double v = g_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
  return v > 0 ? std::log(v) : -std::numeric_limits<long double>::infinity();
}

const ChainSimulator::CachedRow& ChainSimulator::cached(State from) {
  if (auto it = rows_.find(from); it != rows_.end()) return it->second;
  if (!in_state_space(from)) fail(ErrorKind::domain, "state " + show(from) + " is outside the state space");
  CachedRow c;
  constexpr long double tail_bound = 1e-15L;
  constexpr int s_limit = 10'000;
  const int max_q = static_cast<int>(nu_.size()) - 1;
  if (from.p == 0) {
    c.to.push_back({0, 0});
    c.cumulative.push_back(1);
  } else {
    if (from.q > max_q) fail(ErrorKind::resource, "nu series too short for state " + show(from));
    const long double log_denom = log_scaled_f(from.p, from.q);
    if (!std::isfinite(log_denom)) fail(ErrorKind::unreachable_state, "state " + show(from) + " has f_p(q) = 0");
    const long double log4 = std::log(4.0L);
    long double mass = 0;
    for (int s = 0; 1 - mass >= tail_bound; ++s) {
      if (s > s_limit) fail(ErrorKind::resource, "kernel row " + show(from) + " tail not below 1e-15 by s = 10^4");
      if (s > max_q)
        fail(ErrorKind::resource, "nu series of order " + std::to_string(max_q) + " too short to resolve the tail of row " +
                                      show(from));
      const int n = from.p + s;
      if (from.q > n) continue;
      const long double base = std::log(static_cast<long double>(from.p)) - n * log4 - std::log(static_cast<long double>(n)) +
                               std::lgamma(n + 1.0L) - std::lgamma(from.q + 1.0L) - std::lgamma(n - from.q + 1.0L) -
                               log_denom + std::lgamma(n + 1.0L);
      for (int r = (s == 0 ? 0 : 1); r <= n; ++r) {
        const long double lf = log_scaled_f(r, s);
        if (!std::isfinite(lf)) continue;
        const long double lp =
            base - std::lgamma(r + 1.0L) - std::lgamma(n - r + 1.0L) + lf + (r - from.p) * log_nu0_;
        mass += std::exp(lp);
        c.to.push_back({r, s});
        c.cumulative.push_back(mass);
      }
    }
  }
  return rows_.emplace(from, std::move(c)).first->second;
}

std::vector<std::pair<State, double>> ChainSimulator::row(State from) {
  const CachedRow& c = cached(from);
  std::vector<std::pair<State, double>> out;
  long double prev = 0;
  for (std::size_t i = 0; i < c.to.size(); ++i) {
    out.emplace_back(c.to[i], static_cast<double>(c.cumulative[i] - prev));
    prev = c.cumulative[i];
  }
  return out;
}

State ChainSimulator::step(State from) {
  const CachedRow& c = cached(from);
  // Draw against the accumulated mass so the 1e-15 tail is renormalized away.
  const long double u = static_cast<long double>(rng_.uniform()) * c.cumulative.back();
  const auto it = std::upper_bound(c.cumulative.begin(), c.cumulative.end(), u);
  const auto i = it == c.cumulative.end() ? c.cumulative.size() - 1 : static_cast<std::size_t>(it - c.cumulative.begin());
  return c.to[i];
}

std::vector<State> ChainSimulator::run(State start, int steps) {
  std::vector<State> path{start};
  for (int i = 0; i < steps; ++i) path.push_back(step(path.back()));
  return path;
}

std::vector<State> simulate_chain(const FTable& f, State start, int steps, const SamplerConfig& cfg) {
  ChainSimulator sim(f.nu(), cfg.seed);
  return sim.run(start, steps);
}

Rational count_profile(std::span<const ProfileEntry> up, std::span<const ProfileEntry> down) {
  for (const auto& e : up)
    if (e.plus < 0 || e.minus < 0) fail(ErrorKind::domain, "malformed profile: negative count");
  for (const auto& e : down)
    if (e.plus < 0 || e.minus < 0) fail(ErrorKind::domain, "malformed profile: negative count");
  for (const auto& e : up)
    if (e.plus == 0 && e.minus > 0) return 0;
  for (const auto& e : down)
    if (e.minus == 0 && e.plus > 0) return 0;
  auto prefix_length = [](std::span<const ProfileEntry> v, bool use_plus) {
    std::size_t m = 0;
    while (m < v.size() && (use_plus ? v[m].plus : v[m].minus) > 0) ++m;
    for (std::size_t k = m; k < v.size(); ++k)
      if ((use_plus ? v[k].plus : v[k].minus) > 0) fail(ErrorKind::domain, "malformed profile: support is not an initial interval");
    return m;
  };
  const std::size_t m = prefix_length(up, true);
  const std::size_t mc = prefix_length(down, false);
  auto p = [&](std::size_t k) { return k >= 1 && k <= up.size() ? up[k - 1].plus : 0L; };
  auto q = [&](std::size_t k) { return k >= 1 && k <= up.size() ? up[k - 1].minus : 0L; };
  auto pc = [&](std::size_t k) { return k >= 1 && k <= down.size() ? down[k - 1].plus : 0L; };
  auto qc = [&](std::size_t k) { return k >= 1 && k <= down.size() ? down[k - 1].minus : 0L; };

  const long m0 = pc(1) + q(1) + 1;
  Rational card(binomial(m0, p(1)) * binomial(m0, qc(1)), m0);
  card.canonicalize();
  for (std::size_t i = 1; i <= mc; ++i) {
    const long mi = pc(i + 1) + qc(i);
    Rational f(binomial(mi, qc(i + 1)) * binomial(mi, pc(i)) * qc(i), mi);
    f.canonicalize();
    card *= f;
  }
  for (std::size_t j = 1; j <= m; ++j) {
    const long mj = p(j) + q(j + 1);
    Rational f(binomial(mj, p(j + 1)) * binomial(mj, q(j)) * p(j), mj);
    f.canonicalize();
    card *= f;
  }
  return card;
}

Rational profile_initial_prob(const FTable& f, ProfileEntry up1, ProfileEntry down1) {
  const long m0 = 1 + down1.plus + up1.minus;
  Rational u(binomial(m0, up1.plus) * binomial(m0, down1.minus), m0);
  u.canonicalize();
  Integer four_pow;
  mpz_ui_pow_ui(four_pow.get_mpz_t(), 4, static_cast<unsigned long>(m0));
  u /= Rational(four_pow);
  return u * f(static_cast<int>(up1.plus), static_cast<int>(up1.minus)) *
         f(static_cast<int>(down1.minus), static_cast<int>(down1.plus));
}

}  // namespace lgw
