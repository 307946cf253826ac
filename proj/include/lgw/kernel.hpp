#pragma once

#include "lgw/genfun.hpp"
#include "lgw/random.hpp"

#include <compare>
#include <map>
#include <span>
#include <vector>

namespace lgw {

// (X^+, X^-) with q = 0 whenever p = 0.
struct State {
  int p = 0;
  int q = 0;
  friend auto operator<=>(const State&, const State&) = default;
};

// (X^+, X^-, M^-) for the chain conditioned on V edges.
struct CondState {
  int p = 0;
  int q = 0;
  int v = 0;
  friend auto operator<=>(const CondState&, const CondState&) = default;
};

bool in_state_space(State s) noexcept;
bool in_state_space(CondState s, int V) noexcept;

// Free binary-tree kernel. Throws unreachable-state when f_p(q) = 0.
Rational transition_prob(const FTable& f, State from, State to);
Rational cond_transition_prob(const JointTable& ft, int V, CondState from, CondState to);
Rational harmonic_H(const FTable& f, const JointTable& ft, int V, CondState s);

struct KernelCell {
  State to;
  Rational prob;
};

// All cells (r, s) with s <= s_max, ordered by s then r; mass is their sum.
struct KernelRow {
  State from;
  std::vector<KernelCell> cells;
  Rational mass;
};

KernelRow kernel_row(const FTable& f, State from, int s_max);

// Samples kernel rows by inverse CDF. Sampling runs in long double: each
// row is extended in s until its remaining mass drops below 1e-15 (at most
// s = 10^4, and never past the order of nu). The f table is kept divided by
// nu(0)^p so that rows far from the origin do not underflow.
class ChainSimulator {
 public:
  ChainSimulator(const RationalSeries& nu, std::uint64_t seed, std::uint64_t stream = 0);

  State step(State from);
  std::vector<State> run(State start, int steps);
  // Sampling probabilities of the cached row for `from`, ordered by s then r.
  std::vector<std::pair<State, double>> row(State from);

 private:
  struct CachedRow {
    std::vector<State> to;
    std::vector<long double> cumulative;
  };
  const CachedRow& cached(State from);
  // log f_p(q) + p log(1/nu(0)); -inf when f_p(q) = 0.
  long double log_scaled_f(int p, int q);

  std::vector<long double> nu_;  // nu(k) / nu(0)
  long double log_nu0_ = 0;
  std::vector<std::vector<long double>> g_;  // g_[p][q] = f_p(q) / nu(0)^p
  int width_ = 0;
  Rng rng_;
  std::map<State, CachedRow> rows_;
};

// Default nu depth for simulation; rows from states with p up to about 40
// reach a 1e-15 tail well inside it.
inline constexpr int simulation_nu_order = 80;

std::vector<State> simulate_chain(const FTable& f, State start, int steps, const SamplerConfig& cfg);

// (x^+_k, x^-_k) on the positive side or (x-check^+_k, x-check^-_k) on the negative side.
struct ProfileEntry {
  long plus = 0;
  long minus = 0;
  friend auto operator<=>(const ProfileEntry&, const ProfileEntry&) = default;
};

// Number of binary trees with the given vertical edge profile (entries for
// k = 1, 2, ...; trailing zeros optional). Domain error when the support of
// the profile is not an initial interval.
Rational count_profile(std::span<const ProfileEntry> up, std::span<const ProfileEntry> down);

// U = P((X_1^+, X_1^-) = (p1, q1), (X-check_1^+, X-check_1^-) = (pc1, qc1)).
Rational profile_initial_prob(const FTable& f, ProfileEntry up1, ProfileEntry down1);

}  // namespace lgw
