#pragma once

#include "lgw/model.hpp"
#include "lgw/series.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace lgw {

// Polynomial relation a(y)(x + w) + b(y) x w + c(y) = 0 linking three
// consecutive iterates x = G^{h-1}, y = G^h, w = G^{h+1} of the
// excursion generating function. Polynomials are coefficient lists in y.
struct StepRelation {
  std::vector<Rational> a;
  std::vector<Rational> b;
  std::vector<Rational> c;
};

StepRelation step_relation(const TreeModel& model);

// Symmetric biquadratic I(x,y) = sum a[i][j] x^i y^j (a[i][j] = a[j][i]),
// invariant along consecutive iterates and singular at (1,1).
struct InvariantCurve {
  std::array<std::array<Rational, 3>, 3> a;

  Rational operator()(const Rational& x, const Rational& y) const;
};

InvariantCurve invariant_curve(const TreeModel& model);

// Coefficients nu(0..D) of the zero-leaf count of a positive excursion.
RationalSeries solve_nu_gf(const TreeModel& model, int order);
// Exact expansion of the explicit radical formula of a built-in model.
RationalSeries closed_form_series(const TreeModel& model, int order);

// f_p(q) = P(S_p = q) for the nu-random walk, 0 <= p <= p_max, 0 <= q <= q_max.
class FTable {
 public:
  FTable() = default;
  FTable(RationalSeries nu, int p_max, int q_max);

  int p_max() const noexcept { return static_cast<int>(rows_.size()) - 1; }
  int q_max() const noexcept { return q_max_; }
  bool covers(int p, int q) const noexcept { return p >= 0 && q >= 0 && p <= p_max() && q <= q_max_; }
  // Throws a domain error outside the table.
  const Rational& operator()(int p, int q) const;
  const RationalSeries& nu() const noexcept { return nu_; }
  // Extends the table (limited by the order of nu).
  void extend(int p_max, int q_max);

 private:
  RationalSeries nu_;
  int q_max_ = 0;
  std::vector<std::vector<Rational>> rows_;
};

FTable f_table(const RationalSeries& nu, int p_max, int q_max);

// Joint law f~_p(q, l) of (total zero leaves, total edges) over p independent
// positive excursions.
class JointTable {
 public:
  JointTable() = default;
  JointTable(int p_max, int q_max, int l_max);

  int p_max() const noexcept { return p_max_; }
  int q_max() const noexcept { return q_max_; }
  int l_max() const noexcept { return l_max_; }
  // Returns 0 for q or l below zero; throws a domain error beyond the table.
  Rational operator()(int p, int q, int l) const;
  Rational& at(int p, int q, int l);

 private:
  std::size_t index(int p, int q, int l) const;
  int p_max_ = 0, q_max_ = 0, l_max_ = 0;
  std::vector<Rational> cells_;
};

inline constexpr std::size_t default_joint_budget = 20'000'000;

// [x^q u^l] of the single positive-excursion generating function, by dynamic
// programming over label heights.
BivariateSeries excursion_bivariate(const TreeModel& model, int q_max, int l_max);

JointTable joint_table(const TreeModel& model, int p_max, int q_max, int l_max,
                       std::size_t cell_budget = default_joint_budget);

// Fixed point of B = (1 + z u)(1 + u B(B(z,u),u)) / 4 at order D in both variables.
BivariateSeries binary_bivariate_fixed_point(int order);

// Closed-form value g(z) in 50-digit arithmetic.
double closed_form_value(const TreeModel& model, const Rational& z);
// (g(z) - 1 + (1-z)) / (1-z)^{3/2}; geom-pm1 and geom-pm01 only.
double singular_coefficient(const TreeModel& model, const Rational& z);
// Same quantity for any built-in, without the model restriction.
double measured_singular_coefficient(const TreeModel& model, const Rational& z);
// (g(z) - 1) / (1 - z).
double linear_coefficient(const TreeModel& model, const Rational& z);
// sqrt(2/3) sigma_xi / sigma_eta for iid displacement models.
double predicted_singular_coefficient(const TreeModel& model);
// Removes the leading sqrt(1-z) correction by combining two evaluation points.
double extrapolated_singular_coefficient(const TreeModel& model, const Rational& z1, const Rational& z2);

}  // namespace lgw
