#pragma once

#include "lgw/rational.hpp"

#include <initializer_list>
#include <span>
#include <vector>

namespace lgw {

// Truncated power series c_0 + c_1 z + ... + c_D z^D with exact coefficients.
// Binary operations truncate at the smaller order.
class RationalSeries {
 public:
  RationalSeries() : coeffs_(1) {}
  explicit RationalSeries(int order);
  explicit RationalSeries(std::vector<Rational> coeffs);
  static RationalSeries polynomial(std::initializer_list<Rational> coeffs, int order);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& operator[](int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }
  Rational& operator[](int i) { return coeffs_.at(static_cast<std::size_t>(i)); }
  std::span<const Rational> coefficients() const noexcept { return coeffs_; }

  RationalSeries truncated(int order) const;
  RationalSeries inverse() const;
  // Requires a positive perfect-square constant term; positive branch.
  RationalSeries sqrt() const;
  // Requires inner[0] == 0.
  RationalSeries compose(const RationalSeries& inner) const;
  // Divides by z^k; the first k coefficients must vanish.
  RationalSeries divide_by_z(int k) const;
  double evaluate(double z) const;

  friend RationalSeries operator+(const RationalSeries& a, const RationalSeries& b);
  friend RationalSeries operator-(const RationalSeries& a, const RationalSeries& b);
  friend RationalSeries operator*(const RationalSeries& a, const RationalSeries& b);
  friend RationalSeries operator/(const RationalSeries& a, const RationalSeries& b);
  friend RationalSeries operator*(const Rational& c, const RationalSeries& a);
  friend bool operator==(const RationalSeries& a, const RationalSeries& b) { return a.coeffs_ == b.coeffs_; }

 private:
  std::vector<Rational> coeffs_;
};

// Rectangular truncation: z-degree <= Dz, u-degree <= Du.
class BivariateSeries {
 public:
  BivariateSeries() : BivariateSeries(0, 0) {}
  BivariateSeries(int dz, int du);

  int order_z() const noexcept { return dz_; }
  int order_u() const noexcept { return du_; }
  const Rational& operator()(int i, int j) const { return c_[index(i, j)]; }
  Rational& operator()(int i, int j) { return c_[index(i, j)]; }

  // outer(W(z,u), u). Exact when every u-slice of outer is a polynomial in z
  // of degree <= Dz (true whenever the z-degree is bounded by the u-degree).
  BivariateSeries compose_z(const BivariateSeries& inner) const;
  // Substitutes u = 1 (sum over u-degrees).
  RationalSeries at_u_one() const;

  friend BivariateSeries operator+(const BivariateSeries& a, const BivariateSeries& b);
  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b);
  friend BivariateSeries operator*(const Rational& c, const BivariateSeries& a);
  friend bool operator==(const BivariateSeries& a, const BivariateSeries& b) = default;

 private:
  std::size_t index(int i, int j) const;
  int dz_;
  int du_;
  std::vector<Rational> c_;
};

}  // namespace lgw
