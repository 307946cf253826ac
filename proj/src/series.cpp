#include "lgw/series.hpp"

#include "lgw/errors.hpp"

#include <algorithm>

namespace lgw {

RationalSeries::RationalSeries(int order) : coeffs_(static_cast<std::size_t>(std::max(order, 0)) + 1) {}

RationalSeries::RationalSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.resize(1);
}

RationalSeries RationalSeries::polynomial(std::initializer_list<Rational> coeffs, int order) {
  RationalSeries s(order);
  int i = 0;
  for (const auto& c : coeffs) {
    if (i > order) break;
    s[i++] = c;
  }
  return s;
}

RationalSeries RationalSeries::truncated(int order) const {
  RationalSeries s(order);
  for (int i = 0; i <= std::min(order, this->order()); ++i) s[i] = (*this)[i];
  return s;
}

RationalSeries operator+(const RationalSeries& a, const RationalSeries& b) {
  const int d = std::min(a.order(), b.order());
  RationalSeries s(d);
  for (int i = 0; i <= d; ++i) s[i] = a[i] + b[i];
  return s;
}

RationalSeries operator-(const RationalSeries& a, const RationalSeries& b) {
  const int d = std::min(a.order(), b.order());
  RationalSeries s(d);
  for (int i = 0; i <= d; ++i) s[i] = a[i] - b[i];
  return s;
}

RationalSeries operator*(const RationalSeries& a, const RationalSeries& b) {
  const int d = std::min(a.order(), b.order());
  RationalSeries s(d);
  Rational t;
  for (int i = 0; i <= d; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j <= d; ++j) {
      if (b[j] == 0) continue;
      t = a[i] * b[j];
      s[i + j] += t;
    }
  }
  return s;
}

RationalSeries operator*(const Rational& c, const RationalSeries& a) {
  RationalSeries s(a.order());
  for (int i = 0; i <= a.order(); ++i) s[i] = c * a[i];
  return s;
}

RationalSeries RationalSeries::inverse() const {
  if (coeffs_[0] == 0) fail(ErrorKind::domain, "series inverse needs a nonzero constant term");
  const int d = order();
  RationalSeries r(d);
  const Rational inv0 = 1 / coeffs_[0];
  r[0] = inv0;
  for (int n = 1; n <= d; ++n) {
    Rational acc = 0;
    for (int k = 1; k <= n; ++k)
      if (coeffs_[static_cast<std::size_t>(k)] != 0) acc += coeffs_[static_cast<std::size_t>(k)] * r[n - k];
    r[n] = -acc * inv0;
  }
  return r;
}

RationalSeries operator/(const RationalSeries& a, const RationalSeries& b) { return a * b.inverse(); }

RationalSeries RationalSeries::sqrt() const {
  const Rational& c0 = coeffs_[0];
  if (c0 <= 0 || !mpz_perfect_square_p(c0.get_num_mpz_t()) || !mpz_perfect_square_p(c0.get_den_mpz_t()))
    fail(ErrorKind::domain, "series square root needs a positive perfect-square constant term, got " + to_string(c0));
  Integer num, den;
  mpz_sqrt(num.get_mpz_t(), c0.get_num_mpz_t());
  mpz_sqrt(den.get_mpz_t(), c0.get_den_mpz_t());
  const int d = order();
  RationalSeries b(d);
  b[0] = Rational(num, den);
  const Rational half_inv = 1 / (2 * b[0]);
  for (int n = 1; n <= d; ++n) {
    Rational acc = coeffs_[static_cast<std::size_t>(n)];
    for (int k = 1; k < n; ++k) acc -= b[k] * b[n - k];
    b[n] = acc * half_inv;
  }
  return b;
}

RationalSeries RationalSeries::compose(const RationalSeries& inner) const {
  if (inner[0] != 0) fail(ErrorKind::domain, "series composition needs inner constant term 0");
  const int d = std::min(order(), inner.order());
  // Horner: c_0 + W (c_1 + W (c_2 + ...)).
  RationalSeries acc(d);
  const RationalSeries w = inner.truncated(d);
  for (int i = d; i >= 0; --i) {
    acc = acc * w;
    acc[0] += coeffs_[static_cast<std::size_t>(i)];
  }
  return acc;
}

RationalSeries RationalSeries::divide_by_z(int k) const {
  for (int i = 0; i < k && i <= order(); ++i)
    if (coeffs_[static_cast<std::size_t>(i)] != 0)
      fail(ErrorKind::internal, "series not divisible by z^" + std::to_string(k) + " (coefficient " + std::to_string(i) + " = " + to_string(coeffs_[static_cast<std::size_t>(i)]) + ")");
  if (k > order()) fail(ErrorKind::domain, "division by z^k exhausts the series order");
  return RationalSeries(std::vector<Rational>(coeffs_.begin() + k, coeffs_.end()));
}

double RationalSeries::evaluate(double z) const {
  double acc = 0;
  for (int i = order(); i >= 0; --i) acc = acc * z + coeffs_[static_cast<std::size_t>(i)].get_d();
  return acc;
}

BivariateSeries::BivariateSeries(int dz, int du)
    : dz_(dz), du_(du), c_(static_cast<std::size_t>(dz + 1) * static_cast<std::size_t>(du + 1)) {
  if (dz < 0 || du < 0) fail(ErrorKind::domain, "negative bivariate order");
}

std::size_t BivariateSeries::index(int i, int j) const {
  if (i < 0 || i > dz_ || j < 0 || j > du_) fail(ErrorKind::domain, "bivariate index out of range");
  return static_cast<std::size_t>(i) * static_cast<std::size_t>(du_ + 1) + static_cast<std::size_t>(j);
}

BivariateSeries operator+(const BivariateSeries& a, const BivariateSeries& b) {
  BivariateSeries s(std::min(a.dz_, b.dz_), std::min(a.du_, b.du_));
  for (int i = 0; i <= s.dz_; ++i)
    for (int j = 0; j <= s.du_; ++j) s(i, j) = a(i, j) + b(i, j);
  return s;
}

BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
  BivariateSeries s(std::min(a.dz_, b.dz_), std::min(a.du_, b.du_));
  Rational t;
  for (int i1 = 0; i1 <= s.dz_; ++i1)
    for (int j1 = 0; j1 <= s.du_; ++j1) {
      const Rational& x = a(i1, j1);
      if (x == 0) continue;
      for (int i2 = 0; i1 + i2 <= s.dz_; ++i2)
        for (int j2 = 0; j1 + j2 <= s.du_; ++j2) {
          const Rational& y = b(i2, j2);
          if (y == 0) continue;
          t = x * y;
          s(i1 + i2, j1 + j2) += t;
        }
    }
  return s;
}

BivariateSeries operator*(const Rational& c, const BivariateSeries& a) {
  BivariateSeries s(a.dz_, a.du_);
  for (std::size_t k = 0; k < a.c_.size(); ++k) s.c_[k] = c * a.c_[k];
  return s;
}

BivariateSeries BivariateSeries::compose_z(const BivariateSeries& inner) const {
  const int dz = std::min(dz_, inner.dz_);
  const int du = std::min(du_, inner.du_);
  BivariateSeries result(dz, du);
  BivariateSeries power(dz, du);
  power(0, 0) = 1;
  for (int i = 0; i <= dz_; ++i) {
    if (i > 0) power = power * inner;
    for (int j = 0; j <= du; ++j) {
      const Rational& c = (*this)(i, j);
      if (c == 0) continue;
      for (int a = 0; a <= dz; ++a)
        for (int b = 0; b + j <= du; ++b)
          if (power(a, b) != 0) result(a, b + j) += c * power(a, b);
    }
  }
  return result;
}

RationalSeries BivariateSeries::at_u_one() const {
  RationalSeries s(dz_);
  for (int i = 0; i <= dz_; ++i)
    for (int j = 0; j <= du_; ++j) s[i] += (*this)(i, j);
  return s;
}

}  // namespace lgw
