#include "lgw/genfun.hpp"

#include "lgw/errors.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace lgw {

namespace {

using Poly = std::vector<Rational>;

void add_at(Poly& p, std::size_t i, const Rational& v) {
  if (p.size() <= i) p.resize(i + 1);
  p[i] += v;
}

}  // namespace

StepRelation step_relation(const TreeModel& model) {
  StepRelation rel;
  const auto& xi = model.offspring;
  const auto& eta = model.displacement;
  if (xi.kind() != OffspringDistribution::Kind::finite_table) {
    if (!eta.iid() || eta.step_prob(-1) != eta.step_prob(1))
      fail(ErrorKind::unsupported, "geometric offspring needs symmetric iid displacements");
    // y (1 - (1-p) E[var]) = p with var = x, y, w for steps -1, 0, +1.
    const Rational q = 1 - xi.parameter();
    rel.a = {0, -q * eta.step_prob(1)};
    rel.b = {0};
    rel.c = {-xi.parameter(), 1, -q * eta.step_prob(0)};
    return rel;
  }
  // Phi(x, y, w) = sum_d xi(d) E_eta[prod var(v_i)], keyed by exponents of (x, y, w).
  std::map<std::tuple<int, int, int>, Rational> phi;
  const int dmax = *xi.max_arity();
  for (int d = 0; d <= dmax; ++d) {
    if (xi(d) == 0) continue;
    for (const auto& e : eta.support(d)) {
      int i = 0, j = 0, k = 0;
      for (int s : e.increments) (s < 0 ? i : s == 0 ? j : k)++;
      phi[{i, j, k}] += xi(d) * e.prob;
    }
  }
  phi[{0, 1, 0}] -= 1;
  Poly ax, aw;
  for (const auto& [key, coef] : phi) {
    if (coef == 0) continue;
    const auto [i, j, k] = key;
    if (i > 1 || k > 1)
      fail(ErrorKind::unsupported, "model recursion is not of degree one in each neighbouring iterate");
    const auto jj = static_cast<std::size_t>(j);
    if (i == 1 && k == 1) add_at(rel.b, jj, coef);
    else if (i == 1) add_at(ax, jj, coef);
    else if (k == 1) add_at(aw, jj, coef);
    else add_at(rel.c, jj, coef);
  }
  ax.resize(std::max(ax.size(), aw.size()));
  aw.resize(ax.size());
  if (ax != aw) fail(ErrorKind::unsupported, "model recursion is not symmetric in the neighbouring iterates");
  rel.a = std::move(ax);
  if (rel.a.empty()) rel.a = {0};
  if (rel.b.empty()) rel.b = {0};
  if (rel.c.empty()) rel.c = {0};
  return rel;
}

Rational InvariantCurve::operator()(const Rational& x, const Rational& y) const {
  Rational acc = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) acc += a[i][j] * pow(x, i) * pow(y, j);
  return acc;
}

namespace {

// Basis of the right nullspace of m (rows of length n) over Q.
std::vector<std::vector<Rational>> nullspace(std::vector<std::vector<Rational>> m, std::size_t n) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && m[sel][col] == 0) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    const Rational inv = 1 / m[row][col];
    for (auto& v : m[row]) v *= inv;
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t c = 0; c < n; ++c) m[r][c] -= f * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < n; ++free) {
    if (std::find(pivots.begin(), pivots.end(), free) != pivots.end()) continue;
    std::vector<Rational> v(n);
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace

InvariantCurve invariant_curve(const TreeModel& model) {
  const StepRelation rel = step_relation(model);
  // Unknowns: a00, a10, a20, a11, a21, a22.
  constexpr std::size_t n = 6;
  using Lin = std::array<Rational, n>;
  auto unit = [](std::size_t k) {
    Lin l{};
    l[k] = 1;
    return l;
  };
  // Coefficients (in y) of A = [x^2] I, B = [x^1] I, C = [x^0] I.
  const std::array<Lin, 3> A{unit(2), unit(4), unit(5)};
  const std::array<Lin, 3> B{unit(1), unit(3), unit(4)};
  const std::array<Lin, 3> C{unit(0), unit(1), unit(2)};
  // Vieta: -a B + b C + c A == 0 identically in y.
  const std::size_t deg = std::max({rel.a.size(), rel.b.size(), rel.c.size()}) + 2;
  std::vector<std::vector<Rational>> rows(deg, std::vector<Rational>(n));
  auto accumulate = [&](const Poly& p, const std::array<Lin, 3>& q, int sign) {
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (q[j][k] != 0) rows[i + j][k] += sign * p[i] * q[j][k];
  };
  accumulate(rel.a, B, -1);
  accumulate(rel.b, C, 1);
  accumulate(rel.c, A, 1);
  // I(1,1) = 0 and dI/dx(1,1) = 0.
  rows.push_back({1, 2, 2, 1, 2, 1});
  rows.push_back({0, 1, 2, 1, 3, 2});
  const auto basis = nullspace(rows, n);
  if (basis.size() != 1)
    fail(ErrorKind::unsupported, "model admits " + std::to_string(basis.size()) +
                                     " independent invariant curves singular at (1,1); expected exactly one");
  const auto& v = basis[0];
  InvariantCurve curve;
  curve.a[0] = {v[0], v[1], v[2]};
  curve.a[1] = {v[1], v[3], v[4]};
  curve.a[2] = {v[2], v[4], v[5]};
  return curve;
}

RationalSeries solve_nu_gf(const TreeModel& model, int order) {
  if (order < 0) fail(ErrorKind::domain, "negative series order");
  const InvariantCurve curve = invariant_curve(model);
  // A(z) G^2 + B(z) G + C(z) = 0 with A = sum_j a[2][j] z^j etc.
  const auto& A = curve.a[2];
  const auto& B = curve.a[1];
  const auto& C = curve.a[0];
  Rational g0;
  if (A[0] == 0) {
    if (B[0] == 0) fail(ErrorKind::unsupported, "degenerate invariant curve at z = 0");
    g0 = -C[0] / B[0];
  } else {
    const Rational disc = B[0] * B[0] - 4 * A[0] * C[0];
    if (disc < 0 || !mpz_perfect_square_p(disc.get_num_mpz_t()) || !mpz_perfect_square_p(disc.get_den_mpz_t()))
      fail(ErrorKind::unsupported, "nu(0) is irrational for this model");
    Integer sn, sd;
    mpz_sqrt(sn.get_mpz_t(), disc.get_num_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), disc.get_den_mpz_t());
    const Rational root(sn, sd);
    const Rational r1 = (-B[0] + root) / (2 * A[0]);
    const Rational r2 = (-B[0] - root) / (2 * A[0]);
    const bool ok1 = r1 >= 0 && r1 <= 1;
    const bool ok2 = r2 >= 0 && r2 <= 1;
    if (ok1 == ok2 && r1 != r2) fail(ErrorKind::unsupported, "cannot select the probabilistic branch of the invariant curve");
    g0 = ok1 ? r1 : r2;
  }
  const Rational lin = 2 * A[0] * g0 + B[0];
  if (lin == 0) fail(ErrorKind::unsupported, "invariant curve is singular at (0, nu(0))");
  const Rational lin_inv = 1 / lin;
  std::vector<Rational> g(static_cast<std::size_t>(order) + 1), sq(static_cast<std::size_t>(order) + 1);
  g[0] = g0;
  sq[0] = g0 * g0;
  for (int n = 1; n <= order; ++n) {
    Rational rest = 0;  // sum_{0<i<n} g_i g_{n-i}
    for (int i = 1; i < n; ++i) rest += g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(n - i)];
    Rational acc = A[0] * rest;
    for (int k = 1; k <= 2 && k <= n; ++k) {
      acc += A[static_cast<std::size_t>(k)] * sq[static_cast<std::size_t>(n - k)];
      acc += B[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(n - k)];
    }
    if (n <= 2) acc += C[static_cast<std::size_t>(n)];
    g[static_cast<std::size_t>(n)] = -acc * lin_inv;
    sq[static_cast<std::size_t>(n)] = rest + 2 * g0 * g[static_cast<std::size_t>(n)];
  }
  return RationalSeries(std::move(g));
}

RationalSeries closed_form_series(const TreeModel& model, int order) {
  if (order < 0) fail(ErrorKind::domain, "negative series order");
  const int d = order + 1;
  const RationalSeries cube = RationalSeries::polynomial({1, -3, 3, -1}, d);
  auto radical = [&](long c) { return (RationalSeries::polynomial({c, -1}, d) * cube).sqrt(); };
  const std::string& id = model.name;
  if (id == "geom-pm1") {
    const auto num = RationalSeries::polynomial({-4, 9, -2}, d) + Rational(2) * radical(4);
    return num.divide_by_z(1) / RationalSeries::polynomial({4, -1}, order);
  }
  if (id == "geom-pm01") {
    const auto num = RationalSeries::polynomial({-3, 6, -1}, d) + radical(9);
    return Rational(1, 2) * num.divide_by_z(1);
  }
  if (id == "incomplete-binary") {
    const auto num = RationalSeries::polynomial({-3, 16, -1}, d) + radical(49);
    return (num / RationalSeries::polynomial({10, 2}, d)).truncated(order);
  }
  if (id == "complete-binary") {
    const auto num = RationalSeries::polynomial({-3, 10, -1}, d) + radical(25);
    return (num / RationalSeries::polynomial({4, 2}, d)).truncated(order);
  }
  fail(ErrorKind::unsupported, "no closed form for model '" + id + "'");
}

FTable::FTable(RationalSeries nu, int p_max, int q_max) : nu_(std::move(nu)) {
  rows_.push_back(std::vector<Rational>(1, Rational(1)));
  extend(p_max, q_max);
}

void FTable::extend(int p_max, int q_max) {
  if (p_max < 0 || q_max < 0) fail(ErrorKind::domain, "negative f table bounds");
  const int new_q = std::max(q_max, q_max_);
  const int new_p = std::max(p_max, this->p_max());
  if (new_q > nu_.order())
    fail(ErrorKind::domain, "f table column " + std::to_string(new_q) + " exceeds nu order " + std::to_string(nu_.order()));
  const auto width = static_cast<std::size_t>(new_q) + 1;
  std::vector<std::vector<Rational>> rows(static_cast<std::size_t>(new_p) + 1, std::vector<Rational>(width));
  rows[0][0] = 1;
  for (std::size_t p = 1; p < rows.size(); ++p)
    for (int q = 0; q <= new_q; ++q) {
      Rational acc = 0;
      for (int k = 0; k <= q; ++k) {
        const Rational& a = rows[p - 1][static_cast<std::size_t>(k)];
        if (a != 0 && nu_[q - k] != 0) acc += a * nu_[q - k];
      }
      rows[p][static_cast<std::size_t>(q)] = std::move(acc);
    }
  rows_ = std::move(rows);
  q_max_ = new_q;
}

const Rational& FTable::operator()(int p, int q) const {
  if (!covers(p, q))
    fail(ErrorKind::domain, "f table has no entry (" + std::to_string(p) + "," + std::to_string(q) + ")");
  return rows_[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
}

FTable f_table(const RationalSeries& nu, int p_max, int q_max) { return FTable(nu, p_max, q_max); }

JointTable::JointTable(int p_max, int q_max, int l_max)
    : p_max_(p_max), q_max_(q_max), l_max_(l_max),
      cells_(static_cast<std::size_t>(p_max + 1) * static_cast<std::size_t>(q_max + 1) * static_cast<std::size_t>(l_max + 1)) {}

std::size_t JointTable::index(int p, int q, int l) const {
  if (p < 0 || p > p_max_ || q > q_max_ || l > l_max_)
    fail(ErrorKind::domain, "joint table has no entry (" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(l) + ")");
  return (static_cast<std::size_t>(p) * static_cast<std::size_t>(q_max_ + 1) + static_cast<std::size_t>(q)) *
             static_cast<std::size_t>(l_max_ + 1) + static_cast<std::size_t>(l);
}

Rational JointTable::operator()(int p, int q, int l) const {
  if (q < 0 || l < 0) return 0;
  return cells_[index(p, q, l)];
}

Rational& JointTable::at(int p, int q, int l) { return cells_[index(p, q, l)]; }

namespace {

BivariateSeries shift_u(const BivariateSeries& s, int k) {
  BivariateSeries r(s.order_z(), s.order_u());
  for (int i = 0; i <= s.order_z(); ++i)
    for (int j = 0; j + k <= s.order_u(); ++j) r(i, j + k) = s(i, j);
  return r;
}

}  // namespace

BivariateSeries excursion_bivariate(const TreeModel& model, int q_max, int l_max) {
  if (q_max < 0 || l_max < 0) fail(ErrorKind::domain, "negative bivariate bounds");
  const auto& xi = model.offspring;
  const auto& eta = model.displacement;
  const int top = l_max + 1;  // labels above `top` behave like `top` up to u^l_max
  std::vector<BivariateSeries> e(static_cast<std::size_t>(top) + 2, BivariateSeries(q_max, l_max));
  if (q_max >= 1) e[0](1, 0) = 1;
  const int dmax = xi.max_arity() ? std::min(*xi.max_arity(), l_max) : l_max;
  for (int pass = 0;; ++pass) {
    if (pass > l_max + 3) fail(ErrorKind::convergence, "excursion recursion did not stabilize");
    e[static_cast<std::size_t>(top) + 1] = e[static_cast<std::size_t>(top)];
    std::vector<BivariateSeries> next(e);
    for (int h = 1; h <= top; ++h) {
      auto var = [&](int s) -> const BivariateSeries& { return e[static_cast<std::size_t>(h + s)]; };
      BivariateSeries acc(q_max, l_max);
      if (eta.iid()) {
        BivariateSeries step = eta.step_prob(-1) * var(-1) + eta.step_prob(0) * var(0);
        step = step + eta.step_prob(1) * var(1);
        BivariateSeries power(q_max, l_max);
        power(0, 0) = 1;
        for (int d = 0; d <= dmax; ++d) {
          if (d > 0) power = shift_u(power * step, 1);
          if (xi(d) != 0) acc = acc + xi(d) * power;
        }
      } else {
        for (int d = 0; d <= dmax; ++d) {
          if (xi(d) == 0) continue;
          for (const auto& entry : eta.support(d)) {
            BivariateSeries prod(q_max, l_max);
            prod(0, 0) = 1;
            for (int s : entry.increments) prod = prod * var(s);
            acc = acc + (xi(d) * entry.prob) * shift_u(prod, d);
          }
        }
      }
      next[static_cast<std::size_t>(h)] = std::move(acc);
    }
    next[static_cast<std::size_t>(top) + 1] = next[static_cast<std::size_t>(top)];
    if (next == e) break;
    e = std::move(next);
  }
  return e[1];
}

JointTable joint_table(const TreeModel& model, int p_max, int q_max, int l_max, std::size_t cell_budget) {
  if (p_max < 0 || q_max < 0 || l_max < 0) fail(ErrorKind::domain, "negative joint table bounds");
  const double cells = double(p_max + 1) * double(q_max + 1) * double(l_max + 1);
  if (cells > double(cell_budget))
    fail(ErrorKind::resource, "joint table of " + std::to_string(static_cast<long long>(cells)) +
                                  " cells exceeds the budget of " + std::to_string(cell_budget));
  const BivariateSeries one = excursion_bivariate(model, q_max, l_max);
  JointTable t(p_max, q_max, l_max);
  t.at(0, 0, 0) = 1;
  for (int p = 1; p <= p_max; ++p)
    for (int q1 = 0; q1 <= q_max; ++q1)
      for (int l1 = 0; l1 <= l_max; ++l1) {
        const Rational& a = t(p - 1, q1, l1);
        if (a == 0) continue;
        for (int q2 = 0; q1 + q2 <= q_max; ++q2)
          for (int l2 = 0; l1 + l2 <= l_max; ++l2)
            if (one(q2, l2) != 0) t.at(p, q1 + q2, l1 + l2) += a * one(q2, l2);
      }
  return t;
}

BivariateSeries binary_bivariate_fixed_point(int order) {
  if (order < 0) fail(ErrorKind::domain, "negative order");
  BivariateSeries b(order, order);
  BivariateSeries one_plus_zu(order, order);
  one_plus_zu(0, 0) = 1;
  if (order >= 1) one_plus_zu(1, 1) = 1;
  for (int iter = 0;; ++iter) {
    if (iter > order + 4) fail(ErrorKind::convergence, "bivariate fixed point did not stabilize");
    BivariateSeries inner = shift_u(b.compose_z(b), 1);
    inner(0, 0) += 1;
    BivariateSeries next = Rational(1, 4) * (one_plus_zu * inner);
    if (next == b) return b;
    b = std::move(next);
  }
}

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Big to_big(const Rational& r) { return Big(r.get_num().get_str()) / Big(r.get_den().get_str()); }

Big closed_form_big(const TreeModel& model, const Rational& zr) {
  if (zr <= 0 || zr >= 1) fail(ErrorKind::domain, "closed-form evaluation needs z in (0,1)");
  const Big z = to_big(zr);
  const Big s = boost::multiprecision::pow(1 - z, Big(3) / 2);
  const std::string& id = model.name;
  using boost::multiprecision::sqrt;
  if (id == "geom-pm1") return (-2 * z * z + 9 * z - 4 + 2 * sqrt(4 - z) * s) / (z * (4 - z));
  if (id == "geom-pm01") return (-z * z + 6 * z - 3 + sqrt(9 - z) * s) / (2 * z);
  if (id == "incomplete-binary") return (-z * z + 16 * z - 3 + sqrt(49 - z) * s) / (2 * (z + 5));
  if (id == "complete-binary") return (-z * z + 10 * z - 3 + sqrt(25 - z) * s) / (2 * (z + 2));
  fail(ErrorKind::unsupported, "no closed form for model '" + id + "'");
}

Big measured_big(const TreeModel& model, const Rational& z) {
  const Big g = closed_form_big(model, z);
  const Big e = 1 - to_big(z);
  return (g - 1 + e) / boost::multiprecision::pow(e, Big(3) / 2);
}

}  // namespace

double closed_form_value(const TreeModel& model, const Rational& z) {
  return static_cast<double>(closed_form_big(model, z));
}

double measured_singular_coefficient(const TreeModel& model, const Rational& z) {
  return static_cast<double>(measured_big(model, z));
}

double singular_coefficient(const TreeModel& model, const Rational& z) {
  if (model.name != "geom-pm1" && model.name != "geom-pm01")
    fail(ErrorKind::unsupported, "singular coefficient is defined for geom-pm1 and geom-pm01 only");
  if (z <= Rational(99, 100) || z >= 1) fail(ErrorKind::domain, "z must lie in (0.99, 1)");
  return measured_singular_coefficient(model, z);
}

double linear_coefficient(const TreeModel& model, const Rational& z) {
  const Big g = closed_form_big(model, z);
  return static_cast<double>((g - 1) / (1 - to_big(z)));
}

double predicted_singular_coefficient(const TreeModel& model) {
  if (!model.displacement.iid())
    fail(ErrorKind::unsupported, "displacement variance is defined for iid displacement families only");
  const Rational var_eta = model.displacement.step_prob(1) + model.displacement.step_prob(-1);
  return std::sqrt(2.0 / 3.0) * std::sqrt(to_double(model.offspring.variance())) / std::sqrt(to_double(var_eta));
}

double extrapolated_singular_coefficient(const TreeModel& model, const Rational& z1, const Rational& z2) {
  const Big c1 = measured_big(model, z1);
  const Big c2 = measured_big(model, z2);
  const Big r1 = boost::multiprecision::sqrt(1 - to_big(z1));
  const Big r2 = boost::multiprecision::sqrt(1 - to_big(z2));
  return static_cast<double>((c1 * r2 - c2 * r1) / (r2 - r1));
}

}  // namespace lgw
