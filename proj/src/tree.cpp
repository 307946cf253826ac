#include "lgw/tree.hpp"

#include "lgw/errors.hpp"

#include <algorithm>
#include <charconv>
#include <utility>

namespace lgw {

LabelledPlaneTree LabelledPlaneTree::single(int label) {
  return from_preorder({label}, {no_vertex});
}

LabelledPlaneTree LabelledPlaneTree::from_preorder(std::vector<int> labels, std::vector<Vertex> parents) {
  const std::size_t n = labels.size();
  if (n == 0 || parents.size() != n) fail(ErrorKind::domain, "tree needs matching non-empty label and parent arrays");
  if (parents[0] != no_vertex) fail(ErrorKind::domain, "vertex 0 must be the root");
  // Preorder check: the parent of v must lie on the path from the root to v-1.
  std::vector<Vertex> path{0};
  for (std::size_t v = 1; v < n; ++v) {
    const Vertex p = parents[v];
    while (!path.empty() && path.back() != p) path.pop_back();
    if (path.empty())
      fail(ErrorKind::domain, "parent array is not a preorder numbering at vertex " + std::to_string(v));
    path.push_back(static_cast<Vertex>(v));
  }
  LabelledPlaneTree t{Raw{}};
  t.labels_ = std::move(labels);
  t.parents_ = std::move(parents);
  t.child_begin_.assign(n + 1, 0);
  for (std::size_t v = 1; v < n; ++v) ++t.child_begin_[static_cast<std::size_t>(t.parents_[v]) + 1];
  for (std::size_t v = 0; v < n; ++v) t.child_begin_[v + 1] += t.child_begin_[v];
  t.children_.resize(n - 1);
  std::vector<Vertex> fill(t.child_begin_.begin(), t.child_begin_.end() - 1);
  for (std::size_t v = 1; v < n; ++v) t.children_[static_cast<std::size_t>(fill[static_cast<std::size_t>(t.parents_[v])]++)] = static_cast<Vertex>(v);
  return t;
}

std::span<const Vertex> LabelledPlaneTree::children(Vertex v) const {
  const auto b = static_cast<std::size_t>(child_begin_[static_cast<std::size_t>(v)]);
  const auto e = static_cast<std::size_t>(child_begin_[static_cast<std::size_t>(v) + 1]);
  return std::span<const Vertex>(children_).subspan(b, e - b);
}

int LabelledPlaneTree::min_label() const { return *std::min_element(labels_.begin(), labels_.end()); }
int LabelledPlaneTree::max_label() const { return *std::max_element(labels_.begin(), labels_.end()); }

ValidationReport validate(const LabelledPlaneTree& t) {
  for (std::size_t v = 1; v < t.vertex_count(); ++v) {
    const int d = t.increment(static_cast<Vertex>(v));
    if (d < -1 || d > 1)
      return {false, static_cast<Vertex>(v),
              "label increment " + std::to_string(d) + " at vertex " + std::to_string(v)};
  }
  return {};
}

LabelledPlaneTree truncate(const LabelledPlaneTree& t, int level) {
  const std::size_t n = t.vertex_count();
  std::vector<Vertex> new_index(n, no_vertex);
  std::vector<char> blocked(n, 0);  // some ancestor-or-self is labelled `level`
  TreeBuilder out(t.root_label());
  new_index[0] = 0;
  blocked[0] = t.label(0) == level;
  for (std::size_t v = 1; v < n; ++v) {
    const auto p = static_cast<std::size_t>(t.parent(static_cast<Vertex>(v)));
    if (new_index[p] == no_vertex || blocked[p]) continue;
    new_index[v] = out.add(new_index[p], t.label(static_cast<Vertex>(v)));
    blocked[v] = t.label(static_cast<Vertex>(v)) == level;
  }
  return std::move(out).build();
}

LabelledPlaneTree shift_labels(const LabelledPlaneTree& t, int delta) {
  std::vector<int> labels(t.labels().begin(), t.labels().end());
  for (int& l : labels) l += delta;
  return LabelledPlaneTree::from_preorder(std::move(labels), {t.parents().begin(), t.parents().end()});
}

LabelledPlaneTree reflect_labels(const LabelledPlaneTree& t) {
  std::vector<int> labels(t.labels().begin(), t.labels().end());
  for (int& l : labels) l = -l;
  return LabelledPlaneTree::from_preorder(std::move(labels), {t.parents().begin(), t.parents().end()});
}

void EdgeTally::bump(std::vector<long long>& v, int k) {
  const std::size_t i = slot(k);
  if (i >= v.size()) v.resize(std::max(i + 1, 2 * v.size()), 0);
  ++v[i];
}

void EdgeTally::add(int a, int b) {
  if (b == a + 1) bump(up_, b);
  else if (b == a - 1) bump(down_, a);
  else if (b == a) bump(flat_, a);
  else fail(ErrorKind::domain, "edge label jump " + std::to_string(b - a));
  ++edges_;
  lo_ = std::min(lo_, b);
  hi_ = std::max(hi_, b);
}

VerticalEdgeProfile EdgeTally::profile() const {
  auto get = [](const std::vector<long long>& v, int k) {
    const std::size_t i = slot(k);
    return i < v.size() ? v[i] : 0;
  };
  VerticalEdgeProfile prof;
  prof.max_label = hi_;
  prof.min_label = lo_;
  const int hi = hi_;
  const int lo = -lo_;
  prof.x_plus = CountTable(1, static_cast<std::size_t>(hi));
  prof.x_minus = CountTable(1, static_cast<std::size_t>(hi));
  prof.check_plus = CountTable(1, static_cast<std::size_t>(lo));
  prof.check_minus = CountTable(1, static_cast<std::size_t>(lo));
  prof.mass_below = CountTable(1, static_cast<std::size_t>(hi + 1));
  prof.vertical = CountTable(lo_, static_cast<std::size_t>(hi - lo_ + 1));
  prof.edges = edges_;
  ++prof.vertical.at(0);
  // first[m] = number of edges whose larger endpoint label is m - 1.
  std::vector<long long> first(static_cast<std::size_t>(hi + 2), 0);
  long long all_negative = 0;
  auto by_top = [&](int top, long long c) {
    if (top < 0) all_negative += c;
    else first[static_cast<std::size_t>(top + 1)] += c;
  };
  for (int b = lo_; b <= hi; ++b) {
    const long long u = get(up_, b), d = get(down_, b + 1), f = get(flat_, b);
    prof.vertical.at(b) += u + d + f;
    prof.flat_edges += f;
    if (u > 0) {
      if (b >= 1) prof.x_plus.at(b) = u;
      else prof.check_plus.at(1 - b) = u;
    }
    by_top(b, u + f);
  }
  for (int a = lo_ + 1; a <= hi; ++a) {
    const long long d = get(down_, a);
    if (d == 0) continue;
    if (a >= 1) prof.x_minus.at(a) = d;
    else prof.check_minus.at(1 - a) = d;
    by_top(a, d);
  }
  long long acc = all_negative;
  for (int m = 1; m <= hi + 1; ++m) {
    acc += first[static_cast<std::size_t>(m)];
    prof.mass_below.at(m) = acc;
  }
  return prof;
}

VerticalEdgeProfile edge_profile(const LabelledPlaneTree& t) {
  if (t.root_label() != 0) fail(ErrorKind::domain, "edge profile requires root label 0");
  EdgeTally tally;
  for (std::size_t i = 1; i < t.vertex_count(); ++i) {
    const auto v = static_cast<Vertex>(i);
    tally.add(t.label(t.parent(v)), t.label(v));
  }
  return tally.profile();
}

std::string encode(const LabelledPlaneTree& t) {
  std::string out = std::to_string(t.root_label());
  out.reserve(out.size() + 3 * t.vertex_count());
  out.push_back('(');
  std::vector<std::pair<Vertex, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto kids = t.children(v);
    if (next == kids.size()) {
      out.push_back(')');
      stack.pop_back();
      continue;
    }
    const Vertex c = kids[next++];
    const int d = t.increment(c);
    out.push_back(d > 0 ? '+' : d < 0 ? '-' : '0');
    out.push_back('(');
    stack.emplace_back(c, 0);
  }
  return out;
}

LabelledPlaneTree decode(std::string_view text) {
  std::size_t pos = 0;
  std::size_t digits_begin = (pos < text.size() && text[pos] == '-') ? 1 : 0;
  std::size_t end = digits_begin;
  while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
  if (end == digits_begin) throw ParseError(pos, "expected root label");
  int root = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + end, root);
  if (ec != std::errc() || ptr != text.data() + end) throw ParseError(0, "root label out of range");
  pos = end;
  if (pos >= text.size() || text[pos] != '(') throw ParseError(pos, "expected '('");
  ++pos;
  TreeBuilder b(root);
  std::vector<Vertex> stack{0};
  while (!stack.empty()) {
    if (pos >= text.size()) throw ParseError(pos, "unbalanced parentheses");
    const char c = text[pos];
    if (c == ')') {
      stack.pop_back();
      ++pos;
      continue;
    }
    int d;
    if (c == '+') d = 1;
    else if (c == '-') d = -1;
    else if (c == '0') d = 0;
    else throw ParseError(pos, std::string("unexpected character '") + c + "'");
    ++pos;
    if (pos >= text.size() || text[pos] != '(') throw ParseError(pos, "expected '(' after increment");
    ++pos;
    stack.push_back(b.add(stack.back(), b.label(stack.back()) + d));
  }
  if (pos != text.size()) throw ParseError(pos, "trailing characters");
  return std::move(b).build();
}

}  // namespace lgw
