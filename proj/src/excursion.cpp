#include "lgw/excursion.hpp"

#include "lgw/errors.hpp"

#include <algorithm>

namespace lgw {

std::optional<std::string> excursion_violation(const LabelledPlaneTree& t) {
  if (auto r = validate(t); !r.ok) return r.message;
  const int root = t.root_label();
  if (root != 1 && root != -1) return "excursion root label must be +1 or -1, got " + std::to_string(root);
  for (std::size_t i = 0; i < t.vertex_count(); ++i) {
    const auto v = static_cast<Vertex>(i);
    const int l = t.label(v);
    if (l * root < 0) return "vertex " + std::to_string(i) + " has label of the wrong sign";
    if (l == 0 && t.arity(v) != 0) return "label-0 vertex " + std::to_string(i) + " is not a leaf";
  }
  return std::nullopt;
}

Excursion Excursion::make(LabelledPlaneTree t) {
  if (auto why = excursion_violation(t)) fail(ErrorKind::domain, "not an excursion: " + *why);
  Excursion e;
  e.sign = t.root_label() > 0 ? Sign::plus : Sign::minus;
  e.n = static_cast<int>(std::count(t.labels().begin(), t.labels().end(), 0));
  e.tree = std::move(t);
  return e;
}

std::string ExcursionForest::shape() const {
  std::string out;
  out.reserve(2 * vertices.size());
  std::vector<std::pair<std::int32_t, std::size_t>> stack;
  for (auto r : roots) {
    out.push_back('(');
    stack.emplace_back(r, 0);
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& kids = vertices[static_cast<std::size_t>(v)].children;
      if (next == kids.size()) {
        out.push_back(')');
        stack.pop_back();
      } else {
        out.push_back('(');
        stack.emplace_back(kids[next++], 0);
      }
    }
  }
  return out;
}

namespace {

ExcursionDecomposition decompose_positive(const LabelledPlaneTree& t, int m) {
  const std::size_t n = t.vertex_count();
  std::vector<std::int32_t> comp(n, 0);
  std::vector<Vertex> local(n, 0);
  std::vector<TreeBuilder> builders{TreeBuilder(t.root_label())};
  std::vector<int> shift{0};
  ExcursionForest forest;
  std::vector<ForestVertex>& fv = forest.vertices;

  for (std::size_t i = 1; i < n; ++i) {
    const auto v = static_cast<Vertex>(i);
    const auto u = static_cast<std::size_t>(t.parent(v));
    const int a = t.label(static_cast<Vertex>(u));
    const int b = t.label(v);
    const std::int32_t cu = comp[u];
    const bool crossing = (a == m - 1 && b == m) || (a == m && b == m - 1);
    if (!crossing) {
      comp[i] = cu;
      local[i] = builders[static_cast<std::size_t>(cu)].add(local[u], b - shift[static_cast<std::size_t>(cu)]);
      continue;
    }
    builders[static_cast<std::size_t>(cu)].add(local[u], b - shift[static_cast<std::size_t>(cu)]);
    const int s = b == m ? m - 1 : m;
    const auto c = static_cast<std::int32_t>(builders.size());
    builders.emplace_back(b - s);
    shift.push_back(s);
    comp[i] = c;
    local[i] = 0;
    ForestVertex f;
    f.parent = cu - 1;
    f.sign = b == m ? Sign::plus : Sign::minus;
    f.source = v;
    if (cu == 0) forest.roots.push_back(c - 1);
    else fv[static_cast<std::size_t>(cu - 1)].children.push_back(c - 1);
    fv.push_back(std::move(f));
  }

  ExcursionDecomposition d;
  d.level = m;
  d.root_component = std::move(builders[0]).build();
  for (std::size_t c = 1; c < builders.size(); ++c)
    fv[c - 1].decoration = Excursion::make(std::move(builders[c]).build());
  d.forest = std::move(forest);
  return d;
}

ExcursionDecomposition reflect(ExcursionDecomposition d) {
  d.level = -d.level;
  d.root_component = reflect_labels(d.root_component);
  d.forest.root_sign = flip(d.forest.root_sign);
  for (auto& f : d.forest.vertices) {
    f.sign = flip(f.sign);
    f.decoration.tree = reflect_labels(f.decoration.tree);
    f.decoration.sign = flip(f.decoration.sign);
  }
  return d;
}

LabelledPlaneTree reconstruct_positive(const ExcursionDecomposition& d) {
  const int m = d.level;
  const auto& fv = d.forest.vertices;
  struct Frame {
    const LabelledPlaneTree* tree;
    int shift;
    std::int32_t forest_vertex;  // -1 for the root component
    std::vector<Vertex> map;
    std::size_t pos = 1;
    std::size_t next_child = 0;
  };
  const auto& rc = d.root_component;
  TreeBuilder out(rc.root_label());
  std::vector<Frame> stack;
  stack.push_back({&rc, 0, -1, std::vector<Vertex>(rc.vertex_count(), no_vertex)});
  stack.back().map[0] = 0;

  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& kids = f.forest_vertex < 0 ? d.forest.roots : fv[static_cast<std::size_t>(f.forest_vertex)].children;
    if (f.pos == f.tree->vertex_count()) {
      if (f.next_child != kids.size())
        fail(ErrorKind::reconstruction, "forest vertex " + std::to_string(f.forest_vertex) + " has unattached children");
      stack.pop_back();
      continue;
    }
    const auto w = static_cast<Vertex>(f.pos++);
    const Vertex parent = f.map[static_cast<std::size_t>(f.tree->parent(w))];
    const int local_label = f.tree->label(w);
    const bool attach = f.forest_vertex < 0 ? (local_label == m && f.tree->arity(w) == 0) : local_label == 0;
    if (!attach) {
      f.map[static_cast<std::size_t>(w)] = out.add(parent, local_label + f.shift);
      continue;
    }
    if (f.next_child >= kids.size())
      fail(ErrorKind::reconstruction, "attachment point without forest child in forest vertex " + std::to_string(f.forest_vertex));
    const std::int32_t c = kids[f.next_child++];
    const auto& dec = fv[static_cast<std::size_t>(c)].decoration;
    const int shift = dec.sign == Sign::plus ? m - 1 : m;
    Frame child{&dec.tree, shift, c, std::vector<Vertex>(dec.tree.vertex_count(), no_vertex)};
    child.map[0] = out.add(parent, dec.tree.root_label() + shift);
    stack.push_back(std::move(child));
  }
  return std::move(out).build();
}

}  // namespace

ExcursionDecomposition decompose(const LabelledPlaneTree& t, int m) {
  if (m == 0) fail(ErrorKind::domain, "decomposition level must be nonzero");
  if (t.root_label() != 0) fail(ErrorKind::domain, "decomposition requires root label 0");
  if (auto r = validate(t); !r.ok) fail(ErrorKind::domain, r.message);
  if (m > 0) return decompose_positive(t, m);
  return reflect(decompose_positive(reflect_labels(t), -m));
}

std::optional<std::string> admissibility_violation(const ExcursionDecomposition& d) {
  const int m = d.level;
  if (m == 0) return "level 0";
  const Sign expected_root_sign = m > 0 ? Sign::plus : Sign::minus;
  if (d.forest.root_sign != expected_root_sign) return "forest root sign does not match the level";
  const auto& rc = d.root_component;
  if (rc.root_label() != 0) return "root component must have root label 0";
  std::size_t attachments = 0;
  for (std::size_t i = 0; i < rc.vertex_count(); ++i) {
    const auto v = static_cast<Vertex>(i);
    if (rc.label(v) != m) continue;
    if (rc.arity(v) != 0) return "root component vertex " + std::to_string(i) + " labelled m is not a leaf";
    ++attachments;
  }
  if (attachments != d.forest.roots.size())
    return "root component has " + std::to_string(attachments) + " leaves labelled m but the forest has " +
           std::to_string(d.forest.roots.size()) + " roots";
  const auto& fv = d.forest.vertices;
  std::vector<int> seen(fv.size(), 0);
  auto check_child = [&](std::int32_t c, std::int32_t parent) -> std::optional<std::string> {
    if (c < 0 || static_cast<std::size_t>(c) >= fv.size()) return "forest index out of range";
    if (fv[static_cast<std::size_t>(c)].parent != parent) return "forest vertex " + std::to_string(c) + " has inconsistent parent";
    if (seen[static_cast<std::size_t>(c)]++) return "forest vertex " + std::to_string(c) + " listed twice";
    return std::nullopt;
  };
  for (auto r : d.forest.roots)
    if (auto e = check_child(r, -1)) return e;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    const auto& f = fv[i];
    for (auto c : f.children)
      if (auto e = check_child(c, static_cast<std::int32_t>(i))) return e;
    const Sign want = f.parent < 0 ? expected_root_sign : flip(fv[static_cast<std::size_t>(f.parent)].sign);
    if (f.sign != want) return "forest vertex " + std::to_string(i) + " breaks sign alternation";
    if (auto why = excursion_violation(f.decoration.tree))
      return "forest vertex " + std::to_string(i) + ": " + *why;
    if (f.decoration.sign != f.sign) return "forest vertex " + std::to_string(i) + " decoration sign mismatch";
    const auto zeros = std::count(f.decoration.tree.labels().begin(), f.decoration.tree.labels().end(), 0);
    if (zeros != static_cast<long>(f.children.size()))
      return "forest vertex " + std::to_string(i) + ": decoration has n=" + std::to_string(zeros) + " but " +
             std::to_string(f.children.size()) + " children";
  }
  for (std::size_t i = 0; i < fv.size(); ++i)
    if (!seen[i]) return "forest vertex " + std::to_string(i) + " unreachable";
  return std::nullopt;
}

LabelledPlaneTree reconstruct(const ExcursionDecomposition& d) {
  if (auto why = admissibility_violation(d)) fail(ErrorKind::reconstruction, *why);
  if (d.level > 0) return reconstruct_positive(d);
  return reflect_labels(reconstruct_positive(reflect(d)));
}

ExcursionCounts excursion_counts(const ExcursionDecomposition& d) {
  ExcursionCounts c;
  for (const auto& f : d.forest.vertices)
    ++(f.decoration.sign == Sign::plus ? c.plus : c.minus)[encode(f.decoration.tree)];
  return c;
}

FirstHitCounts first_hit_counts(const LabelledPlaneTree& t) {
  if (t.root_label() != 0) fail(ErrorKind::domain, "first-hit counts require root label 0");
  const int hi = t.max_label();
  const int lo = -t.min_label();
  FirstHitCounts out{CountTable(1, static_cast<std::size_t>(hi)), CountTable(1, static_cast<std::size_t>(lo))};
  const std::size_t n = t.vertex_count();
  std::vector<int> max_anc(n, 0), min_anc(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    const auto v = static_cast<Vertex>(i);
    const auto p = static_cast<std::size_t>(t.parent(v));
    const int l = t.label(v);
    if (l > max_anc[p]) ++out.up.at(l);
    if (l < min_anc[p]) ++out.down.at(-l);
    max_anc[i] = std::max(max_anc[p], l);
    min_anc[i] = std::min(min_anc[p], l);
  }
  return out;
}

}  // namespace lgw
