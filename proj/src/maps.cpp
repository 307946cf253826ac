#include "lgw/maps.hpp"

#include "lgw/errors.hpp"
#include "lgw/model.hpp"
#include "lgw/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>
#include <sstream>

namespace lgw {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

}  // namespace

Quadrangulation Quadrangulation::make(std::vector<Dart> alpha, std::vector<Dart> sigma, Dart root_dart, int pointed_vertex) {
  const std::size_t n = alpha.size();
  if (n == 0 || n % 2 != 0 || sigma.size() != n) fail(ErrorKind::integrity, "dart arrays must have equal, even, nonzero length");
  std::vector<char> seen(n, 0);
  for (std::size_t d = 0; d < n; ++d) {
    const Dart a = alpha[d];
    if (a < 0 || idx(a) >= n || idx(a) == d || idx(alpha[idx(a)]) != d)
      fail(ErrorKind::integrity, "alpha is not a fixed-point-free involution at dart " + std::to_string(d));
    const Dart s = sigma[d];
    if (s < 0 || idx(s) >= n || seen[idx(s)]) fail(ErrorKind::integrity, "sigma is not a permutation at dart " + std::to_string(d));
    seen[idx(s)] = 1;
  }
  if (root_dart < 0 || idx(root_dart) >= n) fail(ErrorKind::integrity, "root dart out of range");

  Quadrangulation q;
  q.alpha_ = std::move(alpha);
  q.sigma_ = std::move(sigma);
  q.root_ = root_dart;
  q.vertex_of_.assign(n, -1);
  for (std::size_t d = 0; d < n; ++d) {
    if (q.vertex_of_[d] >= 0) continue;
    const int v = static_cast<int>(q.vertex_darts_.size());
    auto& orbit = q.vertex_darts_.emplace_back();
    for (Dart e = static_cast<Dart>(d); q.vertex_of_[idx(e)] < 0; e = q.sigma_[idx(e)]) {
      q.vertex_of_[idx(e)] = v;
      orbit.push_back(e);
    }
  }
  std::vector<char> in_face(n, 0);
  for (std::size_t d = 0; d < n; ++d) {
    if (in_face[d]) continue;
    auto& face = q.faces_.emplace_back();
    for (Dart e = static_cast<Dart>(d); !in_face[idx(e)]; e = q.phi(e)) {
      in_face[idx(e)] = 1;
      face.push_back(e);
    }
    if (face.size() != 4)
      fail(ErrorKind::integrity, "face through dart " + std::to_string(d) + " has degree " + std::to_string(face.size()));
  }
  if (pointed_vertex < 0 || idx(pointed_vertex) >= q.vertex_darts_.size()) fail(ErrorKind::integrity, "pointed vertex out of range");
  q.pointed_ = pointed_vertex;

  q.dist_.assign(q.vertex_darts_.size(), -1);
  std::deque<int> queue{pointed_vertex};
  q.dist_[idx(pointed_vertex)] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (Dart d : q.vertex_darts_[idx(v)]) {
      const int w = q.vertex(q.alpha(d));
      if (q.dist_[idx(w)] < 0) {
        q.dist_[idx(w)] = q.dist_[idx(v)] + 1;
        queue.push_back(w);
      }
    }
  }
  if (std::find(q.dist_.begin(), q.dist_.end(), -1) != q.dist_.end()) fail(ErrorKind::integrity, "map is not connected");
  const long euler = static_cast<long>(q.vertex_count()) - static_cast<long>(q.edge_count()) + static_cast<long>(q.face_count());
  if (euler != 2) fail(ErrorKind::integrity, "map is not planar (Euler characteristic " + std::to_string(euler) + ")");
  return q;
}

int Quadrangulation::eccentricity() const { return *std::max_element(dist_.begin(), dist_.end()); }

std::vector<int> Quadrangulation::canonical_key() const {
  const std::size_t n = alpha_.size();
  std::vector<int> relabel(n, -1);
  std::vector<Dart> order;
  order.reserve(n);
  relabel[idx(root_)] = 0;
  order.push_back(root_);
  for (std::size_t head = 0; head < order.size(); ++head)
    for (Dart next : {alpha(order[head]), sigma(order[head])})
      if (relabel[idx(next)] < 0) {
        relabel[idx(next)] = static_cast<int>(order.size());
        order.push_back(next);
      }
  std::vector<int> key;
  key.reserve(2 * n + 1);
  for (Dart d : order) key.push_back(relabel[idx(alpha(d))]);
  for (Dart d : order) key.push_back(relabel[idx(sigma(d))]);
  int pointed_key = static_cast<int>(n);
  for (Dart d : darts_at(pointed_)) pointed_key = std::min(pointed_key, relabel[idx(d)]);
  key.push_back(pointed_key);
  return key;
}

// Corners of t are numbered 0..2n-1 in contour order from the root corner.
// Corner k carries the arc to its successor: the next corner (cyclically)
// with label one less, or the extra vertex when the label is minimal. Arc k
// gives darts 2k (at the corner) and 2k+1 (at the successor).
Quadrangulation tree_to_map(const LabelledPlaneTree& t, int orientation) {
  const std::size_t n = t.edge_count();
  if (n == 0) fail(ErrorKind::domain, "a tree with no edge has no quadrangulation");
  if (t.root_label() != 0) fail(ErrorKind::domain, "tree_to_map needs root label 0");
  if (orientation != 1 && orientation != -1) fail(ErrorKind::domain, "orientation must be +1 or -1");
  if (auto rep = validate(t); !rep.ok) fail(ErrorKind::domain, "invalid tree: " + rep.message);

  const std::size_t corners = 2 * n;
  std::vector<Vertex> contour;
  contour.reserve(corners + 1);
  std::vector<std::pair<Vertex, int>> stack{{t.root(), 0}};
  contour.push_back(t.root());
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < t.arity(v)) {
      const Vertex c = t.children(v)[idx(next++)];
      stack.emplace_back(c, 0);
      contour.push_back(c);
    } else {
      stack.pop_back();
      if (!stack.empty()) contour.push_back(stack.back().first);
    }
  }
  contour.pop_back();

  const int lo = t.min_label();
  const int hi = t.max_label();
  auto label_at = [&](std::size_t k) { return t.label(contour[k]); };
  std::vector<long> succ(corners, -1);
  std::vector<long> last_seen(idx(hi - lo + 1), -1);
  for (long j = 2 * static_cast<long>(corners) - 1; j >= 0; --j) {
    const std::size_t k = static_cast<std::size_t>(j) % corners;
    const int l = label_at(k);
    if (j < static_cast<long>(corners) && l > lo) {
      const long s = last_seen[idx(l - 1 - lo)];
      if (s >= 0) succ[k] = s % static_cast<long>(corners);
    }
    last_seen[idx(l - lo)] = j;
  }

  std::vector<std::vector<std::pair<long, Dart>>> incoming(corners);
  std::vector<Dart> star;
  for (std::size_t k = 0; k < corners; ++k) {
    const Dart in = static_cast<Dart>(2 * k + 1);
    if (succ[k] < 0) {
      star.push_back(in);
    } else {
      const auto target = static_cast<std::size_t>(succ[k]);
      const long offset = static_cast<long>((k + corners - target) % corners);
      incoming[target].emplace_back(offset, in);
    }
  }
  std::vector<std::vector<std::size_t>> sectors(t.vertex_count());
  for (std::size_t k = 0; k < corners; ++k) sectors[idx(contour[k])].push_back(k);

  const std::size_t darts = 2 * corners;
  std::vector<Dart> alpha(darts), sigma(darts);
  for (std::size_t d = 0; d < darts; d += 2) {
    alpha[d] = static_cast<Dart>(d + 1);
    alpha[d + 1] = static_cast<Dart>(d);
  }
  auto link_cycle = [&](const std::vector<Dart>& cycle) {
    for (std::size_t i = 0; i < cycle.size(); ++i) sigma[idx(cycle[i])] = cycle[(i + 1) % cycle.size()];
  };
  for (const auto& list : sectors) {
    std::vector<Dart> cycle;
    for (std::size_t k : list) {
      auto& in = incoming[k];
      std::sort(in.begin(), in.end(), std::greater<>());
      for (const auto& [offset, d] : in) cycle.push_back(d);
      cycle.push_back(static_cast<Dart>(2 * k));
    }
    link_cycle(cycle);
  }
  std::reverse(star.begin(), star.end());
  link_cycle(star);

  // Vertex ids follow the first-appearance numbering used by Quadrangulation.
  std::vector<char> marked(darts, 0);
  int pointed = 0;
  for (std::size_t d = 0; d < darts; ++d) {
    if (marked[d]) continue;
    bool is_star = false;
    for (Dart e = static_cast<Dart>(d); !marked[idx(e)]; e = sigma[idx(e)]) {
      marked[idx(e)] = 1;
      is_star = is_star || e == star.front();
    }
    if (is_star) break;
    ++pointed;
  }
  return Quadrangulation::make(std::move(alpha), std::move(sigma), orientation > 0 ? 0 : 1, pointed);
}

int d_star(const Quadrangulation& q) {
  const auto& dist = q.distances();
  return std::max(dist[idx(q.vertex(q.root_dart()))], dist[idx(q.vertex(q.alpha(q.root_dart())))]);
}

// Each face selects one tree edge joining two of its corners; a corner is
// named by the dart that follows it counterclockwise. Distances around a face
// read either (m, m-1, m, m-1), giving the edge between the two far corners,
// or (m+1, m, m-1, m), giving the edge from the farthest corner to the one
// before it along phi (phi walks faces counterclockwise).
TreeWithOrientation map_to_tree(const Quadrangulation& q) {
  const auto& dist = q.distances();
  const int ds = d_star(q);
  const int x0 = q.vertex(q.root_dart());
  const int x1 = q.vertex(q.alpha(q.root_dart()));
  if (dist[idx(x0)] == dist[idx(x1)]) fail(ErrorKind::integrity, "root edge endpoints at equal distance; map is not bipartite");
  const int orientation = dist[idx(x0)] > dist[idx(x1)] ? 1 : -1;
  const Dart root_corner_dart = orientation > 0 ? q.root_dart() : q.alpha(q.root_dart());
  const int rho = q.vertex(root_corner_dart);

  std::vector<Dart> partner(q.dart_count(), -1);
  for (const auto& face : q.faces()) {
    int l[4];
    for (int j = 0; j < 4; ++j) l[j] = dist[idx(q.vertex(face[idx(j)]))];
    int a = -1, b = -1;
    if (l[0] == l[2] && l[1] == l[3] && std::abs(l[0] - l[1]) == 1) {
      a = l[0] > l[1] ? 0 : 1;
      b = a + 2;
    } else {
      for (int j = 0; j < 4; ++j)
        if (l[j] == l[(j + 2) % 4] + 2 && l[(j + 1) % 4] == l[j] - 1 && l[(j + 3) % 4] == l[j] - 1) {
          a = j;
          b = (j + 3) % 4;
        }
    }
    if (a < 0) fail(ErrorKind::integrity, "face with distance pattern outside the two admissible cases");
    const Dart da = face[idx(a)], db = face[idx(b)];
    if (partner[idx(da)] >= 0 || partner[idx(db)] >= 0) fail(ErrorKind::internal, "corner carries two tree edges");
    partner[idx(da)] = db;
    partner[idx(db)] = da;
  }

  std::vector<char> visited(q.vertex_count(), 0);
  TreeBuilder builder(0);
  visited[idx(rho)] = 1;
  // Frames: (tree vertex, corner dart we entered by, current dart cursor).
  struct Frame {
    Vertex tv;
    Dart entry;
    Dart cursor;
  };
  std::vector<Frame> stack{{0, root_corner_dart, root_corner_dart}};
  std::size_t tree_edges = 0;
  while (!stack.empty()) {
    Frame& f = stack.back();
    f.cursor = q.sigma(f.cursor);
    const Dart here = f.cursor;
    const bool done = here == f.entry;
    const Dart other = partner[idx(here)];
    const Vertex parent = f.tv;
    if (other >= 0 && !(done && f.tv != 0)) {
      const int w = q.vertex(other);
      if (visited[idx(w)]) fail(ErrorKind::integrity, "selected edges contain a cycle");
      visited[idx(w)] = 1;
      ++tree_edges;
      const Vertex tw = builder.add(parent, dist[idx(w)] - ds);
      if (done) stack.pop_back();
      stack.push_back({tw, other, other});
      continue;
    }
    if (done) stack.pop_back();
  }
  if (tree_edges != q.face_count() || builder.size() + 1 != q.vertex_count())
    fail(ErrorKind::integrity, "selected edges do not form a spanning tree of the non-pointed vertices");
  return {std::move(builder).build(), orientation};
}

std::size_t Ball::external_count() const {
  return static_cast<std::size_t>(std::count(external.begin(), external.end(), 1));
}

std::size_t Ball::external_degree() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < faces.size(); ++i)
    if (external[i]) total += faces[i].size();
  return total;
}

Ball ball(const Quadrangulation& q, int k) {
  if (k < 1) fail(ErrorKind::domain, "ball radius must be at least 1");
  const auto& dist = q.distances();
  const std::size_t n = q.dart_count();
  Ball b;
  b.radius = k;
  b.kept.assign(n, 0);
  for (std::size_t d = 0; d < n; ++d) {
    const auto dd = static_cast<Dart>(d);
    b.kept[d] = dist[idx(q.vertex(dd))] <= k && dist[idx(q.vertex(q.alpha(dd)))] <= k;
  }
  auto next_kept = [&](Dart d) {
    Dart e = q.sigma(d);
    while (!b.kept[idx(e)]) e = q.sigma(e);
    return e;
  };
  std::vector<char> seen(n, 0);
  for (std::size_t d = 0; d < n; ++d) {
    if (!b.kept[d] || seen[d]) continue;
    auto& face = b.faces.emplace_back();
    bool original = true;
    for (Dart e = static_cast<Dart>(d); !seen[idx(e)]; e = next_kept(q.alpha(e))) {
      seen[idx(e)] = 1;
      face.push_back(e);
      if (next_kept(q.alpha(e)) != q.phi(e)) original = false;
    }
    b.external.push_back(!original);
  }
  return b;
}

long BallSummary::P(int k) const {
  if (k <= 0) return 0;
  return k > radius ? 0 : perimeter[idx(k - 1)];
}

long BallSummary::C(int k) const {
  if (k <= 0) return 1;
  return k > radius ? 0 : components[idx(k - 1)];
}

BallSummary ball_profile(const Quadrangulation& q) {
  BallSummary s;
  s.d_star = d_star(q);
  s.radius = q.eccentricity();
  for (int k = 1; k <= s.radius; ++k) {
    const Ball b = ball(q, k);
    s.perimeter.push_back(static_cast<long>(b.external_degree()));
    s.components.push_back(static_cast<long>(b.external_count()));
  }
  return s;
}

ProfileReport verify_profile_relations(const Quadrangulation& q, int d_star_shift) {
  ProfileReport report;
  const BallSummary s = ball_profile(q);
  const auto tree = map_to_tree(q).tree;
  const auto prof = edge_profile(tree);
  const int ds = s.d_star + d_star_shift;
  auto mismatch = [&](int k, const char* what, long map_side, long tree_side) {
    if (map_side != tree_side)
      report.mismatches.push_back("k=" + std::to_string(k) + " " + what + ": map " + std::to_string(map_side) + ", tree " +
                                  std::to_string(tree_side));
  };
  for (int k = -1; k <= s.radius + 1; ++k) {
    ++report.checked;
    long half_p = 0, c = 0;
    if (k < ds) {
      half_p = prof.check_plus[ds - k] + prof.check_minus[ds - k];
      c = prof.check_plus[ds - k] + 1;
    } else {
      half_p = prof.x_plus[k - ds + 1] + prof.x_minus[k - ds + 1];
      c = prof.x_plus[k - ds + 1];
    }
    if (s.P(k) % 2 != 0) report.mismatches.push_back("k=" + std::to_string(k) + " odd perimeter");
    mismatch(k, "P/2", s.P(k) / 2, half_p);
    mismatch(k, "C", s.C(k), c);
  }
  return report;
}

std::string to_csv(const Quadrangulation& q) {
  std::ostringstream out;
  out << "# root_dart=" << q.root_dart() << ",pointed_vertex=" << q.pointed_vertex() << "\n";
  out << "dart,alpha,sigma\n";
  for (std::size_t d = 0; d < q.dart_count(); ++d)
    out << d << ',' << q.alpha(static_cast<Dart>(d)) << ',' << q.sigma(static_cast<Dart>(d)) << '\n';
  return out.str();
}

namespace {

long parse_int_field(std::string_view s, std::size_t offset) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError(offset, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

}  // namespace

Quadrangulation quadrangulation_from_csv(std::string_view text) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    return true;
  };
  std::string_view line;
  constexpr std::string_view head = "# root_dart=";
  constexpr std::string_view mid = ",pointed_vertex=";
  if (!next_line(line) || !line.starts_with(head)) throw ParseError(0, "missing '# root_dart=' header");
  const std::size_t comma = line.find(mid);
  if (comma == std::string_view::npos) throw ParseError(line.size(), "missing pointed_vertex in header");
  const long root = parse_int_field(line.substr(head.size(), comma - head.size()), head.size());
  const long pointed = parse_int_field(line.substr(comma + mid.size()), comma + mid.size());
  const std::size_t cols_at = pos;
  if (!next_line(line) || line != "dart,alpha,sigma") throw ParseError(cols_at, "expected column header 'dart,alpha,sigma'");
  std::vector<Dart> alpha, sigma;
  while (true) {
    const std::size_t start = pos;
    if (!next_line(line)) break;
    if (line.empty()) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) throw ParseError(start, "expected three comma-separated fields");
    const long d = parse_int_field(line.substr(0, c1), start);
    if (d != static_cast<long>(alpha.size())) throw ParseError(start, "darts must be listed in order 0, 1, 2, ...");
    alpha.push_back(static_cast<Dart>(parse_int_field(line.substr(c1 + 1, c2 - c1 - 1), start + c1 + 1)));
    sigma.push_back(static_cast<Dart>(parse_int_field(line.substr(c2 + 1), start + c2 + 1)));
  }
  return Quadrangulation::make(std::move(alpha), std::move(sigma), static_cast<Dart>(root), static_cast<int>(pointed));
}

BoltzmannConstant boltzmann_constant(int max_faces) {
  if (max_faces < 1) fail(ErrorKind::domain, "need at least one face");
  const auto model = builtin_model("geom-pm01");
  BoltzmannConstant out;
  out.partial = 0;
  Integer twelve_pow = 1;
  for (int n = 1; n <= max_faces; ++n) {
    twelve_pow *= 12;
    std::set<std::vector<int>> distinct;
    for (const auto& [t, w] : enumerate_trees(model, n).items)
      for (int o : {1, -1}) distinct.insert(tree_to_map(t, o).canonical_key());
    const Integer count = static_cast<unsigned long>(distinct.size());
    out.counts.push_back(count);
    out.partial += ratio(count, twelve_pow);
  }
  // Tail: 2 * 3^n Cat(n) 12^-n = 2 Cat(n) 4^-n, and sum_n Cat(n) 4^-n = 2.
  double head = 0, term = 1;  // Cat(n) 4^-n
  for (int n = 0; n <= max_faces; ++n) {
    head += term;
    term *= (2.0 * (2 * n + 1)) / (n + 2) / 4.0;
  }
  out.tail = 2.0 * (2.0 - head);
  out.estimate = to_double(out.partial) + out.tail;
  return out;
}

}  // namespace lgw
