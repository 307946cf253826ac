#include "lgw/model.hpp"

#include "lgw/errors.hpp"
#include "lgw/excursion.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace lgw {

OffspringDistribution OffspringDistribution::finite(std::vector<Rational> table) {
  OffspringDistribution xi;
  xi.kind_ = Kind::finite_table;
  xi.table_ = std::move(table);
  return xi;
}

OffspringDistribution OffspringDistribution::geometric_half() {
  OffspringDistribution xi = geometric(Rational(1, 2));
  xi.kind_ = Kind::geometric_half;
  return xi;
}

OffspringDistribution OffspringDistribution::geometric(Rational p) {
  OffspringDistribution xi;
  xi.kind_ = Kind::geometric;
  xi.p_ = std::move(p);
  return xi;
}

Rational OffspringDistribution::operator()(int k) const {
  if (k < 0) return 0;
  if (kind_ == Kind::finite_table)
    return static_cast<std::size_t>(k) < table_.size() ? table_[static_cast<std::size_t>(k)] : Rational(0);
  return p_ * pow(1 - p_, k);
}

std::optional<int> OffspringDistribution::max_arity() const {
  if (kind_ != Kind::finite_table) {
    if (p_ == 1) return 0;
    return std::nullopt;
  }
  for (std::size_t k = table_.size(); k-- > 0;)
    if (table_[k] > 0) return static_cast<int>(k);
  return 0;
}

Rational OffspringDistribution::mean() const {
  if (kind_ != Kind::finite_table) return (1 - p_) / p_;
  Rational m = 0;
  for (std::size_t k = 0; k < table_.size(); ++k) m += table_[k] * static_cast<long>(k);
  return m;
}

Rational OffspringDistribution::variance() const {
  if (kind_ != Kind::finite_table) return (1 - p_) / (p_ * p_);
  Rational s = 0;
  for (std::size_t k = 0; k < table_.size(); ++k) s += table_[k] * static_cast<long>(k * k);
  const Rational m = mean();
  return s - m * m;
}

DisplacementFamily DisplacementFamily::iid_uniform_pm1() {
  DisplacementFamily eta;
  eta.kind_ = Kind::iid_uniform_pm1;
  return eta;
}

DisplacementFamily DisplacementFamily::iid_uniform_pm01() {
  DisplacementFamily eta;
  eta.kind_ = Kind::iid_uniform_pm01;
  return eta;
}

DisplacementFamily DisplacementFamily::per_arity(std::map<int, std::vector<Entry>> table) {
  DisplacementFamily eta;
  eta.kind_ = Kind::per_arity_table;
  eta.table_ = std::move(table);
  return eta;
}

Rational DisplacementFamily::step_prob(int eps) const {
  switch (kind_) {
    case Kind::iid_uniform_pm1: return (eps == 1 || eps == -1) ? Rational(1, 2) : Rational(0);
    case Kind::iid_uniform_pm01: return (eps >= -1 && eps <= 1) ? Rational(1, 3) : Rational(0);
    case Kind::per_arity_table: break;
  }
  fail(ErrorKind::internal, "step_prob requested for a per-arity displacement table");
}

Rational DisplacementFamily::prob(std::span<const int> v) const {
  for (int e : v)
    if (e < -1 || e > 1) fail(ErrorKind::domain, "displacement entry outside {-1,0,1}");
  if (v.empty()) return 1;
  if (iid()) {
    Rational r = 1;
    for (int e : v) r *= step_prob(e);
    return r;
  }
  auto it = table_.find(static_cast<int>(v.size()));
  if (it == table_.end()) return 0;
  for (const auto& entry : it->second)
    if (std::equal(entry.increments.begin(), entry.increments.end(), v.begin(), v.end())) return entry.prob;
  return 0;
}

std::vector<DisplacementFamily::Entry> DisplacementFamily::support(int d) const {
  std::vector<Entry> out;
  if (d < 0) return out;
  if (d == 0) {
    out.push_back({{}, 1});
    return out;
  }
  if (!iid()) {
    auto it = table_.find(d);
    if (it != table_.end())
      for (const auto& e : it->second)
        if (e.prob > 0) out.push_back(e);
    return out;
  }
  if (d > 16) fail(ErrorKind::resource, "displacement support enumeration limited to arity 16");
  const std::vector<int> steps = kind_ == Kind::iid_uniform_pm1 ? std::vector<int>{-1, 1} : std::vector<int>{-1, 0, 1};
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  const Rational each = pow(step_prob(steps[0]), d);
  while (true) {
    Entry e;
    for (auto i : idx) e.increments.push_back(steps[i]);
    e.prob = each;
    out.push_back(std::move(e));
    std::size_t k = idx.size();
    while (k > 0 && ++idx[k - 1] == steps.size()) idx[--k] = 0;
    if (k == 0) break;
  }
  return out;
}

bool DisplacementFamily::symmetric() const {
  if (iid()) return true;
  for (const auto& [d, entries] : table_)
    for (const auto& e : entries) {
      std::vector<int> neg(e.increments);
      for (int& x : neg) x = -x;
      if (prob(neg) != e.prob) return false;
    }
  return true;
}

bool DisplacementFamily::pm1_only() const {
  if (kind_ == Kind::iid_uniform_pm1) return true;
  if (kind_ == Kind::iid_uniform_pm01) return false;
  for (const auto& [d, entries] : table_)
    for (const auto& e : entries)
      if (e.prob > 0)
        for (int x : e.increments)
          if (x == 0) return false;
  return true;
}

TreeModel TreeModel::make(std::string name, OffspringDistribution xi, DisplacementFamily eta) {
  TreeModel m{std::move(name), std::move(xi), std::move(eta), false, false};
  validate_model(m);
  m.symmetric = m.displacement.symmetric();
  m.pm1_only = m.displacement.pm1_only();
  return m;
}

void validate_model(const TreeModel& model) {
  const auto& xi = model.offspring;
  if (xi.kind() == OffspringDistribution::Kind::finite_table) {
    if (xi.table().empty()) fail(ErrorKind::config, "empty offspring table");
    Rational total = 0;
    for (const auto& x : xi.table()) {
      if (x < 0) fail(ErrorKind::config, "negative offspring probability");
      total += x;
    }
    if (total != 1) fail(ErrorKind::config, "offspring probabilities sum to " + to_string(total));
  } else if (xi.parameter() <= 0 || xi.parameter() > 1) {
    fail(ErrorKind::config, "geometric parameter must lie in (0,1]");
  }
  if (xi.mean() > 1) fail(ErrorKind::config, "supercritical offspring law (mean " + to_string(xi.mean()) + ")");

  const auto& eta = model.displacement;
  if (eta.iid()) return;
  const auto max_arity = xi.max_arity();
  if (!max_arity) fail(ErrorKind::config, "per-arity displacement tables need a finite offspring law");
  for (const auto& [d, entries] : eta.table()) {
    if (d < 1) fail(ErrorKind::config, "displacement table arity must be >= 1");
    Rational total = 0;
    std::set<std::vector<int>> seen;
    for (const auto& e : entries) {
      if (static_cast<int>(e.increments.size()) != d)
        fail(ErrorKind::config, "displacement vector length differs from arity " + std::to_string(d));
      for (int x : e.increments)
        if (x < -1 || x > 1) fail(ErrorKind::config, "displacement entry outside {-1,0,1}");
      if (e.prob < 0) fail(ErrorKind::config, "negative displacement probability");
      if (!seen.insert(e.increments).second) fail(ErrorKind::config, "duplicate displacement vector");
      total += e.prob;
    }
    if (total != 1)
      fail(ErrorKind::config, "displacement law of arity " + std::to_string(d) + " sums to " + to_string(total));
  }
  for (int d = 1; d <= *max_arity; ++d)
    if (xi(d) > 0 && !eta.table().contains(d))
      fail(ErrorKind::config, "no displacement law for arity " + std::to_string(d));
}

namespace {

using Entry = DisplacementFamily::Entry;

TreeModel make_incomplete_binary() {
  std::map<int, std::vector<Entry>> eta;
  eta[1] = {{{-1}, Rational(1, 2)}, {{1}, Rational(1, 2)}};
  eta[2] = {{{-1, 1}, Rational(1)}};
  return TreeModel::make("incomplete-binary",
                         OffspringDistribution::finite({Rational(1, 4), Rational(1, 2), Rational(1, 4)}),
                         DisplacementFamily::per_arity(std::move(eta)));
}

TreeModel make_complete_binary() {
  std::map<int, std::vector<Entry>> eta;
  eta[2] = {{{-1, 1}, Rational(1)}};
  return TreeModel::make("complete-binary",
                         OffspringDistribution::finite({Rational(1, 2), Rational(0), Rational(1, 2)}),
                         DisplacementFamily::per_arity(std::move(eta)));
}

}  // namespace

std::vector<std::string> builtin_ids() {
  return {"geom-pm1", "geom-pm01", "incomplete-binary", "complete-binary"};
}

TreeModel builtin_model(std::string_view id) {
  if (id == "geom-pm1")
    return TreeModel::make("geom-pm1", OffspringDistribution::geometric_half(), DisplacementFamily::iid_uniform_pm1());
  if (id == "geom-pm01")
    return TreeModel::make("geom-pm01", OffspringDistribution::geometric_half(), DisplacementFamily::iid_uniform_pm01());
  if (id == "incomplete-binary") return make_incomplete_binary();
  if (id == "complete-binary") return make_complete_binary();
  fail(ErrorKind::config, "unknown builtin model '" + std::string(id) + "'");
}

namespace {

Rational json_rational(const nlohmann::json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  fail(ErrorKind::config, "rationals must be \"num/den\" strings");
}

}  // namespace

TreeModel model_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    const std::string name = j.value("name", std::string("custom"));
    const auto& off = j.at("offspring");
    const std::string okind = off.at("kind").get<std::string>();
    if (okind != "finite-table")
      fail(ErrorKind::config, "model files support only finite-table offspring laws (got '" + okind + "')");
    std::vector<Rational> table;
    for (const auto& x : off.at("table")) table.push_back(json_rational(x));

    const auto& disp = j.at("displacement");
    const std::string dkind = disp.at("kind").get<std::string>();
    DisplacementFamily eta;
    if (dkind == "iid-uniform-pm1") {
      eta = DisplacementFamily::iid_uniform_pm1();
    } else if (dkind == "iid-uniform-pm01") {
      eta = DisplacementFamily::iid_uniform_pm01();
    } else if (dkind == "per-arity-table") {
      std::map<int, std::vector<Entry>> t;
      for (const auto& block : disp.at("table")) {
        const int d = block.at("arity").get<int>();
        if (t.contains(d)) fail(ErrorKind::config, "arity " + std::to_string(d) + " listed twice");
        auto& entries = t[d];
        for (const auto& e : block.at("entries"))
          entries.push_back({e.at("v").get<std::vector<int>>(), json_rational(e.at("p"))});
      }
      eta = DisplacementFamily::per_arity(std::move(t));
    } else {
      fail(ErrorKind::config, "unknown displacement kind '" + dkind + "'");
    }
    return TreeModel::make(name, OffspringDistribution::finite(std::move(table)), std::move(eta));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::config, std::string("model file: ") + e.what());
  }
}

TreeModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

TreeModel resolve_model(std::string_view spec) {
  if (spec.starts_with("builtin:")) return builtin_model(spec.substr(8));
  if (spec.starts_with("file:")) return load_model_file(std::string(spec.substr(5)));
  fail(ErrorKind::config, "model must be given as builtin:<id> or file:<path>");
}

Rational displacement_prob(const TreeModel& model, int d, std::span<const int> v) {
  if (d < 0 || static_cast<int>(v.size()) != d)
    fail(ErrorKind::domain, "displacement vector length " + std::to_string(v.size()) + " differs from arity " + std::to_string(d));
  return model.displacement.prob(v);
}

Rational vertex_factor(const TreeModel& model, const LabelledPlaneTree& t, Vertex v) {
  const auto kids = t.children(v);
  Rational r = model.offspring(static_cast<int>(kids.size()));
  if (r == 0 || kids.empty()) return r;
  std::vector<int> inc;
  inc.reserve(kids.size());
  for (Vertex c : kids) {
    const int d = t.increment(c);
    if (d < -1 || d > 1) return 0;
    inc.push_back(d);
  }
  return r * model.displacement.prob(inc);
}

Rational truncated_weight(const TreeModel& model, const LabelledPlaneTree& t, int level) {
  Rational w = 1;
  for (std::size_t v = 0; v < t.vertex_count() && w != 0; ++v)
    if (t.label(static_cast<Vertex>(v)) != level) w *= vertex_factor(model, t, static_cast<Vertex>(v));
  return w;
}

Rational tree_weight(const TreeModel& model, const LabelledPlaneTree& t) {
  Rational w = 1;
  for (std::size_t v = 0; v < t.vertex_count() && w != 0; ++v) w *= vertex_factor(model, t, static_cast<Vertex>(v));
  return w;
}

Rational excursion_weight(const TreeModel& model, const Excursion& tau) {
  if (auto why = excursion_violation(tau.tree)) fail(ErrorKind::domain, "not an excursion: " + *why);
  return truncated_weight(model, tau.tree, 0);
}

}  // namespace lgw
