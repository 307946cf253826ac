#include "lgw/errors.hpp"
#include "lgw/excursion.hpp"
#include "lgw/genfun.hpp"
#include "lgw/kernel.hpp"
#include "lgw/maps.hpp"
#include "lgw/model.hpp"
#include "lgw/sampler.hpp"
#include "lgw/stats.hpp"
#include "lgw/suites.hpp"
#include "lgw/tree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace lgw;
using json = nlohmann::ordered_json;

constexpr const char* tool_version = "1.0.0";

// Exit codes.
constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

struct Globals {
  SamplerConfig sampler{.seed = 1};
  unsigned workers = 1;
  std::string output;    // empty: standard output
  std::string manifest;  // empty: next to --output, or nowhere
};

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream s;
    s << std::cin.rdbuf();
    return s.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

std::string float_text(const Rational& r) {
  std::ostringstream s;
  s << std::setprecision(17) << to_double(r);
  return s.str();
}

State parse_state(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::config, "state must be written p,q");
  try {
    return {std::stoi(text.substr(0, comma)), std::stoi(text.substr(comma + 1))};
  } catch (const std::exception&) {
    fail(ErrorKind::config, "state must be written p,q");
  }
}

// Results of one command: the text to emit, whether all checks passed, and
// the manifest fields specific to the command.
struct Outcome {
  std::string text;
  bool passed = true;
  json details = json::object();
};

Outcome sample_cmd(const Globals& g, const std::string& model_spec, const std::string& kind, long count,
                   int root_label, int edges) {
  std::vector<std::string> lines(static_cast<std::size_t>(count));
  if (kind == "quadrangulation") {
    parallel_for(lines.size(), g.workers, [&](std::size_t i) {
      const auto s = sample_quadrangulation(g.sampler, i);
      lines[i] = "# sample=" + std::to_string(i) + " tree=" + encode(s.tree) +
                 " orientation=" + std::to_string(s.orientation) + "\n" + to_csv(s.map);
    });
  } else {
    const auto model = resolve_model(model_spec);
    const ModelSampler sampler(model);
    if (kind == "conditioned" && !size_attainable(model, edges))
      fail(ErrorKind::domain, "the model has no tree with " + std::to_string(edges) + " edges");
    parallel_for(lines.size(), g.workers, [&](std::size_t i) {
      Rng rng(g.sampler.seed, i);
      if (kind == "tree") lines[i] = encode(sample_tree(sampler, root_label, rng, g.sampler));
      else if (kind == "excursion+") lines[i] = encode(sample_excursion(sampler, Sign::plus, rng, g.sampler).tree);
      else if (kind == "excursion-") lines[i] = encode(sample_excursion(sampler, Sign::minus, rng, g.sampler).tree);
      else lines[i] = encode(sample_conditioned(sampler, edges, rng, g.sampler));
      lines[i] += '\n';
    });
  }
  Outcome out;
  for (const auto& l : lines) out.text += l;
  out.details = {{"kind", kind}, {"count", count}};
  return out;
}

Outcome decompose_cmd(const std::string& tree_text, int level) {
  const auto t = decode(trim(tree_text));
  const auto d = decompose(t, level);
  const auto counts = excursion_counts(d);
  json forest = json::array();
  for (std::size_t i = 0; i < d.forest.size(); ++i) {
    const auto& v = d.forest.vertices[i];
    forest.push_back({{"vertex", i},
                      {"parent", v.parent},
                      {"sign", v.sign == Sign::plus ? "+" : "-"},
                      {"n", v.decoration.n},
                      {"excursion", encode(v.decoration.tree)}});
  }
  json doc = {{"level", level},
              {"root_component", encode(d.root_component)},
              {"shape", d.forest.shape()},
              {"roots", d.forest.roots.size()},
              {"forest", forest},
              {"counts_plus", counts.plus},
              {"counts_minus", counts.minus}};
  return {doc.dump(2) + "\n", true, {{"level", level}}};
}

Outcome genfun_cmd(const std::string& model_spec, int order, bool closed, bool with_float, const std::string& singular) {
  const auto model = resolve_model(model_spec);
  Outcome out;
  if (!singular.empty()) {
    const Rational z = parse_rational(singular);
    std::ostringstream s;
    s << std::setprecision(12) << "z,singular_coefficient,linear_coefficient\n"
      << to_string(z) << ',' << measured_singular_coefficient(model, z) << ',' << linear_coefficient(model, z) << '\n';
    out.text = s.str();
    out.details = {{"singular_at", to_string(z)}};
    return out;
  }
  const auto series = closed ? closed_form_series(model, order) : solve_nu_gf(model, order);
  out.text = with_float ? "k,coefficient,float\n" : "k,coefficient\n";
  for (int k = 0; k <= order; ++k) {
    out.text += std::to_string(k) + ',' + to_string(series[k]);
    if (with_float) out.text += ',' + float_text(series[k]);
    out.text += '\n';
  }
  out.details = {{"order", order}, {"method", closed ? "closed-form" : "fixed-point"}};
  return out;
}

Outcome kernel_cmd(const Globals& g, const std::string& from_text, int s_max, int steps) {
  const State from = parse_state(from_text);
  if (s_max < 0) fail(ErrorKind::config, "--smax must be nonnegative");
  const auto model = builtin_model("incomplete-binary");
  Outcome out;
  if (steps > 0) {
    // Rows are resolved to a 1e-15 tail, which needs a deeper nu than a printed row.
    const int depth = std::max({s_max, from.q, simulation_nu_order});
    const auto path = simulate_chain(FTable(solve_nu_gf(model, depth), from.p + 1, from.q), from, steps, g.sampler);
    out.text = "step,p,q\n";
    for (std::size_t i = 0; i < path.size(); ++i)
      out.text += std::to_string(i) + ',' + std::to_string(path[i].p) + ',' + std::to_string(path[i].q) + '\n';
    out.details = {{"from", from_text}, {"steps", steps}, {"nu_order", depth}};
    return out;
  }
  const int q_max = std::max(s_max, from.q);
  FTable f(solve_nu_gf(model, q_max), from.p + s_max + 1, q_max);
  const auto row = kernel_row(f, from, s_max);
  out.text = "r,s,probability,float\n";
  for (const auto& c : row.cells)
    out.text += std::to_string(c.to.p) + ',' + std::to_string(c.to.q) + ',' + to_string(c.prob) + ',' + float_text(c.prob) + '\n';
  out.text += "# row mass up to s=" + std::to_string(s_max) + ": " + float_text(row.mass) + '\n';
  out.details = {{"from", from_text}, {"smax", s_max}};
  return out;
}

Outcome verify_cmd(const Globals& g, SuiteOptions opt, const std::vector<std::string>& names) {
  opt.sampler = g.sampler;
  opt.workers = g.workers;
  std::vector<const SuiteInfo*> chosen;
  for (const auto& n : names) {
    if (n == "all")
      for (const auto& s : suites()) chosen.push_back(&s);
    else
      chosen.push_back(&find_suite(n));
  }
  Outcome out;
  json reports = json::array();
  std::ostringstream text;
  for (const auto* s : chosen) {
    const auto r = s->run(opt);
    out.passed = out.passed && r.passed;
    text << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.checks << " checks in " << std::setprecision(3)
         << r.seconds << " s\n";
    for (const auto& n : r.notes) text << "  note: " << n << '\n';
    for (const auto& f : r.failures) text << "  counterexample: " << f << '\n';
    reports.push_back({{"suite", r.name}, {"passed", r.passed}, {"checks", r.checks}});
  }
  out.text = text.str();
  out.details = {{"suites", reports}, {"mutate", opt.mutate}};
  return out;
}

Outcome maps_cmd(const Globals& g, const std::string& action, const std::string& tree_text, int orientation,
                 const std::string& csv_path, int max_faces) {
  Outcome out;
  auto load = [&]() {
    if (!csv_path.empty()) return quadrangulation_from_csv(read_text(csv_path));
    if (!tree_text.empty()) return tree_to_map(decode(trim(tree_text)), orientation);
    return sample_quadrangulation(g.sampler, 0).map;
  };
  if (action == "convert") {
    if (!csv_path.empty()) {
      const auto back = map_to_tree(quadrangulation_from_csv(read_text(csv_path)));
      out.text = encode(back.tree) + " " + std::to_string(back.orientation) + '\n';
    } else {
      out.text = to_csv(load());
    }
  } else if (action == "profile") {
    const auto q = load();
    const auto prof = ball_profile(q);
    const auto rel = verify_profile_relations(q);
    out.text = "# d_star=" + std::to_string(prof.d_star) + " faces=" + std::to_string(q.face_count()) + "\nk,P,C\n";
    for (int k = 1; k <= prof.radius; ++k)
      out.text += std::to_string(k) + ',' + std::to_string(prof.P(k)) + ',' + std::to_string(prof.C(k)) + '\n';
    out.text += "# profile relations: " + std::to_string(rel.checked) + " checked, " +
                std::to_string(rel.mismatches.size()) + " mismatches\n";
    for (const auto& m : rel.mismatches) out.text += "# mismatch: " + m + '\n';
    out.passed = rel.ok();
  } else if (action == "boltzmann") {
    const auto z = boltzmann_constant(max_faces);
    std::ostringstream s;
    s << "n,maps\n";
    for (std::size_t i = 0; i < z.counts.size(); ++i) s << i + 1 << ',' << z.counts[i].get_str() << '\n';
    s << std::setprecision(12) << "# partial=" << to_double(z.partial) << " tail=" << z.tail << " estimate=" << z.estimate
      << '\n';
    out.text = s.str();
  } else {  // sample
    const auto s = sample_quadrangulation(g.sampler, 0);
    out.text = "# tree=" + encode(s.tree) + " orientation=" + std::to_string(s.orientation) + '\n' + to_csv(s.map);
  }
  out.details = {{"action", action}};
  return out;
}

Outcome stats_cmd(const Globals& g, const std::string& model_spec, long trees, int first, int last, long min_visits,
                  bool rows) {
  const auto model = resolve_model(model_spec);
  const ModelSampler sampler(model);
  constexpr std::size_t block = 1000;
  const std::size_t nblocks = (static_cast<std::size_t>(trees) + block - 1) / block;
  std::vector<TransitionCensus> parts(nblocks);
  std::vector<long> discarded(nblocks, 0);
  parallel_for(nblocks, g.workers, [&](std::size_t b) {
    for (std::size_t i = b * block; i < std::min((b + 1) * block, static_cast<std::size_t>(trees)); ++i) {
      Rng rng(g.sampler.seed, i);
      try {
        const auto prof = sample_profile(sampler, rng, g.sampler);
        add_to_census(parts[b], prof, first, last < first ? prof.max_label : last);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::resource) throw;
        ++discarded[b];
      }
    }
  });
  TransitionCensus census;
  long dropped = 0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    census.merge(parts[b]);
    dropped += discarded[b];
  }
  Outcome out;
  out.details = {{"trees", trees}, {"discarded", dropped}, {"first_level", first}, {"last_level", last}};
  if (!rows) {
    out.text = census_csv(census);
    return out;
  }
  // Per-row chi-square against the binary kernel.
  if (model_spec != "builtin:incomplete-binary")
    fail(ErrorKind::unsupported, "kernel rows exist for builtin:incomplete-binary only");
  const int s_cap = default_row_s_cap;
  int P = 1, Q = s_cap;
  for (const auto& [from, row] : census.rows()) {
    if (from.first == 0 || census.row_total(from) < min_visits) continue;
    P = std::max<int>(P, static_cast<int>(from.first));
    Q = std::max<int>(Q, static_cast<int>(from.second));
  }
  const FTable f(solve_nu_gf(model, Q), P + s_cap, Q);
  std::ostringstream s;
  s << std::setprecision(8) << "from_plus,from_minus,visits,statistic,dof,p_value\n";
  for (const auto& [from, row] : census.rows()) {
    if (from.first == 0 || census.row_total(from) < min_visits) continue;
    const auto r = kernel_row_test(f, from, row, s_cap);
    s << from.first << ',' << from.second << ',' << census.row_total(from) << ',' << r.statistic << ',' << r.dof << ','
      << r.p_value << '\n';
  }
  out.text = s.str();
  return out;
}

void write_outputs(const Globals& g, const Outcome& out, const std::vector<std::string>& args,
                   const std::string& command, const std::string& model) {
  if (g.output.empty()) {
    std::cout << out.text;
  } else {
    std::ofstream f(g.output, std::ios::binary);
    if (!f) fail(ErrorKind::config, "cannot write '" + g.output + "'");
    f << out.text;
  }
  std::string manifest = g.manifest;
  if (manifest.empty() && !g.output.empty()) manifest = g.output + ".manifest.json";
  if (manifest.empty()) return;
  json doc = {{"tool", "lgw"},
              {"version", tool_version},
              {"subcommand", command},
              {"model", model},
              {"seed", g.sampler.seed},
              {"vertex_cap", g.sampler.vertex_cap},
              {"rejection_cap", g.sampler.rejection_cap},
              {"workers", g.workers},
              {"output", g.output.empty() ? "-" : g.output},
              {"argv", args},
              {"details", out.details},
              {"passed", out.passed}};
  std::ofstream f(manifest, std::ios::binary);
  if (!f) fail(ErrorKind::config, "cannot write '" + manifest + "'");
  f << doc.dump(2) << '\n';
}

int run(std::vector<std::string> args) {
  // "lgw replay MANIFEST" re-runs the recorded command line.
  if (args.size() == 3 && args[1] == "replay") {
    const auto doc = json::parse(read_text(args[2]), nullptr, false);
    if (doc.is_discarded() || !doc.contains("argv") || !doc["argv"].is_array())
      fail(ErrorKind::parse, "'" + args[2] + "' is not a run manifest");
    std::vector<std::string> again{args[0]};
    for (const auto& a : doc["argv"]) again.push_back(a.get<std::string>());
    return run(std::move(again));
  }
  CLI::App app{"Labelled Galton-Watson trees: sampling, decompositions, kernels and exact checks", "lgw"};
  app.footer("lgw replay MANIFEST re-runs the command recorded in a manifest.");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.set_version_flag("--version", tool_version);
  Globals g;
  app.add_option("--seed", g.sampler.seed, "64-bit RNG seed")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_option("--vertex-cap", g.sampler.vertex_cap, "abort a sample above this many vertices")->capture_default_str();
  app.add_option("--rejection-cap", g.sampler.rejection_cap, "attempts allowed for conditioned sampling")
      ->capture_default_str();
  app.add_option("-o,--output", g.output, "write results here instead of standard output");
  app.add_option("--manifest", g.manifest, "write the run manifest here (default: <output>.manifest.json)");

  std::string model, kind = "tree", tree_text, csv_path, from = "1,0", singular, action = "sample";
  long count = 1, trees = 100'000, min_visits = 500;
  int root_label = 0, edges = 0, level = 1, order = 20, s_max = 10, steps = 0, orientation = 1, max_faces = 5;
  int first = 1, last = 0;
  bool closed = false, with_float = false, rows = false, list = false;
  std::vector<std::string> suite_names;
  SuiteOptions sopt;

  auto* sample = app.add_subcommand("sample", "draw trees, excursions or quadrangulations");
  sample->add_option("--model", model, "builtin:<id> or file:<path> (not needed for quadrangulations)");
  sample->add_option("--kind", kind, "what to draw")
      ->check(CLI::IsMember({"tree", "excursion+", "excursion-", "conditioned", "quadrangulation"}))
      ->capture_default_str();
  sample->add_option("--count", count, "number of samples")->check(CLI::PositiveNumber)->capture_default_str();
  sample->add_option("--root-label", root_label, "root label for --kind tree")->capture_default_str();
  sample->add_option("--edges", edges, "edge count for --kind conditioned")->check(CLI::NonNegativeNumber);

  auto* dec = app.add_subcommand("decompose", "excursion forest of a tree at a level");
  dec->add_option("--tree", tree_text, "tree in the text grammar (default: read standard input)");
  dec->add_option("--level", level, "nonzero level m")->capture_default_str();

  auto* gf = app.add_subcommand("genfun", "coefficients of the generating function of nu");
  gf->add_option("--model", model, "builtin:<id> or file:<path>")->required();
  gf->add_option("--order", order, "truncation order")->check(CLI::NonNegativeNumber)->capture_default_str();
  gf->add_flag("--closed-form", closed, "expand the closed form instead of iterating the fixed point");
  gf->add_flag("--float", with_float, "append a floating-point column");
  gf->add_option("--singular", singular, "evaluate the singular and linear coefficients at this z (e.g. 9999/10000)");

  auto* ker = app.add_subcommand("kernel", "transition kernel row of the binary edge-profile chain");
  ker->add_option("--from", from, "from-state p,q")->capture_default_str();
  ker->add_option("--smax", s_max, "largest s listed")->capture_default_str();
  ker->add_option("--simulate", steps, "emit a simulated path of this many steps instead")->check(CLI::NonNegativeNumber);

  auto* ver = app.add_subcommand("verify", "run named verification suites");
  ver->add_option("--suite", suite_names, "suite name, repeatable, or 'all'");
  ver->add_flag("--list", list, "list the suites");
  ver->add_flag("--mutate", sopt.mutate, "corrupt the formula under test (negative control)");
  ver->add_option("--max-pq", sopt.max_pq, "counting-lemma bound on p+q")->capture_default_str();
  ver->add_option("--max-p", sopt.max_p, "marked-forest bound on p")->capture_default_str();
  ver->add_option("--max-s", sopt.max_s, "marked-forest bound on s")->capture_default_str();
  ver->add_option("--min-v", sopt.min_v, "conditioned-kernel smallest V")->capture_default_str();
  ver->add_option("--max-v", sopt.max_v, "conditioned-kernel largest V")->capture_default_str();
  ver->add_option("--max-edges", sopt.max_edges, "enumeration bound for round-trip and schaeffer")->capture_default_str();
  ver->add_option("--profile-edges", sopt.profile_edges, "enumeration bound for profile-count")->capture_default_str();
  ver->add_option("--order", sopt.series_order, "series order for genfun")->capture_default_str();
  ver->add_option("--samples", sopt.samples, "sampled trees or maps per model")->capture_default_str();
  ver->add_option("--trees", sopt.trees, "trees for the Monte Carlo suites")->capture_default_str();
  ver->add_option("--min-visits", sopt.min_visits, "rows tested by kernel-mc need this many visits")->capture_default_str();
  ver->add_option("--alpha", sopt.alpha, "significance level")->capture_default_str();

  auto* maps = app.add_subcommand("maps", "quadrangulations: sample, convert, profile, boltzmann");
  maps->add_option("action", action, "what to do")
      ->check(CLI::IsMember({"sample", "convert", "profile", "boltzmann"}))
      ->capture_default_str();
  maps->add_option("--tree", tree_text, "build the map of this tree");
  maps->add_option("--orientation", orientation, "root orientation, 1 or -1")->check(CLI::IsMember({1, -1}));
  maps->add_option("--csv", csv_path, "read a map from this CSV file ('-' for standard input)");
  maps->add_option("--max-faces", max_faces, "exhaustion bound for boltzmann")->capture_default_str();

  auto* st = app.add_subcommand("stats", "transition census of the edge profile over sampled trees");
  st->add_option("--model", model, "builtin:<id> or file:<path>")->required();
  st->add_option("--trees", trees, "number of trees")->check(CLI::PositiveNumber)->capture_default_str();
  st->add_option("--first", first, "first level")->check(CLI::PositiveNumber)->capture_default_str();
  st->add_option("--last", last, "last level (default: each tree's maximum label)");
  st->add_option("--min-visits", min_visits, "rows reported by --rows need this many visits")->capture_default_str();
  st->add_flag("--rows", rows, "chi-square per row against the binary kernel instead of the raw census");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << e.what() << '\n';
    return exit_usage;
  }

  const std::vector<std::string> argv_rest(args.begin() + 1, args.end());
  const auto* cmd = app.get_subcommands().front();
  Outcome out;
  if (cmd == sample) {
    if (kind != "quadrangulation" && model.empty()) fail(ErrorKind::config, "--model is required for --kind " + kind);
    if (kind == "conditioned" && sample->count("--edges") == 0) fail(ErrorKind::config, "--edges is required");
    out = sample_cmd(g, model, kind, count, root_label, edges);
  } else if (cmd == dec) {
    if (level == 0) fail(ErrorKind::config, "--level must be nonzero");
    out = decompose_cmd(tree_text.empty() ? read_text("-") : tree_text, level);
  } else if (cmd == gf) {
    out = genfun_cmd(model, order, closed, with_float, singular);
  } else if (cmd == ker) {
    out = kernel_cmd(g, from, s_max, steps);
  } else if (cmd == ver) {
    if (list) {
      for (const auto& s : suites()) out.text += s.name + ": " + s.summary + '\n';
    } else {
      if (suite_names.empty()) fail(ErrorKind::config, "--suite is required (or --list)");
      out = verify_cmd(g, sopt, suite_names);
    }
  } else if (cmd == maps) {
    out = maps_cmd(g, action, tree_text, orientation, csv_path, max_faces);
  } else {
    out = stats_cmd(g, model, trees, first, last, min_visits, rows);
  }
  write_outputs(g, out, argv_rest, cmd->get_name(), model);
  return out.passed ? exit_ok : exit_failed;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return run(std::move(args));
  } catch (const lgw::Error& e) {
    std::cerr << "error[" << lgw::to_string(e.kind()) << "]: " << e.what() << '\n';
    const auto k = e.kind();
    return k == lgw::ErrorKind::config || k == lgw::ErrorKind::parse ? exit_usage : exit_failed;
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << '\n';
    return exit_failed;
  }
}
