#pragma once

#include "lgw/random.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lgw {

struct SuiteReport {
  std::string name;
  bool passed = true;
  long checks = 0;
  std::vector<std::string> failures{};// first few counterexamples
  std::vector<std::string> notes{};  // measured quantities
  double seconds = 0;

  void fail_with(std::string what);
};

struct SuiteOptions {
  SamplerConfig sampler;
  unsigned workers = 1;
  // Deliberately corrupts the formula under test (negative control).
  bool mutate = false;
  int max_pq = 7;           // counting-lemma
  int max_p = 3;            // marked-forest
  int max_s = 4;            // marked-forest
  int min_v = 2;            // conditioned-kernel
  int max_v = 8;            // conditioned-kernel
  int max_edges = 6;        // round-trip, schaeffer
  int profile_edges = 5;    // profile-count
  int series_order = 40;    // genfun
  long samples = 10'000;    // round-trip, schaeffer
  std::uint64_t check_vertex_cap = 100'000;  // round-trip, schaeffer samples
  long trees = 100'000;     // kernel-mc, forest-law
  long min_visits = 500;    // kernel-mc
  double alpha = 1e-3;      // kernel-mc, forest-law
};

using SuiteRunner = std::function<SuiteReport(const SuiteOptions&)>;

struct SuiteInfo {
  std::string name;
  std::string summary;
  SuiteRunner run;
};

const std::vector<SuiteInfo>& suites();
const SuiteInfo& find_suite(const std::string& name);

SuiteReport genfun_suite(const SuiteOptions& opt);
SuiteReport counting_lemma_suite(const SuiteOptions& opt);
SuiteReport marked_forest_suite(const SuiteOptions& opt);
SuiteReport conditioned_kernel_suite(const SuiteOptions& opt);
SuiteReport kernel_mc_suite(const SuiteOptions& opt);
SuiteReport round_trip_suite(const SuiteOptions& opt);
SuiteReport forest_law_suite(const SuiteOptions& opt);
SuiteReport schaeffer_suite(const SuiteOptions& opt);
SuiteReport profile_count_suite(const SuiteOptions& opt);

}  // namespace lgw
