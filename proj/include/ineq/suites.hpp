#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ineq/rng.hpp"

namespace ineq {

/// Outcome of a randomized inequality suite. A trial is a violation when its
/// margin falls below -1e-10 * max(1, scale), with scale the natural
/// homogeneity scale of the inequality (absolute 1e-12 for the metric suite).
struct LemmaVerdict {
  std::string lemma_id;
  long long trials = 0;
  long long violations = 0;
  double worst_margin = 0.0;
  nlohmann::json params_of_worst;
  std::string notes;
};

/// IDs: phi-cone | ft-convex | psi-convex | subadd | varp-subadd | cn |
/// rho-metric | lemma8 | lemma9 | lemma10 | lemma11 | selftest-fail.
LemmaVerdict run_lemma_suite(const std::string& id, long long trials, Seed seed);

std::vector<std::string> lemma_suite_ids();

}  // namespace ineq
