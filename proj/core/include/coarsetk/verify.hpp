#pragma once

#include <string>
#include <vector>

#include "coarsetk/budget.hpp"

namespace coarsetk {

/// One verdict of a verification suite. `detail` is deterministic for a
/// fixed seed: counts and exact values only, never timings or addresses.
struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckOutcome> checks;

  int passed() const;
  bool all_pass() const;
};

/// Runs one of the verification suites:
///  - "lemmas":   seeded randomized sweeps of the cover-pushforward
///                inequalities and the composition/product certificate
///                closures (zero tolerated violations);
///  - "examples": the stock structures end to end (validation, quotient
///                certificates, section identities, control fits);
///  - "builders": the inductive constructions end to end, including the
///                negative provider-claim demo;
///  - "all":      the three above concatenated in that order.
SuiteReport run_suite(const std::string& suite, std::uint64_t seed, const Budget& budget);

/// Canonical text form: one line per check, byte-stable across runs.
std::string render_report(const SuiteReport& rep);

}  // namespace coarsetk
