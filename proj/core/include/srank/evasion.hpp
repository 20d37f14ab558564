#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srank/corpus.hpp"
#include "srank/scoring.hpp"

namespace srank {

// One per-metric manipulation from the threat model. Everything operates on
// metadata snapshots only; nothing is ever published anywhere.
enum class TechniqueKind {
  add_basic_info,
  url_confusion,
  new_repo,
  add_readme,
  multiple_versions,
  follow_semver,
  recent_release,
  age_package,
  version_ge_1,
  create_dependents,
  create_dependent_repos,
  fake_stars,
  fake_contributors,
  fake_subscribers,
  avoid_prereleases,
  update_dependencies,
  avoid_removal,
};

const char* to_string(TechniqueKind kind);

struct Technique {
  TechniqueKind kind = TechniqueKind::add_basic_info;
  std::int64_t count = 0;             // budget for create_*/fake_* techniques
  std::optional<RepoSnapshot> victim; // url_confusion target
  std::int64_t repo_stars = 0;        // new_repo parameters
  std::int64_t repo_contributors = 0;
  bool repo_readme = false;

  static Technique simple(TechniqueKind kind);
  static Technique url_confusion(RepoSnapshot victim);
  static Technique new_repo(std::int64_t stars, std::int64_t contributors, bool readme);
  static Technique with_count(TechniqueKind kind, std::int64_t count);
};

struct EvasionStep {
  Technique technique;
  int score_before = 0;
  int score_after = 0;
  int delta = 0;        // score_after - score_before
  bool applied = false; // false => inputs unchanged and delta == 0
};

struct EvasionReport {
  std::vector<EvasionStep> steps;
  int initial_score = 0;
  int final_score = 0;
};

struct EvasionOutcome {
  PackageSnapshot package;
  std::optional<RepoSnapshot> repo;
  EvasionStep step;
};

// Applies one technique to copies of the inputs. A rational attacker never
// makes things worse: when the projected delta is negative, or the technique
// cannot change anything, the inputs come back untouched with applied=false.
EvasionOutcome apply_technique(const PackageSnapshot& pkg,
                               const std::optional<RepoSnapshot>& repo,
                               const Technique& technique, UtcTime now,
                               const DependencyIndex* index = nullptr);

// Greedy in-order application of the given techniques, rescoring after each.
// Every recorded delta is >= 0, so final_score >= initial_score.
EvasionReport plan_max_inflation(const PackageSnapshot& pkg,
                                 const std::optional<RepoSnapshot>& repo,
                                 const std::vector<Technique>& techniques, UtcTime now,
                                 const DependencyIndex* index = nullptr);

struct AttackBudget {
  std::int64_t victim_stars = 5000;
  std::int64_t victim_contributors = 50;
  bool victim_readme = true;
  std::string victim_url = "https://github.com/example/victim";
  std::int64_t dependents = 100;
  std::int64_t dependent_repos = 10;
  std::int64_t subscribers = 10;
};

// The full technique stack in a fixed order, budgets defaulting to the
// victim statistics observed in the wild.
std::vector<Technique> default_technique_stack(const AttackBudget& budget = {});

// Step table as CSV: technique,score_before,score_after,delta,applied.
std::string render_evasion_csv(const EvasionReport& report);

// The same report as one JSON object: initial/final scores plus the
// ordered step list.
std::string render_evasion_json(const EvasionReport& report);

}  // namespace srank
