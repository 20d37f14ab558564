#include "srank/evasion.hpp"

#include <algorithm>

#include <json.hpp>

namespace srank {

namespace {

// Highest non-prerelease core among the parseable releases, if any.
std::optional<semver::Version> max_parseable_core(const PackageSnapshot& pkg) {
  std::optional<semver::Version> best;
  for (const Release& release : pkg.releases) {
    const auto parsed = semver::parse(release.version_text);
    if (!parsed.ok()) continue;
    semver::Version core{parsed.version->major, parsed.version->minor,
                         parsed.version->patch, {}, {}};
    if (!best || semver::compare(core, *best) > 0) best = std::move(core);
  }
  return best;
}

void append_release(PackageSnapshot& pkg, std::string version_text, UtcTime at) {
  pkg.releases.push_back(make_release(std::move(version_text), at));
  std::stable_sort(pkg.releases.begin(), pkg.releases.end(),
                   [](const Release& a, const Release& b) {
                     return a.published_at < b.published_at;
                   });
  pkg.captured_at = std::max(pkg.captured_at, at);
}

std::string bumped_patch(const std::optional<semver::Version>& core) {
  if (!core) return "0.0.1";
  semver::Version next = *core;
  ++next.patch;
  return next.to_string();
}

// Mutates copies of (pkg, repo) according to the technique. Returns false
// when the technique has no way to act (e.g. add_readme without a repo).
bool mutate(PackageSnapshot& pkg, std::optional<RepoSnapshot>& repo,
            const Technique& technique, UtcTime now, const DependencyIndex* index) {
  switch (technique.kind) {
    case TechniqueKind::add_basic_info: {
      if (!pkg.description || pkg.description->empty())
        pkg.description = "Fast, reliable utility library for modern Python projects";
      if (pkg.keywords.empty()) pkg.keywords = {"http", "requests", "api", "utils"};
      if ((!pkg.homepage_url || pkg.homepage_url->empty()) &&
          (!pkg.repo_url || pkg.repo_url->empty()))
        pkg.homepage_url = "https://" + pkg.normalized_name + ".readthedocs.io";
      return true;
    }
    case TechniqueKind::url_confusion: {
      if (!technique.victim) return false;
      pkg.repo_url = technique.victim->url;
      repo = technique.victim;
      return true;
    }
    case TechniqueKind::new_repo: {
      RepoSnapshot fresh;
      fresh.host = "github.com";
      fresh.owner = pkg.normalized_name;
      fresh.name = pkg.normalized_name;
      fresh.url = "https://github.com/" + fresh.owner + "/" + fresh.name;
      fresh.stars = technique.repo_stars;
      fresh.contributors_count = technique.repo_contributors;
      fresh.has_readme = technique.repo_readme;
      fresh.manifest_package_names = {pkg.normalized_name};
      fresh.captured_at = now;
      pkg.repo_url = fresh.url;
      repo = std::move(fresh);
      return true;
    }
    case TechniqueKind::add_readme: {
      if (!repo) return false;
      repo->has_readme = true;
      return true;
    }
    case TechniqueKind::multiple_versions: {
      append_release(pkg, bumped_patch(max_parseable_core(pkg)), now);
      return true;
    }
    case TechniqueKind::follow_semver: {
      auto core = max_parseable_core(pkg);
      bool changed = false;
      for (Release& release : pkg.releases) {
        if (semver::parse(release.version_text).ok()) continue;
        const std::string text = bumped_patch(core);
        core = *semver::parse(text).version;
        release = make_release(text, release.published_at);
        changed = true;
      }
      return changed;
    }
    case TechniqueKind::recent_release: {
      append_release(pkg, bumped_patch(max_parseable_core(pkg)), now);
      return true;
    }
    case TechniqueKind::age_package: {
      if (pkg.releases.empty()) return false;
      const UtcTime target = now.minus_days(semver::kSixMonthsDays + 1);
      if (pkg.releases.front().published_at <= target) return false;
      pkg.releases.front().published_at = target;  // back-date, stays earliest
      return true;
    }
    case TechniqueKind::version_ge_1: {
      if (semver::release_flags(pkg.releases, now).ge_1_0_0) return false;
      static const semver::Version one{1, 0, 0, {}, {}};
      const auto core = max_parseable_core(pkg);
      std::string text;
      if (!core || semver::compare(*core, one) < 0)
        text = "1.0.0";
      else
        text = bumped_patch(core);
      append_release(pkg, std::move(text), now);
      return true;
    }
    case TechniqueKind::create_dependents: {
      pkg.dependents_count = std::max(pkg.dependents_count, technique.count);
      return true;
    }
    case TechniqueKind::create_dependent_repos: {
      pkg.dependent_repos_count = std::max(pkg.dependent_repos_count, technique.count);
      return true;
    }
    case TechniqueKind::fake_stars: {
      if (!repo) return false;
      repo->stars = std::max(repo->stars, technique.count);
      return true;
    }
    case TechniqueKind::fake_contributors: {
      if (!repo) return false;
      repo->contributors_count = std::max(repo->contributors_count, technique.count);
      return true;
    }
    case TechniqueKind::fake_subscribers: {
      pkg.subscribers_count = std::max(pkg.subscribers_count, technique.count);
      return true;
    }
    case TechniqueKind::avoid_prereleases: {
      if (pkg.releases.empty()) return false;
      Release& latest = pkg.releases.back();
      const auto parsed = semver::parse(latest.version_text);
      if (!parsed.ok() || !parsed.version->is_prerelease()) return false;
      semver::Version stripped = *parsed.version;
      stripped.prerelease.clear();
      latest = make_release(stripped.to_string(), latest.published_at);
      return true;
    }
    case TechniqueKind::update_dependencies: {
      if (!index) return false;
      bool changed = false;
      for (Dependency& dep : pkg.dependencies) {
        const auto it = index->latest.find(normalize_name(dep.name));
        if (it == index->latest.end()) continue;
        if (!constraint_excludes(dep.constraint, it->second)) continue;
        dep.constraint = "==" + it->second.to_string();
        changed = true;
      }
      return changed;
    }
    case TechniqueKind::avoid_removal: {
      if (pkg.status == PackageStatus::active) return false;
      pkg.status = PackageStatus::active;
      return true;
    }
  }
  return false;
}

}  // namespace

const char* to_string(TechniqueKind kind) {
  switch (kind) {
    case TechniqueKind::add_basic_info: return "add_basic_info";
    case TechniqueKind::url_confusion: return "url_confusion";
    case TechniqueKind::new_repo: return "new_repo";
    case TechniqueKind::add_readme: return "add_readme";
    case TechniqueKind::multiple_versions: return "multiple_versions";
    case TechniqueKind::follow_semver: return "follow_semver";
    case TechniqueKind::recent_release: return "recent_release";
    case TechniqueKind::age_package: return "age_package";
    case TechniqueKind::version_ge_1: return "version_ge_1";
    case TechniqueKind::create_dependents: return "create_dependents";
    case TechniqueKind::create_dependent_repos: return "create_dependent_repos";
    case TechniqueKind::fake_stars: return "fake_stars";
    case TechniqueKind::fake_contributors: return "fake_contributors";
    case TechniqueKind::fake_subscribers: return "fake_subscribers";
    case TechniqueKind::avoid_prereleases: return "avoid_prereleases";
    case TechniqueKind::update_dependencies: return "update_dependencies";
    case TechniqueKind::avoid_removal: return "avoid_removal";
  }
  return "unknown";
}

Technique Technique::simple(TechniqueKind kind) {
  Technique t;
  t.kind = kind;
  return t;
}

Technique Technique::url_confusion(RepoSnapshot victim) {
  Technique t;
  t.kind = TechniqueKind::url_confusion;
  t.victim = std::move(victim);
  return t;
}

Technique Technique::new_repo(std::int64_t stars, std::int64_t contributors, bool readme) {
  if (stars < 0 || contributors < 0)
    throw Error(ErrorKind::Usage, "technique parameters must be >= 0");
  Technique t;
  t.kind = TechniqueKind::new_repo;
  t.repo_stars = stars;
  t.repo_contributors = contributors;
  t.repo_readme = readme;
  return t;
}

Technique Technique::with_count(TechniqueKind kind, std::int64_t count) {
  if (count < 0) throw Error(ErrorKind::Usage, "technique parameters must be >= 0");
  Technique t;
  t.kind = kind;
  t.count = count;
  return t;
}

EvasionOutcome apply_technique(const PackageSnapshot& pkg,
                               const std::optional<RepoSnapshot>& repo,
                               const Technique& technique, UtcTime now,
                               const DependencyIndex* index) {
  const int before = score_breakdown(pkg, repo, now, index).total;

  PackageSnapshot mutated_pkg = pkg;
  std::optional<RepoSnapshot> mutated_repo = repo;
  const bool acted = mutate(mutated_pkg, mutated_repo, technique, now, index);

  EvasionOutcome outcome;
  outcome.step.technique = technique;
  outcome.step.score_before = before;

  const bool unchanged = !acted || (mutated_pkg == pkg && mutated_repo == repo);
  const int after =
      unchanged ? before : score_breakdown(mutated_pkg, mutated_repo, now, index).total;

  if (unchanged || after < before) {
    outcome.package = pkg;
    outcome.repo = repo;
    outcome.step.score_after = before;
    outcome.step.delta = 0;
    outcome.step.applied = false;
  } else {
    outcome.package = std::move(mutated_pkg);
    outcome.repo = std::move(mutated_repo);
    outcome.step.score_after = after;
    outcome.step.delta = after - before;
    outcome.step.applied = true;
  }
  return outcome;
}

EvasionReport plan_max_inflation(const PackageSnapshot& pkg,
                                 const std::optional<RepoSnapshot>& repo,
                                 const std::vector<Technique>& techniques, UtcTime now,
                                 const DependencyIndex* index) {
  EvasionReport report;
  report.initial_score = score_breakdown(pkg, repo, now, index).total;

  PackageSnapshot current_pkg = pkg;
  std::optional<RepoSnapshot> current_repo = repo;
  for (const Technique& technique : techniques) {
    EvasionOutcome outcome = apply_technique(current_pkg, current_repo, technique, now, index);
    current_pkg = std::move(outcome.package);
    current_repo = std::move(outcome.repo);
    report.steps.push_back(std::move(outcome.step));
  }
  report.final_score =
      report.steps.empty() ? report.initial_score : report.steps.back().score_after;
  return report;
}

std::vector<Technique> default_technique_stack(const AttackBudget& budget) {
  RepoSnapshot victim;
  victim.url = budget.victim_url;
  victim.host = "github.com";
  victim.stars = budget.victim_stars;
  victim.contributors_count = budget.victim_contributors;
  victim.has_readme = budget.victim_readme;

  std::vector<Technique> stack;
  stack.push_back(Technique::simple(TechniqueKind::add_basic_info));
  stack.push_back(Technique::url_confusion(std::move(victim)));
  stack.push_back(Technique::simple(TechniqueKind::add_readme));
  stack.push_back(Technique::simple(TechniqueKind::multiple_versions));
  stack.push_back(Technique::simple(TechniqueKind::follow_semver));
  stack.push_back(Technique::simple(TechniqueKind::recent_release));
  stack.push_back(Technique::simple(TechniqueKind::age_package));
  stack.push_back(Technique::simple(TechniqueKind::version_ge_1));
  stack.push_back(Technique::simple(TechniqueKind::avoid_prereleases));
  stack.push_back(Technique::with_count(TechniqueKind::create_dependents, budget.dependents));
  stack.push_back(
      Technique::with_count(TechniqueKind::create_dependent_repos, budget.dependent_repos));
  stack.push_back(Technique::with_count(TechniqueKind::fake_subscribers, budget.subscribers));
  stack.push_back(Technique::simple(TechniqueKind::update_dependencies));
  stack.push_back(Technique::simple(TechniqueKind::avoid_removal));
  return stack;
}

std::string render_evasion_csv(const EvasionReport& report) {
  std::string out = "technique,score_before,score_after,delta,applied\n";
  for (const EvasionStep& step : report.steps) {
    out += to_string(step.technique.kind);
    out += ',';
    out += std::to_string(step.score_before);
    out += ',';
    out += std::to_string(step.score_after);
    out += ',';
    out += std::to_string(step.delta);
    out += ',';
    out += step.applied ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string render_evasion_json(const EvasionReport& report) {
  nlohmann::ordered_json obj;
  obj["initial_score"] = report.initial_score;
  obj["final_score"] = report.final_score;
  obj["steps"] = nlohmann::ordered_json::array();
  for (const EvasionStep& step : report.steps) {
    nlohmann::ordered_json s;
    s["technique"] = to_string(step.technique.kind);
    s["score_before"] = step.score_before;
    s["score_after"] = step.score_after;
    s["delta"] = step.delta;
    s["applied"] = step.applied;
    obj["steps"].push_back(std::move(s));
  }
  return obj.dump();
}

}  // namespace srank
