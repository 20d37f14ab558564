#include "srank/confusion.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

namespace srank {

namespace {

std::vector<std::string_view> hyphen_tokens(std::string_view name) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start <= name.size()) {
    const std::size_t dash = name.find('-', start);
    if (dash == std::string_view::npos) {
      if (start < name.size()) tokens.push_back(name.substr(start));
      break;
    }
    if (dash > start) tokens.push_back(name.substr(start, dash - start));
    start = dash + 1;
  }
  return tokens;
}

bool ends_with_tokens(const std::vector<std::string_view>& haystack,
                      const std::vector<std::string_view>& needle) {
  if (needle.empty() || haystack.size() <= needle.size()) return false;
  return std::equal(needle.rbegin(), needle.rend(), haystack.rbegin());
}

bool starts_with_tokens(const std::vector<std::string_view>& haystack,
                        const std::vector<std::string_view>& needle) {
  if (needle.empty() || haystack.size() <= needle.size()) return false;
  return std::equal(needle.begin(), needle.end(), haystack.begin());
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

const char* to_string(NameRelationKind kind) {
  switch (kind) {
    case NameRelationKind::exact: return "exact";
    case NameRelationKind::prefix_augmented: return "prefix_augmented";
    case NameRelationKind::suffix_augmented: return "suffix_augmented";
    case NameRelationKind::small_edit: return "small_edit";
    case NameRelationKind::unrelated: return "unrelated";
  }
  return "unknown";
}

const char* to_string(ClaimVerdict verdict) {
  switch (verdict) {
    case ClaimVerdict::verified: return "verified";
    case ClaimVerdict::confused: return "confused";
    case ClaimVerdict::unverifiable: return "unverifiable";
  }
  return "unknown";
}

int damerau_levenshtein(std::string_view a, std::string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);

  // Three rolling rows of the optimal-string-alignment recurrence.
  std::vector<int> prev2(m + 1), prev(m + 1), curr(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);

  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        curr[j] = std::min(curr[j], prev2[j - 2] + 1);
    }
    std::swap(prev2, prev);
    std::swap(prev, curr);
  }
  return prev[m];
}

NameRelation name_relation(std::string_view pkg_name, std::string_view target_name) {
  NameRelation relation;
  const std::string pkg_stripped = separator_stripped(pkg_name);
  const std::string target_stripped = separator_stripped(target_name);
  relation.edit_distance = damerau_levenshtein(pkg_stripped, target_stripped);

  if (pkg_name == target_name) {
    relation.kind = NameRelationKind::exact;
    relation.edit_distance = 0;
    relation.detail = "names are identical";
    return relation;
  }

  const auto pkg_tokens = hyphen_tokens(pkg_name);
  const auto target_tokens = hyphen_tokens(target_name);
  if (ends_with_tokens(pkg_tokens, target_tokens)) {
    relation.kind = NameRelationKind::prefix_augmented;
    relation.detail = std::string(pkg_name) + " prepends tokens to " + std::string(target_name);
    return relation;
  }
  if (starts_with_tokens(pkg_tokens, target_tokens)) {
    relation.kind = NameRelationKind::suffix_augmented;
    relation.detail = std::string(pkg_name) + " appends tokens to " + std::string(target_name);
    return relation;
  }
  if (relation.edit_distance == 1) {
    relation.kind = NameRelationKind::small_edit;
    relation.detail = "edit distance 1 between " + pkg_stripped + " and " + target_stripped;
    return relation;
  }

  relation.kind = NameRelationKind::unrelated;
  relation.detail = "no name relation";
  return relation;
}

std::string RepoRef::key() const {
  return lowercase(host) + "/" + lowercase(owner) + "/" + lowercase(name);
}

std::string RepoRef::display() const { return owner + "/" + name; }

std::optional<RepoRef> parse_repo_url(std::string_view url) {
  // Strip scheme and the occasional "git@host:" form.
  if (const auto scheme = url.find("://"); scheme != std::string_view::npos)
    url = url.substr(scheme + 3);
  if (url.rfind("git@", 0) == 0) {
    url = url.substr(4);
    if (const auto colon = url.find(':'); colon != std::string_view::npos) {
      std::string flattened = std::string(url.substr(0, colon)) + "/" +
                              std::string(url.substr(colon + 1));
      return parse_repo_url(flattened);
    }
  }
  if (url.rfind("www.", 0) == 0) url = url.substr(4);

  // Cut query and fragment.
  if (const auto q = url.find_first_of("?#"); q != std::string_view::npos)
    url = url.substr(0, q);

  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= url.size()) {
    const std::size_t slash = url.find('/', start);
    if (slash == std::string_view::npos) {
      if (start < url.size()) parts.push_back(url.substr(start));
      break;
    }
    if (slash > start) parts.push_back(url.substr(start, slash - start));
    start = slash + 1;
  }
  if (parts.size() < 3) return std::nullopt;
  if (parts[0].find('.') == std::string_view::npos) return std::nullopt;

  RepoRef ref;
  ref.host = lowercase(parts[0]);
  ref.owner = std::string(parts[1]);
  ref.name = std::string(parts[2]);
  if (ref.name.size() > 4 && ref.name.ends_with(".git"))
    ref.name.resize(ref.name.size() - 4);
  if (ref.owner.empty() || ref.name.empty()) return std::nullopt;
  return ref;
}

RepoRegistry RepoRegistry::from_entries(std::vector<RegistryEntry> entries) {
  RepoRegistry registry;
  for (RegistryEntry& entry : entries) {
    const auto ref = parse_repo_url(entry.repo_url);
    if (!ref)
      throw Error(ErrorKind::Parse, "registry url does not name a repository: " + entry.repo_url);
    entry.package_name = normalize_name(entry.package_name);
    const auto [it, inserted] = registry.by_key_.emplace(ref->key(), std::move(entry));
    if (!inserted)
      throw Error(ErrorKind::Duplicate, "registry maps " + ref->key() + " twice");
  }
  for (const auto& [key, entry] : registry.by_key_)
    registry.owner_names_.push_back(entry.package_name);
  std::sort(registry.owner_names_.begin(), registry.owner_names_.end());
  registry.owner_names_.erase(
      std::unique(registry.owner_names_.begin(), registry.owner_names_.end()),
      registry.owner_names_.end());
  return registry;
}

RepoRegistry RepoRegistry::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::NotFound, "no such file: " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open for reading: " + path.string());
  std::vector<RegistryEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("repo_url") ||
        !obj.contains("package_name"))
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": expected {repo_url, package_name, stars}");
    RegistryEntry entry;
    entry.repo_url = obj["repo_url"].get<std::string>();
    entry.package_name = obj["package_name"].get<std::string>();
    entry.stars = obj.value("stars", std::int64_t{0});
    entries.push_back(std::move(entry));
  }
  return from_entries(std::move(entries));
}

const RegistryEntry* RepoRegistry::find(std::string_view repo_url) const {
  const auto ref = parse_repo_url(repo_url);
  if (!ref) return nullptr;
  const auto it = by_key_.find(ref->key());
  return it == by_key_.end() ? nullptr : &it->second;
}

CorrelationScore correlate_releases(std::span<const Release> releases,
                                    std::span<const TagRef> tags) {
  CorrelationScore score;
  score.total = static_cast<int>(releases.size());
  if (releases.empty() || tags.empty()) return score;

  struct Candidate {
    std::int64_t distance;
    std::size_t release_idx;
    std::size_t tag_idx;
  };
  std::vector<Candidate> candidates;
  for (std::size_t r = 0; r < releases.size(); ++r) {
    for (std::size_t t = 0; t < tags.size(); ++t) {
      const std::int64_t distance =
          std::llabs(releases[r].published_at.secs - tags[t].timestamp.secs);
      if (distance <= kCorrelationWindowSecs) candidates.push_back({distance, r, t});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.release_idx != b.release_idx) return a.release_idx < b.release_idx;
    return a.tag_idx < b.tag_idx;
  });

  std::vector<bool> release_used(releases.size(), false);
  std::vector<bool> tag_used(tags.size(), false);
  for (const Candidate& candidate : candidates) {
    if (release_used[candidate.release_idx] || tag_used[candidate.tag_idx]) continue;
    release_used[candidate.release_idx] = true;
    tag_used[candidate.tag_idx] = true;
    ++score.matched;
  }
  score.score = static_cast<double>(score.matched) / static_cast<double>(score.total);
  return score;
}

ConfusionVerdict classify_repo_claim(const PackageSnapshot& pkg,
                                     const std::optional<RepoSnapshot>& repo,
                                     const RepoRegistry& registry) {
  ConfusionVerdict result;

  if (!pkg.repo_url || pkg.repo_url->empty()) {
    result.verdict = ClaimVerdict::unverifiable;
    result.evidence.push_back({"no_claim", "package declares no repository URL", false});
    return result;
  }

  const auto claimed = parse_repo_url(*pkg.repo_url);

  // Rule 1: registry ownership is ground truth.
  const RegistryEntry* owner = registry.find(*pkg.repo_url);
  if (owner) {
    if (owner->package_name == pkg.normalized_name) {
      result.verdict = ClaimVerdict::verified;
      result.evidence.push_back(
          {"registry", "repository is owned by this package (" + owner->package_name + ")",
           true});
      return result;
    }
    result.verdict = ClaimVerdict::confused;
    result.victim = owner->package_name;
    result.evidence.push_back(
        {"registry", "repository is owned by package " + owner->package_name, false});
    const NameRelation relation = name_relation(pkg.normalized_name, owner->package_name);
    if (relation.kind != NameRelationKind::unrelated)
      result.evidence.push_back(
          {"name_relation", std::string(to_string(relation.kind)) + " to " +
                                owner->package_name + ": " + relation.detail,
           false});
    return result;
  }
  result.evidence.push_back({"registry", "repository not present in registry", false});

  // Rule 2: the repository's own manifests name this package.
  if (repo) {
    for (const std::string& manifest_name : repo->manifest_package_names) {
      if (normalize_name(manifest_name) == pkg.normalized_name) {
        result.verdict = ClaimVerdict::verified;
        result.evidence.push_back(
            {"manifest", "repository manifest declares package " + pkg.normalized_name, true});
        return result;
      }
    }
    result.evidence.push_back(
        {"manifest", "repository manifests do not declare this package", false});
  } else {
    result.evidence.push_back({"manifest", "no repository snapshot to inspect", false});
  }

  // Rule 3: name relations against the repo name and registry owners.
  std::string repo_name = repo && !repo->name.empty() ? repo->name
                          : claimed                   ? claimed->name
                                                      : std::string{};
  if (!repo_name.empty()) {
    const std::string normalized_repo_name = normalize_name(repo_name);
    const NameRelation relation = name_relation(pkg.normalized_name, normalized_repo_name);
    if (relation.kind == NameRelationKind::exact) {
      result.verdict = ClaimVerdict::verified;
      result.evidence.push_back(
          {"name_relation", "package name matches repository name " + normalized_repo_name,
           true});
      return result;
    }
    if (relation.kind != NameRelationKind::unrelated) {
      result.verdict = ClaimVerdict::confused;
      result.victim = normalized_repo_name;
      result.evidence.push_back(
          {"name_relation", std::string(to_string(relation.kind)) + " to repository name " +
                                normalized_repo_name + ": " + relation.detail,
           false});
      return result;
    }
    result.evidence.push_back(
        {"name_relation", "unrelated to repository name " + normalized_repo_name, false});
  }

  // Owner scan: affix relations dominate small edits; ties fall to the
  // lexicographically first owner (owner_names() is sorted).
  const std::string* best_owner = nullptr;
  NameRelation best_relation;
  for (const std::string& owner_name : registry.owner_names()) {
    const NameRelation relation = name_relation(pkg.normalized_name, owner_name);
    if (relation.kind == NameRelationKind::exact ||
        relation.kind == NameRelationKind::unrelated)
      continue;
    const bool better =
        !best_owner ||
        (best_relation.kind == NameRelationKind::small_edit &&
         relation.kind != NameRelationKind::small_edit);
    if (better) {
      best_owner = &owner_name;
      best_relation = relation;
    }
  }
  if (best_owner) {
    result.verdict = ClaimVerdict::confused;
    result.victim = *best_owner;
    result.evidence.push_back(
        {"name_relation", std::string(to_string(best_relation.kind)) + " to package " +
                              *best_owner + ": " + best_relation.detail,
         false});
    return result;
  }

  // Rule 4: weak verification through release/tag correlation.
  if (repo) {
    const CorrelationScore correlation = correlate_releases(pkg.releases, repo->tags);
    const std::string summary = "matched " + std::to_string(correlation.matched) + "/" +
                                std::to_string(correlation.total) + " releases to tags";
    if (correlation.score >= kCorrelationThreshold &&
        correlation.matched >= kCorrelationMinMatches) {
      result.verdict = ClaimVerdict::verified;
      result.evidence.push_back({"release_correlation", summary + " (weak verification)", true});
      return result;
    }
    result.evidence.push_back({"release_correlation", summary, false});
  }

  result.verdict = ClaimVerdict::unverifiable;
  return result;
}

}  // namespace srank
