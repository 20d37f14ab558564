#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srank/corpus.hpp"

namespace srank {

// How a package name relates to a target name. Both inputs must already be
// normalized. Classification priority: exact > affix kinds > small_edit.
enum class NameRelationKind {
  exact,
  prefix_augmented,   // extra leading tokens: "frexco-pip-requests" vs "requests"
  suffix_augmented,   // extra trailing tokens: "python-bitget-api" vs "python-bitget"
  small_edit,         // Damerau-Levenshtein distance 1 on separator-stripped forms
  unrelated,
};

const char* to_string(NameRelationKind kind);

struct NameRelation {
  NameRelationKind kind = NameRelationKind::unrelated;
  int edit_distance = 0;  // on separator-stripped forms; 0 for exact
  std::string detail;
};

NameRelation name_relation(std::string_view pkg_name, std::string_view target_name);

// Damerau-Levenshtein distance with adjacent transposition at unit cost.
int damerau_levenshtein(std::string_view a, std::string_view b);

// (host, owner, name) identity of a forge repository URL.
struct RepoRef {
  std::string host;
  std::string owner;
  std::string name;

  std::string key() const;      // lowercase "host/owner/name" used for lookups
  std::string display() const;  // "owner/name" with the original casing
};

// Accepts http(s)/git/ssh-style URLs and bare "host/owner/name" paths.
std::optional<RepoRef> parse_repo_url(std::string_view url);

struct RegistryEntry {
  std::string repo_url;
  std::string package_name;  // owning package, normalized
  std::int64_t stars = 0;
};

// Which package owns which repository, keyed by canonical repository URL.
// Built once per run and immutable afterwards.
class RepoRegistry {
 public:
  RepoRegistry() = default;
  static RepoRegistry from_entries(std::vector<RegistryEntry> entries);
  static RepoRegistry load(const std::filesystem::path& path);

  const RegistryEntry* find(std::string_view repo_url) const;

  // Owning package names in lexicographic order, for relation scans.
  const std::vector<std::string>& owner_names() const { return owner_names_; }
  std::size_t size() const { return by_key_.size(); }

 private:
  std::map<std::string, RegistryEntry> by_key_;
  std::vector<std::string> owner_names_;
};

struct CorrelationScore {
  int matched = 0;
  int total = 0;
  double score = 0.0;  // matched / total, 0 when total == 0
};

// Greedy nearest-first matching of releases to tags, each tag usable once;
// a pair matches when the timestamps lie within 24 hours of each other.
CorrelationScore correlate_releases(std::span<const Release> releases,
                                    std::span<const TagRef> tags);

enum class ClaimVerdict { verified, confused, unverifiable };

const char* to_string(ClaimVerdict verdict);

struct Finding {
  std::string rule;    // registry | manifest | name_relation | release_correlation | no_claim
  std::string detail;
  bool positive = false;  // supports the claim being genuine
};

struct ConfusionVerdict {
  ClaimVerdict verdict = ClaimVerdict::unverifiable;
  std::string victim;  // confused only: the impersonated package or repo name
  std::vector<Finding> evidence;
};

// Decides whether the package's claimed repository URL is genuinely its own.
// Rule cascade: registry ownership, manifest back-reference, name relation,
// then release/tag correlation as a weak fallback. The evidence lists every
// rule that was consulted, in that order.
ConfusionVerdict classify_repo_claim(const PackageSnapshot& pkg,
                                     const std::optional<RepoSnapshot>& repo,
                                     const RepoRegistry& registry);

// Correlation acceptance bounds for the weak rule-4 verification.
inline constexpr double kCorrelationThreshold = 0.8;
inline constexpr int kCorrelationMinMatches = 3;
inline constexpr std::int64_t kCorrelationWindowSecs = 24 * 3600;

}  // namespace srank
