#include "srank/scoring.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace srank {

namespace {

// log10 of an integer count, exact when the count is a power of ten so the
// x1/2 half-way cases (10, 1000, ...) round deterministically.
double integer_log10(std::int64_t count) {
  std::int64_t power = 1;
  for (int exponent = 0; exponent <= 18; ++exponent) {
    if (power == count) return static_cast<double>(exponent);
    if (power > count / 10) break;
    power *= 10;
  }
  return std::log10(static_cast<double>(count));
}

struct Clause {
  enum class Op { exact, less, less_equal } op;
  semver::Version bound;
};

std::string_view trim(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  return text;
}

// Parses one clause of a constraint list. Only forms that can exclude a
// latest version are kept: exact pins and upper bounds. Anything else
// (lower bounds, !=, ~=, wildcards, garbage) yields nullopt.
std::optional<Clause> parse_clause(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;

  Clause::Op op = Clause::Op::exact;
  if (text.rfind("==", 0) == 0) {
    text = trim(text.substr(2));
  } else if (text.rfind("<=", 0) == 0) {
    op = Clause::Op::less_equal;
    text = trim(text.substr(2));
  } else if (text.rfind('<', 0) == 0) {
    op = Clause::Op::less;
    text = trim(text.substr(1));
  } else if (!text.empty() && (text[0] == '>' || text[0] == '!' || text[0] == '~' ||
                               text[0] == '^' || text[0] == '=')) {
    return std::nullopt;
  }

  const auto parsed = semver::parse(text);
  if (!parsed.ok()) return std::nullopt;
  return Clause{op, *parsed.version};
}

}  // namespace

const std::array<MetricField, 18>& metric_fields() {
  static const std::array<MetricField, 18> fields = {{
      {"basic_info_present", &MetricBreakdown::basic_info_present},
      {"source_repository_present", &MetricBreakdown::source_repository_present},
      {"readme_present", &MetricBreakdown::readme_present},
      {"has_multiple_versions", &MetricBreakdown::has_multiple_versions},
      {"follows_semver", &MetricBreakdown::follows_semver},
      {"recent_release", &MetricBreakdown::recent_release},
      {"not_brand_new", &MetricBreakdown::not_brand_new},
      {"ge_1_0_0", &MetricBreakdown::ge_1_0_0},
      {"dependent_packages", &MetricBreakdown::dependent_packages},
      {"dependent_repositories", &MetricBreakdown::dependent_repositories},
      {"stars", &MetricBreakdown::stars},
      {"contributors", &MetricBreakdown::contributors},
      {"subscribers", &MetricBreakdown::subscribers},
      {"all_prereleases", &MetricBreakdown::all_prereleases},
      {"any_outdated_dependencies", &MetricBreakdown::any_outdated_dependencies},
      {"is_deprecated", &MetricBreakdown::is_deprecated},
      {"is_unmaintained", &MetricBreakdown::is_unmaintained},
      {"is_removed", &MetricBreakdown::is_removed},
  }};
  return fields;
}

int log_bucket(std::int64_t count, ScalingRule rule) {
  if (count <= 0) return 0;
  const double scaled =
      integer_log10(count) * rule.numerator / rule.denominator;
  const int bucket = static_cast<int>(std::floor(scaled + 0.5));
  return bucket < 0 ? 0 : bucket;
}

bool constraint_excludes(std::string_view constraint, const semver::Version& latest) {
  std::size_t start = 0;
  bool excludes = false;
  while (start <= constraint.size()) {
    const std::size_t comma = constraint.find(',', start);
    const std::string_view part =
        comma == std::string_view::npos ? constraint.substr(start)
                                        : constraint.substr(start, comma - start);
    if (const auto clause = parse_clause(part)) {
      switch (clause->op) {
        case Clause::Op::exact:
          excludes = excludes || semver::compare(clause->bound, latest) != 0;
          break;
        case Clause::Op::less:
          excludes = excludes || semver::compare(latest, clause->bound) >= 0;
          break;
        case Clause::Op::less_equal:
          excludes = excludes || semver::compare(latest, clause->bound) > 0;
          break;
      }
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return excludes;
}

DependencyIndex DependencyIndex::from_snapshots(const std::vector<SnapshotRecord>& records) {
  DependencyIndex index;
  for (const SnapshotRecord& record : records) {
    std::optional<semver::Version> best;
    for (const Release& release : record.package.releases) {
      const auto parsed = semver::parse(release.version_text);
      if (!parsed.ok() || parsed.version->is_prerelease()) continue;
      if (!best || semver::compare(*parsed.version, *best) > 0) best = parsed.version;
    }
    if (best) index.latest[record.package.normalized_name] = std::move(*best);
  }
  return index;
}

DependencyIndex DependencyIndex::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::NotFound, "no such file: " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open for reading: " + path.string());
  DependencyIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("name") ||
        !obj.contains("latest"))
      throw Error(ErrorKind::Parse,
                  "line " + std::to_string(line_no) + ": expected {name, latest}");
    const auto parsed = semver::parse(obj["latest"].get<std::string>());
    if (!parsed.ok())
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                        ": latest version does not parse");
    index.latest[normalize_name(obj["name"].get<std::string>())] = *parsed.version;
  }
  return index;
}

MetricBreakdown score_breakdown(const PackageSnapshot& pkg,
                                const std::optional<RepoSnapshot>& repo, UtcTime now,
                                const DependencyIndex* index) {
  MetricBreakdown b;

  const bool has_description = pkg.description && !pkg.description->empty();
  const bool has_url = (pkg.homepage_url && !pkg.homepage_url->empty()) ||
                       (pkg.repo_url && !pkg.repo_url->empty());
  b.basic_info_present = has_description && has_url && !pkg.keywords.empty() ? 1 : 0;
  b.source_repository_present = pkg.repo_url && !pkg.repo_url->empty() ? 1 : 0;
  b.readme_present = repo && repo->has_readme ? 1 : 0;

  const semver::ReleaseFlags flags = semver::release_flags(pkg.releases, now);
  b.has_multiple_versions = flags.has_multiple_versions ? 1 : 0;
  b.follows_semver = flags.follows_semver ? 1 : 0;
  b.recent_release = flags.recent_release ? 1 : 0;
  b.not_brand_new = flags.not_brand_new ? 1 : 0;
  b.ge_1_0_0 = flags.ge_1_0_0 ? 1 : 0;
  b.all_prereleases = flags.all_prereleases ? -1 : 0;

  b.dependent_packages = log_bucket(pkg.dependents_count, ScalingRule::times_two());
  b.dependent_repositories = log_bucket(pkg.dependent_repos_count, ScalingRule::times_one());
  b.stars = repo ? log_bucket(repo->stars, ScalingRule::times_one()) : 0;
  b.contributors = repo ? log_bucket(repo->contributors_count, ScalingRule::half()) : 0;
  b.subscribers = log_bucket(pkg.subscribers_count, ScalingRule::half());

  if (index) {
    for (const Dependency& dep : pkg.dependencies) {
      const auto it = index->latest.find(normalize_name(dep.name));
      if (it == index->latest.end()) continue;
      if (constraint_excludes(dep.constraint, it->second)) {
        b.any_outdated_dependencies = -1;
        break;
      }
    }
  }

  b.is_deprecated = pkg.status == PackageStatus::deprecated ? -5 : 0;
  b.is_unmaintained = pkg.status == PackageStatus::unmaintained ? -5 : 0;
  b.is_removed = pkg.status == PackageStatus::removed ? -5 : 0;

  b.total = 0;
  for (const MetricField& field : metric_fields()) b.total += b.*(field.member);
  return b;
}

int total(const MetricBreakdown& breakdown) {
  int sum = 0;
  for (const MetricField& field : metric_fields()) sum += breakdown.*(field.member);
  return sum;
}

std::string render_breakdown_json(const MetricBreakdown& breakdown) {
  nlohmann::ordered_json obj;
  for (const MetricField& field : metric_fields()) obj[field.name] = breakdown.*(field.member);
  obj["total"] = breakdown.total;
  return obj.dump();
}

std::string breakdown_csv_header() {
  std::string out;
  for (const MetricField& field : metric_fields()) {
    out += field.name;
    out += ',';
  }
  out += "total";
  return out;
}

std::string breakdown_csv_row(const MetricBreakdown& breakdown) {
  std::string out;
  for (const MetricField& field : metric_fields()) {
    out += std::to_string(breakdown.*(field.member));
    out += ',';
  }
  out += std::to_string(breakdown.total);
  return out;
}

}  // namespace srank
