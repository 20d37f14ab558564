#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "srank/corpus.hpp"
#include "srank/semver.hpp"

namespace srank {

// The 18 per-metric integer contributions plus their sum. Boolean-style
// metrics contribute 0/1, the two hidden penalties 0/-1, the three status
// penalties 0/-5, and the count metrics a log10 bucket.
struct MetricBreakdown {
  int basic_info_present = 0;
  int source_repository_present = 0;
  int readme_present = 0;
  int has_multiple_versions = 0;
  int follows_semver = 0;
  int recent_release = 0;
  int not_brand_new = 0;
  int ge_1_0_0 = 0;
  int dependent_packages = 0;
  int dependent_repositories = 0;
  int stars = 0;
  int contributors = 0;
  int subscribers = 0;
  int all_prereleases = 0;
  int any_outdated_dependencies = 0;
  int is_deprecated = 0;
  int is_unmaintained = 0;
  int is_removed = 0;
  int total = 0;

  friend bool operator==(const MetricBreakdown&, const MetricBreakdown&) = default;
};

struct MetricField {
  const char* name;
  int MetricBreakdown::*member;
};

// The 18 metrics in report order; `name` doubles as the CSV/JSON field name.
const std::array<MetricField, 18>& metric_fields();

// Count scaling applied before the log bucket: x2, x1 or x1/2.
struct ScalingRule {
  int numerator = 1;
  int denominator = 1;
  // Rounding is fixed: half away from zero, applied per metric.

  static constexpr ScalingRule times_two() { return {2, 1}; }
  static constexpr ScalingRule times_one() { return {1, 1}; }
  static constexpr ScalingRule half() { return {1, 2}; }
};

// round_half_away_from_zero(log10(count) * multiplier); 0 when count <= 0.
// Exact at powers of ten, non-decreasing in count.
int log_bucket(std::int64_t count, ScalingRule rule);

// A view of the latest known version per dependency name, used by the
// outdated-dependencies check. An absent entry means "latest unknown".
struct DependencyIndex {
  std::map<std::string, semver::Version> latest;

  static DependencyIndex from_snapshots(const std::vector<SnapshotRecord>& records);
  static DependencyIndex load(const std::filesystem::path& path);
};

// True when the constraint, read as an exact pin ("1.2.3", "==1.2.3") or an
// upper-bounded range ("<2.0.0", "<=1.9.0", comma-separated clauses),
// excludes `latest`. Unparseable or unconstrained input never excludes.
bool constraint_excludes(std::string_view constraint, const semver::Version& latest);

// Scores one package against the 18-metric table. A missing repo degrades
// the repo-derived metrics to 0; a missing index leaves the outdated-
// dependencies penalty at 0. Historical `now` values are allowed.
MetricBreakdown score_breakdown(const PackageSnapshot& pkg,
                                const std::optional<RepoSnapshot>& repo, UtcTime now,
                                const DependencyIndex* index = nullptr);

// Sum of the 18 contributions (equals the stored total for any breakdown
// produced by score_breakdown).
int total(const MetricBreakdown& breakdown);

// One JSON object with the 18 named fields plus "total", in report order.
std::string render_breakdown_json(const MetricBreakdown& breakdown);

// The metric names double as CSV column headers: "basic_info_present,...,total".
std::string breakdown_csv_header();
std::string breakdown_csv_row(const MetricBreakdown& breakdown);

}  // namespace srank
