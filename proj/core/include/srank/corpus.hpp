#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srank/chrono.hpp"
#include "srank/errors.hpp"

namespace srank {

enum class PackageStatus { active, deprecated, unmaintained, removed };

const char* to_string(PackageStatus status);
std::optional<PackageStatus> package_status_from_string(std::string_view text);

// One published release of a package. `is_prerelease` is derived from the
// version grammar and cached; it is false when the version does not parse.
struct Release {
  std::string version_text;
  UtcTime published_at;
  bool is_prerelease = false;

  friend bool operator==(const Release&, const Release&) = default;
};

// Builds a Release with the prerelease flag derived from version_text.
Release make_release(std::string version_text, UtcTime published_at);

struct Dependency {
  std::string name;
  std::string constraint;  // raw constraint string, possibly empty

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

// Registry-visible metadata for one package at a point in time.
// Invariants: counts >= 0, releases ascending by publish time,
// normalized_name == normalize_name(name), captured_at >= every publish time.
struct PackageSnapshot {
  std::string name;
  std::string normalized_name;
  std::optional<std::string> description;
  std::optional<std::string> homepage_url;
  std::optional<std::string> repo_url;
  std::vector<std::string> keywords;
  std::vector<Release> releases;
  std::int64_t dependents_count = 0;
  std::int64_t dependent_repos_count = 0;
  std::int64_t subscribers_count = 0;
  std::vector<Dependency> dependencies;
  PackageStatus status = PackageStatus::active;
  UtcTime captured_at;

  friend bool operator==(const PackageSnapshot&, const PackageSnapshot&) = default;
};

struct TagRef {
  std::string name;
  UtcTime timestamp;

  friend bool operator==(const TagRef&, const TagRef&) = default;
};

// Forge-visible metadata for a claimed source repository.
struct RepoSnapshot {
  std::string url;
  std::string host;
  std::string owner;
  std::string name;
  std::int64_t stars = 0;
  std::int64_t contributors_count = 0;
  bool has_readme = false;
  std::vector<TagRef> tags;
  std::vector<std::string> manifest_package_names;
  UtcTime captured_at;

  friend bool operator==(const RepoSnapshot&, const RepoSnapshot&) = default;
};

enum class LabelVerdict { benign, malicious };
enum class LabelSource { osv, manual, synthetic };

const char* to_string(LabelVerdict verdict);
const char* to_string(LabelSource source);
std::optional<LabelVerdict> label_verdict_from_string(std::string_view text);
std::optional<LabelSource> label_source_from_string(std::string_view text);

struct Label {
  std::string name;  // normalized package name
  LabelVerdict verdict = LabelVerdict::benign;
  LabelSource source = LabelSource::manual;
  std::optional<std::string> advisory_id;  // present when source == osv

  friend bool operator==(const Label&, const Label&) = default;
};

struct SnapshotRecord {
  PackageSnapshot package;
  std::optional<RepoSnapshot> repo;

  friend bool operator==(const SnapshotRecord&, const SnapshotRecord&) = default;
};

struct CorpusEntry {
  PackageSnapshot package;
  std::optional<RepoSnapshot> repo;
  Label label;

  friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

// Packages joined with ground-truth labels; normalized names are unique.
struct LabeledCorpus {
  std::vector<CorpusEntry> entries;
  UtcTime evaluation_time;
};

// Registry-canonical name form: lowercase, every run of '-', '_', '.'
// collapsed to a single '-'. Throws Error{Parse} on empty input.
std::string normalize_name(std::string_view raw);

// The normalized form with the remaining separators removed, used for
// edit-distance comparison ("fake-useragent" -> "fakeuseragent").
std::string separator_stripped(std::string_view normalized);

// --- snapshot / label / corpus files (one JSON object per line, UTF-8) ---

// Rejects malformed lines (Error{Parse} naming the 1-based line) and
// duplicate normalized names (Error{Duplicate}).
std::vector<SnapshotRecord> load_snapshots(const std::filesystem::path& path);
void save_snapshots(const std::vector<SnapshotRecord>& records,
                    const std::filesystem::path& path);

std::vector<Label> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<Label>& labels, const std::filesystem::path& path);

// Combined per-line form {package, repo?, label} used for labeled fixtures.
LabeledCorpus load_labeled_corpus(const std::filesystem::path& path, UtcTime evaluation_time);
void save_labeled_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path);

// Single-record string forms, shared with the ingest clients and the CLI.
SnapshotRecord parse_snapshot_record(std::string_view json_line);
std::string render_snapshot_record(const SnapshotRecord& record);
Label parse_label_record(std::string_view json_line);
std::string render_label_record(const Label& label);
RepoSnapshot parse_repo_record(std::string_view json_line);
std::string render_repo_record(const RepoSnapshot& repo);

struct MergeOptions {
  bool assume_benign = false;
};

struct MergeResult {
  LabeledCorpus corpus;
  std::size_t matched = 0;         // snapshots joined with an explicit label
  std::size_t assumed_benign = 0;  // unlabeled snapshots kept via assume_benign
  std::size_t excluded = 0;        // unlabeled snapshots dropped
};

// Joins snapshots with labels by normalized name. Two labels for the same
// name with different verdicts raise Error{Conflict} naming both sources.
MergeResult merge_labels(const std::vector<SnapshotRecord>& snapshots,
                         const std::vector<Label>& labels, UtcTime evaluation_time,
                         MergeOptions options = {});

}  // namespace srank
