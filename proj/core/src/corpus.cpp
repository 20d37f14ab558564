#include "srank/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "srank/semver.hpp"

namespace srank {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

UtcTime get_time(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string())
    throw Error(ErrorKind::Parse, std::string("missing timestamp field '") + key + "'");
  return parse_iso8601_or_throw(it->get<std::string>());
}

std::optional<std::string> get_optional_string(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw Error(ErrorKind::Parse, std::string("field '") + key + "' must be a string");
  auto value = it->get<std::string>();
  if (value.empty()) return std::nullopt;
  return value;
}

std::int64_t get_count(const ordered_json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) return 0;
  if (!it->is_number_integer())
    throw Error(ErrorKind::Parse, std::string("field '") + key + "' must be an integer");
  const auto value = it->get<std::int64_t>();
  if (value < 0)
    throw Error(ErrorKind::Parse, std::string("field '") + key + "' must be >= 0");
  return value;
}

PackageSnapshot package_from_json(const ordered_json& obj) {
  PackageSnapshot pkg;
  if (!obj.contains("name") || !obj["name"].is_string())
    throw Error(ErrorKind::Parse, "package record needs a 'name' string");
  pkg.name = obj["name"].get<std::string>();
  pkg.normalized_name = normalize_name(pkg.name);
  if (auto stored = get_optional_string(obj, "normalized_name");
      stored && *stored != pkg.normalized_name)
    throw Error(ErrorKind::Parse, "normalized_name '" + *stored +
                                      "' does not match normalization of '" + pkg.name + "'");
  pkg.description = get_optional_string(obj, "description");
  pkg.homepage_url = get_optional_string(obj, "homepage_url");
  pkg.repo_url = get_optional_string(obj, "repo_url");
  if (obj.contains("keywords")) {
    for (const auto& kw : obj["keywords"]) pkg.keywords.push_back(kw.get<std::string>());
  }
  if (obj.contains("releases")) {
    for (const auto& rel : obj["releases"]) {
      Release release;
      if (!rel.contains("version_text") || !rel["version_text"].is_string() ||
          rel["version_text"].get<std::string>().empty())
        throw Error(ErrorKind::Parse, "release needs a non-empty 'version_text'");
      release.version_text = rel["version_text"].get<std::string>();
      release.published_at = get_time(rel, "published_at");
      const auto parsed = semver::parse(release.version_text);
      const bool derived = parsed.ok() && parsed.version->is_prerelease();
      if (rel.contains("is_prerelease")) {
        release.is_prerelease = rel["is_prerelease"].get<bool>();
        if (parsed.ok() && release.is_prerelease != derived)
          throw Error(ErrorKind::Parse, "is_prerelease for '" + release.version_text +
                                            "' contradicts the version grammar");
      } else {
        release.is_prerelease = derived;
      }
      pkg.releases.push_back(std::move(release));
    }
  }
  for (std::size_t i = 1; i < pkg.releases.size(); ++i) {
    if (pkg.releases[i - 1].published_at > pkg.releases[i].published_at)
      throw Error(ErrorKind::Parse, "releases are not sorted by publish time");
  }
  pkg.dependents_count = get_count(obj, "dependents_count");
  pkg.dependent_repos_count = get_count(obj, "dependent_repos_count");
  pkg.subscribers_count = get_count(obj, "subscribers_count");
  if (obj.contains("dependencies")) {
    for (const auto& dep : obj["dependencies"]) {
      Dependency d;
      d.name = dep.at("name").get<std::string>();
      if (dep.contains("constraint") && dep["constraint"].is_string())
        d.constraint = dep["constraint"].get<std::string>();
      pkg.dependencies.push_back(std::move(d));
    }
  }
  if (obj.contains("status")) {
    const auto status = package_status_from_string(obj["status"].get<std::string>());
    if (!status)
      throw Error(ErrorKind::Parse, "unknown status '" + obj["status"].get<std::string>() + "'");
    pkg.status = *status;
  }
  pkg.captured_at = get_time(obj, "captured_at");
  for (const Release& release : pkg.releases) {
    if (release.published_at > pkg.captured_at)
      throw Error(ErrorKind::Parse, "release '" + release.version_text +
                                        "' postdates captured_at");
  }
  return pkg;
}

RepoSnapshot repo_from_json(const ordered_json& obj) {
  RepoSnapshot repo;
  if (!obj.contains("url") || !obj["url"].is_string())
    throw Error(ErrorKind::Parse, "repo record needs a 'url' string");
  repo.url = obj["url"].get<std::string>();
  repo.host = obj.value("host", std::string{});
  repo.owner = obj.value("owner", std::string{});
  repo.name = obj.value("name", std::string{});
  repo.stars = get_count(obj, "stars");
  repo.contributors_count = get_count(obj, "contributors_count");
  repo.has_readme = obj.value("has_readme", false);
  if (obj.contains("tags")) {
    for (const auto& tag : obj["tags"]) {
      TagRef ref;
      ref.name = tag.at("name").get<std::string>();
      ref.timestamp = get_time(tag, "timestamp");
      repo.tags.push_back(std::move(ref));
    }
  }
  if (obj.contains("manifest_package_names")) {
    for (const auto& name : obj["manifest_package_names"])
      repo.manifest_package_names.push_back(name.get<std::string>());
  }
  repo.captured_at = get_time(obj, "captured_at");
  return repo;
}

ordered_json package_to_json(const PackageSnapshot& pkg) {
  ordered_json obj;
  obj["name"] = pkg.name;
  obj["normalized_name"] = pkg.normalized_name;
  if (pkg.description) obj["description"] = *pkg.description;
  if (pkg.homepage_url) obj["homepage_url"] = *pkg.homepage_url;
  if (pkg.repo_url) obj["repo_url"] = *pkg.repo_url;
  obj["keywords"] = pkg.keywords;
  obj["releases"] = ordered_json::array();
  for (const Release& release : pkg.releases) {
    ordered_json rel;
    rel["version_text"] = release.version_text;
    rel["published_at"] = format_iso8601(release.published_at);
    rel["is_prerelease"] = release.is_prerelease;
    obj["releases"].push_back(std::move(rel));
  }
  obj["dependents_count"] = pkg.dependents_count;
  obj["dependent_repos_count"] = pkg.dependent_repos_count;
  obj["subscribers_count"] = pkg.subscribers_count;
  obj["dependencies"] = ordered_json::array();
  for (const Dependency& dep : pkg.dependencies) {
    ordered_json d;
    d["name"] = dep.name;
    d["constraint"] = dep.constraint;
    obj["dependencies"].push_back(std::move(d));
  }
  obj["status"] = to_string(pkg.status);
  obj["captured_at"] = format_iso8601(pkg.captured_at);
  return obj;
}

ordered_json repo_to_json(const RepoSnapshot& repo) {
  ordered_json obj;
  obj["url"] = repo.url;
  obj["host"] = repo.host;
  obj["owner"] = repo.owner;
  obj["name"] = repo.name;
  obj["stars"] = repo.stars;
  obj["contributors_count"] = repo.contributors_count;
  obj["has_readme"] = repo.has_readme;
  obj["tags"] = ordered_json::array();
  for (const TagRef& tag : repo.tags) {
    ordered_json t;
    t["name"] = tag.name;
    t["timestamp"] = format_iso8601(tag.timestamp);
    obj["tags"].push_back(std::move(t));
  }
  obj["manifest_package_names"] = repo.manifest_package_names;
  obj["captured_at"] = format_iso8601(repo.captured_at);
  return obj;
}

Label label_from_json(const ordered_json& obj, const std::string& fallback_name) {
  Label label;
  if (obj.contains("name") && obj["name"].is_string())
    label.name = normalize_name(obj["name"].get<std::string>());
  else if (!fallback_name.empty())
    label.name = fallback_name;
  else
    throw Error(ErrorKind::Parse, "label record needs a 'name'");
  const auto verdict = label_verdict_from_string(obj.at("verdict").get<std::string>());
  if (!verdict)
    throw Error(ErrorKind::Parse, "unknown verdict '" + obj.at("verdict").get<std::string>() + "'");
  label.verdict = *verdict;
  const auto source = label_source_from_string(obj.at("source").get<std::string>());
  if (!source)
    throw Error(ErrorKind::Parse, "unknown label source '" + obj.at("source").get<std::string>() + "'");
  label.source = *source;
  if (obj.contains("advisory_id") && obj["advisory_id"].is_string())
    label.advisory_id = obj["advisory_id"].get<std::string>();
  if (label.source == LabelSource::osv && !label.advisory_id)
    throw Error(ErrorKind::Parse, "osv label for '" + label.name + "' needs an advisory_id");
  return label;
}

ordered_json label_to_json(const Label& label, bool include_name) {
  ordered_json obj;
  if (include_name) obj["name"] = label.name;
  obj["verdict"] = to_string(label.verdict);
  obj["source"] = to_string(label.source);
  if (label.advisory_id) obj["advisory_id"] = *label.advisory_id;
  return obj;
}

ordered_json parse_json_line(std::string_view line) {
  const ordered_json obj = ordered_json::parse(line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(ErrorKind::Parse, "not a JSON object");
  return obj;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw Error(ErrorKind::NotFound, "no such file: " + path.string());
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open for reading: " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  return out;
}

// Applies `parse` per non-empty line, rethrowing with the line number attached.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& parse) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      parse(line, line_no);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse) malformed(line_no, e.what());
      throw;
    }
  }
}

}  // namespace

const char* to_string(PackageStatus status) {
  switch (status) {
    case PackageStatus::active: return "active";
    case PackageStatus::deprecated: return "deprecated";
    case PackageStatus::unmaintained: return "unmaintained";
    case PackageStatus::removed: return "removed";
  }
  return "unknown";
}

std::optional<PackageStatus> package_status_from_string(std::string_view text) {
  if (text == "active") return PackageStatus::active;
  if (text == "deprecated") return PackageStatus::deprecated;
  if (text == "unmaintained") return PackageStatus::unmaintained;
  if (text == "removed") return PackageStatus::removed;
  return std::nullopt;
}

const char* to_string(LabelVerdict verdict) {
  return verdict == LabelVerdict::benign ? "benign" : "malicious";
}

const char* to_string(LabelSource source) {
  switch (source) {
    case LabelSource::osv: return "osv";
    case LabelSource::manual: return "manual";
    case LabelSource::synthetic: return "synthetic";
  }
  return "unknown";
}

std::optional<LabelVerdict> label_verdict_from_string(std::string_view text) {
  if (text == "benign") return LabelVerdict::benign;
  if (text == "malicious") return LabelVerdict::malicious;
  return std::nullopt;
}

std::optional<LabelSource> label_source_from_string(std::string_view text) {
  if (text == "osv") return LabelSource::osv;
  if (text == "manual") return LabelSource::manual;
  if (text == "synthetic") return LabelSource::synthetic;
  return std::nullopt;
}

Release make_release(std::string version_text, UtcTime published_at) {
  Release release;
  release.version_text = std::move(version_text);
  release.published_at = published_at;
  const auto parsed = semver::parse(release.version_text);
  release.is_prerelease = parsed.ok() && parsed.version->is_prerelease();
  return release;
}

std::string normalize_name(std::string_view raw) {
  if (raw.empty()) throw Error(ErrorKind::Parse, "cannot normalize an empty name");
  std::string out;
  out.reserve(raw.size());
  bool pending_separator = false;
  for (char c : raw) {
    if (c == '-' || c == '_' || c == '.') {
      pending_separator = true;
      continue;
    }
    if (pending_separator) {
      out += '-';
      pending_separator = false;
    }
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    out += c;
  }
  if (pending_separator) out += '-';
  return out;
}

std::string separator_stripped(std::string_view normalized) {
  std::string out;
  out.reserve(normalized.size());
  for (char c : normalized) {
    if (c != '-') out += c;
  }
  return out;
}

SnapshotRecord parse_snapshot_record(std::string_view json_line) {
  const ordered_json obj = parse_json_line(json_line);
  SnapshotRecord record;
  if (!obj.contains("package"))
    throw Error(ErrorKind::Parse, "record has no 'package' object");
  record.package = package_from_json(obj["package"]);
  if (obj.contains("repo") && !obj["repo"].is_null())
    record.repo = repo_from_json(obj["repo"]);
  return record;
}

std::string render_snapshot_record(const SnapshotRecord& record) {
  ordered_json obj;
  obj["package"] = package_to_json(record.package);
  if (record.repo) obj["repo"] = repo_to_json(*record.repo);
  return obj.dump();
}

Label parse_label_record(std::string_view json_line) {
  return label_from_json(parse_json_line(json_line), "");
}

std::string render_label_record(const Label& label) {
  return label_to_json(label, true).dump();
}

RepoSnapshot parse_repo_record(std::string_view json_line) {
  return repo_from_json(parse_json_line(json_line));
}

std::string render_repo_record(const RepoSnapshot& repo) {
  return repo_to_json(repo).dump();
}

std::vector<SnapshotRecord> load_snapshots(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::vector<SnapshotRecord> records;
  std::map<std::string, std::size_t> seen;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    SnapshotRecord record = parse_snapshot_record(line);
    const auto [it, inserted] = seen.emplace(record.package.normalized_name, line_no);
    if (!inserted)
      throw Error(ErrorKind::Duplicate,
                  "duplicate normalized name '" + record.package.normalized_name +
                      "' on lines " + std::to_string(it->second) + " and " +
                      std::to_string(line_no));
    records.push_back(std::move(record));
  });
  return records;
}

void save_snapshots(const std::vector<SnapshotRecord>& records,
                    const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const SnapshotRecord& record : records) out << render_snapshot_record(record) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<Label> load_labels(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::vector<Label> labels;
  for_each_line(in, [&](const std::string& line, std::size_t) {
    labels.push_back(parse_label_record(line));
  });
  return labels;
}

void save_labels(const std::vector<Label>& labels, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const Label& label : labels) out << render_label_record(label) << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

LabeledCorpus load_labeled_corpus(const std::filesystem::path& path, UtcTime evaluation_time) {
  auto in = open_for_read(path);
  LabeledCorpus corpus;
  corpus.evaluation_time = evaluation_time;
  std::set<std::string> seen;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const ordered_json obj = parse_json_line(line);
    CorpusEntry entry;
    if (!obj.contains("package"))
      throw Error(ErrorKind::Parse, "record has no 'package' object");
    entry.package = package_from_json(obj["package"]);
    if (obj.contains("repo") && !obj["repo"].is_null()) entry.repo = repo_from_json(obj["repo"]);
    if (!obj.contains("label"))
      throw Error(ErrorKind::Parse, "record has no 'label' object");
    entry.label = label_from_json(obj["label"], entry.package.normalized_name);
    if (!seen.insert(entry.package.normalized_name).second)
      throw Error(ErrorKind::Duplicate, "duplicate normalized name '" +
                                            entry.package.normalized_name + "' on line " +
                                            std::to_string(line_no));
    corpus.entries.push_back(std::move(entry));
  });
  return corpus;
}

void save_labeled_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (const CorpusEntry& entry : corpus.entries) {
    ordered_json obj;
    obj["package"] = package_to_json(entry.package);
    if (entry.repo) obj["repo"] = repo_to_json(*entry.repo);
    obj["label"] = label_to_json(entry.label, false);
    out << obj.dump() << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

MergeResult merge_labels(const std::vector<SnapshotRecord>& snapshots,
                         const std::vector<Label>& labels, UtcTime evaluation_time,
                         MergeOptions options) {
  std::map<std::string, Label> by_name;
  for (const Label& label : labels) {
    const auto [it, inserted] = by_name.emplace(label.name, label);
    if (inserted) continue;
    if (it->second.verdict != label.verdict)
      throw Error(ErrorKind::Conflict,
                  "conflicting labels for '" + label.name + "': " +
                      to_string(it->second.verdict) + " (" + to_string(it->second.source) +
                      ") vs " + to_string(label.verdict) + " (" + to_string(label.source) + ")");
    // Same verdict from two sources: first one wins.
  }

  MergeResult result;
  result.corpus.evaluation_time = evaluation_time;
  for (const SnapshotRecord& record : snapshots) {
    const auto it = by_name.find(record.package.normalized_name);
    if (it != by_name.end()) {
      result.corpus.entries.push_back({record.package, record.repo, it->second});
      ++result.matched;
    } else if (options.assume_benign) {
      Label assumed;
      assumed.name = record.package.normalized_name;
      assumed.verdict = LabelVerdict::benign;
      assumed.source = LabelSource::manual;
      result.corpus.entries.push_back({record.package, record.repo, std::move(assumed)});
      ++result.assumed_benign;
    } else {
      ++result.excluded;
    }
  }
  return result;
}

}  // namespace srank
