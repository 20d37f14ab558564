#include "srank/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "srank/confusion.hpp"

namespace srank {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw Error(ErrorKind::Io, "cache write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

// --- minimal RSS plumbing --------------------------------------------------

std::string xml_unescape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] != '&') {
      out += text[pos++];
      continue;
    }
    const std::size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 8) {
      out += text[pos++];
      continue;
    }
    const std::string_view entity = text.substr(pos + 1, semi - pos - 1);
    if (entity == "amp") out += '&';
    else if (entity == "lt") out += '<';
    else if (entity == "gt") out += '>';
    else if (entity == "quot") out += '"';
    else if (entity == "apos") out += '\'';
    else if (!entity.empty() && entity[0] == '#') {
      const long code = std::strtol(std::string(entity.substr(1)).c_str(), nullptr,
                                    entity.size() > 1 && entity[1] == 'x' ? 16 : 10);
      if (code > 0 && code < 128) out += static_cast<char>(code);
    } else {
      out += text.substr(pos, semi - pos + 1);
    }
    pos = semi + 1;
  }
  return out;
}

// Text of the first <tag>...</tag> inside `block`, entities resolved.
std::optional<std::string> element_text(std::string_view block, std::string_view tag) {
  const std::string open = "<" + std::string(tag);
  const std::string close = "</" + std::string(tag) + ">";
  std::size_t start = block.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  start = block.find('>', start);
  if (start == std::string_view::npos) return std::nullopt;
  ++start;
  const std::size_t end = block.find(close, start);
  if (end == std::string_view::npos) return std::nullopt;
  std::string_view inner = block.substr(start, end - start);
  if (inner.rfind("<![CDATA[", 0) == 0 && inner.ends_with("]]>"))
    return std::string(inner.substr(9, inner.size() - 12));
  return xml_unescape(inner);
}

// Last path segments of a pypi.org/project/<name>[/<version>]/ link.
struct ProjectLink {
  std::string name;
  std::optional<std::string> version;
};

std::optional<ProjectLink> parse_project_link(std::string_view link) {
  const std::size_t marker = link.find("/project/");
  if (marker == std::string_view::npos) return std::nullopt;
  std::string_view rest = link.substr(marker + 9);
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= rest.size()) {
    const std::size_t slash = rest.find('/', start);
    if (slash == std::string_view::npos) {
      if (start < rest.size()) parts.push_back(rest.substr(start));
      break;
    }
    if (slash > start) parts.push_back(rest.substr(start, slash - start));
    start = slash + 1;
  }
  if (parts.empty()) return std::nullopt;
  ProjectLink out;
  out.name = std::string(parts[0]);
  if (parts.size() > 1) out.version = std::string(parts[1]);
  return out;
}

// --- package index metadata -------------------------------------------------

std::vector<std::string> split_keywords(const std::string& raw) {
  std::vector<std::string> out;
  const char sep = raw.find(',') != std::string::npos ? ',' : ' ';
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t end = raw.find(sep, start);
    if (end == std::string::npos) end = raw.size();
    std::string word = raw.substr(start, end - start);
    while (!word.empty() && word.front() == ' ') word.erase(word.begin());
    while (!word.empty() && word.back() == ' ') word.pop_back();
    if (!word.empty()) out.push_back(std::move(word));
    if (end == raw.size()) break;
    start = end + 1;
  }
  return out;
}

bool looks_like_forge_repo(const std::string& url) {
  const auto ref = parse_repo_url(url);
  if (!ref) return false;
  return ref->host == "github.com" || ref->host == "gitlab.com" ||
         ref->host == "bitbucket.org" || ref->host == "codeberg.org";
}

// "urllib3 (>=1.21.1) ; extra == 'socks'" -> {urllib3, >=1.21.1}
std::optional<Dependency> parse_requirement(std::string_view raw) {
  if (const std::size_t marker = raw.find(';'); marker != std::string_view::npos)
    raw = raw.substr(0, marker);
  while (!raw.empty() && raw.front() == ' ') raw.remove_prefix(1);
  while (!raw.empty() && raw.back() == ' ') raw.remove_suffix(1);
  if (raw.empty()) return std::nullopt;

  std::size_t name_end = 0;
  while (name_end < raw.size() &&
         (std::isalnum(static_cast<unsigned char>(raw[name_end])) || raw[name_end] == '-' ||
          raw[name_end] == '_' || raw[name_end] == '.'))
    ++name_end;
  if (name_end == 0) return std::nullopt;

  Dependency dep;
  dep.name = std::string(raw.substr(0, name_end));
  std::string_view rest = raw.substr(name_end);
  if (!rest.empty() && rest.front() == '[') {  // drop extras
    const std::size_t close = rest.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    rest = rest.substr(close + 1);
  }
  std::string constraint;
  for (char c : rest) {
    if (c == '(' || c == ')' || c == ' ') continue;
    constraint += c;
  }
  dep.constraint = std::move(constraint);
  return dep;
}

std::optional<std::string> nonempty_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) return std::nullopt;
  auto value = it->get<std::string>();
  if (value.empty()) return std::nullopt;
  return value;
}

// --- forge documents ---------------------------------------------------------

std::vector<std::string> manifest_names_from_pyproject(const std::string& text) {
  std::vector<std::string> names;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) continue;
    if (line.compare(pos, 4, "name") != 0) continue;
    pos = line.find('=', pos);
    if (pos == std::string::npos) continue;
    pos = line.find_first_of("\"'", pos);
    if (pos == std::string::npos) continue;
    const char quote = line[pos];
    const std::size_t end = line.find(quote, pos + 1);
    if (end == std::string::npos) continue;
    std::string name = line.substr(pos + 1, end - pos - 1);
    if (!name.empty()) names.push_back(std::move(name));
  }
  return names;
}

constexpr std::array<const char*, 18> kMetricNames = {
    "basic_info_present", "source_repository_present", "readme_present",
    "has_multiple_versions", "follows_semver", "recent_release", "not_brand_new",
    "ge_1_0_0", "dependent_packages", "dependent_repositories", "stars",
    "contributors", "subscribers", "all_prereleases", "any_outdated_dependencies",
    "is_deprecated", "is_unmaintained", "is_removed"};

bool flag_from_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) return false;
  if (it->is_boolean()) return it->get<bool>();
  if (it->is_number()) return it->get<double>() != 0.0;
  return false;
}

}  // namespace

const char* to_string(FeedKind kind) {
  return kind == FeedKind::new_packages ? "new_packages" : "new_releases";
}

std::int64_t SystemClock::now_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_millis(std::int64_t millis) {
  std::this_thread::sleep_for(std::chrono::milliseconds(millis));
}

std::filesystem::path url_cache_path(const std::filesystem::path& root, std::string_view url) {
  if (const auto scheme = url.find("://"); scheme != std::string_view::npos)
    url = url.substr(scheme + 3);
  if (const auto q = url.find_first_of("?#"); q != std::string_view::npos)
    url = url.substr(0, q);

  std::string host;
  std::string_view path;
  if (const auto slash = url.find('/'); slash == std::string_view::npos) {
    host = std::string(url);
  } else {
    host = std::string(url.substr(0, slash));
    path = url.substr(slash + 1);
  }
  while (!path.empty() && path.back() == '/') path.remove_suffix(1);

  std::string key;
  for (char c : path) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                      c == '_' || c == '-';
    key += keep ? c : '_';
  }
  if (key.empty()) key = "_root";
  return root / host / key;
}

HttpResponse FixtureTransport::get(const std::string& url) {
  const std::filesystem::path path = url_cache_path(root_, url);
  if (!std::filesystem::exists(path)) return {404, ""};
  return {200, read_file(path)};
}

HttpResponse HttpTransport::get(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return {0, ""};
  const std::string scheme = url.substr(0, scheme_end);
  const auto host_start = scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  const std::string host = url.substr(host_start, path_start == std::string::npos
                                                      ? std::string::npos
                                                      : path_start - host_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Headers headers = {{"User-Agent", "srank/0.1"}};
  if (host == "api.github.com") {
    if (const char* token = std::getenv(forge_token_env_.c_str()); token && *token)
      headers.emplace("Authorization", std::string("Bearer ") + token);
  }

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    httplib::SSLClient client(host);
    client.set_follow_location(true);
    auto result = client.Get(path, headers);
    if (!result) return {0, ""};
    return {result->status, result->body};
  }
#endif
  httplib::Client client(host);
  client.set_follow_location(true);
  auto result = client.Get(path, headers);
  if (!result) return {0, ""};
  return {result->status, result->body};
}

std::vector<FeedEntry> parse_feed_document(std::string_view xml, FeedKind kind,
                                           UtcTime cutoff) {
  if (xml.find("<rss") == std::string_view::npos &&
      xml.find("<feed") == std::string_view::npos)
    throw Error(ErrorKind::Parse, "document is not a syndication feed");
  if (xml.find("<rss") != std::string_view::npos &&
      xml.find("</rss>") == std::string_view::npos)
    throw Error(ErrorKind::Parse, "feed document is truncated");

  std::vector<FeedEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t cursor = 0;
  while (true) {
    const std::size_t open = xml.find("<item", cursor);
    if (open == std::string_view::npos) break;
    // "<item>" or "<item attr=...>", not "<itemize>".
    const char following = open + 5 < xml.size() ? xml[open + 5] : '\0';
    if (following != '>' && following != ' ' && following != '\t' &&
        following != '\r' && following != '\n') {
      cursor = open + 5;
      continue;
    }
    const std::size_t close = xml.find("</item>", open);
    if (close == std::string_view::npos)
      throw Error(ErrorKind::Parse, "unterminated <item> element");
    const std::string_view block = xml.substr(open, close - open);
    cursor = close + 7;

    const auto title = element_text(block, "title");
    const auto link = element_text(block, "link");
    const auto pub_date = element_text(block, "pubDate");
    if (!pub_date)
      throw Error(ErrorKind::Parse, "feed item without pubDate");
    const auto published = parse_rfc822(*pub_date);
    if (!published)
      throw Error(ErrorKind::Parse, "feed item with unparseable pubDate: " + *pub_date);

    FeedEntry entry;
    entry.feed_kind = kind;
    entry.published_at = *published;

    std::optional<ProjectLink> project;
    if (link) project = parse_project_link(*link);
    if (project) {
      entry.name = project->name;
      entry.version = project->version;
    }
    if (entry.name.empty() && title) {
      std::string text = *title;
      if (kind == FeedKind::new_packages) {
        if (const std::size_t marker = text.find(" added to"); marker != std::string::npos)
          text = text.substr(0, marker);
        entry.name = text;
      } else {
        const std::size_t space = text.rfind(' ');
        if (space == std::string::npos) {
          entry.name = text;
        } else {
          entry.name = text.substr(0, space);
          entry.version = text.substr(space + 1);
        }
      }
    }
    if (entry.name.empty())
      throw Error(ErrorKind::Parse, "feed item without a package name");
    if (kind == FeedKind::new_releases && !entry.version && title) {
      if (const std::size_t space = title->rfind(' '); space != std::string::npos)
        entry.version = title->substr(space + 1);
    }

    if (entry.published_at <= cutoff) continue;
    if (!seen.emplace(entry.name, entry.version.value_or("")).second) continue;
    entries.push_back(std::move(entry));
  }
  return entries;
}

PackageSnapshot parse_package_document(std::string_view doc, std::string_view name,
                                       UtcTime captured_at) {
  const json obj = json::parse(doc, nullptr, false);
  if (obj.is_discarded() || !obj.is_object() || !obj.contains("info"))
    throw Error(ErrorKind::Parse, "package metadata document is malformed");
  const json& info = obj["info"];

  PackageSnapshot pkg;
  pkg.name = info.value("name", std::string(name));
  pkg.normalized_name = normalize_name(pkg.name);
  pkg.description = nonempty_string(info, "summary");
  pkg.homepage_url = nonempty_string(info, "home_page");

  std::vector<std::pair<std::string, std::string>> urls;
  if (info.contains("project_urls") && info["project_urls"].is_object()) {
    for (const auto& [key, value] : info["project_urls"].items()) {
      if (value.is_string() && !value.get<std::string>().empty())
        urls.emplace_back(key, value.get<std::string>());
    }
  }
  if (!pkg.homepage_url) {
    for (const auto& [key, value] : urls) {
      if (key == "Homepage" || key == "homepage") {
        pkg.homepage_url = value;
        break;
      }
    }
  }
  static constexpr std::array<const char*, 7> repo_keys = {
      "Source", "Source Code", "Repository", "Repo", "Code", "GitHub", "Homepage"};
  for (const char* key : repo_keys) {
    if (pkg.repo_url) break;
    for (const auto& [k, value] : urls) {
      if (k == key && looks_like_forge_repo(value)) {
        pkg.repo_url = value;
        break;
      }
    }
  }
  if (!pkg.repo_url && pkg.homepage_url && looks_like_forge_repo(*pkg.homepage_url))
    pkg.repo_url = pkg.homepage_url;

  if (const auto keywords = nonempty_string(info, "keywords"))
    pkg.keywords = split_keywords(*keywords);

  if (info.contains("requires_dist") && info["requires_dist"].is_array()) {
    for (const auto& item : info["requires_dist"]) {
      if (!item.is_string()) continue;
      if (auto dep = parse_requirement(item.get<std::string>()))
        pkg.dependencies.push_back(std::move(*dep));
    }
  }

  if (obj.contains("releases") && obj["releases"].is_object()) {
    for (const auto& [version, files] : obj["releases"].items()) {
      if (!files.is_array() || files.empty()) continue;  // yanked or empty release
      std::optional<UtcTime> earliest;
      for (const auto& file : files) {
        std::optional<std::string> stamp = nonempty_string(file, "upload_time_iso_8601");
        if (!stamp) {
          stamp = nonempty_string(file, "upload_time");
          if (stamp && stamp->find('Z') == std::string::npos &&
              stamp->find('+') == std::string::npos)
            *stamp += 'Z';
        }
        if (!stamp) continue;
        if (const auto t = parse_iso8601(*stamp); t && (!earliest || *t < *earliest))
          earliest = *t;
      }
      if (earliest) pkg.releases.push_back(make_release(version, *earliest));
    }
  }
  std::sort(pkg.releases.begin(), pkg.releases.end(),
            [](const Release& a, const Release& b) { return a.published_at < b.published_at; });

  pkg.captured_at = captured_at;
  for (const Release& release : pkg.releases)
    pkg.captured_at = std::max(pkg.captured_at, release.published_at);
  return pkg;
}

ReferenceProjectRecord parse_reference_document(std::string_view doc, std::string_view name) {
  const json obj = json::parse(doc, nullptr, false);
  if (obj.is_discarded() || !obj.is_object())
    throw Error(ErrorKind::Parse, "reference record document is malformed");

  ReferenceProjectRecord record;
  record.name = obj.value("name", std::string(name));
  if (obj.contains("rank") && obj["rank"].is_number())
    record.reported_rank = obj["rank"].get<int>();
  else if (obj.contains("sourcerank") && obj["sourcerank"].is_number())
    record.reported_rank = obj["sourcerank"].get<int>();

  for (const char* metric : kMetricNames) {
    if (obj.contains(metric) && obj[metric].is_number())
      record.metrics[metric] = obj[metric].get<int>();
  }
  // Wire-name aliases. The provider's exact field names are not documented;
  // every known alias is mapped here and nowhere else.
  static constexpr std::array<std::pair<const char*, const char*>, 3> kAliases = {{
      {"one_point_oh", "ge_1_0_0"},
      {"repository_present", "source_repository_present"},
      {"dependent_projects", "dependent_packages"},
  }};
  for (const auto& [wire, ours] : kAliases) {
    if (obj.contains(wire) && obj[wire].is_number())
      record.metrics[ours] = obj[wire].get<int>();
  }

  record.all_prereleases = flag_from_field(obj, "all_prereleases");
  record.any_outdated_dependencies = flag_from_field(obj, "any_outdated_dependencies");
  record.is_deprecated = flag_from_field(obj, "is_deprecated");
  record.is_unmaintained = flag_from_field(obj, "is_unmaintained");
  record.is_removed = flag_from_field(obj, "is_removed");
  return record;
}

OsvLoadResult load_osv_labels(const std::filesystem::path& directory,
                              std::string_view ecosystem) {
  if (!std::filesystem::is_directory(directory))
    throw Error(ErrorKind::Io, "not a directory: " + directory.string());

  std::string wanted;
  for (char c : ecosystem) wanted += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(directory)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  OsvLoadResult result;
  for (const std::filesystem::path& file : files) {
    const json obj = json::parse(read_file(file), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("id") ||
        !obj["id"].is_string() || !obj.contains("affected") || !obj["affected"].is_array()) {
      ++result.skipped;
      continue;
    }
    for (const auto& affected : obj["affected"]) {
      if (!affected.contains("package")) continue;
      const json& package = affected["package"];
      if (!package.contains("ecosystem") || !package.contains("name")) continue;
      std::string eco = package["ecosystem"].get<std::string>();
      for (char& c : eco) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (eco != wanted) continue;
      Label label;
      label.name = normalize_name(package["name"].get<std::string>());
      label.verdict = LabelVerdict::malicious;
      label.source = LabelSource::osv;
      label.advisory_id = obj["id"].get<std::string>();
      result.labels.push_back(std::move(label));
    }
  }
  std::sort(result.labels.begin(), result.labels.end(), [](const Label& a, const Label& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.advisory_id.value_or("") < b.advisory_id.value_or("");
  });
  return result;
}

RegistryClient::RegistryClient(FetchPolicy policy, std::shared_ptr<Transport> network,
                               std::shared_ptr<Clock> clock)
    : policy_(std::move(policy)), network_(std::move(network)), clock_(std::move(clock)) {
  if (policy_.offline) {
    if (policy_.fixture_dir.empty())
      throw Error(ErrorKind::Config, "offline mode needs a fixture directory");
    fixtures_ = std::make_unique<FixtureTransport>(policy_.fixture_dir);
  }
  if (!clock_) clock_ = std::make_shared<SystemClock>();
}

std::string RegistryClient::fetch(const std::string& url, bool feed_infrastructure) {
  if (policy_.offline) {
    const HttpResponse response = fixtures_->get(url);
    if (response.status == 200) return response.body;
    if (feed_infrastructure)
      throw Error(ErrorKind::Config, "offline mode has no fixture for " + url);
    throw Error(ErrorKind::NotFound, "no fixture for " + url);
  }

  const bool cache_enabled = !policy_.cache_dir.empty();
  const std::filesystem::path cache_path =
      cache_enabled ? url_cache_path(policy_.cache_dir, url) : std::filesystem::path{};
  if (cache_enabled && std::filesystem::exists(cache_path)) return read_file(cache_path);

  std::int64_t backoff = policy_.initial_backoff_millis;
  for (int attempt = 0;; ++attempt) {
    if (policy_.rate_limit_per_sec > 0) {
      std::lock_guard<std::mutex> guard(rate_mutex_);
      const std::int64_t now = clock_->now_millis();
      if (now < next_allowed_millis_) clock_->sleep_millis(next_allowed_millis_ - now);
      const auto interval =
          static_cast<std::int64_t>(1000.0 / policy_.rate_limit_per_sec);
      next_allowed_millis_ = std::max(now, next_allowed_millis_) + interval;
    }
    network_calls_.fetch_add(1, std::memory_order_relaxed);
    const HttpResponse response = network_->get(url);
    if (response.status == 200) {
      if (cache_enabled) write_file_atomic(cache_path, response.body);
      return response.body;
    }
    if (response.status == 404)
      throw Error(ErrorKind::NotFound, "resource not found: " + url);
    if (response.status == 401 || response.status == 403)
      throw Error(ErrorKind::Credential, "authentication failed for " + url);
    if (attempt >= policy_.max_retries)
      throw Error(ErrorKind::Transport, "request failed after " +
                                            std::to_string(attempt + 1) + " attempts: " + url);
    clock_->sleep_millis(backoff);
    backoff *= 2;
  }
}

std::string RegistryClient::fetch_raw_optional(const std::string& url) {
  try {
    return fetch(url, false);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotFound) return "";
    throw;
  }
}

std::vector<FeedEntry> RegistryClient::fetch_feed(FeedKind kind, UtcTime cutoff) {
  const std::string url = kind == FeedKind::new_packages
                              ? "https://pypi.org/rss/packages.xml"
                              : "https://pypi.org/rss/updates.xml";
  return parse_feed_document(fetch(url, true), kind, cutoff);
}

PackageSnapshot RegistryClient::fetch_package_metadata(const std::string& name,
                                                       UtcTime captured_at) {
  const std::string url = "https://pypi.org/pypi/" + name + "/json";
  return parse_package_document(fetch(url, false), name, captured_at);
}

RepoSnapshot RegistryClient::fetch_repo_metadata(const std::string& url, UtcTime captured_at) {
  const auto ref = parse_repo_url(url);
  if (!ref) throw Error(ErrorKind::Unsupported, "not a repository URL: " + url);
  if (ref->host != "github.com")
    throw Error(ErrorKind::Unsupported, "unsupported forge host: " + ref->host);

  const std::string base = "https://api.github.com/repos/" + ref->owner + "/" + ref->name;
  const json doc = json::parse(fetch(base, false), nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorKind::Parse, "repository document is malformed: " + base);

  RepoSnapshot repo;
  repo.host = ref->host;
  repo.owner = doc.contains("owner") && doc["owner"].contains("login")
                   ? doc["owner"]["login"].get<std::string>()
                   : ref->owner;
  repo.name = doc.value("name", ref->name);
  repo.url = "https://github.com/" + repo.owner + "/" + repo.name;
  repo.stars = doc.value("stargazers_count", std::int64_t{0});
  repo.captured_at = captured_at;

  if (const std::string body = fetch_raw_optional(base + "/contributors"); !body.empty()) {
    const json contributors = json::parse(body, nullptr, false);
    if (contributors.is_array())
      repo.contributors_count = static_cast<std::int64_t>(contributors.size());
  }
  repo.has_readme = !fetch_raw_optional(base + "/readme").empty();

  if (const std::string body = fetch_raw_optional(base + "/releases"); !body.empty()) {
    const json releases = json::parse(body, nullptr, false);
    if (releases.is_array()) {
      for (const auto& release : releases) {
        const auto tag = nonempty_string(release, "tag_name");
        const auto stamp = nonempty_string(release, "published_at");
        if (!tag || !stamp) continue;
        if (const auto t = parse_iso8601(*stamp)) repo.tags.push_back({*tag, *t});
      }
      std::sort(repo.tags.begin(), repo.tags.end(),
                [](const TagRef& a, const TagRef& b) { return a.timestamp < b.timestamp; });
    }
  }

  const std::string raw_base =
      "https://raw.githubusercontent.com/" + ref->owner + "/" + ref->name + "/HEAD/";
  std::set<std::string> manifest_names;
  for (const char* manifest : {"pyproject.toml", "setup.py"}) {
    const std::string body = fetch_raw_optional(raw_base + manifest);
    for (std::string& found : manifest_names_from_pyproject(body))
      manifest_names.insert(std::move(found));
  }
  repo.manifest_package_names.assign(manifest_names.begin(), manifest_names.end());
  return repo;
}

ReferenceProjectRecord RegistryClient::fetch_reference_record(const std::string& name) {
  std::string credential;
  if (!policy_.offline) {
    const char* key = std::getenv(policy_.librariesio_key_env.c_str());
    if (!key || !*key)
      throw Error(ErrorKind::Credential,
                  "missing credential: set " + policy_.librariesio_key_env);
    credential = "?api_key=" + std::string(key);
  }
  const std::string base = "https://libraries.io/api/pypi/" + name;
  const std::string project_doc = fetch(base + credential, false);
  const std::string rank_doc = fetch_raw_optional(base + "/sourcerank" + credential);

  // The per-metric values live in a separate document; merge before parsing.
  json merged = json::parse(project_doc, nullptr, false);
  if (merged.is_discarded() || !merged.is_object())
    throw Error(ErrorKind::Parse, "reference record document is malformed");
  if (!rank_doc.empty()) {
    const json extra = json::parse(rank_doc, nullptr, false);
    if (extra.is_object()) {
      for (const auto& [key, value] : extra.items()) merged[key] = value;
    }
  }
  return parse_reference_document(merged.dump(), name);
}

std::vector<PackageSnapshot> RegistryClient::fetch_packages(
    const std::vector<std::string>& names, UtcTime captured_at) {
  std::vector<PackageSnapshot> results(names.size());
  std::vector<std::exception_ptr> failures(names.size());
  std::atomic<std::size_t> cursor{0};

  const std::size_t workers =
      std::min<std::size_t>(std::max(policy_.parallelism, 1), std::max<std::size_t>(names.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= names.size()) return;
        try {
          results[i] = fetch_package_metadata(names[i], captured_at);
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return results;
}

}  // namespace srank
