#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srank/corpus.hpp"

namespace srank {

struct HttpResponse {
  int status = 0;  // 0 means the request never completed
  std::string body;
};

// GET-only by contract: the toolkit never writes to a remote service.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_millis() = 0;
  virtual void sleep_millis(std::int64_t millis) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_millis() override;
  void sleep_millis(std::int64_t millis) override;
};

// Deterministic clock for tests: sleeping advances it, nothing else does.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_millis = 0) : now_(start_millis) {}
  std::int64_t now_millis() override { return now_; }
  void sleep_millis(std::int64_t millis) override { now_ += millis; }

 private:
  std::int64_t now_;
};

// Counts every get() passing through; used to prove offline runs touch
// the network zero times.
class CountingTransport final : public Transport {
 public:
  explicit CountingTransport(std::shared_ptr<Transport> inner) : inner_(std::move(inner)) {}
  HttpResponse get(const std::string& url) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_ ? inner_->get(url) : HttpResponse{0, ""};
  }
  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<Transport> inner_;
  std::atomic<std::size_t> calls_{0};
};

// Serves recorded responses from {root}/{host}/{sanitized path}. A missing
// file is a 404.
class FixtureTransport final : public Transport {
 public:
  explicit FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::filesystem::path root_;
};

// Live HTTP(S) client backed by cpp-httplib. The forge token (when the
// named environment variable is set) rides along as a bearer credential
// on forge API requests.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::string forge_token_env = "FORGE_TOKEN")
      : forge_token_env_(std::move(forge_token_env)) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::string forge_token_env_;
};

// Maps a URL to its fixture/cache location: host directory plus the path
// with every non-[A-Za-z0-9._-] character replaced by '_'. The query string
// is dropped so credentials never reach disk.
std::filesystem::path url_cache_path(const std::filesystem::path& root, std::string_view url);

struct FetchPolicy {
  double rate_limit_per_sec = 1.0;
  int max_retries = 3;
  std::int64_t initial_backoff_millis = 1000;  // doubles per retry
  std::filesystem::path cache_dir;             // empty disables caching
  bool offline = false;
  std::filesystem::path fixture_dir;  // required when offline
  std::string librariesio_key_env = "LIBRARIESIO_API_KEY";
  std::string forge_token_env = "FORGE_TOKEN";
  int parallelism = 4;
};

enum class FeedKind { new_packages, new_releases };

const char* to_string(FeedKind kind);

struct FeedEntry {
  std::string name;
  std::optional<std::string> version;
  UtcTime published_at;
  FeedKind feed_kind = FeedKind::new_packages;

  friend bool operator==(const FeedEntry&, const FeedEntry&) = default;
};

// SourceRank record as published by the scoring provider: the reported rank,
// the advertised metric values and the five flags absent from the breakdown
// page. Used for parity reporting only, never as scoring input.
struct ReferenceProjectRecord {
  std::string name;
  int reported_rank = 0;
  std::map<std::string, int> metrics;
  bool all_prereleases = false;
  bool any_outdated_dependencies = false;
  bool is_deprecated = false;
  bool is_unmaintained = false;
  bool is_removed = false;
};

struct OsvLoadResult {
  std::vector<Label> labels;
  std::size_t skipped = 0;  // files that were not advisories
};

// Parses OSV-schema advisories from a directory tree, filtered to one
// ecosystem; every advisory yields a malicious label with its advisory id.
OsvLoadResult load_osv_labels(const std::filesystem::path& directory,
                              std::string_view ecosystem);

// --- document parsers, exposed for direct testing -------------------------

// RSS items newer than `cutoff`, deduplicated by (name, version), in
// delivered (newest-first) order. Throws Error{Parse} on truncated or
// structurally broken documents.
std::vector<FeedEntry> parse_feed_document(std::string_view xml, FeedKind kind,
                                           UtcTime cutoff);

// Package index metadata document -> partial snapshot (absent fields stay
// absent; counts the index does not publish stay 0).
PackageSnapshot parse_package_document(std::string_view json, std::string_view name,
                                       UtcTime captured_at);

ReferenceProjectRecord parse_reference_document(std::string_view json,
                                                std::string_view name);

// Fetching client over an abstract transport, with caching, retries with
// doubling backoff, and a global rate limit. Offline mode reads fixtures
// only and performs zero network operations. Safe for concurrent use.
class RegistryClient {
 public:
  RegistryClient(FetchPolicy policy, std::shared_ptr<Transport> network,
                 std::shared_ptr<Clock> clock);

  std::vector<FeedEntry> fetch_feed(FeedKind kind, UtcTime cutoff);
  PackageSnapshot fetch_package_metadata(const std::string& name, UtcTime captured_at);
  RepoSnapshot fetch_repo_metadata(const std::string& url, UtcTime captured_at);
  ReferenceProjectRecord fetch_reference_record(const std::string& name);

  // Bounded-parallelism batch fetch (policy.parallelism workers); results
  // are in input order regardless of scheduling.
  std::vector<PackageSnapshot> fetch_packages(const std::vector<std::string>& names,
                                              UtcTime captured_at);

  // Number of network operations performed so far; always 0 when offline.
  std::size_t network_operations() const { return network_calls_.load(); }

 private:
  std::string fetch(const std::string& url, bool feed_infrastructure);
  std::string fetch_raw_optional(const std::string& url);  // "" when 404

  FetchPolicy policy_;
  std::shared_ptr<Transport> network_;
  std::unique_ptr<FixtureTransport> fixtures_;
  std::shared_ptr<Clock> clock_;
  std::atomic<std::size_t> network_calls_{0};
  std::mutex rate_mutex_;
  std::int64_t next_allowed_millis_ = 0;
};

}  // namespace srank
