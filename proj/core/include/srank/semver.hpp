#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srank/corpus.hpp"

namespace srank::semver {

// One dot-separated prerelease identifier. Numeric identifiers carry no
// leading zeros and compare numerically; alphanumeric ones compare as ASCII.
struct Identifier {
  bool numeric = false;
  std::uint64_t number = 0;  // meaningful when numeric
  std::string text;          // source spelling, always set

  friend bool operator==(const Identifier&, const Identifier&) = default;
};

struct Version {
  std::uint64_t major = 0;
  std::uint64_t minor = 0;
  std::uint64_t patch = 0;
  std::vector<Identifier> prerelease;
  std::vector<std::string> build;

  bool is_prerelease() const { return !prerelease.empty(); }
  std::string to_string() const;

  friend bool operator==(const Version&, const Version&) = default;
};

enum class ParseErrc {
  none,
  component_count,
  leading_zero,
  empty_identifier,
  illegal_character,
  number_out_of_range,
};

const char* to_string(ParseErrc errc);

struct ParseResult {
  std::optional<Version> version;
  ParseErrc error = ParseErrc::none;

  bool ok() const { return version.has_value(); }
};

// Accepts exactly the SemVer 2.0.0 grammar: MAJOR.MINOR.PATCH with optional
// "-prerelease" and "+build" segments.
ParseResult parse(std::string_view text);

// SemVer precedence: numeric core, then prerelease-before-release, then
// identifiers left to right (numeric < alphanumeric). Build metadata is
// ignored, so "equal" means equal precedence, not identical strings.
std::strong_ordering compare(const Version& a, const Version& b);

inline bool precedes(const Version& a, const Version& b) {
  return compare(a, b) == std::strong_ordering::less;
}

// Window used by the release-recency metrics: "six months" fixed at 183 days.
inline constexpr std::int64_t kSixMonthsDays = 183;

struct ReleaseFlags {
  bool has_multiple_versions = false;
  bool follows_semver = false;
  bool recent_release = false;
  bool not_brand_new = false;
  bool ge_1_0_0 = false;
  bool all_prereleases = false;

  friend bool operator==(const ReleaseFlags&, const ReleaseFlags&) = default;
};

// Derives the six release-history booleans. `releases` must be ascending by
// publish time. An empty list yields all-false flags. Unparseable versions
// defeat follows_semver and all_prereleases but nothing else.
ReleaseFlags release_flags(std::span<const Release> releases, UtcTime now);

}  // namespace srank::semver
