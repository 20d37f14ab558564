#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include "srank/scoring.hpp"

using namespace srank;

namespace {

const UtcTime kNow = *parse_iso8601("2024-12-01T00:00:00Z");

PackageSnapshot minimal_package() {
  PackageSnapshot pkg;
  pkg.name = "minimal";
  pkg.normalized_name = "minimal";
  pkg.releases = {make_release("0.0.1", kNow.minus_days(1))};
  pkg.captured_at = kNow;
  return pkg;
}

PackageSnapshot rich_package(RepoSnapshot& repo_out) {
  PackageSnapshot pkg;
  pkg.name = "rich";
  pkg.normalized_name = "rich";
  pkg.description = "a well-kept package";
  pkg.homepage_url = "https://rich.example.org";
  pkg.repo_url = "https://github.com/org/rich";
  pkg.keywords = {"tooling"};
  pkg.releases = {make_release("0.9.0", kNow.minus_days(400)),
                  make_release("1.0.0", kNow.minus_days(200)),
                  make_release("1.1.0", kNow.minus_days(30))};
  pkg.dependents_count = 100;
  pkg.dependent_repos_count = 10;
  pkg.subscribers_count = 3;
  pkg.captured_at = kNow;

  repo_out = RepoSnapshot{};
  repo_out.url = "https://github.com/org/rich";
  repo_out.host = "github.com";
  repo_out.owner = "org";
  repo_out.name = "rich";
  repo_out.stars = 5000;
  repo_out.contributors_count = 50;
  repo_out.has_readme = true;
  repo_out.captured_at = kNow;
  return pkg;
}

// Random package generator for the property tests.
struct PackageGen {
  std::mt19937 rng{20240509};

  std::pair<PackageSnapshot, std::optional<RepoSnapshot>> next(bool allow_any_status = true) {
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<std::int64_t> count(0, 200000);
    std::uniform_int_distribution<int> nreleases(0, 5);
    std::uniform_int_distribution<std::int64_t> days(0, 800);

    PackageSnapshot pkg;
    pkg.name = "gen";
    pkg.normalized_name = "gen";
    if (coin(rng)) pkg.description = "d";
    if (coin(rng)) pkg.homepage_url = "https://example.org";
    if (coin(rng)) pkg.repo_url = "https://github.com/a/b";
    if (coin(rng)) pkg.keywords = {"k"};
    std::vector<std::int64_t> offsets;
    const int n = nreleases(rng);
    for (int i = 0; i < n; ++i) offsets.push_back(days(rng));
    std::sort(offsets.rbegin(), offsets.rend());
    int minor = 0;
    for (std::int64_t offset : offsets) {
      std::string version;
      switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: version = "0." + std::to_string(minor++) + ".0"; break;
        case 1: version = "1." + std::to_string(minor++) + ".0"; break;
        case 2: version = "1.0.0-rc." + std::to_string(++minor); break;
        default: version = "not-semver!"; break;
      }
      pkg.releases.push_back(make_release(version, kNow.minus_days(offset)));
    }
    pkg.dependents_count = count(rng);
    pkg.dependent_repos_count = count(rng);
    pkg.subscribers_count = count(rng);
    pkg.status = allow_any_status && coin(rng)
                     ? std::array<PackageStatus, 3>{PackageStatus::deprecated,
                                                    PackageStatus::unmaintained,
                                                    PackageStatus::removed}[rng() % 3]
                     : PackageStatus::active;
    pkg.captured_at = kNow;

    std::optional<RepoSnapshot> repo;
    if (coin(rng)) {
      RepoSnapshot r;
      r.url = "https://github.com/a/b";
      r.host = "github.com";
      r.owner = "a";
      r.name = "b";
      r.stars = count(rng);
      r.contributors_count = count(rng);
      r.has_readme = coin(rng);
      r.captured_at = kNow;
      repo = std::move(r);
    }
    return {std::move(pkg), std::move(repo)};
  }
};

semver::Version v(const char* text) { return *semver::parse(text).version; }

}  // namespace

TEST_CASE("log_bucket forced and exact cases") {
  CHECK(log_bucket(0, ScalingRule::times_one()) == 0);
  CHECK(log_bucket(0, ScalingRule::times_two()) == 0);
  CHECK(log_bucket(0, ScalingRule::half()) == 0);
  CHECK(log_bucket(1, ScalingRule::times_two()) == 0);
  CHECK(log_bucket(1000, ScalingRule::times_one()) == 3);
  CHECK(log_bucket(50, ScalingRule::half()) == 1);  // log10(50)/2 = 0.8495 -> 1

  // Half-way points round away from zero.
  CHECK(log_bucket(10, ScalingRule::half()) == 1);
  CHECK(log_bucket(1000, ScalingRule::half()) == 2);

  // Exact powers of ten under x1.
  std::int64_t power = 1;
  for (int k = 0; k <= 6; ++k) {
    CHECK(log_bucket(power, ScalingRule::times_one()) == k);
    power *= 10;
  }
}

TEST_CASE("log_bucket is non-decreasing in count") {
  for (ScalingRule rule :
       {ScalingRule::times_two(), ScalingRule::times_one(), ScalingRule::half()}) {
    int previous = 0;
    for (std::int64_t count = 0; count <= 1'000'000;
         count += count < 100 ? 1 : count / 7) {
      const int bucket = log_bucket(count, rule);
      CHECK(bucket >= previous);
      CHECK(bucket >= 0);
      previous = bucket;
    }
  }
}

TEST_CASE("minimal package scores 2, removed variant scores -3") {
  PackageSnapshot pkg = minimal_package();
  MetricBreakdown b = score_breakdown(pkg, std::nullopt, kNow);
  CHECK(b.follows_semver == 1);
  CHECK(b.recent_release == 1);
  CHECK(b.basic_info_present == 0);
  CHECK(b.total == 2);

  pkg.status = PackageStatus::removed;
  b = score_breakdown(pkg, std::nullopt, kNow);
  CHECK(b.is_removed == -5);
  CHECK(b.total == -3);
}

TEST_CASE("rich package scores 18 with the documented per-metric values") {
  RepoSnapshot repo;
  const PackageSnapshot pkg = rich_package(repo);
  const MetricBreakdown b = score_breakdown(pkg, repo, kNow);
  CHECK(b.basic_info_present == 1);
  CHECK(b.source_repository_present == 1);
  CHECK(b.readme_present == 1);
  CHECK(b.has_multiple_versions == 1);
  CHECK(b.follows_semver == 1);
  CHECK(b.recent_release == 1);
  CHECK(b.not_brand_new == 1);
  CHECK(b.ge_1_0_0 == 1);
  CHECK(b.dependent_packages == 4);      // log10(100) * 2
  CHECK(b.dependent_repositories == 1);  // log10(10)
  CHECK(b.stars == 4);                   // log10(5000) = 3.699 -> 4
  CHECK(b.contributors == 1);            // log10(50)/2 = 0.849 -> 1
  CHECK(b.subscribers == 0);             // log10(3)/2 = 0.239 -> 0
  CHECK(b.any_outdated_dependencies == 0);
  CHECK(b.total == 18);
}

TEST_CASE("total sums the stored contributions") {
  CHECK(total(MetricBreakdown{}) == 0);
  RepoSnapshot repo;
  const MetricBreakdown b = score_breakdown(rich_package(repo), repo, kNow);
  CHECK(total(b) == b.total);
  MetricBreakdown removed_only;
  removed_only.is_removed = -5;
  CHECK(total(removed_only) == -5);
}

TEST_CASE("basic_info_present needs description, a URL and keywords") {
  PackageSnapshot pkg = minimal_package();
  pkg.description = "d";
  pkg.keywords = {"k"};
  CHECK(score_breakdown(pkg, std::nullopt, kNow).basic_info_present == 0);  // no URL
  pkg.homepage_url = "https://example.org";
  CHECK(score_breakdown(pkg, std::nullopt, kNow).basic_info_present == 1);
  pkg.keywords.clear();
  CHECK(score_breakdown(pkg, std::nullopt, kNow).basic_info_present == 0);
}

TEST_CASE("toggling removed status moves the total by exactly five") {
  PackageGen gen;
  for (int i = 0; i < 250; ++i) {
    auto [pkg, repo] = gen.next(false);  // active baseline
    const int active_total = score_breakdown(pkg, repo, kNow).total;
    pkg.status = PackageStatus::removed;
    const int removed_total = score_breakdown(pkg, repo, kNow).total;
    CHECK(removed_total == active_total - 5);
    pkg.status = PackageStatus::active;
    CHECK(score_breakdown(pkg, repo, kNow).total == active_total);
  }
}

TEST_CASE("dropping the repo never increases the total") {
  PackageGen gen;
  for (int i = 0; i < 250; ++i) {
    auto [pkg, repo] = gen.next();
    if (!repo) continue;
    const int with_repo = score_breakdown(pkg, repo, kNow).total;
    const int without_repo = score_breakdown(pkg, std::nullopt, kNow).total;
    CHECK(without_repo <= with_repo);
  }
}

TEST_CASE("scoring is deterministic") {
  PackageGen gen;
  for (int i = 0; i < 50; ++i) {
    auto [pkg, repo] = gen.next();
    CHECK(score_breakdown(pkg, repo, kNow) == score_breakdown(pkg, repo, kNow));
  }
}

TEST_CASE("breakdown invariants hold on random packages") {
  PackageGen gen;
  for (int i = 0; i < 250; ++i) {
    auto [pkg, repo] = gen.next();
    const MetricBreakdown b = score_breakdown(pkg, repo, kNow);
    CHECK(b.total == total(b));
    for (int flag : {b.basic_info_present, b.source_repository_present, b.readme_present,
                     b.has_multiple_versions, b.follows_semver, b.recent_release,
                     b.not_brand_new, b.ge_1_0_0}) {
      CHECK(flag >= 0);
      CHECK(flag <= 1);
    }
    CHECK((b.all_prereleases == 0 || b.all_prereleases == -1));
    CHECK((b.any_outdated_dependencies == 0 || b.any_outdated_dependencies == -1));
    for (int penalty : {b.is_deprecated, b.is_unmaintained, b.is_removed})
      CHECK((penalty == 0 || penalty == -5));
    for (int bucket : {b.dependent_packages, b.dependent_repositories, b.stars,
                       b.contributors, b.subscribers})
      CHECK(bucket >= 0);
  }
}

TEST_CASE("constraint_excludes covers pins and upper bounds") {
  CHECK(constraint_excludes("==1.0.0", v("2.0.0")));
  CHECK_FALSE(constraint_excludes("==2.0.0", v("2.0.0")));
  CHECK(constraint_excludes("1.0.0", v("1.2.0")));  // bare pin
  CHECK(constraint_excludes("<2.0.0", v("2.0.0")));
  CHECK_FALSE(constraint_excludes("<2.0.0", v("1.9.9")));
  CHECK(constraint_excludes("<=1.9.0", v("2.0.0")));
  CHECK_FALSE(constraint_excludes("<=2.0.0", v("2.0.0")));
  CHECK(constraint_excludes(">=1.0,<2.0.0", v("2.1.0")));  // upper clause bites

  // Unconstrained or unresolvable constraints never exclude.
  CHECK_FALSE(constraint_excludes("", v("9.9.9")));
  CHECK_FALSE(constraint_excludes(">=1.0.0", v("0.1.0")));
  CHECK_FALSE(constraint_excludes("~=1.4.2", v("2.0.0")));
  CHECK_FALSE(constraint_excludes("!=1.0.0", v("1.0.0")));
  CHECK_FALSE(constraint_excludes("banana", v("1.0.0")));
  CHECK_FALSE(constraint_excludes("<not.a.version", v("1.0.0")));
}

TEST_CASE("outdated dependencies need a supplied index view") {
  PackageSnapshot pkg = minimal_package();
  pkg.dependencies = {{"left-pad", "==1.0.0"}, {"modern", ">=0.1"}};

  CHECK(score_breakdown(pkg, std::nullopt, kNow).any_outdated_dependencies == 0);

  DependencyIndex index;
  index.latest["left-pad"] = v("2.0.0");
  index.latest["modern"] = v("3.0.0");
  const MetricBreakdown b = score_breakdown(pkg, std::nullopt, kNow, &index);
  CHECK(b.any_outdated_dependencies == -1);
  CHECK(b.total == 1);  // 2 from the minimal baseline, -1 penalty

  // Pin matching the latest clears the penalty.
  pkg.dependencies[0].constraint = "==2.0.0";
  CHECK(score_breakdown(pkg, std::nullopt, kNow, &index).any_outdated_dependencies == 0);

  // Unknown dependency names have no known latest version.
  pkg.dependencies = {{"mystery", "==0.0.1"}};
  CHECK(score_breakdown(pkg, std::nullopt, kNow, &index).any_outdated_dependencies == 0);
}

TEST_CASE("DependencyIndex::from_snapshots keeps the highest stable release") {
  PackageSnapshot dep;
  dep.name = "left-pad";
  dep.normalized_name = "left-pad";
  dep.releases = {make_release("1.0.0", kNow.minus_days(300)),
                  make_release("2.0.0-rc.1", kNow.minus_days(20)),
                  make_release("1.5.0", kNow.minus_days(10))};
  dep.captured_at = kNow;
  const DependencyIndex index = DependencyIndex::from_snapshots({{dep, std::nullopt}});
  REQUIRE(index.latest.contains("left-pad"));
  CHECK(index.latest.at("left-pad") == v("1.5.0"));  // prereleases are not "latest"
}

TEST_CASE("breakdown report uses the exact metric field names") {
  const std::string json = render_breakdown_json(score_breakdown(minimal_package(), std::nullopt, kNow));
  for (const MetricField& field : metric_fields())
    CHECK(json.find("\"" + std::string(field.name) + "\"") != std::string::npos);
  CHECK(json.find("\"total\":2") != std::string::npos);
}
