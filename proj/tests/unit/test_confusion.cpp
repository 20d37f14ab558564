#include <doctest.h>

#include <random>

#include "srank/confusion.hpp"

using namespace srank;

namespace {

const UtcTime kNow = *parse_iso8601("2024-12-01T00:00:00Z");

PackageSnapshot make_pkg(const std::string& name,
                         std::optional<std::string> repo_url = std::nullopt) {
  PackageSnapshot pkg;
  pkg.name = name;
  pkg.normalized_name = normalize_name(name);
  pkg.repo_url = std::move(repo_url);
  pkg.captured_at = kNow;
  return pkg;
}

RepoRegistry paper_registry() {
  std::vector<RegistryEntry> entries = {
      {"https://github.com/pypa/sampleproject", "sampleproject", 5128},
      {"https://github.com/CorwinDev/Discord-Bot", "discord-bot", 742},
      {"https://github.com/encode/httpx", "httpx", 14231},
      {"https://github.com/fake-useragent/fake-useragent", "fake-useragent", 3905},
      {"https://github.com/psf/requests", "requests", 52341},
      {"https://github.com/cuongitl/python-bitget", "python-bitget", 187},
      {"https://github.com/pandas-dev/pandas", "pandas", 44000},
  };
  return RepoRegistry::from_entries(std::move(entries));
}

bool has_rule(const ConfusionVerdict& verdict, const std::string& rule) {
  for (const Finding& finding : verdict.evidence) {
    if (finding.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("damerau-levenshtein counts a transposition as one edit") {
  CHECK(damerau_levenshtein("fakeusreagent", "fakeuseragent") == 1);
  CHECK(damerau_levenshtein("abc", "abc") == 0);
  CHECK(damerau_levenshtein("abc", "acb") == 1);
  CHECK(damerau_levenshtein("abc", "ab") == 1);
  CHECK(damerau_levenshtein("abc", "abd") == 1);
  CHECK(damerau_levenshtein("abc", "") == 3);
  CHECK(damerau_levenshtein("", "ab") == 2);
  CHECK(damerau_levenshtein("kitten", "sitting") == 3);
}

TEST_CASE("name relations match the in-the-wild patterns") {
  const NameRelation typo = name_relation("fake-usreagent", "fake-useragent");
  CHECK(typo.kind == NameRelationKind::small_edit);
  CHECK(typo.edit_distance == 1);

  CHECK(name_relation("frexco-pip-requests", "requests").kind ==
        NameRelationKind::prefix_augmented);
  CHECK(name_relation("python-bitget-api", "python-bitget").kind ==
        NameRelationKind::suffix_augmented);

  const NameRelation same = name_relation("pandas", "pandas");
  CHECK(same.kind == NameRelationKind::exact);
  CHECK(same.edit_distance == 0);

  CHECK(name_relation("numpy", "requests").kind == NameRelationKind::unrelated);
}

TEST_CASE("affix detection works on token boundaries, not substrings") {
  // "discordbotpresence" contains "discord" but is a single token.
  CHECK(name_relation("discordbotpresence", "discord-bot").kind ==
        NameRelationKind::unrelated);
  CHECK(name_relation("python-bitget-connect", "python-bitget").kind ==
        NameRelationKind::suffix_augmented);
  CHECK(name_relation("my-requests", "requests").kind == NameRelationKind::prefix_augmented);
  // Equal token count is never an affix relation.
  CHECK(name_relation("requests", "requests2").kind != NameRelationKind::prefix_augmented);
}

TEST_CASE("small_edit and exact are symmetric; affixes are anti-symmetric") {
  std::mt19937 rng(4242);
  const std::vector<std::string> pool = {
      "requests",        "request",         "再requests",      "fake-useragent",
      "fake-usreagent",  "python-bitget",   "python-bitget-api", "numpy",
      "nunpy",           "pandas",          "panda",            "frexco-pip-requests",
      "a",               "ab",              "ba",               "a-b",
  };
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int i = 0; i < 2'000; ++i) {
    const std::string& a = pool[pick(rng)];
    const std::string& b = pool[pick(rng)];
    const NameRelation ab = name_relation(a, b);
    const NameRelation ba = name_relation(b, a);
    if (ab.kind == NameRelationKind::exact) CHECK(ba.kind == NameRelationKind::exact);
    if (ab.kind == NameRelationKind::small_edit) {
      // The distance-1 relation is symmetric; the reverse direction may be
      // upgraded to an affix kind, which outranks small_edit.
      CHECK(ba.edit_distance == 1);
      CHECK((ba.kind == NameRelationKind::small_edit ||
             ba.kind == NameRelationKind::prefix_augmented ||
             ba.kind == NameRelationKind::suffix_augmented));
    }
    if (ab.kind == NameRelationKind::prefix_augmented)
      CHECK(ba.kind != NameRelationKind::prefix_augmented);
    if (ab.kind == NameRelationKind::suffix_augmented)
      CHECK(ba.kind != NameRelationKind::suffix_augmented);
  }
}

TEST_CASE("repo url canonicalization") {
  const auto ref = parse_repo_url("https://github.com/pypa/sampleproject");
  REQUIRE(ref.has_value());
  CHECK(ref->host == "github.com");
  CHECK(ref->owner == "pypa");
  CHECK(ref->name == "sampleproject");
  CHECK(ref->key() == "github.com/pypa/sampleproject");
  CHECK(ref->display() == "pypa/sampleproject");

  CHECK(parse_repo_url("http://www.github.com/PyPA/SampleProject/")->key() ==
        "github.com/pypa/sampleproject");
  CHECK(parse_repo_url("https://github.com/pypa/sampleproject.git")->key() ==
        "github.com/pypa/sampleproject");
  CHECK(parse_repo_url("git@github.com:pypa/sampleproject.git")->key() ==
        "github.com/pypa/sampleproject");
  CHECK(parse_repo_url("https://github.com/pypa/sampleproject/tree/main")->key() ==
        "github.com/pypa/sampleproject");
  CHECK(parse_repo_url("https://github.com/pypa/sampleproject?tab=readme")->key() ==
        "github.com/pypa/sampleproject");

  CHECK_FALSE(parse_repo_url("https://example.org/").has_value());
  CHECK_FALSE(parse_repo_url("https://github.com/onlyowner").has_value());
  CHECK_FALSE(parse_repo_url("not a url").has_value());
}

TEST_CASE("correlate_releases matches greedily within 24 hours") {
  const UtcTime t0 = *parse_iso8601("2024-06-01T12:00:00Z");
  std::vector<Release> releases = {make_release("1.0.0", t0),
                                   make_release("1.1.0", t0.plus_days(30)),
                                   make_release("1.2.0", t0.plus_days(60))};

  SUBCASE("identical timestamps score 1.0") {
    std::vector<TagRef> tags = {{"v1.0.0", t0},
                                {"v1.1.0", t0.plus_days(30)},
                                {"v1.2.0", t0.plus_days(60)}};
    const CorrelationScore score = correlate_releases(releases, tags);
    CHECK(score.matched == 3);
    CHECK(score.total == 3);
    CHECK(score.score == doctest::Approx(1.0));
  }

  SUBCASE("tags more than 30 days away score 0") {
    std::vector<TagRef> tags = {{"a", t0.minus_days(40)},
                                {"b", t0.plus_days(120)},
                                {"c", t0.plus_days(200)}};
    const CorrelationScore score = correlate_releases(releases, tags);
    CHECK(score.matched == 0);
    CHECK(score.score == doctest::Approx(0.0));
  }

  SUBCASE("two of three within the window") {
    std::vector<TagRef> tags = {{"a", UtcTime{t0.secs + 3600}},
                                {"b", UtcTime{t0.plus_days(30).secs - 7200}},
                                {"c", t0.plus_days(90)}};
    const CorrelationScore score = correlate_releases(releases, tags);
    CHECK(score.matched == 2);
    CHECK(score.total == 3);
    CHECK(score.score == doctest::Approx(2.0 / 3.0));
  }

  SUBCASE("each tag is used at most once") {
    std::vector<Release> burst = {make_release("1.0.0", t0),
                                  make_release("1.0.1", UtcTime{t0.secs + 60})};
    std::vector<TagRef> tags = {{"v", UtcTime{t0.secs + 30}}};
    const CorrelationScore score = correlate_releases(burst, tags);
    CHECK(score.matched == 1);
    CHECK(score.total == 2);
  }

  SUBCASE("empty inputs") {
    CHECK(correlate_releases({}, {}).score == doctest::Approx(0.0));
    CHECK(correlate_releases({}, {}).total == 0);
  }
}

TEST_CASE("classify: registry hit on another package's repository is confusion") {
  const RepoRegistry registry = paper_registry();
  const auto verdict = classify_repo_claim(
      make_pkg("fake-usreagent", "https://github.com/fake-useragent/fake-useragent"),
      std::nullopt, registry);
  CHECK(verdict.verdict == ClaimVerdict::confused);
  CHECK(verdict.victim == "fake-useragent");
  REQUIRE(has_rule(verdict, "name_relation"));
  bool small_edit_seen = false;
  for (const Finding& finding : verdict.evidence)
    if (finding.detail.find("small_edit") != std::string::npos ||
        (finding.rule == "name_relation" && finding.detail.find("distance 1") != std::string::npos))
      small_edit_seen = true;
  CHECK(small_edit_seen);
}

TEST_CASE("classify: a package claiming its own repository verifies") {
  const auto verdict = classify_repo_claim(
      make_pkg("pandas", "https://github.com/pandas-dev/pandas"), std::nullopt,
      paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::verified);
  REQUIRE(!verdict.evidence.empty());
  bool positive = false;
  for (const Finding& finding : verdict.evidence) positive = positive || finding.positive;
  CHECK(positive);
}

TEST_CASE("classify: manifest back-reference verifies unregistered repos") {
  RepoSnapshot repo;
  repo.url = "https://github.com/dev/some-new-tool";
  repo.host = "github.com";
  repo.owner = "dev";
  repo.name = "a-different-repo-name-entirely";
  repo.manifest_package_names = {"Some_New.Tool"};
  repo.captured_at = kNow;
  const auto verdict = classify_repo_claim(
      make_pkg("some-new-tool", repo.url), repo, paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::verified);
  CHECK(has_rule(verdict, "manifest"));
}

TEST_CASE("classify: unrelated name on a registry-known repo is confusion") {
  const auto verdict = classify_repo_claim(
      make_pkg("foo-helper", "https://github.com/pypa/sampleproject"), std::nullopt,
      paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::confused);
  CHECK(verdict.victim == "sampleproject");
}

TEST_CASE("classify: no repo claim is unverifiable") {
  const auto verdict = classify_repo_claim(make_pkg("quiet-pkg"), std::nullopt, paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::unverifiable);
  REQUIRE(verdict.evidence.size() == 1);
  CHECK(verdict.evidence[0].rule == "no_claim");
}

TEST_CASE("classify: exact repo-name match verifies without a registry hit") {
  const auto verdict = classify_repo_claim(
      make_pkg("lonetool", "https://github.com/someone/lonetool"), std::nullopt,
      paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::verified);
}

TEST_CASE("classify: affix relation to a registry owner without a registry hit") {
  // Unregistered repo, but the package name rides on a known package.
  const auto verdict = classify_repo_claim(
      make_pkg("python-bitget-wrapper", "https://github.com/evil/mirror"), std::nullopt,
      paper_registry());
  CHECK(verdict.verdict == ClaimVerdict::confused);
  CHECK(verdict.victim == "python-bitget");
}

TEST_CASE("classify: release correlation is a weak verifier") {
  const UtcTime t0 = *parse_iso8601("2024-03-01T00:00:00Z");
  PackageSnapshot pkg = make_pkg("obscure-sdk", "https://github.com/group/unrelatedrepo");
  pkg.releases = {make_release("1.0.0", t0), make_release("1.1.0", t0.plus_days(20)),
                  make_release("1.2.0", t0.plus_days(40)),
                  make_release("1.3.0", t0.plus_days(60))};
  pkg.captured_at = kNow;

  RepoSnapshot repo;
  repo.url = *pkg.repo_url;
  repo.host = "github.com";
  repo.owner = "group";
  repo.name = "unrelatedrepo";
  repo.captured_at = kNow;

  SUBCASE("four matching tags verify weakly") {
    repo.tags = {{"v1.0.0", UtcTime{t0.secs + 600}},
                 {"v1.1.0", UtcTime{t0.plus_days(20).secs - 600}},
                 {"v1.2.0", UtcTime{t0.plus_days(40).secs + 60}},
                 {"v1.3.0", t0.plus_days(60)}};
    const auto verdict = classify_repo_claim(pkg, repo, paper_registry());
    CHECK(verdict.verdict == ClaimVerdict::verified);
    CHECK(has_rule(verdict, "release_correlation"));
  }

  SUBCASE("two matches are below the floor") {
    repo.tags = {{"v1.0.0", t0}, {"v1.1.0", t0.plus_days(20)}};
    const auto verdict = classify_repo_claim(pkg, repo, paper_registry());
    CHECK(verdict.verdict == ClaimVerdict::unverifiable);
  }
}

TEST_CASE("classify never confuses without a victim, never verifies without evidence") {
  const RepoRegistry registry = paper_registry();
  const std::vector<PackageSnapshot> probes = {
      make_pkg("x", "https://github.com/pypa/sampleproject"),
      make_pkg("requests", "https://github.com/psf/requests"),
      make_pkg("junk"),
      make_pkg("requets", "https://github.com/unknown/unknownrepo"),
      make_pkg("python-bitget-api", "https://github.com/cuongitl/python-bitget"),
  };
  for (const PackageSnapshot& pkg : probes) {
    const auto verdict = classify_repo_claim(pkg, std::nullopt, registry);
    if (verdict.verdict == ClaimVerdict::confused) CHECK(!verdict.victim.empty());
    if (verdict.verdict == ClaimVerdict::verified) {
      bool positive = false;
      for (const Finding& finding : verdict.evidence) positive = positive || finding.positive;
      CHECK(positive);
    }
  }
}

TEST_CASE("classification is deterministic including evidence order") {
  const RepoRegistry registry = paper_registry();
  const PackageSnapshot pkg =
      make_pkg("fake-usreagent", "https://github.com/fake-useragent/fake-useragent");
  const auto first = classify_repo_claim(pkg, std::nullopt, registry);
  const auto second = classify_repo_claim(pkg, std::nullopt, registry);
  CHECK(first.verdict == second.verdict);
  CHECK(first.victim == second.victim);
  REQUIRE(first.evidence.size() == second.evidence.size());
  for (std::size_t i = 0; i < first.evidence.size(); ++i) {
    CHECK(first.evidence[i].rule == second.evidence[i].rule);
    CHECK(first.evidence[i].detail == second.evidence[i].detail);
  }
}

TEST_CASE("an empty registry still classifies through the later rules") {
  const RepoRegistry registry;
  const auto verdict = classify_repo_claim(
      make_pkg("lonetool", "https://github.com/someone/lonetool"), std::nullopt, registry);
  CHECK(verdict.verdict == ClaimVerdict::verified);
}
