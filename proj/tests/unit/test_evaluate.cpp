#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "srank/evaluate.hpp"

using namespace srank;

namespace {

const UtcTime kNow = *parse_iso8601("2024-12-01T00:00:00Z");

std::int64_t power_of_ten(int exponent) {
  std::int64_t power = 1;
  for (int i = 0; i < exponent; ++i) power *= 10;
  return power;
}

// Builds a corpus entry whose score is exactly `score` (any value in
// [-5, 49]) by stacking the minimal package's two metrics with count
// metrics at exact powers of ten, plus the removed penalty when needed.
CorpusEntry entry_with_score(int score, LabelVerdict verdict, int serial) {
  REQUIRE(score >= -5);
  REQUIRE(score <= 49);

  // Baseline: one parseable recent release = follows_semver + recent = 2.
  PackageSnapshot pkg;
  pkg.name = "s" + std::to_string(serial);
  pkg.normalized_name = pkg.name;
  pkg.releases = {make_release("0.0.1", kNow.minus_days(1))};
  pkg.captured_at = kNow;
  int current = 2;

  if (score < -3) {
    pkg.releases.clear();  // drop the 2-point baseline entirely
    current = 0;
  }
  if (score < current) {
    pkg.status = PackageStatus::removed;  // -5
    current -= 5;
  }
  int remaining = score - current;
  const int dep_exp = std::min(remaining / 2, 15);  // x2 multiplier
  if (dep_exp > 0) pkg.dependents_count = power_of_ten(dep_exp);
  remaining -= 2 * dep_exp;
  const int repo_exp = std::min(remaining, 15);  // x1 multiplier
  if (repo_exp > 0) pkg.dependent_repos_count = power_of_ten(repo_exp);
  remaining -= repo_exp;
  if (remaining == 1) {
    pkg.description = "d";
    pkg.homepage_url = "https://example.org";
    pkg.keywords = {"k"};
    --remaining;
  }
  REQUIRE(remaining == 0);

  Label label;
  label.name = pkg.normalized_name;
  label.verdict = verdict;
  label.source = LabelSource::synthetic;
  return {std::move(pkg), std::nullopt, std::move(label)};
}

LabeledCorpus corpus_from_scores(const std::vector<int>& benign,
                                 const std::vector<int>& malicious) {
  LabeledCorpus corpus;
  corpus.evaluation_time = kNow;
  int serial = 0;
  for (int score : benign)
    corpus.entries.push_back(entry_with_score(score, LabelVerdict::benign, serial++));
  for (int score : malicious)
    corpus.entries.push_back(entry_with_score(score, LabelVerdict::malicious, serial++));
  return corpus;
}

// First-principles reference for the sweep: recount per threshold.
SweepRow oracle_row(const std::vector<int>& benign, const std::vector<int>& malicious,
                    int threshold) {
  SweepRow row;
  row.threshold = threshold;
  for (int s : malicious) (s < threshold ? row.tp : row.fn)++;
  for (int s : benign) (s < threshold ? row.fp : row.tn)++;
  row.precision = row.tp + row.fp > 0 ? double(row.tp) / double(row.tp + row.fp) : 0.0;
  row.recall = row.tp + row.fn > 0 ? double(row.tp) / double(row.tp + row.fn) : 0.0;
  row.f1 = row.precision + row.recall > 0
               ? 2 * row.precision * row.recall / (row.precision + row.recall)
               : 0.0;
  return row;
}

}  // namespace

TEST_CASE("entry scores match the requested synthetic values") {
  for (int score : {-3, 0, 2, 3, 7, 9, 31}) {
    const CorpusEntry entry = entry_with_score(score, LabelVerdict::benign, score + 100);
    CHECK(entry_score(entry, kNow) == score);
  }
}

TEST_CASE("distribution percentages per label") {
  const LabeledCorpus corpus = corpus_from_scores({7, 7, 9, 31}, {});
  const ScoreHistogram histogram = distribution(corpus);
  CHECK(histogram.benign.at(7) == doctest::Approx(50.0));
  CHECK(histogram.benign.at(9) == doctest::Approx(25.0));
  CHECK(histogram.benign.at(31) == doctest::Approx(25.0));
  CHECK(histogram.benign.at(0) == doctest::Approx(0.0));
  CHECK(histogram.malicious.empty());

  // Support spans at least [-5, 32] even when unoccupied.
  CHECK(histogram.support_lo <= -5);
  CHECK(histogram.support_hi >= 32);
  CHECK(histogram.benign.count(-5) == 1);
  CHECK(histogram.benign.count(32) == 1);

  double sum = 0;
  for (const auto& [score, pct] : histogram.benign) sum += pct;
  CHECK(sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("histogram percentages sum to 100 on random corpora") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> score(-5, 32);
  std::uniform_int_distribution<int> size(1, 40);
  for (int round = 0; round < 50; ++round) {
    std::vector<int> benign, malicious;
    for (int i = 0, n = size(rng); i < n; ++i) benign.push_back(score(rng));
    for (int i = 0, n = size(rng); i < n; ++i) malicious.push_back(score(rng));
    const ScoreHistogram histogram = distribution(corpus_from_scores(benign, malicious));
    double benign_sum = 0, malicious_sum = 0;
    for (const auto& [s, pct] : histogram.benign) benign_sum += pct;
    for (const auto& [s, pct] : histogram.malicious) malicious_sum += pct;
    CHECK(benign_sum == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(malicious_sum == doctest::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("summary stats for the worked benign sample") {
  const LabeledCorpus corpus = corpus_from_scores({7, 7, 9, 31}, {});
  const auto rows = summary_stats(corpus);
  REQUIRE(rows.size() == 1);
  const StatsRow& row = rows[0];
  CHECK(row.label == LabelVerdict::benign);
  CHECK(row.min == 7);
  CHECK(row.max == 31);
  CHECK(row.mean == doctest::Approx(13.5));
  CHECK(row.median == doctest::Approx(8.0));
  // Sample variance 411/3 = 137.
  CHECK(row.stddev == doctest::Approx(std::sqrt(137.0)).epsilon(1e-12));
  CHECK(row.stddev == doctest::Approx(11.7047).epsilon(1e-4));
}

TEST_CASE("summary stats degenerate single-score label") {
  const LabeledCorpus corpus = corpus_from_scores({}, {5});
  const auto rows = summary_stats(corpus);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].label == LabelVerdict::malicious);
  CHECK(rows[0].min == 5);
  CHECK(rows[0].max == 5);
  CHECK(rows[0].mean == doctest::Approx(5.0));
  CHECK(rows[0].median == doctest::Approx(5.0));
  CHECK(rows[0].stddev == doctest::Approx(0.0));
}

TEST_CASE("threshold sweep reproduces the worked example") {
  const LabeledCorpus corpus = corpus_from_scores({1, 5, 7}, {0, 2, 6});
  const SweepResult result = threshold_sweep(corpus);

  const SweepRow* at3 = nullptr;
  for (const SweepRow& row : result.rows)
    if (row.threshold == 3) at3 = &row;
  REQUIRE(at3 != nullptr);
  CHECK(at3->tp == 2);
  CHECK(at3->fp == 1);
  CHECK(at3->fn == 1);
  CHECK(at3->precision == doctest::Approx(2.0 / 3.0));
  CHECK(at3->recall == doctest::Approx(2.0 / 3.0));
  CHECK(at3->f1 == doctest::Approx(2.0 / 3.0));

  CHECK(result.best.threshold == 7);
  CHECK(result.best.precision == doctest::Approx(0.6));
  CHECK(result.best.recall == doctest::Approx(1.0));
  CHECK(result.best.f1 == doctest::Approx(0.75));
}

TEST_CASE("perfect separation picks the smallest perfect threshold") {
  const LabeledCorpus corpus = corpus_from_scores({10}, {-3});
  const SweepResult result = threshold_sweep(corpus);
  CHECK(result.best.threshold == -2);
  CHECK(result.best.f1 == doctest::Approx(1.0));
}

TEST_CASE("all-benign corpus yields f1 zero everywhere") {
  const LabeledCorpus corpus = corpus_from_scores({1, 2, 3}, {});
  const SweepResult result = threshold_sweep(corpus);
  for (const SweepRow& row : result.rows) CHECK(row.f1 == doctest::Approx(0.0));
  CHECK(result.best.threshold == -5);
}

TEST_CASE("sweep equals the brute-force oracle on 1000 random corpora") {
  std::mt19937 rng(20250509);
  std::uniform_int_distribution<int> score(-5, 32);
  std::uniform_int_distribution<int> size(0, 10);
  for (int round = 0; round < 1'000; ++round) {
    std::vector<int> benign, malicious;
    for (int i = 0, n = size(rng); i < n; ++i) benign.push_back(score(rng));
    for (int i = 0, n = size(rng); i < n; ++i) malicious.push_back(score(rng));
    if (benign.empty() && malicious.empty()) continue;

    const SweepResult result = threshold_sweep(corpus_from_scores(benign, malicious));

    SweepRow best_oracle;
    bool have_best = false;
    REQUIRE(result.rows.size() == 39);  // thresholds -5..33
    for (const SweepRow& row : result.rows) {
      const SweepRow expected = oracle_row(benign, malicious, row.threshold);
      CHECK(row.tp == expected.tp);
      CHECK(row.fp == expected.fp);
      CHECK(row.tn == expected.tn);
      CHECK(row.fn == expected.fn);
      CHECK(row.precision == doctest::Approx(expected.precision).epsilon(1e-12));
      CHECK(row.recall == doctest::Approx(expected.recall).epsilon(1e-12));
      CHECK(row.f1 == doctest::Approx(expected.f1).epsilon(1e-12));
      CHECK(row.tp + row.fn == static_cast<std::int64_t>(malicious.size()));
      CHECK(row.fp + row.tn == static_cast<std::int64_t>(benign.size()));
      if (!have_best || expected.f1 > best_oracle.f1) {
        best_oracle = expected;
        have_best = true;
      }
    }
    CHECK(result.best.threshold == best_oracle.threshold);
    CHECK(result.best.f1 == doctest::Approx(best_oracle.f1).epsilon(1e-12));
  }
}

TEST_CASE("counterfactual forces malicious packages to removed") {
  LabeledCorpus corpus = corpus_from_scores({10, 12}, {3, 8});
  const LabeledCorpus fixed = counterfactual_removed(corpus);

  std::vector<int> malicious_scores;
  for (const CorpusEntry& entry : fixed.entries) {
    if (entry.label.verdict == LabelVerdict::malicious) {
      CHECK(entry.package.status == PackageStatus::removed);
      malicious_scores.push_back(entry_score(entry, kNow));
    } else {
      CHECK(entry.package.status != PackageStatus::removed);
    }
  }
  REQUIRE(malicious_scores.size() == 2);
  CHECK(malicious_scores[0] == -2);
  CHECK(malicious_scores[1] == 3);
}

TEST_CASE("counterfactual leaves already-removed and benign entries alone") {
  LabeledCorpus corpus = corpus_from_scores({5}, {-3});  // -3 is built via removed status
  REQUIRE(corpus.entries[1].package.status == PackageStatus::removed);
  const LabeledCorpus fixed = counterfactual_removed(corpus);
  CHECK(fixed.entries[1].package == corpus.entries[1].package);
  CHECK(fixed.entries[0].package == corpus.entries[0].package);
}

TEST_CASE("counterfactual mean shift identity") {
  std::mt19937 rng(909);
  std::uniform_int_distribution<int> score(0, 20);
  std::uniform_int_distribution<int> size(1, 30);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int round = 0; round < 100; ++round) {
    LabeledCorpus corpus;
    corpus.evaluation_time = kNow;
    int serial = 0;
    std::size_t not_removed = 0;
    const int n = size(rng);
    for (int i = 0; i < n; ++i) {
      // Malicious entries are either active (score >= 2) or already removed
      // (score in [-3, -1], which entry_with_score builds via removal).
      if (coin(rng)) {
        corpus.entries.push_back(
            entry_with_score(score(rng) % 19 + 2, LabelVerdict::malicious, serial++));
        ++not_removed;
      } else {
        corpus.entries.push_back(
            entry_with_score(-(score(rng) % 3) - 1, LabelVerdict::malicious, serial++));
      }
    }

    double mean_before = 0, mean_after = 0;
    const LabeledCorpus fixed = counterfactual_removed(corpus);
    for (int i = 0; i < n; ++i) {
      mean_before += entry_score(corpus.entries[i], kNow);
      mean_after += entry_score(fixed.entries[i], kNow);
    }
    mean_before /= n;
    mean_after /= n;

    const double fraction = static_cast<double>(not_removed) / n;
    CHECK(mean_after == doctest::Approx(mean_before - 5.0 * fraction).epsilon(1e-9));
  }
}

TEST_CASE("prevalence groups confused verdicts by claimed repository") {
  RepoRegistry registry = RepoRegistry::from_entries({
      {"https://github.com/pypa/sampleproject", "sampleproject", 5128},
      {"https://github.com/psf/requests", "requests", 52341},
  });

  LabeledCorpus corpus;
  corpus.evaluation_time = kNow;
  auto add = [&](const std::string& name, std::optional<std::string> url,
                 LabelVerdict verdict) {
    CorpusEntry entry = entry_with_score(2, verdict, static_cast<int>(corpus.entries.size()));
    entry.package.name = name;
    entry.package.normalized_name = normalize_name(name);
    entry.package.repo_url = std::move(url);
    entry.label.name = entry.package.normalized_name;
    corpus.entries.push_back(std::move(entry));
  };
  add("evil-one", "https://github.com/pypa/sampleproject", LabelVerdict::malicious);
  add("evil-two", "https://github.com/pypa/sampleproject", LabelVerdict::malicious);
  add("frexco-pip-requests", "https://github.com/psf/requests", LabelVerdict::malicious);
  add("clean-pkg", std::nullopt, LabelVerdict::malicious);
  add("requests", "https://github.com/psf/requests", LabelVerdict::benign);

  const PrevalenceReport report = confusion_prevalence(corpus, registry);
  CHECK(report.malicious_total == 4);
  CHECK(report.total == 3);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].victim_repo == "pypa/sampleproject");
  CHECK(report.rows[0].count == 2);
  CHECK(report.rows[1].victim_repo == "psf/requests");
  CHECK(report.rows[1].count == 1);
  CHECK(report.percentage == doctest::Approx(75.0));
}

TEST_CASE("prevalence of an empty corpus is empty") {
  LabeledCorpus corpus;
  corpus.evaluation_time = kNow;
  const PrevalenceReport report = confusion_prevalence(corpus, RepoRegistry{});
  CHECK(report.rows.empty());
  CHECK(report.total == 0);
}

TEST_CASE("prevalence counts nothing when the only entry verifies") {
  RepoRegistry registry = RepoRegistry::from_entries(
      {{"https://github.com/psf/requests", "requests", 52341}});
  LabeledCorpus corpus;
  corpus.evaluation_time = kNow;
  CorpusEntry entry = entry_with_score(2, LabelVerdict::malicious, 0);
  entry.package.name = "requests";
  entry.package.normalized_name = "requests";
  entry.package.repo_url = "https://github.com/psf/requests";
  entry.label.name = "requests";
  corpus.entries.push_back(std::move(entry));
  const PrevalenceReport report = confusion_prevalence(corpus, registry);
  CHECK(report.total == 0);
  CHECK(report.malicious_total == 1);
}

TEST_CASE("per-package breakdown table uses the metric names as columns") {
  const LabeledCorpus corpus = corpus_from_scores({2}, {-3});
  const std::string csv = corpus_breakdowns_csv(corpus);
  CHECK(csv.rfind("name,label,basic_info_present,", 0) == 0);
  CHECK(csv.find(",is_removed,total\n") != std::string::npos);
  CHECK(csv.find("s0,benign,") != std::string::npos);
  CHECK(csv.find("s1,malicious,") != std::string::npos);
  CHECK(csv.find(",-5,-3\n") != std::string::npos);  // removed penalty and total
}

TEST_CASE("csv renderers use four decimal places and the declared headers") {
  const LabeledCorpus corpus = corpus_from_scores({1, 5, 7}, {0, 2, 6});
  CHECK(histogram_csv(distribution(corpus)).rfind("score,label,percentage\n", 0) == 0);
  CHECK(stats_csv(summary_stats(corpus)).rfind("label,min,max,mean,std,median\n", 0) == 0);
  const std::string sweep = sweep_csv(threshold_sweep(corpus));
  CHECK(sweep.rfind("threshold,tp,fp,tn,fn,precision,recall,f1\n", 0) == 0);
  CHECK(sweep.find("0.6000,1.0000,0.7500") != std::string::npos);

  const std::string stats = stats_csv(summary_stats(corpus_from_scores({7, 7, 9, 31}, {})));
  CHECK(stats.find("benign,7,31,13.5000,11.7047,8.0000") != std::string::npos);
}
