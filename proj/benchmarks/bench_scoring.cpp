#include <benchmark/benchmark.h>

#include <random>

#include "srank/evaluate.hpp"
#include "srank/scoring.hpp"
#include "srank/semver.hpp"

namespace {

using namespace srank;

const UtcTime kNow = *parse_iso8601("2024-12-01T00:00:00Z");

PackageSnapshot sample_package(int releases) {
  PackageSnapshot pkg;
  pkg.name = "bench";
  pkg.normalized_name = "bench";
  pkg.description = "benchmark package";
  pkg.homepage_url = "https://example.org";
  pkg.repo_url = "https://github.com/org/bench";
  pkg.keywords = {"bench", "mark"};
  for (int i = 0; i < releases; ++i)
    pkg.releases.push_back(
        make_release("1." + std::to_string(i) + ".0", kNow.minus_days(releases - i)));
  pkg.dependents_count = 4821;
  pkg.dependent_repos_count = 312;
  pkg.subscribers_count = 77;
  pkg.captured_at = kNow;
  return pkg;
}

RepoSnapshot sample_repo() {
  RepoSnapshot repo;
  repo.url = "https://github.com/org/bench";
  repo.host = "github.com";
  repo.owner = "org";
  repo.name = "bench";
  repo.stars = 48211;
  repo.contributors_count = 214;
  repo.has_readme = true;
  repo.captured_at = kNow;
  return repo;
}

void ScoreBreakdown(benchmark::State& state) {
  const PackageSnapshot pkg = sample_package(static_cast<int>(state.range(0)));
  const std::optional<RepoSnapshot> repo = sample_repo();
  for (auto _ : state) {
    MetricBreakdown b = score_breakdown(pkg, repo, kNow);
    benchmark::DoNotOptimize(b.total);
  }
}
BENCHMARK(ScoreBreakdown)->Arg(1)->Arg(8)->Arg(64)->Arg(512);

void LogBucket(benchmark::State& state) {
  std::mt19937 rng(1);
  std::uniform_int_distribution<std::int64_t> count(0, 10'000'000);
  for (auto _ : state) {
    int bucket = log_bucket(count(rng), ScalingRule::half());
    benchmark::DoNotOptimize(bucket);
  }
}
BENCHMARK(LogBucket);

void ParseSemver(benchmark::State& state) {
  const std::vector<std::string> inputs = {
      "1.2.3", "10.20.30", "1.0.0-alpha.1", "2.0.0-rc.1+build.5114",
      "1.2.3----RC-SNAPSHOT.12.9.1--.12+788", "not-a-version", "1.0", "v2.1.3"};
  std::size_t i = 0;
  for (auto _ : state) {
    auto result = semver::parse(inputs[i++ % inputs.size()]);
    benchmark::DoNotOptimize(result.ok());
  }
}
BENCHMARK(ParseSemver);

void ThresholdSweep(benchmark::State& state) {
  std::mt19937 rng(2);
  std::uniform_int_distribution<int> dep(0, 6);
  LabeledCorpus corpus;
  corpus.evaluation_time = kNow;
  for (int i = 0; i < state.range(0); ++i) {
    PackageSnapshot pkg = sample_package(3);
    pkg.name = "p" + std::to_string(i);
    pkg.normalized_name = pkg.name;
    std::int64_t power = 1;
    for (int k = dep(rng); k > 0; --k) power *= 10;
    pkg.dependent_repos_count = power;
    Label label;
    label.name = pkg.normalized_name;
    label.verdict = i % 3 == 0 ? LabelVerdict::malicious : LabelVerdict::benign;
    label.source = LabelSource::synthetic;
    corpus.entries.push_back({std::move(pkg), std::nullopt, std::move(label)});
  }
  for (auto _ : state) {
    SweepResult result = threshold_sweep(corpus);
    benchmark::DoNotOptimize(result.best.threshold);
  }
}
BENCHMARK(ThresholdSweep)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace
