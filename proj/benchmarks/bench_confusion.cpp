#include <benchmark/benchmark.h>

#include <random>

#include "srank/confusion.hpp"

namespace {

using namespace srank;

const UtcTime kNow = *parse_iso8601("2024-12-01T00:00:00Z");

std::string random_name(std::mt19937& rng, int tokens) {
  static const char* parts[] = {"py", "lib", "fast", "net", "json", "http",
                                "auth", "cloud", "data", "ml", "async", "client"};
  std::uniform_int_distribution<std::size_t> pick(0, std::size(parts) - 1);
  std::string name;
  for (int i = 0; i < tokens; ++i) {
    if (i) name += '-';
    name += parts[pick(rng)];
  }
  return name;
}

void DamerauLevenshtein(benchmark::State& state) {
  std::mt19937 rng(3);
  const std::string a = random_name(rng, static_cast<int>(state.range(0)));
  const std::string b = random_name(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    int distance = damerau_levenshtein(a, b);
    benchmark::DoNotOptimize(distance);
  }
}
BENCHMARK(DamerauLevenshtein)->Arg(2)->Arg(6)->Arg(16);

void ClassifyRepoClaim(benchmark::State& state) {
  std::mt19937 rng(4);
  std::vector<RegistryEntry> entries;
  for (int i = 0; i < state.range(0); ++i) {
    entries.push_back({"https://github.com/owner" + std::to_string(i) + "/repo" +
                           std::to_string(i),
                       random_name(rng, 2) + std::to_string(i), 100});
  }
  const RepoRegistry registry = RepoRegistry::from_entries(std::move(entries));

  PackageSnapshot pkg;
  pkg.name = "probe-pkg";
  pkg.normalized_name = "probe-pkg";
  pkg.repo_url = "https://github.com/unknown/unknownrepo";
  pkg.captured_at = kNow;

  for (auto _ : state) {
    ConfusionVerdict verdict = classify_repo_claim(pkg, std::nullopt, registry);
    benchmark::DoNotOptimize(verdict.verdict);
  }
}
BENCHMARK(ClassifyRepoClaim)->Arg(10)->Arg(100)->Arg(1000);

void NameRelationScan(benchmark::State& state) {
  std::mt19937 rng(5);
  std::vector<std::string> names;
  for (int i = 0; i < 64; ++i) names.push_back(random_name(rng, 3));
  std::size_t i = 0;
  for (auto _ : state) {
    NameRelation relation = name_relation(names[i % 64], names[(i + 1) % 64]);
    benchmark::DoNotOptimize(relation.kind);
    ++i;
  }
}
BENCHMARK(NameRelationScan);

}  // namespace
