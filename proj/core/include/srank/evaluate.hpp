#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "srank/confusion.hpp"
#include "srank/corpus.hpp"
#include "srank/scoring.hpp"

namespace srank {

// Score of one corpus entry at the corpus evaluation time.
int entry_score(const CorpusEntry& entry, UtcTime evaluation_time);

// Per-label percentage of packages at each integer score. The support range
// always covers at least [-5, 32]; labels with no packages get empty maps.
struct ScoreHistogram {
  int support_lo = -5;
  int support_hi = 32;
  std::map<int, double> benign;
  std::map<int, double> malicious;
};

ScoreHistogram distribution(const LabeledCorpus& corpus);

struct StatsRow {
  LabelVerdict label = LabelVerdict::benign;
  int min = 0;
  int max = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1), 0 for n == 1
  double median = 0.0;
};

// One row per non-empty label, benign first.
std::vector<StatsRow> summary_stats(const LabeledCorpus& corpus);

struct SweepRow {
  int threshold = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepRow best;  // max f1, ties broken by smallest threshold
};

// Classification rule: predict malicious iff score < threshold, swept over
// every integer threshold in [lo, hi].
SweepResult threshold_sweep(const LabeledCorpus& corpus, int lo = -5, int hi = 33);

// Copy of the corpus with every malicious entry's status forced to removed.
LabeledCorpus counterfactual_removed(const LabeledCorpus& corpus);

struct PrevalenceRow {
  std::string victim_repo;  // "owner/name" of the exploited repository
  std::int64_t count = 0;
};

struct PrevalenceReport {
  std::vector<PrevalenceRow> rows;  // count descending, then name
  std::int64_t total = 0;           // sum of row counts
  std::int64_t malicious_total = 0;
  double percentage = 0.0;  // 100 * total / malicious_total
};

// Runs classify_repo_claim over every malicious entry and groups the
// confused verdicts by the claimed (victim) repository.
PrevalenceReport confusion_prevalence(const LabeledCorpus& corpus,
                                      const RepoRegistry& registry);

// CSV renderers; fractional values use 4 decimal places.
std::string histogram_csv(const ScoreHistogram& histogram);
std::string stats_csv(const std::vector<StatsRow>& rows);
std::string sweep_csv(const SweepResult& result);
std::string sweep_row_csv(const SweepRow& row);
std::string prevalence_csv(const PrevalenceReport& report);

// Per-package table: name,label plus the 18 metric columns and total.
std::string corpus_breakdowns_csv(const LabeledCorpus& corpus);

}  // namespace srank
