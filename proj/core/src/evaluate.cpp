#include "srank/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace srank {

namespace {

std::string fixed4(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::vector<int> label_scores(const LabeledCorpus& corpus, LabelVerdict label) {
  std::vector<int> scores;
  for (const CorpusEntry& entry : corpus.entries) {
    if (entry.label.verdict == label)
      scores.push_back(entry_score(entry, corpus.evaluation_time));
  }
  return scores;
}

std::map<int, double> percentage_map(const std::vector<int>& scores, int lo, int hi) {
  std::map<int, double> out;
  if (scores.empty()) return out;
  for (int score = lo; score <= hi; ++score) out[score] = 0.0;
  const double unit = 100.0 / static_cast<double>(scores.size());
  for (int score : scores) out[score] += unit;
  return out;
}

StatsRow stats_for(LabelVerdict label, std::vector<int> scores) {
  StatsRow row;
  row.label = label;
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  row.min = scores.front();
  row.max = scores.back();

  double sum = 0.0;
  for (int s : scores) sum += s;
  row.mean = sum / static_cast<double>(n);

  if (n > 1) {
    double ss = 0.0;
    for (int s : scores) ss += (s - row.mean) * (s - row.mean);
    row.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }

  row.median = n % 2 == 1 ? scores[n / 2]
                          : (scores[n / 2 - 1] + scores[n / 2]) / 2.0;
  return row;
}

}  // namespace

int entry_score(const CorpusEntry& entry, UtcTime evaluation_time) {
  return score_breakdown(entry.package, entry.repo, evaluation_time).total;
}

ScoreHistogram distribution(const LabeledCorpus& corpus) {
  const std::vector<int> benign = label_scores(corpus, LabelVerdict::benign);
  const std::vector<int> malicious = label_scores(corpus, LabelVerdict::malicious);

  ScoreHistogram histogram;
  for (int s : benign) {
    histogram.support_lo = std::min(histogram.support_lo, s);
    histogram.support_hi = std::max(histogram.support_hi, s);
  }
  for (int s : malicious) {
    histogram.support_lo = std::min(histogram.support_lo, s);
    histogram.support_hi = std::max(histogram.support_hi, s);
  }
  histogram.benign = percentage_map(benign, histogram.support_lo, histogram.support_hi);
  histogram.malicious = percentage_map(malicious, histogram.support_lo, histogram.support_hi);
  return histogram;
}

std::vector<StatsRow> summary_stats(const LabeledCorpus& corpus) {
  std::vector<StatsRow> rows;
  if (auto scores = label_scores(corpus, LabelVerdict::benign); !scores.empty())
    rows.push_back(stats_for(LabelVerdict::benign, std::move(scores)));
  if (auto scores = label_scores(corpus, LabelVerdict::malicious); !scores.empty())
    rows.push_back(stats_for(LabelVerdict::malicious, std::move(scores)));
  return rows;
}

SweepResult threshold_sweep(const LabeledCorpus& corpus, int lo, int hi) {
  std::vector<int> benign = label_scores(corpus, LabelVerdict::benign);
  std::vector<int> malicious = label_scores(corpus, LabelVerdict::malicious);
  std::sort(benign.begin(), benign.end());
  std::sort(malicious.begin(), malicious.end());

  auto count_below = [](const std::vector<int>& sorted, int threshold) {
    return static_cast<std::int64_t>(
        std::lower_bound(sorted.begin(), sorted.end(), threshold) - sorted.begin());
  };

  SweepResult result;
  bool have_best = false;
  for (int threshold = lo; threshold <= hi; ++threshold) {
    SweepRow row;
    row.threshold = threshold;
    row.tp = count_below(malicious, threshold);
    row.fn = static_cast<std::int64_t>(malicious.size()) - row.tp;
    row.fp = count_below(benign, threshold);
    row.tn = static_cast<std::int64_t>(benign.size()) - row.fp;
    row.precision = row.tp + row.fp > 0
                        ? static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fp)
                        : 0.0;
    row.recall = row.tp + row.fn > 0
                     ? static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fn)
                     : 0.0;
    row.f1 = row.precision + row.recall > 0.0
                 ? 2.0 * row.precision * row.recall / (row.precision + row.recall)
                 : 0.0;
    if (!have_best || row.f1 > result.best.f1) {
      result.best = row;
      have_best = true;
    }
    result.rows.push_back(row);
  }
  return result;
}

LabeledCorpus counterfactual_removed(const LabeledCorpus& corpus) {
  LabeledCorpus out = corpus;
  for (CorpusEntry& entry : out.entries) {
    if (entry.label.verdict == LabelVerdict::malicious)
      entry.package.status = PackageStatus::removed;
  }
  return out;
}

PrevalenceReport confusion_prevalence(const LabeledCorpus& corpus,
                                      const RepoRegistry& registry) {
  PrevalenceReport report;
  std::map<std::string, std::int64_t> counts;
  for (const CorpusEntry& entry : corpus.entries) {
    if (entry.label.verdict != LabelVerdict::malicious) continue;
    ++report.malicious_total;
    const ConfusionVerdict verdict = classify_repo_claim(entry.package, entry.repo, registry);
    if (verdict.verdict != ClaimVerdict::confused) continue;
    // Group by the repository the package claims: that is the exploited one.
    std::string victim_repo = verdict.victim;
    if (entry.package.repo_url) {
      if (const auto ref = parse_repo_url(*entry.package.repo_url)) victim_repo = ref->display();
    }
    ++counts[victim_repo];
    ++report.total;
  }
  for (auto& [repo, count] : counts) report.rows.push_back({repo, count});
  std::sort(report.rows.begin(), report.rows.end(),
            [](const PrevalenceRow& a, const PrevalenceRow& b) {
              if (a.count != b.count) return a.count > b.count;
              return a.victim_repo < b.victim_repo;
            });
  report.percentage = report.malicious_total > 0
                          ? 100.0 * static_cast<double>(report.total) /
                                static_cast<double>(report.malicious_total)
                          : 0.0;
  return report;
}

std::string histogram_csv(const ScoreHistogram& histogram) {
  std::string out = "score,label,percentage\n";
  for (const auto& [score, pct] : histogram.benign)
    out += std::to_string(score) + ",benign," + fixed4(pct) + "\n";
  for (const auto& [score, pct] : histogram.malicious)
    out += std::to_string(score) + ",malicious," + fixed4(pct) + "\n";
  return out;
}

std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::string out = "label,min,max,mean,std,median\n";
  for (const StatsRow& row : rows) {
    out += to_string(row.label);
    out += ',' + std::to_string(row.min);
    out += ',' + std::to_string(row.max);
    out += ',' + fixed4(row.mean);
    out += ',' + fixed4(row.stddev);
    out += ',' + fixed4(row.median);
    out += '\n';
  }
  return out;
}

std::string sweep_row_csv(const SweepRow& row) {
  std::string out = std::to_string(row.threshold);
  out += ',' + std::to_string(row.tp);
  out += ',' + std::to_string(row.fp);
  out += ',' + std::to_string(row.tn);
  out += ',' + std::to_string(row.fn);
  out += ',' + fixed4(row.precision);
  out += ',' + fixed4(row.recall);
  out += ',' + fixed4(row.f1);
  return out;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "threshold,tp,fp,tn,fn,precision,recall,f1\n";
  for (const SweepRow& row : result.rows) out += sweep_row_csv(row) + "\n";
  return out;
}

std::string prevalence_csv(const PrevalenceReport& report) {
  std::string out = "victim_repo,count\n";
  for (const PrevalenceRow& row : report.rows)
    out += row.victim_repo + "," + std::to_string(row.count) + "\n";
  out += "total," + std::to_string(report.total) + "\n";
  return out;
}

std::string corpus_breakdowns_csv(const LabeledCorpus& corpus) {
  std::string out = "name,label," + breakdown_csv_header() + "\n";
  for (const CorpusEntry& entry : corpus.entries) {
    const MetricBreakdown b =
        score_breakdown(entry.package, entry.repo, corpus.evaluation_time);
    out += entry.package.normalized_name;
    out += ',';
    out += to_string(entry.label.verdict);
    out += ',';
    out += breakdown_csv_row(b);
    out += '\n';
  }
  return out;
}

}  // namespace srank
