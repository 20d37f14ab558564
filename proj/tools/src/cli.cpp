#include "srank/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "srank/confusion.hpp"
#include "srank/corpus.hpp"
#include "srank/evaluate.hpp"
#include "srank/evasion.hpp"
#include "srank/scoring.hpp"

namespace srank::cli {

namespace {

struct CommonOptions {
  std::string now_text;
  std::string out_path;
  std::string cache_dir;
  std::string fixture_dir;
  bool offline = false;
  double rate_limit = 1.0;
  int retries = 3;
};

void add_common(CLI::App* cmd, CommonOptions& common, bool with_fetch_options) {
  cmd->add_option("--now", common.now_text,
                  "Evaluation time as ISO-8601 UTC (defaults to the current time)");
  cmd->add_option("--out", common.out_path, "Output file or directory");
  // Accepted everywhere; only the fetching subcommands act on them.
  cmd->add_flag("--offline", common.offline, "Never touch the network; read fixtures");
  cmd->add_option("--cache", common.cache_dir, "Response cache directory");
  if (with_fetch_options) {
    cmd->add_option("--fixtures", common.fixture_dir, "Fixture root for --offline");
    cmd->add_option("--rate", common.rate_limit, "Requests per second (live mode)");
    cmd->add_option("--retries", common.retries, "Retries before a transport error");
  }
}

UtcTime resolve_now(const CommonOptions& common) {
  if (common.now_text.empty()) return utc_now();
  return parse_iso8601_or_throw(common.now_text);
}

FetchPolicy make_policy(const CommonOptions& common) {
  FetchPolicy policy;
  policy.offline = common.offline;
  policy.fixture_dir = common.fixture_dir;
  policy.cache_dir = common.cache_dir;
  policy.rate_limit_per_sec = common.rate_limit;
  policy.max_retries = common.retries;
  return policy;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream file(path, std::ios::trunc | std::ios::binary);
  if (!file) throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
  file << body;
  if (!file.flush()) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

// Sends to the --out target when given, otherwise to the output stream.
// Outputs are line-oriented, so a missing final newline is added.
void emit(const CommonOptions& common, std::ostream& out, const std::string& body) {
  std::string terminated = body;
  if (!terminated.empty() && terminated.back() != '\n') terminated += '\n';
  if (common.out_path.empty()) {
    out << terminated;
  } else {
    write_text(common.out_path, terminated);
  }
}

std::filesystem::path ensure_out_dir(const CommonOptions& common) {
  if (common.out_path.empty())
    throw Error(ErrorKind::Usage, "this subcommand requires --out <directory>");
  std::filesystem::create_directories(common.out_path);
  return common.out_path;
}

struct CorpusInputs {
  std::string corpus_path;
  std::string snapshots_path;
  std::string labels_path;
  bool assume_benign = false;
};

void add_corpus_inputs(CLI::App* cmd, CorpusInputs& inputs) {
  cmd->add_option("--corpus", inputs.corpus_path,
                  "Labeled corpus file (one {package, repo?, label} per line)");
  cmd->add_option("--snapshots", inputs.snapshots_path, "Snapshot file");
  cmd->add_option("--labels", inputs.labels_path, "Label file joined by normalized name");
  cmd->add_flag("--assume-benign", inputs.assume_benign,
                "Treat unlabeled snapshots as benign instead of excluding them");
}

LabeledCorpus resolve_corpus(const CorpusInputs& inputs, UtcTime evaluation_time,
                             std::ostream& err) {
  if (!inputs.corpus_path.empty() && !inputs.snapshots_path.empty())
    throw Error(ErrorKind::Usage, "--corpus and --snapshots are mutually exclusive");
  if (!inputs.corpus_path.empty())
    return load_labeled_corpus(inputs.corpus_path, evaluation_time);
  if (inputs.snapshots_path.empty())
    throw Error(ErrorKind::Usage, "need --corpus or --snapshots");

  const auto snapshots = load_snapshots(inputs.snapshots_path);
  std::vector<Label> labels;
  if (!inputs.labels_path.empty()) labels = load_labels(inputs.labels_path);
  MergeOptions options;
  options.assume_benign = inputs.assume_benign;
  MergeResult merged = merge_labels(snapshots, labels, evaluation_time, options);
  err << "corpus: " << merged.corpus.entries.size() << " entries (" << merged.matched
      << " labeled, " << merged.assumed_benign << " assumed benign, " << merged.excluded
      << " excluded)\n";
  return std::move(merged.corpus);
}

SnapshotRecord find_package(const std::string& snapshots_path, const std::string& name) {
  const auto records = load_snapshots(snapshots_path);
  const std::string wanted = normalize_name(name);
  for (const SnapshotRecord& record : records) {
    if (record.package.normalized_name == wanted) return record;
  }
  throw Error(ErrorKind::NotFound, "package '" + wanted + "' not in " + snapshots_path);
}

TechniqueKind technique_kind_from_name(const std::string& name) {
  static const std::map<std::string, TechniqueKind> kinds = {
      {"add_basic_info", TechniqueKind::add_basic_info},
      {"url_confusion", TechniqueKind::url_confusion},
      {"new_repo", TechniqueKind::new_repo},
      {"add_readme", TechniqueKind::add_readme},
      {"multiple_versions", TechniqueKind::multiple_versions},
      {"follow_semver", TechniqueKind::follow_semver},
      {"recent_release", TechniqueKind::recent_release},
      {"age_package", TechniqueKind::age_package},
      {"version_ge_1", TechniqueKind::version_ge_1},
      {"create_dependents", TechniqueKind::create_dependents},
      {"create_dependent_repos", TechniqueKind::create_dependent_repos},
      {"fake_stars", TechniqueKind::fake_stars},
      {"fake_contributors", TechniqueKind::fake_contributors},
      {"fake_subscribers", TechniqueKind::fake_subscribers},
      {"avoid_prereleases", TechniqueKind::avoid_prereleases},
      {"update_dependencies", TechniqueKind::update_dependencies},
      {"avoid_removal", TechniqueKind::avoid_removal},
  };
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw Error(ErrorKind::Usage, "unknown technique: " + name);
  return it->second;
}

Technique build_technique(TechniqueKind kind, const AttackBudget& budget) {
  switch (kind) {
    case TechniqueKind::url_confusion: {
      RepoSnapshot victim;
      victim.url = budget.victim_url;
      victim.host = "github.com";
      victim.stars = budget.victim_stars;
      victim.contributors_count = budget.victim_contributors;
      victim.has_readme = budget.victim_readme;
      return Technique::url_confusion(std::move(victim));
    }
    case TechniqueKind::new_repo:
      return Technique::new_repo(budget.victim_stars, budget.victim_contributors,
                                 budget.victim_readme);
    case TechniqueKind::create_dependents:
      return Technique::with_count(kind, budget.dependents);
    case TechniqueKind::create_dependent_repos:
      return Technique::with_count(kind, budget.dependent_repos);
    case TechniqueKind::fake_stars:
      return Technique::with_count(kind, budget.victim_stars);
    case TechniqueKind::fake_contributors:
      return Technique::with_count(kind, budget.victim_contributors);
    case TechniqueKind::fake_subscribers:
      return Technique::with_count(kind, budget.subscribers);
    default:
      return Technique::simple(kind);
  }
}

nlohmann::ordered_json feed_entry_json(const FeedEntry& entry) {
  nlohmann::ordered_json obj;
  obj["name"] = entry.name;
  if (entry.version) obj["version"] = *entry.version;
  obj["published_at"] = format_iso8601(entry.published_at);
  obj["feed_kind"] = to_string(entry.feed_kind);
  return obj;
}

nlohmann::ordered_json reference_record_json(const ReferenceProjectRecord& record) {
  nlohmann::ordered_json obj;
  obj["name"] = record.name;
  obj["reported_rank"] = record.reported_rank;
  obj["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [metric, value] : record.metrics) obj["metrics"][metric] = value;
  obj["all_prereleases"] = record.all_prereleases;
  obj["any_outdated_dependencies"] = record.any_outdated_dependencies;
  obj["is_deprecated"] = record.is_deprecated;
  obj["is_unmaintained"] = record.is_unmaintained;
  obj["is_removed"] = record.is_removed;
  return obj;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string verdict_csv_line(const PackageSnapshot& pkg, const ConfusionVerdict& verdict) {
  std::string evidence;
  for (const Finding& finding : verdict.evidence) {
    if (!evidence.empty()) evidence += "; ";
    evidence += finding.rule + ": " + finding.detail;
  }
  std::string line = csv_escape(pkg.normalized_name);
  line += ',' + csv_escape(pkg.repo_url.value_or(""));
  line += ',' + std::string(to_string(verdict.verdict));
  line += ',' + csv_escape(verdict.victim);
  line += ',' + csv_escape(evidence);
  return line;
}

nlohmann::ordered_json verdict_json(const PackageSnapshot& pkg,
                                    const ConfusionVerdict& verdict) {
  nlohmann::ordered_json obj;
  obj["name"] = pkg.normalized_name;
  obj["repo_url"] = pkg.repo_url.value_or("");
  obj["verdict"] = to_string(verdict.verdict);
  obj["victim"] = verdict.victim;
  obj["evidence"] = nlohmann::ordered_json::array();
  for (const Finding& finding : verdict.evidence) {
    nlohmann::ordered_json f;
    f["rule"] = finding.rule;
    f["detail"] = finding.detail;
    f["positive"] = finding.positive;
    obj["evidence"].push_back(std::move(f));
  }
  return obj;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::shared_ptr<Transport> network_override) {
  CLI::App app{"SourceRank package-trust auditing toolkit"};
  app.name("srank");
  app.require_subcommand(1);

  auto make_client = [&](const CommonOptions& common) {
    const FetchPolicy policy = make_policy(common);
    std::shared_ptr<Transport> network = network_override;
    if (!network && !common.offline)
      network = std::make_shared<HttpTransport>(policy.forge_token_env);
    return RegistryClient(policy, network, std::make_shared<SystemClock>());
  };

  // --- score ---------------------------------------------------------------
  auto score_common = std::make_shared<CommonOptions>();
  auto score_snapshots = std::make_shared<std::string>();
  auto score_package = std::make_shared<std::string>();
  auto score_index = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand("score", "Metric breakdown for one package");
    cmd->add_option("--snapshots,--snapshot", *score_snapshots, "Snapshot file")->required();
    cmd->add_option("--package", *score_package, "Package name")->required();
    cmd->add_option("--index", *score_index, "Latest-version index for the outdated check");
    add_common(cmd, *score_common, false);
    cmd->callback([&, score_common, score_snapshots, score_package, score_index] {
      const SnapshotRecord record = find_package(*score_snapshots, *score_package);
      std::optional<DependencyIndex> index;
      if (!score_index->empty()) index = DependencyIndex::load(*score_index);
      const MetricBreakdown breakdown =
          score_breakdown(record.package, record.repo, resolve_now(*score_common),
                          index ? &*index : nullptr);
      emit(*score_common, out, render_breakdown_json(breakdown));
    });
  }

  // --- eval ----------------------------------------------------------------
  auto eval_common = std::make_shared<CommonOptions>();
  auto eval_inputs = std::make_shared<CorpusInputs>();
  {
    CLI::App* cmd = app.add_subcommand("eval", "Score distribution and summary statistics");
    add_corpus_inputs(cmd, *eval_inputs);
    add_common(cmd, *eval_common, false);
    cmd->callback([&, eval_common, eval_inputs] {
      const LabeledCorpus corpus =
          resolve_corpus(*eval_inputs, resolve_now(*eval_common), err);
      const auto dir = ensure_out_dir(*eval_common);
      write_text(dir / "distribution.csv", histogram_csv(distribution(corpus)));
      write_text(dir / "stats.csv", stats_csv(summary_stats(corpus)));
      write_text(dir / "breakdowns.csv", corpus_breakdowns_csv(corpus));
      err << "wrote distribution.csv, stats.csv and breakdowns.csv under "
          << dir.string() << "\n";
    });
  }

  // --- sweep ---------------------------------------------------------------
  auto sweep_common = std::make_shared<CommonOptions>();
  auto sweep_inputs = std::make_shared<CorpusInputs>();
  auto sweep_lo = std::make_shared<int>(-5);
  auto sweep_hi = std::make_shared<int>(33);
  {
    CLI::App* cmd = app.add_subcommand("sweep", "Threshold sweep maximizing the F1-score");
    add_corpus_inputs(cmd, *sweep_inputs);
    cmd->add_option("--lo", *sweep_lo, "Lowest threshold");
    cmd->add_option("--hi", *sweep_hi, "Highest threshold");
    add_common(cmd, *sweep_common, false);
    cmd->callback([&, sweep_common, sweep_inputs, sweep_lo, sweep_hi] {
      const LabeledCorpus corpus =
          resolve_corpus(*sweep_inputs, resolve_now(*sweep_common), err);
      const SweepResult result = threshold_sweep(corpus, *sweep_lo, *sweep_hi);
      if (!sweep_common->out_path.empty()) {
        write_text(sweep_common->out_path, sweep_csv(result));
        err << "wrote " << sweep_common->out_path << "\n";
      } else {
        out << sweep_csv(result);
      }
      out << "threshold,tp,fp,tn,fn,precision,recall,f1\n"
          << sweep_row_csv(result.best) << "\n";
    });
  }

  // --- counterfactual --------------------------------------------------------
  auto counter_common = std::make_shared<CommonOptions>();
  auto counter_inputs = std::make_shared<CorpusInputs>();
  {
    CLI::App* cmd = app.add_subcommand(
        "counterfactual", "Re-evaluate after forcing malicious packages to removed");
    add_corpus_inputs(cmd, *counter_inputs);
    add_common(cmd, *counter_common, false);
    cmd->callback([&, counter_common, counter_inputs] {
      const LabeledCorpus corpus = counterfactual_removed(
          resolve_corpus(*counter_inputs, resolve_now(*counter_common), err));
      const auto dir = ensure_out_dir(*counter_common);
      write_text(dir / "distribution.csv", histogram_csv(distribution(corpus)));
      write_text(dir / "stats.csv", stats_csv(summary_stats(corpus)));
      err << "wrote " << (dir / "distribution.csv").string() << " and "
          << (dir / "stats.csv").string() << "\n";
    });
  }

  // --- evade -----------------------------------------------------------------
  auto evade_common = std::make_shared<CommonOptions>();
  auto evade_snapshots = std::make_shared<std::string>();
  auto evade_package = std::make_shared<std::string>();
  auto evade_budget = std::make_shared<AttackBudget>();
  auto evade_techniques = std::make_shared<std::vector<std::string>>();
  auto evade_json_out = std::make_shared<std::string>();
  {
    CLI::App* cmd =
        app.add_subcommand("evade", "Apply evasion techniques and report the inflation");
    cmd->add_option("--snapshots,--snapshot", *evade_snapshots, "Snapshot file")->required();
    cmd->add_option("--package", *evade_package, "Package name")->required();
    cmd->add_option("--json-out", *evade_json_out, "Also write the report as one JSON object");
    cmd->add_option("--victim-url", evade_budget->victim_url, "URL confusion victim repo URL");
    cmd->add_option("--victim-stars", evade_budget->victim_stars, "Victim stars");
    cmd->add_option("--victim-contributors", evade_budget->victim_contributors,
                    "Victim contributors");
    cmd->add_option("--victim-readme", evade_budget->victim_readme, "Victim has a readme");
    cmd->add_option("--dependents", evade_budget->dependents, "Dependent-package budget");
    cmd->add_option("--dependent-repos", evade_budget->dependent_repos,
                    "Dependent-repository budget");
    cmd->add_option("--subscribers", evade_budget->subscribers, "Subscriber budget");
    cmd->add_option("--techniques", *evade_techniques,
                    "Technique names applied in order (default: the full stack)")
        ->delimiter(',');
    add_common(cmd, *evade_common, false);
    cmd->callback([&, evade_common, evade_snapshots, evade_package, evade_budget,
                   evade_techniques, evade_json_out] {
      const SnapshotRecord record = find_package(*evade_snapshots, *evade_package);
      std::vector<Technique> techniques;
      if (evade_techniques->empty()) {
        techniques = default_technique_stack(*evade_budget);
      } else {
        for (const std::string& name : *evade_techniques)
          techniques.push_back(build_technique(technique_kind_from_name(name), *evade_budget));
      }
      const EvasionReport report = plan_max_inflation(
          record.package, record.repo, techniques, resolve_now(*evade_common));
      emit(*evade_common, out, render_evasion_csv(report));
      if (!evade_json_out->empty())
        write_text(*evade_json_out, render_evasion_json(report) + "\n");
      err << "initial score " << report.initial_score << ", final score "
          << report.final_score << "\n";
    });
  }

  // --- confusion ---------------------------------------------------------------
  auto confusion_common = std::make_shared<CommonOptions>();
  auto confusion_inputs = std::make_shared<CorpusInputs>();
  auto confusion_registry = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand(
        "confusion", "Repository-claim verdicts and URL-confusion prevalence");
    add_corpus_inputs(cmd, *confusion_inputs);
    cmd->add_option("--registry", *confusion_registry,
                    "Repository ownership registry file")
        ->required();
    add_common(cmd, *confusion_common, false);
    cmd->callback([&, confusion_common, confusion_inputs, confusion_registry] {
      const LabeledCorpus corpus =
          resolve_corpus(*confusion_inputs, resolve_now(*confusion_common), err);
      const RepoRegistry registry = RepoRegistry::load(*confusion_registry);
      const auto dir = ensure_out_dir(*confusion_common);

      std::string jsonl;
      std::string csv = "name,repo_url,verdict,victim,evidence\n";
      for (const CorpusEntry& entry : corpus.entries) {
        const ConfusionVerdict verdict =
            classify_repo_claim(entry.package, entry.repo, registry);
        jsonl += verdict_json(entry.package, verdict).dump() + "\n";
        csv += verdict_csv_line(entry.package, verdict) + "\n";
      }
      const PrevalenceReport prevalence = confusion_prevalence(corpus, registry);
      write_text(dir / "verdicts.jsonl", jsonl);
      write_text(dir / "verdicts.csv", csv);
      write_text(dir / "prevalence.csv", prevalence_csv(prevalence));
      char pct[32];
      std::snprintf(pct, sizeof(pct), "%.1f", prevalence.percentage);
      err << "confused " << prevalence.total << " of " << prevalence.malicious_total
          << " malicious packages (" << pct << "%)\n";
    });
  }

  // --- fetch-feed -----------------------------------------------------------
  auto feed_common = std::make_shared<CommonOptions>();
  auto feed_kind_name = std::make_shared<std::string>("packages");
  auto feed_cutoff = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand("fetch-feed", "Pull the new-packages or updates feed");
    cmd->add_option("--kind", *feed_kind_name, "packages|releases")
        ->check(CLI::IsMember({"packages", "releases"}));
    cmd->add_option("--cutoff", *feed_cutoff, "Keep entries newer than this ISO-8601 time");
    add_common(cmd, *feed_common, true);
    cmd->callback([&, feed_common, feed_kind_name, feed_cutoff] {
      const FeedKind kind =
          *feed_kind_name == "packages" ? FeedKind::new_packages : FeedKind::new_releases;
      const UtcTime cutoff =
          feed_cutoff->empty() ? UtcTime{0} : parse_iso8601_or_throw(*feed_cutoff);
      RegistryClient client = make_client(*feed_common);
      std::string body;
      for (const FeedEntry& entry : client.fetch_feed(kind, cutoff))
        body += feed_entry_json(entry).dump() + "\n";
      emit(*feed_common, out, body);
    });
  }

  // --- fetch-package ----------------------------------------------------------
  auto pkg_common = std::make_shared<CommonOptions>();
  auto pkg_name = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand("fetch-package", "Pull one package's metadata");
    cmd->add_option("--name", *pkg_name, "Package name")->required();
    add_common(cmd, *pkg_common, true);
    cmd->callback([&, pkg_common, pkg_name] {
      RegistryClient client = make_client(*pkg_common);
      SnapshotRecord record;
      record.package = client.fetch_package_metadata(*pkg_name, resolve_now(*pkg_common));
      emit(*pkg_common, out, render_snapshot_record(record));
    });
  }

  // --- fetch-repo --------------------------------------------------------------
  auto repo_common = std::make_shared<CommonOptions>();
  auto repo_url = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand("fetch-repo", "Pull forge metadata for a repository");
    cmd->add_option("--url", *repo_url, "Repository URL")->required();
    add_common(cmd, *repo_common, true);
    cmd->callback([&, repo_common, repo_url] {
      RegistryClient client = make_client(*repo_common);
      const RepoSnapshot repo =
          client.fetch_repo_metadata(*repo_url, resolve_now(*repo_common));
      emit(*repo_common, out, render_repo_record(repo));
    });
  }

  // --- fetch-reference -----------------------------------------------------------
  auto ref_common = std::make_shared<CommonOptions>();
  auto ref_name = std::make_shared<std::string>();
  auto ref_snapshots = std::make_shared<std::string>();
  {
    CLI::App* cmd = app.add_subcommand(
        "fetch-reference", "Pull the provider's record; optionally check parity");
    cmd->add_option("--name", *ref_name, "Package name")->required();
    cmd->add_option("--snapshots", *ref_snapshots,
                    "Recompute from this snapshot file and report parity");
    add_common(cmd, *ref_common, true);
    cmd->callback([&, ref_common, ref_name, ref_snapshots] {
      RegistryClient client = make_client(*ref_common);
      const ReferenceProjectRecord record = client.fetch_reference_record(*ref_name);
      nlohmann::ordered_json obj = reference_record_json(record);
      if (!ref_snapshots->empty()) {
        const SnapshotRecord snapshot = find_package(*ref_snapshots, *ref_name);
        const MetricBreakdown breakdown =
            score_breakdown(snapshot.package, snapshot.repo, resolve_now(*ref_common));
        nlohmann::ordered_json parity;
        parity["reported_rank"] = record.reported_rank;
        parity["recomputed_total"] = breakdown.total;
        parity["match"] = record.reported_rank == breakdown.total;
        nlohmann::ordered_json diffs = nlohmann::ordered_json::object();
        for (const MetricField& field : metric_fields()) {
          const auto it = record.metrics.find(field.name);
          if (it == record.metrics.end()) continue;
          if (it->second != breakdown.*(field.member)) {
            nlohmann::ordered_json diff;
            diff["reported"] = it->second;
            diff["recomputed"] = breakdown.*(field.member);
            diffs[field.name] = std::move(diff);
          }
        }
        parity["metric_mismatches"] = std::move(diffs);
        obj["parity"] = std::move(parity);
        err << (record.reported_rank == breakdown.total ? "parity: match\n"
                                                        : "parity: mismatch\n");
      }
      emit(*ref_common, out, obj.dump());
    });
  }

  // --- labels-osv -------------------------------------------------------------
  auto osv_common = std::make_shared<CommonOptions>();
  auto osv_dir = std::make_shared<std::string>();
  auto osv_ecosystem = std::make_shared<std::string>("PyPI");
  {
    CLI::App* cmd =
        app.add_subcommand("labels-osv", "Extract malicious labels from OSV advisories");
    cmd->add_option("--dir", *osv_dir, "Advisory directory")->required();
    cmd->add_option("--ecosystem", *osv_ecosystem, "Ecosystem filter (default PyPI)");
    add_common(cmd, *osv_common, false);
    cmd->callback([&, osv_common, osv_dir, osv_ecosystem] {
      const OsvLoadResult result = load_osv_labels(*osv_dir, *osv_ecosystem);
      std::string body;
      for (const Label& label : result.labels) body += render_label_record(label) + "\n";
      emit(*osv_common, out, body);
      err << result.labels.size() << " labels, " << result.skipped
          << " non-advisory files skipped\n";
    });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace srank::cli
