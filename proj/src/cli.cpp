#include "mrprio/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mrprio/error.hpp"
#include "mrprio/eval.hpp"
#include "mrprio/metrics.hpp"
#include "mrprio/prioritizer.hpp"
#include "mrprio/report_io.hpp"
#include "mrprio/synth.hpp"

namespace mrprio::cli {
namespace {

struct PrioritizeArgs {
  std::string data;
  std::string class_column = "last";
  bool no_header = false;
  bool numeric_class = false;
  std::string catalog;
  std::string followups;
  std::string metric;
  MetricParams params;
  bool no_standardize = false;
  std::string out = "-";
  std::string diagnostics;
};

struct EvaluateArgs {
  std::string ordering;
  std::string kills;
  std::string times;
  std::vector<double> thresholds = kDefaultThresholds;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
};

struct BaselineArgs {
  std::string kills;
  std::string times;
  std::string coverage;
  std::size_t runs = 100;
  std::vector<double> thresholds = kDefaultThresholds;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
};

struct CompareArgs {
  std::string treatment;
  std::string baseline;
  std::string alternative = "greater";
  std::size_t iterations = 10000;
  double alpha = 0.05;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
};

struct SynthArgs {
  std::size_t mrs = 10;
  std::size_t mutants = 50;
  std::vector<double> kill_prob{0.2};
  TimeProfile times;
  std::size_t elements = 40;
  double coverage_prob = 0.3;
  SynthDatasetOptions dataset;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "-";
  std::string kills_out;
  std::string times_out;
};

void check_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw InputError("at least one threshold is required");
  for (double t : thresholds)
    if (!(t > 0)) throw InputError("thresholds must be positive");
}

int cmd_prioritize(PrioritizeArgs a) {
  CsvOptions csv;
  csv.header = !a.no_header;
  csv.class_column = ClassSelector::parse(a.class_column);
  csv.nominal_class = !a.numeric_class;
  a.params.standardize = !a.no_standardize;
  const MetricKind metric = parse_metric(a.metric);

  const Dataset source = load_dataset(a.data, csv);
  const auto pairs = a.catalog.empty() ? pairs_from_directory(source, a.followups, csv)
                                       : build_pairs(load_catalog(a.catalog), source);
  if (pairs.empty()) throw InputError("no MRs to prioritize");
  const auto scores = score_catalog(pairs, metric, a.params);
  const Normalized normalized = normalize(scores);
  const Ranking ranking = rank(normalized.scores);

  const json params = {{"data", a.data},
                       {"catalog", a.catalog},
                       {"followups", a.followups},
                       {"knn_k", a.params.knn_k},
                       {"contamination", a.params.contamination},
                       {"kmeans_k", a.params.kmeans_k},
                       {"max_iters", a.params.max_iters},
                       {"bins", a.params.cn2.bins},
                       {"beam_width", a.params.cn2.beam_width},
                       {"min_covered", a.params.cn2.min_covered},
                       {"max_conditions", a.params.cn2.max_conditions},
                       {"standardize", a.params.standardize}};
  write_text(a.out, render(ranking_json(ranking, normalized.degenerate, a.params.seed, params)));
  if (!a.diagnostics.empty()) write_text(a.diagnostics, render(diagnostics_json(pairs, scores, a.params.seed)));
  return kOk;
}

int cmd_evaluate(const EvaluateArgs& a) {
  check_thresholds(a.thresholds);
  const KillMatrix km = load_kill_matrix(a.kills, a.times);
  const Ordering order = load_ordering(a.ordering);
  write_text(a.out, render(eval_report_json(evaluate_ordering(order, km, a.thresholds), a.seed)));
  return kOk;
}

int cmd_baseline_random(const BaselineArgs& a) {
  check_thresholds(a.thresholds);
  const KillMatrix km = load_kill_matrix(a.kills, a.times);
  write_text(a.out, render(eval_report_json(random_baseline(km, a.runs, a.seed, a.thresholds), a.seed)));
  return kOk;
}

int cmd_baseline_coverage(const BaselineArgs& a) {
  const Ordering order = coverage_greedy(load_coverage(a.coverage));
  write_text(a.out, render(ordering_json(order, "coverage_greedy", a.seed)));
  return kOk;
}

int cmd_compare(const CompareArgs& a) {
  PermutationTestOptions opts;
  opts.alternative = parse_alternative(a.alternative);
  opts.iterations = a.iterations;
  opts.seed = a.seed;
  const Comparison c = compare_reports(load_eval_report(a.treatment), load_eval_report(a.baseline), opts, a.alpha);
  write_text(a.out, render(comparison_json(c, a.seed)));
  return kOk;
}

int cmd_synth_kills(const SynthArgs& a) {
  if (a.kills_out.empty() || a.times_out.empty()) throw InputError("synth kills needs --kills-out and --times-out");
  const KillMatrix km = synth_kill_matrix(a.mrs, a.mutants, a.kill_prob, a.times, a.seed);
  std::ostringstream kills, times;
  write_kills_csv(kills, km);
  write_times_csv(times, km);
  write_text(a.kills_out, kills.str());
  write_text(a.times_out, times.str());
  return kOk;
}

int cmd_synth_coverage(const SynthArgs& a) {
  std::ostringstream out;
  write_coverage_csv(out, synth_coverage(a.mrs, a.elements, a.coverage_prob, a.seed));
  write_text(a.out, out.str());
  return kOk;
}

int cmd_synth_dataset(SynthArgs a) {
  a.dataset.seed = a.seed;
  write_text(a.out, to_csv(synth_dataset(a.dataset)));
  return kOk;
}

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
  cmd->add_option("--seed", seed, "Master seed, echoed into every output")->capture_default_str();
}

void add_thresholds(CLI::App* cmd, std::vector<double>& thresholds) {
  cmd->add_option("--thresholds", thresholds, "Effective-size thresholds in percentage points")
      ->delimiter(',')
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Diversity-based prioritization of metamorphic relations"};
  app.set_config("--config", "", "INI/TOML config file; command-line flags win on conflict");
  app.require_subcommand(1);

  PrioritizeArgs pa;
  auto* prio = app.add_subcommand("prioritize", "Score a MR catalog with one diversity metric and rank it");
  prio->add_option("--data", pa.data, "Source dataset (.csv or .arff)")->required();
  prio->add_option("--class", pa.class_column, "CSV class column: last, none, 0-based index or name")
      ->capture_default_str();
  prio->add_flag("--no-header", pa.no_header, "CSV files have no header row");
  prio->add_flag("--numeric-class", pa.numeric_class, "Keep a numeric CSV class column numeric");
  auto* cat = prio->add_option("--catalog", pa.catalog, "MR catalog file");
  auto* fol = prio->add_option("--followups", pa.followups, "Directory of pre-built follow-up datasets");
  cat->excludes(fol);
  prio->add_option("--metric", pa.metric, "rule, anomaly, clustering or distribution")->required();
  prio->add_option("--knn-k", pa.params.knn_k, "Neighbours for the KNN outlier score")->capture_default_str();
  prio->add_option("--contamination", pa.params.contamination, "Fraction of rows flagged as outliers")
      ->capture_default_str();
  prio->add_option("--kmeans-k", pa.params.kmeans_k, "Clusters for k-means")->capture_default_str();
  prio->add_option("--max-iters", pa.params.max_iters, "k-means iteration cap")->capture_default_str();
  prio->add_option("--bins", pa.params.cn2.bins, "CN2 equal-width bins per numeric attribute")->capture_default_str();
  prio->add_option("--beam", pa.params.cn2.beam_width, "CN2 beam width")->capture_default_str();
  prio->add_option("--min-covered", pa.params.cn2.min_covered, "CN2 minimum rule coverage")->capture_default_str();
  prio->add_option("--max-conditions", pa.params.cn2.max_conditions, "CN2 maximum rule length")
      ->capture_default_str();
  prio->add_flag("--no-standardize", pa.no_standardize, "Cluster and detect outliers on raw features");
  add_seed(prio, pa.params.seed);
  prio->add_option("--out", pa.out, "Ranking file ('-' for stdout)")->capture_default_str();
  prio->add_option("--diagnostics", pa.diagnostics, "Per-MR metric diagnostics file");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Evaluate an MR ordering against a kill matrix");
  eval->add_option("--ordering,--ranking", ea.ordering, "Ranking, ordering or report file")->required();
  eval->add_option("--kills", ea.kills, "Kill matrix CSV")->required();
  eval->add_option("--times", ea.times, "Execution time CSV")->required();
  add_thresholds(eval, ea.thresholds);
  add_seed(eval, ea.seed);
  eval->add_option("--out", ea.out, "Report file ('-' for stdout)")->capture_default_str();

  BaselineArgs ba;
  auto* base = app.add_subcommand("baseline", "Build a baseline ordering");
  base->require_subcommand(1);
  auto* random = base->add_subcommand("random", "Average over seeded random orderings");
  random->add_option("--kills", ba.kills, "Kill matrix CSV")->required();
  random->add_option("--times", ba.times, "Execution time CSV")->required();
  random->add_option("--runs", ba.runs, "Number of random orderings")->capture_default_str()->check(CLI::PositiveNumber);
  add_thresholds(random, ba.thresholds);
  add_seed(random, ba.seed);
  random->add_option("--out", ba.out, "Report file ('-' for stdout)")->capture_default_str();
  auto* coverage = base->add_subcommand("coverage", "Greedy additional-coverage ordering");
  coverage->add_option("--coverage", ba.coverage, "Coverage matrix CSV")->required();
  add_seed(coverage, ba.seed);
  coverage->add_option("--out", ba.out, "Ordering file ('-' for stdout)")->capture_default_str();

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Compare two evaluation reports");
  cmp->add_option("--treatment", ca.treatment, "Report of the ordering under test")->required();
  cmp->add_option("--baseline", ca.baseline, "Baseline report")->required();
  cmp->add_option("--alternative", ca.alternative, "greater or two-sided")->capture_default_str();
  cmp->add_option("--iterations", ca.iterations, "Monte Carlo resamples beyond 20 pairs")->capture_default_str();
  cmp->add_option("--alpha", ca.alpha, "Significance level")->capture_default_str();
  add_seed(cmp, ca.seed);
  cmp->add_option("--out", ca.out, "Comparison file ('-' for stdout)")->capture_default_str();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate fixtures");
  synth->require_subcommand(1);
  auto* skills = synth->add_subcommand("kills", "Random kill matrix and execution times");
  skills->add_option("--mrs", sa.mrs, "Number of MRs")->capture_default_str();
  skills->add_option("--mutants", sa.mutants, "Number of mutants")->capture_default_str();
  skills->add_option("--kill-prob", sa.kill_prob, "One kill probability, or one per MR")
      ->delimiter(',')
      ->capture_default_str();
  skills->add_option("--min-time", sa.times.min_seconds, "Minimum MR execution seconds")->capture_default_str();
  skills->add_option("--max-time", sa.times.max_seconds, "Maximum MR execution seconds")->capture_default_str();
  add_seed(skills, sa.seed);
  skills->add_option("--kills-out", sa.kills_out, "Kill matrix CSV")->required();
  skills->add_option("--times-out", sa.times_out, "Execution time CSV")->required();
  auto* scov = synth->add_subcommand("coverage", "Random coverage matrix");
  scov->add_option("--mrs", sa.mrs, "Number of MRs")->capture_default_str();
  scov->add_option("--elements", sa.elements, "Number of program elements")->capture_default_str();
  scov->add_option("--prob", sa.coverage_prob, "Coverage probability per cell")->capture_default_str();
  add_seed(scov, sa.seed);
  scov->add_option("--out", sa.out, "Coverage CSV ('-' for stdout)")->capture_default_str();
  auto* sdata = synth->add_subcommand("dataset", "Gaussian-blob classification dataset");
  sdata->add_option("--rows", sa.dataset.rows, "Rows")->capture_default_str();
  sdata->add_option("--features", sa.dataset.features, "Numeric features")->capture_default_str();
  sdata->add_option("--classes", sa.dataset.classes, "Classes")->capture_default_str();
  sdata->add_option("--separation", sa.dataset.separation, "Class centre spacing")->capture_default_str();
  add_seed(sdata, sa.seed);
  sdata->add_option("--out", sa.out, "Dataset CSV ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (prio->parsed()) {
      if (pa.catalog.empty() && pa.followups.empty()) throw InputError("prioritize needs --catalog or --followups");
      return cmd_prioritize(pa);
    }
    if (eval->parsed()) return cmd_evaluate(ea);
    if (random->parsed()) return cmd_baseline_random(ba);
    if (coverage->parsed()) return cmd_baseline_coverage(ba);
    if (cmp->parsed()) return cmd_compare(ca);
    if (skills->parsed()) return cmd_synth_kills(sa);
    if (scov->parsed()) return cmd_synth_coverage(sa);
    if (sdata->parsed()) return cmd_synth_dataset(sa);
    throw InvariantError("no command dispatched");
  } catch (const ApplicabilityError& e) {
    std::cerr << "mrprio: not applicable: " << e.what() << '\n';
    return kApplicabilityError;
  } catch (const InputError& e) {
    std::cerr << "mrprio: input error: " << e.what() << '\n';
    return kInputError;
  } catch (const InvariantError& e) {
    std::cerr << "mrprio: internal error: " << e.what() << '\n';
    return kInvariantError;
  } catch (const std::exception& e) {
    std::cerr << "mrprio: internal error: " << e.what() << '\n';
    return kInvariantError;
  }
}

}  // namespace mrprio::cli
