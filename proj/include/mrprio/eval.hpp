#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrprio {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Ordering = std::vector<std::string>;

/// MR × mutant kill table with per-MR execution cost (source + follow-up).
struct KillMatrix {
  std::vector<std::string> mr_ids;
  std::vector<std::string> mutant_ids;
  BoolMatrix kills;
  Eigen::VectorXd exec_time;

  std::size_t num_mrs() const { return mr_ids.size(); }
  std::size_t num_mutants() const { return mutant_ids.size(); }
  /// Killed by at least one MR.
  bool killable(std::size_t mutant) const { return kills.col(static_cast<Eigen::Index>(mutant)).any(); }
  std::vector<std::size_t> killable_mutants() const;
  std::vector<std::size_t> unkillable_mutants() const;
  std::size_t mr_index(const std::string& id) const;

  /// Throws InputError on inconsistent dimensions, duplicate ids or negative times.
  void validate() const;
};

/// MR × program-element coverage table.
struct CoverageMatrix {
  std::vector<std::string> mr_ids;
  std::vector<std::string> element_ids;
  BoolMatrix covered;

  void validate() const;
};

KillMatrix read_kill_matrix(std::istream& kills, std::istream& times);
KillMatrix load_kill_matrix(const std::filesystem::path& kills_path, const std::filesystem::path& times_path);
void write_kills_csv(std::ostream& out, const KillMatrix& km);
void write_times_csv(std::ostream& out, const KillMatrix& km);

CoverageMatrix read_coverage(std::istream& in);
CoverageMatrix load_coverage(const std::filesystem::path& path);
void write_coverage_csv(std::ostream& out, const CoverageMatrix& cov);

/// Row indices of `order` in the kill matrix; throws unless `order` is a
/// permutation of the matrix's MR ids.
std::vector<std::size_t> resolve_order(const Ordering& order, const KillMatrix& km);

/// 1-based position in `order` of the first MR killing each killable mutant,
/// in killable-mutant order.
std::vector<std::size_t> first_killer_positions(const Ordering& order, const KillMatrix& km);

/// Percentage of killable mutants killed by each prefix 1..n of `order`.
std::vector<double> detection_curve(const Ordering& order, const KillMatrix& km);

/// Smallest prefix size m with curve[m+1] − curve[m] < threshold, else n.
std::size_t effective_set_size(std::span<const double> curve, double threshold);

/// APFD = 1 − ΣMRF_i / (n·m) + 1 / (2n) over killable mutants.
double apfd(const Ordering& order, const KillMatrix& km);

/// Mean over killable mutants of the cumulative execution time up to and
/// including the first killing MR.
double avg_time_to_fault(const Ordering& order, const KillMatrix& km);

struct EffectiveSize {
  double threshold = 0;
  std::size_t size = 0;
};

/// Evaluation of one ordering, or the average over several.
struct EvalReport {
  /// The evaluated ordering (the first one when averaged).
  Ordering ordering;
  std::size_t runs = 1;
  std::vector<double> curve;
  double apfd = 0;
  std::vector<EffectiveSize> effective_sizes;
  double avg_time_to_fault = 0;
  std::vector<std::string> killable_mutants;
  std::vector<std::string> unkillable_mutants;
  /// Mean first-killer position per killable mutant.
  std::vector<double> first_killer_positions;
  /// [m-1][j]: fraction of runs in which killable mutant j is killed by the
  /// first m MRs.
  std::vector<std::vector<double>> detection_by_size;
};

inline const std::vector<double> kDefaultThresholds{5.0, 2.5};

EvalReport evaluate_ordering(const Ordering& order, const KillMatrix& km,
                             const std::vector<double>& thresholds = kDefaultThresholds);

/// Averages several orderings. The curve is 100·(total kills)/(killable·runs)
/// so that it equals the exact expectation when all permutations are given.
EvalReport average_orderings(const std::vector<Ordering>& orderings, const KillMatrix& km,
                             const std::vector<double>& thresholds = kDefaultThresholds);

/// `runs` uniform random orderings; run r is shuffled with seed + r.
std::vector<Ordering> random_orderings(const KillMatrix& km, std::size_t runs, std::uint64_t seed);

EvalReport random_baseline(const KillMatrix& km, std::size_t runs = 100, std::uint64_t seed = 0,
                           const std::vector<double>& thresholds = kDefaultThresholds);

/// Greedy additional-coverage ordering. Ties go to catalog order; once no MR
/// adds coverage the rest follow by total coverage descending, then catalog
/// order.
Ordering coverage_greedy(const CoverageMatrix& cov);

enum class Alternative { Greater, TwoSided };

std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& text);

struct PermutationTestOptions {
  Alternative alternative = Alternative::Greater;
  std::size_t iterations = 10000;
  std::uint64_t seed = 0;
  /// Exact enumeration of all 2^n sign patterns up to this many pairs.
  std::size_t exact_limit = 20;
};

/// Paired sign-flip permutation test on the mean difference a − b.
///
/// A sign pattern counts as extreme when its statistic reaches the observed
/// one within 1e-10·Σ|a_i − b_i|. Monte Carlo mode returns (hits + 1) /
/// (iterations + 1).
double permutation_test(std::span<const double> a, std::span<const double> b,
                        const PermutationTestOptions& options = {});

/// 100·(t − b)/b per prefix size; nullopt where the baseline is 0.
std::vector<std::optional<double>> relative_improvement(std::span<const double> treatment,
                                                        std::span<const double> baseline);

/// Per prefix size comparison of two evaluation reports over the same
/// killable mutants.
struct SizeComparison {
  std::size_t size = 0;
  double treatment = 0;
  double baseline = 0;
  std::optional<double> improvement;
  double p_value = 1;
  bool significant = false;
};

struct Comparison {
  Alternative alternative = Alternative::Greater;
  double alpha = 0.05;
  std::vector<SizeComparison> sizes;
  double treatment_apfd = 0;
  double baseline_apfd = 0;
  /// Test on per-mutant first-killer positions (earlier is better).
  double apfd_p_value = 1;
  bool apfd_significant = false;
};

/// Pairs each size's per-mutant detection rates and tests treatment against
/// baseline. Throws InputError when curve lengths or killable mutants differ.
Comparison compare_reports(const EvalReport& treatment, const EvalReport& baseline,
                           const PermutationTestOptions& options = {}, double alpha = 0.05);

struct TimeProfile {
  double min_seconds = 1.0;
  double max_seconds = 10.0;
};

/// Seeded random kill matrix. `kill_prob` holds one probability per MR, or a
/// single value applied to every MR. MR ids are MR1..MRn, mutants m1..mM.
KillMatrix synth_kill_matrix(std::size_t n_mrs, std::size_t n_mutants, const std::vector<double>& kill_prob,
                             const TimeProfile& times, std::uint64_t seed);

}  // namespace mrprio
