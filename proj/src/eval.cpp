#include "mrprio/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "mrprio/dataset.hpp"
#include "mrprio/error.hpp"
#include "mrprio/rng.hpp"

namespace mrprio {
namespace {

void check_unique(const std::vector<std::string>& ids, const std::string& what) {
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (id.empty()) throw InputError("empty " + what + " id");
    if (!seen.insert(id).second) throw InputError("duplicate " + what + " id '" + id + "'");
  }
}

// Reads a `mr_id,<column ids>...` table of 0/1 cells.
void read_indicator_table(std::istream& in, const std::string& what, std::vector<std::string>& row_ids,
                          std::vector<std::string>& col_ids, BoolMatrix& cells) {
  const auto records = parse_csv_records(in);
  if (records.empty()) throw InputError(what + ": empty file");
  const auto& header = records.front();
  if (header.empty() || header.front() != "mr_id") throw InputError(what + ": header must start with 'mr_id'");
  col_ids.assign(header.begin() + 1, header.end());
  row_ids.clear();
  cells.resize(static_cast<Eigen::Index>(records.size() - 1), static_cast<Eigen::Index>(col_ids.size()));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw InputError(what + ": dimension mismatch on line " + std::to_string(r + 1) + " (" + std::to_string(rec.size()) +
                       " fields, header has " + std::to_string(header.size()) + ")");
    row_ids.push_back(rec.front());
    for (std::size_t c = 1; c < rec.size(); ++c) {
      if (rec[c] != "0" && rec[c] != "1")
        throw InputError(what + ": line " + std::to_string(r + 1) + ": expected 0 or 1, got '" + rec[c] + "'");
      cells(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = rec[c] == "1";
    }
  }
}

void write_indicator_table(std::ostream& out, const std::vector<std::string>& row_ids,
                           const std::vector<std::string>& col_ids, const BoolMatrix& cells) {
  out << "mr_id";
  for (const auto& c : col_ids) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < row_ids.size(); ++r) {
    out << row_ids[r];
    for (std::size_t c = 0; c < col_ids.size(); ++c)
      out << ',' << (cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) ? '1' : '0');
    out << '\n';
  }
}

std::vector<std::size_t> require_killable(const KillMatrix& km) {
  auto killable = km.killable_mutants();
  if (killable.empty()) throw ApplicabilityError("kill matrix has no killable mutants");
  return killable;
}

// Position (1-based) of the first killer of each killable mutant, given row
// indices of the ordering.
std::vector<std::size_t> positions_for(const std::vector<std::size_t>& rows, const KillMatrix& km,
                                       const std::vector<std::size_t>& killable) {
  std::vector<std::size_t> pos;
  pos.reserve(killable.size());
  for (auto j : killable) {
    std::size_t p = 0;
    while (!km.kills(static_cast<Eigen::Index>(rows[p]), static_cast<Eigen::Index>(j))) ++p;
    pos.push_back(p + 1);
  }
  return pos;
}

}  // namespace

std::vector<std::size_t> KillMatrix::killable_mutants() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < num_mutants(); ++j)
    if (killable(j)) out.push_back(j);
  return out;
}

std::vector<std::size_t> KillMatrix::unkillable_mutants() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < num_mutants(); ++j)
    if (!killable(j)) out.push_back(j);
  return out;
}

std::size_t KillMatrix::mr_index(const std::string& id) const {
  auto it = std::find(mr_ids.begin(), mr_ids.end(), id);
  if (it == mr_ids.end()) throw InputError("MR '" + id + "' is not in the kill matrix");
  return static_cast<std::size_t>(it - mr_ids.begin());
}

void KillMatrix::validate() const {
  check_unique(mr_ids, "MR");
  check_unique(mutant_ids, "mutant");
  if (mr_ids.empty()) throw InputError("kill matrix has no MRs");
  if (kills.rows() != static_cast<Eigen::Index>(mr_ids.size()) || kills.cols() != static_cast<Eigen::Index>(mutant_ids.size()))
    throw InputError("kill matrix dimension mismatch");
  if (exec_time.size() != static_cast<Eigen::Index>(mr_ids.size())) throw InputError("execution time count mismatch");
  for (Eigen::Index i = 0; i < exec_time.size(); ++i)
    if (!(exec_time(i) >= 0) || !std::isfinite(exec_time(i)))
      throw InputError("MR '" + mr_ids[static_cast<std::size_t>(i)] + "' has a negative or invalid execution time");
}

void CoverageMatrix::validate() const {
  check_unique(mr_ids, "MR");
  check_unique(element_ids, "element");
  if (mr_ids.empty()) throw InputError("coverage matrix has no MRs");
  if (covered.rows() != static_cast<Eigen::Index>(mr_ids.size()) ||
      covered.cols() != static_cast<Eigen::Index>(element_ids.size()))
    throw InputError("coverage matrix dimension mismatch");
}

KillMatrix read_kill_matrix(std::istream& kills, std::istream& times) {
  KillMatrix km;
  read_indicator_table(kills, "kills", km.mr_ids, km.mutant_ids, km.kills);

  const auto records = parse_csv_records(times);
  if (records.empty()) throw InputError("times: empty file");
  if (records.front() != std::vector<std::string>{"mr_id", "exec_seconds"})
    throw InputError("times: header must be 'mr_id,exec_seconds'");
  std::map<std::string, double> seconds;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != 2) throw InputError("times: line " + std::to_string(r + 1) + " must have 2 fields");
    auto v = parse_number(rec[1]);
    if (!v) throw InputError("times: line " + std::to_string(r + 1) + ": '" + rec[1] + "' is not a number");
    if (*v < 0) throw InputError("times: MR '" + rec[0] + "' has negative time");
    if (!seconds.emplace(rec[0], *v).second) throw InputError("times: duplicate MR '" + rec[0] + "'");
  }
  km.exec_time.resize(static_cast<Eigen::Index>(km.mr_ids.size()));
  for (std::size_t i = 0; i < km.mr_ids.size(); ++i) {
    auto it = seconds.find(km.mr_ids[i]);
    if (it == seconds.end()) throw InputError("times: no execution time for MR '" + km.mr_ids[i] + "'");
    km.exec_time(static_cast<Eigen::Index>(i)) = it->second;
  }
  for (const auto& [id, t] : seconds)
    if (std::find(km.mr_ids.begin(), km.mr_ids.end(), id) == km.mr_ids.end())
      throw InputError("times: unknown MR '" + id + "' (not in kills file)");
  km.validate();
  return km;
}

KillMatrix load_kill_matrix(const std::filesystem::path& kills_path, const std::filesystem::path& times_path) {
  std::ifstream kills(kills_path), times(times_path);
  if (!kills) throw InputError("cannot open '" + kills_path.string() + "'");
  if (!times) throw InputError("cannot open '" + times_path.string() + "'");
  return read_kill_matrix(kills, times);
}

void write_kills_csv(std::ostream& out, const KillMatrix& km) {
  write_indicator_table(out, km.mr_ids, km.mutant_ids, km.kills);
}

void write_times_csv(std::ostream& out, const KillMatrix& km) {
  out << "mr_id,exec_seconds\n";
  for (std::size_t i = 0; i < km.num_mrs(); ++i)
    out << km.mr_ids[i] << ',' << format_number(km.exec_time(static_cast<Eigen::Index>(i))) << '\n';
}

CoverageMatrix read_coverage(std::istream& in) {
  CoverageMatrix cov;
  read_indicator_table(in, "coverage", cov.mr_ids, cov.element_ids, cov.covered);
  cov.validate();
  return cov;
}

CoverageMatrix load_coverage(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_coverage(in);
}

void write_coverage_csv(std::ostream& out, const CoverageMatrix& cov) {
  write_indicator_table(out, cov.mr_ids, cov.element_ids, cov.covered);
}

std::vector<std::size_t> resolve_order(const Ordering& order, const KillMatrix& km) {
  if (order.size() != km.num_mrs())
    throw InputError("ordering has " + std::to_string(order.size()) + " MRs but the kill matrix has " +
                     std::to_string(km.num_mrs()));
  std::vector<std::size_t> rows;
  std::vector<bool> seen(km.num_mrs(), false);
  for (const auto& id : order) {
    const auto i = km.mr_index(id);
    if (seen[i]) throw InputError("ordering lists MR '" + id + "' twice");
    seen[i] = true;
    rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> first_killer_positions(const Ordering& order, const KillMatrix& km) {
  return positions_for(resolve_order(order, km), km, km.killable_mutants());
}

std::vector<double> detection_curve(const Ordering& order, const KillMatrix& km) {
  const auto rows = resolve_order(order, km);
  const auto killable = require_killable(km);
  std::vector<std::size_t> killed_at(rows.size() + 1, 0);
  for (auto p : positions_for(rows, km, killable)) ++killed_at[p];
  std::vector<double> curve;
  std::size_t killed = 0;
  for (std::size_t m = 1; m <= rows.size(); ++m) {
    killed += killed_at[m];
    curve.push_back(100.0 * static_cast<double>(killed) / static_cast<double>(killable.size()));
  }
  return curve;
}

std::size_t effective_set_size(std::span<const double> curve, double threshold) {
  if (curve.empty()) throw InputError("effective_set_size: empty curve");
  if (!(threshold > 0)) throw InputError("effective_set_size: threshold must be positive");
  for (std::size_t m = 1; m < curve.size(); ++m)
    if (curve[m] - curve[m - 1] < threshold) return m;
  return curve.size();
}

double apfd(const Ordering& order, const KillMatrix& km) {
  const auto rows = resolve_order(order, km);
  const auto killable = require_killable(km);
  const auto pos = positions_for(rows, km, killable);
  // Integer numerator over 2nm so the result is the correctly rounded rational.
  const std::size_t n = rows.size(), m = killable.size();
  const std::size_t sum = std::accumulate(pos.begin(), pos.end(), std::size_t{0});
  return static_cast<double>(2 * n * m - 2 * sum + m) / static_cast<double>(2 * n * m);
}

double avg_time_to_fault(const Ordering& order, const KillMatrix& km) {
  const auto rows = resolve_order(order, km);
  const auto killable = require_killable(km);
  std::vector<double> cumulative(rows.size() + 1, 0.0);
  for (std::size_t p = 0; p < rows.size(); ++p)
    cumulative[p + 1] = cumulative[p] + km.exec_time(static_cast<Eigen::Index>(rows[p]));
  double total = 0;
  for (auto p : positions_for(rows, km, killable)) total += cumulative[p];
  return total / static_cast<double>(killable.size());
}

EvalReport evaluate_ordering(const Ordering& order, const KillMatrix& km, const std::vector<double>& thresholds) {
  return average_orderings({order}, km, thresholds);
}

EvalReport average_orderings(const std::vector<Ordering>& orderings, const KillMatrix& km,
                             const std::vector<double>& thresholds) {
  if (orderings.empty()) throw InputError("no orderings to evaluate");
  const auto killable = require_killable(km);
  const std::size_t n = km.num_mrs();
  const std::size_t runs = orderings.size();

  EvalReport r;
  r.ordering = orderings.front();
  r.runs = runs;
  for (auto j : killable) r.killable_mutants.push_back(km.mutant_ids[j]);
  for (auto j : km.unkillable_mutants()) r.unkillable_mutants.push_back(km.mutant_ids[j]);

  std::vector<std::size_t> killed_total(n + 1, 0);
  std::vector<std::vector<std::size_t>> detected(n, std::vector<std::size_t>(killable.size(), 0));
  std::vector<std::size_t> position_total(killable.size(), 0);
  double apfd_total = 0, time_total = 0;
  for (const auto& order : orderings) {
    const auto pos = positions_for(resolve_order(order, km), km, killable);
    for (std::size_t j = 0; j < pos.size(); ++j) {
      ++killed_total[pos[j]];
      position_total[j] += pos[j];
      for (std::size_t m = pos[j]; m <= n; ++m) ++detected[m - 1][j];
    }
    apfd_total += apfd(order, km);
    time_total += avg_time_to_fault(order, km);
  }

  const double denom = static_cast<double>(killable.size() * runs);
  std::size_t cumulative = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    cumulative += killed_total[m];
    r.curve.push_back(100.0 * static_cast<double>(cumulative) / denom);
  }
  r.apfd = apfd_total / static_cast<double>(runs);
  r.avg_time_to_fault = time_total / static_cast<double>(runs);
  for (double t : thresholds) r.effective_sizes.push_back({t, effective_set_size(r.curve, t)});
  for (auto total : position_total) r.first_killer_positions.push_back(static_cast<double>(total) / static_cast<double>(runs));
  for (const auto& row : detected) {
    std::vector<double> rates;
    for (auto c : row) rates.push_back(static_cast<double>(c) / static_cast<double>(runs));
    r.detection_by_size.push_back(std::move(rates));
  }
  return r;
}

std::vector<Ordering> random_orderings(const KillMatrix& km, std::size_t runs, std::uint64_t seed) {
  if (runs < 1) throw InputError("random baseline needs at least one run");
  std::vector<Ordering> out;
  out.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    Rng rng(seed + r);
    Ordering order = km.mr_ids;
    rng.shuffle(std::span(order));
    out.push_back(std::move(order));
  }
  return out;
}

EvalReport random_baseline(const KillMatrix& km, std::size_t runs, std::uint64_t seed,
                           const std::vector<double>& thresholds) {
  return average_orderings(random_orderings(km, runs, seed), km, thresholds);
}

Ordering coverage_greedy(const CoverageMatrix& cov) {
  cov.validate();
  const auto n = static_cast<Eigen::Index>(cov.mr_ids.size());
  Eigen::Array<bool, 1, Eigen::Dynamic> uncovered = cov.covered.colwise().any();
  std::vector<bool> placed(static_cast<std::size_t>(n), false);
  Ordering order;

  while (uncovered.any()) {
    Eigen::Index best = -1, best_gain = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (placed[static_cast<std::size_t>(i)]) continue;
      const Eigen::Index gain = (cov.covered.row(i) && uncovered).count();
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    if (best < 0) break;
    placed[static_cast<std::size_t>(best)] = true;
    order.push_back(cov.mr_ids[static_cast<std::size_t>(best)]);
    uncovered = uncovered && !cov.covered.row(best);
  }

  std::vector<Eigen::Index> rest;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!placed[static_cast<std::size_t>(i)]) rest.push_back(i);
  std::stable_sort(rest.begin(), rest.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return cov.covered.row(a).count() > cov.covered.row(b).count(); });
  for (auto i : rest) order.push_back(cov.mr_ids[static_cast<std::size_t>(i)]);
  return order;
}

std::string to_string(Alternative a) { return a == Alternative::Greater ? "greater" : "two-sided"; }

Alternative parse_alternative(const std::string& text) {
  if (text == "greater") return Alternative::Greater;
  if (text == "two-sided" || text == "two_sided") return Alternative::TwoSided;
  throw InputError("unknown alternative '" + text + "' (expected greater or two-sided)");
}

double permutation_test(std::span<const double> a, std::span<const double> b, const PermutationTestOptions& options) {
  if (a.size() != b.size()) throw InputError("permutation test: samples differ in length");
  if (a.empty()) throw InputError("permutation test: empty samples");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  double observed = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
    scale += std::abs(d[i]);
  }
  const double tol = 1e-10 * scale;
  auto extreme = [&](double stat) {
    if (options.alternative == Alternative::Greater) return stat >= observed - tol;
    return std::abs(stat) >= std::abs(observed) - tol;
  };

  if (n <= options.exact_limit && n < 63) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      double stat = 0;
      for (std::size_t i = 0; i < n; ++i) stat += (mask >> i) & 1U ? -d[i] : d[i];
      if (extreme(stat)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(patterns);
  }

  if (options.iterations == 0) throw InputError("permutation test: iterations must be positive");
  Rng rng(options.seed);
  std::uint64_t hits = 0;
  for (std::size_t it = 0; it < options.iterations; ++it) {
    double stat = 0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng.next();
      stat += (bits >> (i % 64)) & 1U ? -d[i] : d[i];
    }
    if (extreme(stat)) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(options.iterations + 1);
}

std::vector<std::optional<double>> relative_improvement(std::span<const double> treatment,
                                                        std::span<const double> baseline) {
  if (treatment.size() != baseline.size()) throw InputError("relative improvement: curves differ in length");
  std::vector<std::optional<double>> out;
  for (std::size_t m = 0; m < treatment.size(); ++m) {
    if (baseline[m] == 0)
      out.push_back(std::nullopt);
    else
      out.push_back(100.0 * (treatment[m] - baseline[m]) / baseline[m]);
  }
  return out;
}

Comparison compare_reports(const EvalReport& treatment, const EvalReport& baseline,
                           const PermutationTestOptions& options, double alpha) {
  if (treatment.curve.size() != baseline.curve.size())
    throw InputError("size mismatch: treatment has " + std::to_string(treatment.curve.size()) +
                     " MRs, baseline has " + std::to_string(baseline.curve.size()));
  if (treatment.killable_mutants != baseline.killable_mutants)
    throw InputError("reports were computed over different killable mutants");
  if (treatment.detection_by_size.size() != treatment.curve.size() ||
      baseline.detection_by_size.size() != baseline.curve.size())
    throw InputError("report lacks per-mutant detection data");
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must lie in (0,1)");

  Comparison c;
  c.alternative = options.alternative;
  c.alpha = alpha;
  const auto improvement = relative_improvement(treatment.curve, baseline.curve);
  for (std::size_t m = 0; m < treatment.curve.size(); ++m) {
    SizeComparison s;
    s.size = m + 1;
    s.treatment = treatment.curve[m];
    s.baseline = baseline.curve[m];
    s.improvement = improvement[m];
    s.p_value = permutation_test(treatment.detection_by_size[m], baseline.detection_by_size[m], options);
    s.significant = s.p_value < alpha;
    c.sizes.push_back(s);
  }
  c.treatment_apfd = treatment.apfd;
  c.baseline_apfd = baseline.apfd;
  std::vector<double> t_pos, b_pos;
  for (double p : treatment.first_killer_positions) t_pos.push_back(-p);
  for (double p : baseline.first_killer_positions) b_pos.push_back(-p);
  c.apfd_p_value = permutation_test(t_pos, b_pos, options);
  c.apfd_significant = c.apfd_p_value < alpha;
  return c;
}

KillMatrix synth_kill_matrix(std::size_t n_mrs, std::size_t n_mutants, const std::vector<double>& kill_prob,
                             const TimeProfile& times, std::uint64_t seed) {
  if (n_mrs == 0 || n_mutants == 0) throw InputError("synth: dimensions must be positive");
  if (kill_prob.size() != 1 && kill_prob.size() != n_mrs)
    throw InputError("synth: kill probability profile must have 1 or " + std::to_string(n_mrs) + " entries");
  for (double p : kill_prob)
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("synth: kill probabilities must lie in [0,1]");
  if (!(times.min_seconds >= 0) || !(times.max_seconds >= times.min_seconds))
    throw InputError("synth: time profile needs 0 <= min <= max");

  Rng rng(seed);
  KillMatrix km;
  for (std::size_t i = 0; i < n_mrs; ++i) km.mr_ids.push_back("MR" + std::to_string(i + 1));
  for (std::size_t j = 0; j < n_mutants; ++j) km.mutant_ids.push_back("m" + std::to_string(j + 1));
  km.exec_time.resize(static_cast<Eigen::Index>(n_mrs));
  for (std::size_t i = 0; i < n_mrs; ++i) km.exec_time(static_cast<Eigen::Index>(i)) = rng.uniform(times.min_seconds, times.max_seconds);
  km.kills.resize(static_cast<Eigen::Index>(n_mrs), static_cast<Eigen::Index>(n_mutants));
  for (std::size_t i = 0; i < n_mrs; ++i) {
    const double p = kill_prob.size() == 1 ? kill_prob.front() : kill_prob[i];
    for (std::size_t j = 0; j < n_mutants; ++j)
      km.kills(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.uniform01() < p;
  }
  km.validate();
  return km;
}

}  // namespace mrprio
