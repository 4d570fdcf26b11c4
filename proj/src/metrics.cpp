#include "mrprio/metrics.hpp"

#include <cmath>

#include "mrprio/error.hpp"
#include "mrprio/numeric_view.hpp"

namespace mrprio {
namespace {

using nlohmann::json;

// Runs `fn` on one side of a pair, prefixing errors with the side name.
template <typename Fn>
auto on_side(const char* side, Fn&& fn) {
  try {
    return fn();
  } catch (const ApplicabilityError& e) {
    throw ApplicabilityError(std::string(side) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string(side) + ": " + e.what());
  }
}

DiversityScore make_score(const MrPair& pair, MetricKind metric, double source_side, double followup_side) {
  DiversityScore s;
  s.mr_id = pair.mr.id;
  s.metric = metric;
  s.raw = std::abs(source_side - followup_side);
  return s;
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

std::string to_string(MetricKind m) {
  switch (m) {
    case MetricKind::Rule:
      return "rule";
    case MetricKind::Anomaly:
      return "anomaly";
    case MetricKind::Clustering:
      return "clustering";
    case MetricKind::Distribution:
      return "distribution";
  }
  return "unknown";
}

MetricKind parse_metric(const std::string& text) {
  if (text == "rule") return MetricKind::Rule;
  if (text == "anomaly") return MetricKind::Anomaly;
  if (text == "clustering") return MetricKind::Clustering;
  if (text == "distribution") return MetricKind::Distribution;
  throw InputError("unknown metric '" + text + "' (expected rule, anomaly, clustering or distribution)");
}

DistributionSummary dist_summary(const Dataset& d) {
  const auto cols = d.numeric_feature_indices();
  if (cols.empty()) throw ApplicabilityError("dataset '" + d.name() + "' has no numeric feature attributes");
  DistributionSummary out;
  for (auto j : cols) {
    std::vector<double> values;
    for (const auto& row : d.rows())
      if (const double* v = std::get_if<double>(&row[j])) values.push_back(*v);
    const auto m = column_moments(Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
    out.shape_total += m.shape();
    out.spread_total += m.spread();
    out.attributes.push_back({d.attribute(j).name, m});
  }
  return out;
}

DiversityScore rule_diversity(const MrPair& pair, const MetricParams& params) {
  const RuleSet src = on_side("source", [&] { return cn2_induce(pair.source, params.cn2); });
  const RuleSet fol = on_side("follow-up", [&] { return cn2_induce(pair.followup, params.cn2); });

  // Shared rules are removed one-for-one from both sides.
  std::vector<bool> used(fol.rules.size(), false);
  std::size_t shared = 0;
  for (const Rule& r : src.rules) {
    for (std::size_t k = 0; k < fol.rules.size(); ++k) {
      if (!used[k] && same_rule(r, fol.rules[k])) {
        used[k] = true;
        ++shared;
        break;
      }
    }
  }
  const double total_source = static_cast<double>(src.rules.size() - shared);
  const double total_followup = static_cast<double>(fol.rules.size() - shared);
  DiversityScore s = make_score(pair, MetricKind::Rule, total_source, total_followup);
  s.diagnostics = {{"source_rules", to_json(src)},
                   {"followup_rules", to_json(fol)},
                   {"shared_rules", shared},
                   {"total_source", total_source},
                   {"total_followup", total_followup}};
  return s;
}

DiversityScore anomaly_diversity(const MrPair& pair, const MetricParams& params) {
  struct Side {
    NumericView<double> raw;
    OutlierReport<double> report;
  };
  auto detect = [&](const Dataset& d) {
    Side side{numeric_view<double>(d, false), {}};
    if (params.standardize) {
      const auto scaled = numeric_view<double>(d, true);
      side.report = knn_outliers(scaled.data, params.knn_k, params.contamination);
    } else {
      side.report = knn_outliers(side.raw.data, params.knn_k, params.contamination);
    }
    return side;
  };
  const Side src = on_side("source", [&] { return detect(pair.source); });
  const Side fol = on_side("follow-up", [&] { return detect(pair.followup); });

  // Identical outliers: exact equality of the unstandardized feature vectors.
  std::vector<bool> used(fol.report.indices.size(), false);
  std::size_t identical = 0;
  const bool same_width = src.raw.features() == fol.raw.features();
  for (auto i : src.report.indices) {
    if (!same_width) break;
    for (std::size_t k = 0; k < fol.report.indices.size(); ++k) {
      if (used[k]) continue;
      if (src.raw.data.row(i) == fol.raw.data.row(fol.report.indices[k])) {
        used[k] = true;
        ++identical;
        break;
      }
    }
  }
  const double total_source = static_cast<double>(src.report.indices.size() - identical);
  const double total_followup = static_cast<double>(fol.report.indices.size() - identical);
  DiversityScore s = make_score(pair, MetricKind::Anomaly, total_source, total_followup);
  s.diagnostics = {{"source_outliers", to_json(src.report)},
                   {"followup_outliers", to_json(fol.report)},
                   {"identical_outliers", identical},
                   {"total_source", total_source},
                   {"total_followup", total_followup}};
  return s;
}

DiversityScore clustering_diversity(const MrPair& pair, const MetricParams& params) {
  auto cluster = [&](const Dataset& d) {
    const auto view = numeric_view<double>(d, params.standardize);
    return kmeans_summary(view.data, params.kmeans_k, params.seed, params.max_iters);
  };
  const auto src = on_side("source", [&] { return cluster(pair.source); });
  const auto fol = on_side("follow-up", [&] { return cluster(pair.followup); });
  DiversityScore s = make_score(pair, MetricKind::Clustering, src.combined(), fol.combined());
  s.diagnostics = {{"source_clusters", to_json(src)}, {"followup_clusters", to_json(fol)}};
  return s;
}

DiversityScore distribution_diversity(const MrPair& pair, const MetricParams&) {
  const auto src = on_side("source", [&] { return dist_summary(pair.source); });
  const auto fol = on_side("follow-up", [&] { return dist_summary(pair.followup); });
  DiversityScore s = make_score(pair, MetricKind::Distribution, src.combined(), fol.combined());
  s.diagnostics = {{"source_distribution", to_json(src)}, {"followup_distribution", to_json(fol)}};
  return s;
}

DiversityScore score_pair(const MrPair& pair, MetricKind metric, const MetricParams& params) {
  switch (metric) {
    case MetricKind::Rule:
      return rule_diversity(pair, params);
    case MetricKind::Anomaly:
      return anomaly_diversity(pair, params);
    case MetricKind::Clustering:
      return clustering_diversity(pair, params);
    case MetricKind::Distribution:
      return distribution_diversity(pair, params);
  }
  throw InvariantError("unhandled metric");
}

std::vector<DiversityScore> score_catalog(const std::vector<MrPair>& pairs, MetricKind metric,
                                          const MetricParams& params) {
  std::vector<DiversityScore> scores;
  std::string failures;
  bool input_failure = false;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    try {
      DiversityScore s = score_pair(pairs[i], metric, params);
      s.catalog_index = i;
      scores.push_back(std::move(s));
    } catch (const Error& e) {
      input_failure = input_failure || dynamic_cast<const InputError*>(&e) != nullptr;
      failures += "\n  MR '" + pairs[i].mr.id + "' (dataset '" + pairs[i].source.name() + "'): " + e.what();
    }
  }
  if (!failures.empty()) {
    const std::string msg = "metric '" + to_string(metric) + "' failed for:" + failures;
    if (input_failure) throw InputError(msg);
    throw ApplicabilityError(msg);
  }
  return scores;
}

json to_json(const RuleSet& rules) {
  json list = json::array();
  for (const Rule& r : rules.rules) {
    json conds = json::array();
    for (const auto& c : r.conditions) conds.push_back({{"attribute", c.attribute}, {"op", to_string(c.op)}, {"value", c.value}});
    list.push_back({{"conditions", conds},
                    {"predicted_class", r.predicted_class},
                    {"coverage", r.coverage},
                    {"correct", r.correct},
                    {"accuracy", r.accuracy},
                    {"laplace", r.laplace}});
  }
  return {{"rules", list}, {"default_class", rules.default_class}, {"classes", rules.classes}};
}

json to_json(const DistributionSummary& s) {
  json attrs = json::array();
  for (const auto& a : s.attributes)
    attrs.push_back({{"attribute", a.attribute},
                     {"count", a.moments.count},
                     {"range", a.moments.range},
                     {"variance", a.moments.variance},
                     {"stddev", a.moments.stddev},
                     {"skewness", a.moments.skewness},
                     {"kurtosis", a.moments.kurtosis},
                     {"shape_degenerate", a.moments.shape_degenerate}});
  return {{"attributes", attrs}, {"shape_total", s.shape_total}, {"spread_total", s.spread_total}};
}

json to_json(const ClusterSummary<double>& s) {
  json centroids = json::array();
  for (Eigen::Index c = 0; c < s.centroids.rows(); ++c) centroids.push_back(vector_json(s.centroids.row(c).transpose()));
  return {{"k", s.k},
          {"centroids", centroids},
          {"sizes", s.sizes},
          {"between_total", s.between_total},
          {"size_total", s.size_total},
          {"within_avg", s.within_avg},
          {"objective", s.objective()},
          {"iterations", s.iterations},
          {"converged", s.converged}};
}

json to_json(const OutlierReport<double>& r) {
  return {{"k", r.k}, {"contamination", r.contamination}, {"indices", r.indices}, {"scores", vector_json(r.scores)}};
}

}  // namespace mrprio
