#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrprio/cn2.hpp"
#include "mrprio/dataset.hpp"
#include "mrprio/kmeans.hpp"
#include "mrprio/knn.hpp"
#include "mrprio/moments.hpp"
#include "mrprio/mr_catalog.hpp"

namespace mrprio {

/// Data-diversity metric families. Raw values of different families are not
/// comparable; each family produces its own ranking.
enum class MetricKind { Rule, Anomaly, Clustering, Distribution };

std::string to_string(MetricKind m);
MetricKind parse_metric(const std::string& text);

inline constexpr std::uint64_t kDefaultSeed = 20210501;

struct MetricParams {
  Cn2Params cn2;
  /// KNN outlier detector.
  Eigen::Index knn_k = 5;
  double contamination = 0.05;
  /// k-means.
  Eigen::Index kmeans_k = 3;
  int max_iters = 100;
  std::uint64_t seed = kDefaultSeed;
  /// Standardize numeric features before KNN and k-means.
  bool standardize = true;
};

struct DiversityScore {
  std::string mr_id;
  /// Position of the MR in its catalog; the final tie-breaker when ranking.
  std::size_t catalog_index = 0;
  MetricKind metric = MetricKind::Distribution;
  /// |source side − follow-up side|, never negative.
  double raw = 0;
  std::optional<double> normalized;
  nlohmann::json diagnostics;
};

struct AttributeDistribution {
  std::string attribute;
  ColumnMoments<double> moments;
};

struct DistributionSummary {
  std::vector<AttributeDistribution> attributes;
  /// Σ (skewness + kurtosis).
  double shape_total = 0;
  /// Σ (range + variance + stddev).
  double spread_total = 0;

  double combined() const { return shape_total + spread_total; }
};

/// Per-attribute moments over non-missing cells of numeric, non-class columns.
DistributionSummary dist_summary(const Dataset& d);

DiversityScore rule_diversity(const MrPair& pair, const MetricParams& params = {});
DiversityScore anomaly_diversity(const MrPair& pair, const MetricParams& params = {});
DiversityScore clustering_diversity(const MrPair& pair, const MetricParams& params = {});
DiversityScore distribution_diversity(const MrPair& pair, const MetricParams& params = {});

DiversityScore score_pair(const MrPair& pair, MetricKind metric, const MetricParams& params = {});

/// One raw score per pair in catalog order. Fails as a whole if any pair
/// fails, reporting every failing MR.
std::vector<DiversityScore> score_catalog(const std::vector<MrPair>& pairs, MetricKind metric,
                                          const MetricParams& params = {});

nlohmann::json to_json(const RuleSet& rules);
nlohmann::json to_json(const DistributionSummary& s);
nlohmann::json to_json(const ClusterSummary<double>& s);
nlohmann::json to_json(const OutlierReport<double>& r);

}  // namespace mrprio
