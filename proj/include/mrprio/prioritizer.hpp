#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mrprio/metrics.hpp"

namespace mrprio {

struct Normalized {
  std::vector<DiversityScore> scores;
  /// Max == Min: every normalized value was set to 0.
  bool degenerate = false;
};

/// Min-max rescaling of raw diversity values to [0, 1]. All scores must share
/// one metric.
Normalized normalize(std::vector<DiversityScore> scores);

struct RankEntry {
  std::string mr_id;
  std::size_t catalog_index = 0;
  double raw = 0;
  double normalized = 0;
  /// 1-based.
  std::size_t rank = 0;
};

struct Ranking {
  MetricKind metric = MetricKind::Distribution;
  std::vector<RankEntry> entries;
  /// All raw values were equal, so the order is pure catalog order.
  bool tie_note = false;

  std::vector<std::string> order() const;
};

/// Sorts by normalized value descending, then raw descending, then catalog
/// position ascending.
Ranking rank(const std::vector<DiversityScore>& normalized_scores);

/// First n MR ids of the ranking, 1 ≤ n ≤ |entries|.
std::vector<std::string> top_n(const Ranking& r, std::size_t n);

}  // namespace mrprio
