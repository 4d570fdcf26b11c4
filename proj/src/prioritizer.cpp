#include "mrprio/prioritizer.hpp"

#include <algorithm>

#include "mrprio/error.hpp"

namespace mrprio {

Normalized normalize(std::vector<DiversityScore> scores) {
  if (scores.empty()) throw InputError("normalize: no scores");
  for (const auto& s : scores)
    if (s.metric != scores.front().metric) throw InputError("normalize: scores mix metrics");

  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end(),
                                            [](const auto& a, const auto& b) { return a.raw < b.raw; });
  const double min_v = lo->raw;
  const double max_v = hi->raw;
  Normalized out;
  out.degenerate = !(max_v > min_v);
  for (auto& s : scores) s.normalized = out.degenerate ? 0.0 : (s.raw - min_v) / (max_v - min_v);
  out.scores = std::move(scores);
  return out;
}

std::vector<std::string> Ranking::order() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.mr_id);
  return ids;
}

Ranking rank(const std::vector<DiversityScore>& normalized_scores) {
  if (normalized_scores.empty()) throw InputError("rank: no scores");
  Ranking r;
  r.metric = normalized_scores.front().metric;
  r.tie_note = true;
  for (const auto& s : normalized_scores) {
    if (!s.normalized) throw InputError("rank: score for MR '" + s.mr_id + "' is not normalized");
    if (s.metric != r.metric) throw InputError("rank: scores mix metrics");
    if (s.raw != normalized_scores.front().raw) r.tie_note = false;
    r.entries.push_back({s.mr_id, s.catalog_index, s.raw, *s.normalized, 0});
  }
  std::sort(r.entries.begin(), r.entries.end(), [](const RankEntry& a, const RankEntry& b) {
    if (a.normalized != b.normalized) return a.normalized > b.normalized;
    if (a.raw != b.raw) return a.raw > b.raw;
    return a.catalog_index < b.catalog_index;
  });
  for (std::size_t i = 0; i < r.entries.size(); ++i) r.entries[i].rank = i + 1;
  return r;
}

std::vector<std::string> top_n(const Ranking& r, std::size_t n) {
  if (n < 1 || n > r.entries.size())
    throw InputError("top_n: n=" + std::to_string(n) + " outside [1, " + std::to_string(r.entries.size()) + "]");
  auto ids = r.order();
  ids.resize(n);
  return ids;
}

}  // namespace mrprio
