#include <gtest/gtest.h>

#include <cmath>

#include "mrprio/error.hpp"
#include "mrprio/prioritizer.hpp"
#include "mrprio/rng.hpp"

using namespace mrprio;

namespace {

std::vector<DiversityScore> scores(const std::vector<double>& raws, std::vector<std::string> ids = {}) {
  std::vector<DiversityScore> out;
  for (std::size_t i = 0; i < raws.size(); ++i) {
    DiversityScore s;
    s.mr_id = ids.empty() ? std::string(1, static_cast<char>('A' + i)) : ids[i];
    s.catalog_index = i;
    s.raw = raws[i];
    out.push_back(s);
  }
  return out;
}

std::vector<double> normalized_values(const Normalized& n) {
  std::vector<double> out;
  for (const auto& s : n.scores) out.push_back(*s.normalized);
  return out;
}

}  // namespace

TEST(Normalize, WorkedExamples) {
  EXPECT_EQ(normalized_values(normalize(scores({2, 4, 10}))), (std::vector<double>{0, 0.25, 1}));
  const auto flat = normalize(scores({5, 5, 5}));
  EXPECT_TRUE(flat.degenerate);
  EXPECT_EQ(normalized_values(flat), (std::vector<double>{0, 0, 0}));
  const auto single = normalize(scores({7}));
  EXPECT_TRUE(single.degenerate);
  EXPECT_EQ(normalized_values(single), (std::vector<double>{0}));
}

TEST(Normalize, Errors) {
  EXPECT_THROW(normalize({}), InputError);
  auto mixed = scores({1, 2});
  mixed[1].metric = MetricKind::Rule;
  EXPECT_THROW(normalize(mixed), InputError);
}

TEST(Rank, SortContract) {
  EXPECT_EQ(rank(normalize(scores({2, 4, 10})).scores).order(), (std::vector<std::string>{"C", "B", "A"}));
  const Ranking flat = rank(normalize(scores({0, 0, 0})).scores);
  EXPECT_EQ(flat.order(), (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_TRUE(flat.tie_note);
}

TEST(Rank, FinalTieBreakIsCatalogOrder) {
  auto s = scores({8, 8, 1}, {"A", "B", "Z"});
  auto n = normalize(s).scores;
  std::swap(n[0], n[1]);  // input order (B, A, Z)
  EXPECT_EQ(rank(n).order(), (std::vector<std::string>{"A", "B", "Z"}));
}

TEST(Rank, RawBreaksNormalizedTies) {
  auto s = normalize(scores({1, 3, 2})).scores;
  s[1].normalized = s[2].normalized = 0.5;
  EXPECT_EQ(rank(s).order(), (std::vector<std::string>{"B", "C", "A"}));
}

TEST(Rank, RejectsUnnormalized) { EXPECT_THROW(rank(scores({1, 2})), InputError); }

TEST(TopN, Bounds) {
  const Ranking r = rank(normalize(scores({2, 4, 10})).scores);
  EXPECT_EQ(top_n(r, 2), (std::vector<std::string>{"C", "B"}));
  EXPECT_EQ(top_n(r, 3), r.order());
  EXPECT_THROW(top_n(r, 0), InputError);
  EXPECT_THROW(top_n(r, 4), InputError);
}

TEST(Prioritizer, RankingInvariantsProperty) {
  Rng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(15);
    std::vector<double> raws;
    for (std::size_t i = 0; i < n; ++i) raws.push_back(static_cast<double>(rng.uniform_index(6)) * rng.uniform(0, 3));
    const Ranking r = rank(normalize(scores(raws)).scores);

    ASSERT_EQ(r.entries.size(), n);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(r.entries[i].rank, i + 1);
      EXPECT_FALSE(seen[r.entries[i].catalog_index]);
      seen[r.entries[i].catalog_index] = true;
      if (i) EXPECT_LE(r.entries[i].normalized, r.entries[i - 1].normalized);
    }

    // Strictly increasing transform keeps the order.
    std::vector<double> transformed;
    for (double v : raws) transformed.push_back(std::exp(v / 2) + 3 * v);
    EXPECT_EQ(rank(normalize(scores(transformed)).scores).order(), r.order());

    // Input order never matters.
    auto shuffled = normalize(scores(raws)).scores;
    rng.shuffle(std::span(shuffled));
    EXPECT_EQ(rank(shuffled).order(), r.order());
  }
}
