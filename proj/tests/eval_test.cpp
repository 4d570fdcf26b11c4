#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mrprio/error.hpp"
#include "mrprio/eval.hpp"
#include "mrprio/report_io.hpp"
#include "mrprio/synth.hpp"
#include "support.hpp"

using namespace mrprio;
using fx::kill_matrix;

namespace {

KillMatrix identity2() { return kill_matrix({{1, 0}, {0, 1}}, {10, 20}); }

CoverageMatrix coverage(const std::vector<std::vector<int>>& rows, std::vector<std::string> ids) {
  CoverageMatrix c;
  c.mr_ids = std::move(ids);
  for (std::size_t e = 0; e < rows.front().size(); ++e) c.element_ids.push_back("e" + std::to_string(e + 1));
  c.covered.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t e = 0; e < rows[i].size(); ++e)
      c.covered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e)) = rows[i][e] != 0;
  return c;
}

// Smallest number of MRs whose union covers every coverable element.
std::size_t minimal_cover(const CoverageMatrix& c) {
  const auto n = static_cast<std::size_t>(c.covered.rows());
  const auto target = c.covered.colwise().any().count();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Eigen::Array<bool, 1, Eigen::Dynamic> u = Eigen::Array<bool, 1, Eigen::Dynamic>::Constant(c.covered.cols(), false);
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1u) u = u || c.covered.row(static_cast<Eigen::Index>(i));
    if (u.count() == target) best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

}  // namespace

TEST(KillMatrixIo, ReadsAndFlagsUnkillable) {
  std::istringstream kills("mr_id,m1,m2,m3\nMR1,1,0,0\nMR2,0,1,0\n"), times("mr_id,exec_seconds\nMR2,20\nMR1,10\n");
  const KillMatrix km = read_kill_matrix(kills, times);
  EXPECT_EQ(km.killable_mutants(), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(km.unkillable_mutants(), (std::vector<std::size_t>{2}));
  EXPECT_EQ(km.exec_time(1), 20);
}

TEST(KillMatrixIo, Errors) {
  auto load = [](const std::string& k, const std::string& t) {
    std::istringstream kin(k), tin(t);
    return read_kill_matrix(kin, tin);
  };
  try {
    load("mr_id,m1\nMR1,1\nMR2,0\n", "mr_id,exec_seconds\nMR1,3\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("MR2"), std::string::npos);
  }
  EXPECT_THROW(load("mr_id,m1\nMR1,1\n", "mr_id,exec_seconds\nMR1,3\nMR9,1\n"), InputError);
  EXPECT_THROW(load("mr_id,m1\nMR1,1\n", "mr_id,exec_seconds\nMR1,-3\n"), InputError);
  EXPECT_THROW(load("mr_id,m1,m2\nMR1,1\n", "mr_id,exec_seconds\nMR1,3\n"), InputError);
  EXPECT_THROW(load("mr_id,m1\nMR1,2\n", "mr_id,exec_seconds\nMR1,3\n"), InputError);
}

TEST(KillMatrixIo, RoundTrip) {
  const KillMatrix km = synth_kill_matrix(7, 13, {0.3}, {0.5, 9.5}, 3);
  std::ostringstream k, t;
  write_kills_csv(k, km);
  write_times_csv(t, km);
  std::istringstream kin(k.str()), tin(t.str());
  const KillMatrix back = read_kill_matrix(kin, tin);
  EXPECT_EQ(back.mr_ids, km.mr_ids);
  EXPECT_TRUE((back.kills == km.kills).all());
  EXPECT_EQ(back.exec_time, km.exec_time);
}

TEST(DetectionCurve, WorkedExamples) {
  EXPECT_EQ(detection_curve({"MR1", "MR2"}, identity2()), (std::vector<double>{50, 100}));
  const KillMatrix all = kill_matrix({{1, 1}, {0, 1}}, {1, 1});
  EXPECT_EQ(detection_curve({"MR1", "MR2"}, all), (std::vector<double>{100, 100}));
  const KillMatrix three = kill_matrix({{1, 0}, {1, 0}, {0, 1}}, {1, 1, 1});
  EXPECT_EQ(detection_curve({"MR2", "MR1", "MR3"}, three), (std::vector<double>{50, 50, 100}));
  EXPECT_THROW(detection_curve({"MR1", "MR1"}, identity2()), InputError);
  EXPECT_THROW(detection_curve({"MR1"}, identity2()), InputError);
}

TEST(DetectionCurve, MonotoneProperty) {
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const KillMatrix km = fx::random_kill_matrix(rng, 12, 12);
    const auto curve = detection_curve(fx::shuffled_order(rng, km), km);
    for (std::size_t m = 1; m < curve.size(); ++m) EXPECT_GE(curve[m], curve[m - 1]);
    EXPECT_EQ(curve.back(), 100.0);
  }
}

TEST(EffectiveSize, WorkedExamples) {
  EXPECT_EQ(effective_set_size(std::vector<double>{50, 100}, 5), 2u);
  EXPECT_EQ(effective_set_size(std::vector<double>{90, 92, 93}, 5), 1u);
  EXPECT_EQ(effective_set_size(std::vector<double>{40, 80, 81, 81.5}, 2.5), 2u);
  EXPECT_THROW(effective_set_size(std::vector<double>{}, 5), InputError);
  EXPECT_THROW(effective_set_size(std::vector<double>{1}, 0), InputError);
}

TEST(Apfd, ClosedForms) {
  std::vector<std::vector<int>> rows(10, std::vector<int>(4, 0));
  rows[0] = {1, 1, 1, 1};
  const KillMatrix km = kill_matrix(rows, std::vector<double>(10, 1));
  Ordering order = km.mr_ids;
  EXPECT_EQ(apfd(order, km), 0.95);
  std::reverse(order.begin(), order.end());
  EXPECT_EQ(apfd(order, km), 1.0 / 20);
}

TEST(Apfd, PositionsOneAndThree) {
  const KillMatrix km = kill_matrix({{1, 0}, {0, 0}, {0, 1}, {0, 0}, {0, 0}}, {1, 1, 1, 1, 1});
  EXPECT_EQ(first_killer_positions(km.mr_ids, km), (std::vector<std::size_t>{1, 3}));
  EXPECT_DOUBLE_EQ(apfd(km.mr_ids, km), 0.70);
}

TEST(Apfd, NeedsKillableMutant) {
  const KillMatrix km = kill_matrix({{0, 0}}, {1});
  EXPECT_THROW(apfd({"MR1"}, km), ApplicabilityError);
  EXPECT_THROW(avg_time_to_fault({"MR1"}, km), ApplicabilityError);
}

TEST(Apfd, BruteForceOracleProperty) {
  Rng rng(62);
  for (int trial = 0; trial < 200; ++trial) {
    const KillMatrix km = fx::random_kill_matrix(rng, 12, 12);
    const Ordering order = fx::shuffled_order(rng, km);
    const double a = apfd(order, km);
    ASSERT_EQ(a, fx::apfd_oracle(order, km));
    const double n = static_cast<double>(km.num_mrs());
    EXPECT_GE(a, 1 / (2 * n));
    EXPECT_LE(a, (2 * n - 1) / (2 * n));
  }
}

TEST(TimeToFault, HandOracle) {
  EXPECT_EQ(avg_time_to_fault({"MR1", "MR2"}, identity2()), 20);
  EXPECT_EQ(avg_time_to_fault({"MR2", "MR1"}, identity2()), 25);
  EXPECT_EQ(avg_time_to_fault({"MR1"}, kill_matrix({{1}}, {7})), 7);
}

TEST(TimeToFault, BruteForceOracleProperty) {
  Rng rng(63);
  for (int trial = 0; trial < 200; ++trial) {
    const KillMatrix km = fx::random_kill_matrix(rng, 12, 12);
    const Ordering order = fx::shuffled_order(rng, km);
    ASSERT_EQ(avg_time_to_fault(order, km), fx::time_oracle(order, km));
  }
}

TEST(TimeToFault, KillAllFirstBeatsReverse) {
  Rng rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    KillMatrix km = fx::random_kill_matrix(rng, 10, 10);
    const auto star = rng.uniform_index(km.num_mrs());
    // Only the star MR kills, and it kills everything.
    km.kills.setConstant(false);
    km.kills.row(static_cast<Eigen::Index>(star)).setConstant(true);
    Ordering order = fx::shuffled_order(rng, km);
    std::stable_partition(order.begin(), order.end(), [&](const std::string& id) { return id == km.mr_ids[star]; });
    Ordering reversed(order.rbegin(), order.rend());
    EXPECT_LE(avg_time_to_fault(order, km), avg_time_to_fault(reversed, km));
  }
}

TEST(RandomBaseline, OrderInvariantMatrix) {
  const KillMatrix km = kill_matrix({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, {1, 2, 3, 4});
  const EvalReport r = random_baseline(km, 100, 5);
  EXPECT_EQ(r.curve, (std::vector<double>{100, 100, 100, 100}));
  EXPECT_DOUBLE_EQ(r.apfd, 1 - 1.0 / 4 + 1.0 / 8);
}

TEST(RandomBaseline, TwoMrExpectation) {
  const KillMatrix km = kill_matrix({{1}, {0}}, {1, 1});
  const EvalReport a = random_baseline(km, 100, 42), b = random_baseline(km, 100, 42);
  EXPECT_NEAR(a.curve[0], 50, 10);
  EXPECT_EQ(eval_report_json(a, 42).dump(), eval_report_json(b, 42).dump());
}

TEST(RandomBaseline, AllPermutationsGiveExpectation) {
  Rng rng(65);
  for (int trial = 0; trial < 50; ++trial) {
    KillMatrix km = fx::random_kill_matrix(rng, 5, 8);
    std::vector<Ordering> all;
    Ordering order = km.mr_ids;
    std::sort(order.begin(), order.end());
    do all.push_back(order);
    while (std::next_permutation(order.begin(), order.end()));
    const EvalReport r = average_orderings(all, km);
    // Analytic: P(killed within m) = 1 − C(n−s, m)/C(n, m) where s = #killers.
    const std::size_t n = km.num_mrs();
    auto choose = [](std::size_t a, std::size_t b) {
      if (b > a) return 0.0;
      double c = 1;
      for (std::size_t i = 0; i < b; ++i) c = c * static_cast<double>(a - i) / static_cast<double>(i + 1);
      return std::round(c);
    };
    const auto killable = km.killable_mutants();
    for (std::size_t m = 1; m <= n; ++m) {
      // Count over permutations: m!(n−m)! · C(n,m) − m!(n−m)! · C(n−s,m) per mutant, as integers.
      double killed = 0;
      for (auto j : killable) {
        const auto s = static_cast<std::size_t>(km.kills.col(static_cast<Eigen::Index>(j)).count());
        killed += (choose(n, m) - choose(n - s, m)) / choose(n, m) * static_cast<double>(all.size());
      }
      const double expected = 100.0 * std::round(killed) / static_cast<double>(killable.size() * all.size());
      ASSERT_EQ(r.curve[m - 1], expected) << "m=" << m;
    }
  }
}

TEST(RandomBaseline, SingleRunMatchesEvaluate) {
  const KillMatrix km = synth_kill_matrix(6, 20, {0.3}, {}, 9);
  const EvalReport r = random_baseline(km, 1, 77);
  const EvalReport e = evaluate_ordering(random_orderings(km, 1, 77).front(), km);
  EXPECT_EQ(eval_report_json(r, 77).dump(), eval_report_json(e, 77).dump());
}

TEST(CoverageGreedy, WorkedExample) {
  const auto c = coverage({{1, 1, 1, 0}, {0, 0, 1, 1}, {0, 0, 0, 1}}, {"A", "B", "C"});
  EXPECT_EQ(coverage_greedy(c), (Ordering{"A", "B", "C"}));
  const auto single = coverage({{0, 1, 0}, {1, 1, 1}, {0, 0, 0}, {1, 1, 0}}, {"W", "X", "Y", "Z"});
  EXPECT_EQ(coverage_greedy(single), (Ordering{"X", "Z", "W", "Y"}));
  const auto twins = coverage({{1, 0}, {1, 0}}, {"P", "Q"});
  EXPECT_EQ(coverage_greedy(twins), (Ordering{"P", "Q"}));
}

TEST(CoverageGreedy, StepOptimalAndBoundedProperty) {
  Rng rng(66);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + rng.uniform_index(10);
    const auto e = 1 + rng.uniform_index(20);
    const CoverageMatrix c = synth_coverage(n, e, 0.1 + 0.4 * rng.uniform01(), rng.next());
    const Ordering order = coverage_greedy(c);
    ASSERT_EQ(order.size(), n);
    Eigen::Array<bool, 1, Eigen::Dynamic> covered = Eigen::Array<bool, 1, Eigen::Dynamic>::Constant(c.covered.cols(), false);
    const auto target = c.covered.colwise().any().count();
    std::vector<bool> used(n, false);
    std::size_t prefix = 0;
    for (std::size_t p = 0; p < order.size() && covered.count() < target; ++p) {
      const auto idx = static_cast<std::size_t>(std::find(c.mr_ids.begin(), c.mr_ids.end(), order[p]) - c.mr_ids.begin());
      Eigen::Index best_gain = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (!used[i]) best_gain = std::max(best_gain, (c.covered.row(static_cast<Eigen::Index>(i)) && !covered).count());
      ASSERT_EQ((c.covered.row(static_cast<Eigen::Index>(idx)) && !covered).count(), best_gain);
      used[idx] = true;
      covered = covered || c.covered.row(static_cast<Eigen::Index>(idx));
      prefix = p + 1;
    }
    EXPECT_EQ(covered.count(), target);
    const double bound = static_cast<double>(minimal_cover(c)) * (1 + std::log(static_cast<double>(e)));
    EXPECT_LE(static_cast<double>(prefix), bound + 1e-12);
  }
}

TEST(PermutationTest, WorkedExamples) {
  const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(permutation_test(a, a), 1.0);
  std::vector<double> b;
  for (double v : a) b.push_back(v - 1);
  EXPECT_EQ(permutation_test(a, b), 1.0 / 1024);
  EXPECT_THROW(permutation_test(a, std::vector<double>{1}), InputError);
}

TEST(PermutationTest, ExactMatchesEnumerationProperty) {
  Rng rng(67);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(12);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(std::round(rng.normal() * 4) / 4 + 0.3);
      b.push_back(std::round(rng.normal() * 4) / 4);
    }
    const bool two = rng.uniform01() < 0.5;
    PermutationTestOptions o;
    o.alternative = two ? Alternative::TwoSided : Alternative::Greater;
    EXPECT_NEAR(permutation_test(a, b, o), fx::sign_flip_oracle(a, b, two), 1e-12);
  }
}

TEST(PermutationTest, MonteCarloReproducible) {
  Rng rng(68);
  std::vector<double> a, b;
  for (int i = 0; i < 40; ++i) {
    a.push_back(rng.normal() + 0.2);
    b.push_back(rng.normal());
  }
  PermutationTestOptions o;
  o.seed = 5;
  const double p = permutation_test(a, b, o);
  EXPECT_EQ(p, permutation_test(a, b, o));
  EXPECT_GT(p, 0);
  EXPECT_LE(p, 1);
}

TEST(RelativeImprovement, Examples) {
  const std::vector<double> t{65, 100}, b{50, 100};
  const auto r = relative_improvement(t, b);
  EXPECT_DOUBLE_EQ(*r[0], 30);
  EXPECT_EQ(*r[1], 0);
  for (const auto& v : relative_improvement(t, t)) EXPECT_EQ(*v, 0);
  EXPECT_FALSE(relative_improvement(std::vector<double>{5}, std::vector<double>{0})[0]);
  EXPECT_THROW(relative_improvement(t, std::vector<double>{1}), InputError);
}

TEST(Synth, Profiles) {
  EXPECT_TRUE(synth_kill_matrix(4, 5, {1.0}, {}, 1).kills.all());
  const KillMatrix none = synth_kill_matrix(4, 5, {0.0}, {}, 1);
  EXPECT_EQ(none.unkillable_mutants().size(), 5u);
  const KillMatrix a = synth_kill_matrix(6, 9, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, {2, 3}, 8);
  const KillMatrix b = synth_kill_matrix(6, 9, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, {2, 3}, 8);
  std::ostringstream ka, kb;
  write_kills_csv(ka, a);
  write_kills_csv(kb, b);
  EXPECT_EQ(ka.str(), kb.str());
  EXPECT_TRUE((a.exec_time.array() >= 2).all() && (a.exec_time.array() < 3).all());
  EXPECT_THROW(synth_kill_matrix(3, 3, {0.1, 0.2}, {}, 1), InputError);
  EXPECT_THROW(synth_kill_matrix(3, 3, {1.5}, {}, 1), InputError);
  EXPECT_THROW(synth_kill_matrix(0, 3, {0.5}, {}, 1), InputError);
}

TEST(Compare, IdenticalReportsShowNoGain) {
  const KillMatrix km = synth_kill_matrix(5, 12, {0.3}, {}, 4);
  const EvalReport r = evaluate_ordering(km.mr_ids, km);
  const Comparison c = compare_reports(r, r);
  for (const auto& s : c.sizes) {
    EXPECT_EQ(*s.improvement, 0);
    EXPECT_FALSE(s.significant);
  }
}

TEST(Compare, DominatingTreatmentIsSignificant) {
  // MR1 kills all 10 mutants, MR2 only m1; treatment runs MR1 first.
  std::vector<std::vector<int>> rows(3, std::vector<int>(10, 0));
  rows[0].assign(10, 1);
  rows[1][0] = 1;
  const KillMatrix km = kill_matrix(rows, {1, 1, 1});
  const EvalReport t = evaluate_ordering({"MR1", "MR2", "MR3"}, km), b = evaluate_ordering({"MR2", "MR1", "MR3"}, km);
  const Comparison c = compare_reports(t, b);
  EXPECT_DOUBLE_EQ(*c.sizes[0].improvement, 900);
  EXPECT_EQ(c.sizes[0].p_value, fx::sign_flip_oracle(t.detection_by_size[0], b.detection_by_size[0], false));
  // Nine positive differences and one zero: 2 of 1024 patterns reach the observed sum.
  EXPECT_EQ(c.sizes[0].p_value, 2.0 / 1024);
  EXPECT_TRUE(c.sizes[0].significant);
  EXPECT_EQ(*c.sizes[2].improvement, 0);
  EXPECT_FALSE(c.sizes[2].significant);
}

TEST(Compare, SizeMismatch) {
  const KillMatrix a = synth_kill_matrix(3, 5, {1.0}, {}, 1), b = synth_kill_matrix(4, 5, {1.0}, {}, 1);
  EXPECT_THROW(compare_reports(evaluate_ordering(a.mr_ids, a), evaluate_ordering(b.mr_ids, b)), InputError);
}

TEST(ReportIo, EvalReportRoundTrip) {
  const KillMatrix km = synth_kill_matrix(5, 12, {0.3}, {}, 4);
  const EvalReport r = random_baseline(km, 10, 3);
  const json doc = eval_report_json(r, 3);
  EXPECT_EQ(eval_report_json(eval_report_from_json(doc), 3).dump(), doc.dump());
}
