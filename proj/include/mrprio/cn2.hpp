#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mrprio/dataset.hpp"

namespace mrprio {

enum class ConditionOp { Equal, LessEqual, Greater };

std::string to_string(ConditionOp op);

struct Condition {
  std::string attribute;
  ConditionOp op = ConditionOp::Equal;
  /// Nominal symbol, or the shortest decimal form of a numeric threshold.
  std::string value;

  friend auto operator<=>(const Condition&, const Condition&) = default;
};

struct Rule {
  /// Sorted; at most one condition per (attribute, operator).
  std::vector<Condition> conditions;
  std::string predicted_class;
  /// Rows covered on the induction snapshot, and how many of them carry the
  /// predicted class.
  std::size_t coverage = 0;
  std::size_t correct = 0;
  /// correct / coverage.
  double accuracy = 0;
  /// (correct + 1) / (coverage + number of classes).
  double laplace = 0;

  std::string to_string() const;
};

/// Syntactic equality: identical condition set and predicted class.
bool same_rule(const Rule& a, const Rule& b);

struct RuleSet {
  /// Induction order.
  std::vector<Rule> rules;
  std::string default_class;
  std::vector<std::string> classes;
};

struct Cn2Params {
  std::size_t beam_width = 5;
  std::size_t min_covered = 2;
  std::size_t max_conditions = 3;
  /// Equal-width bins per numeric attribute.
  std::size_t bins = 4;
};

/// CN2 sequential covering.
///
/// Numeric attributes are discretized into equal-width bins over this
/// dataset's range; each internal bin edge t yields `a <= t` and `a > t`
/// selectors. Nominal attributes yield `a = v`. Missing feature cells are
/// imputed (mean / mode); rows with a missing class are ignored.
///
/// Each round beam-searches the rule with the best Laplace accuracy (ties:
/// fewer conditions, then earlier selectors in attribute order) covering at
/// least `min_covered` remaining rows. The rule is kept only if its Laplace
/// accuracy beats that of predicting the default class (majority class of the
/// whole dataset) on the remaining rows; its rows are then removed.
RuleSet cn2_induce(const Dataset& d, const Cn2Params& params = {});

}  // namespace mrprio
