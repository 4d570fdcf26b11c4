#include "mrprio/cn2.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>

#include "mrprio/error.hpp"

namespace mrprio {
namespace {

// Fixed-width bit set over row indices.
class RowMask {
 public:
  RowMask() = default;
  explicit RowMask(std::size_t n, bool value = false) : n_(n), words_((n + 63) / 64, value ? ~0ULL : 0ULL) {
    trim();
  }

  void set(std::size_t i) { words_[i / 64] |= 1ULL << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1ULL; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::size_t count_and(const RowMask& o) const {
    std::size_t c = 0;
    for (std::size_t k = 0; k < words_.size(); ++k) c += static_cast<std::size_t>(std::popcount(words_[k] & o.words_[k]));
    return c;
  }
  RowMask operator&(const RowMask& o) const {
    RowMask r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }
  void subtract(const RowMask& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
  }

 private:
  void trim() {
    if (n_ % 64 && !words_.empty()) words_.back() &= (1ULL << (n_ % 64)) - 1;
  }
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

struct Selector {
  std::size_t attribute;
  Condition condition;
  RowMask rows;
};

struct Candidate {
  std::vector<std::size_t> selectors;  // ascending selector indices
  RowMask rows;
  std::size_t coverage = 0;
  std::size_t correct = 0;
  std::size_t predicted = 0;
  double laplace = 0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.laplace != b.laplace) return a.laplace > b.laplace;
  if (a.selectors.size() != b.selectors.size()) return a.selectors.size() < b.selectors.size();
  return a.selectors < b.selectors;
}

std::size_t majority(const std::vector<std::size_t>& counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

std::string to_string(ConditionOp op) {
  switch (op) {
    case ConditionOp::Equal:
      return "=";
    case ConditionOp::LessEqual:
      return "<=";
    case ConditionOp::Greater:
      return ">";
  }
  return "?";
}

std::string Rule::to_string() const {
  std::string out = "IF ";
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (i) out += " AND ";
    out += conditions[i].attribute + " " + mrprio::to_string(conditions[i].op) + " " + conditions[i].value;
  }
  return out + " THEN " + predicted_class;
}

bool same_rule(const Rule& a, const Rule& b) {
  if (a.predicted_class != b.predicted_class) return false;
  auto ca = a.conditions, cb = b.conditions;
  std::sort(ca.begin(), ca.end());
  std::sort(cb.begin(), cb.end());
  return ca == cb;
}

RuleSet cn2_induce(const Dataset& d, const Cn2Params& params) {
  if (!d.has_class()) throw ApplicabilityError("CN2: dataset '" + d.name() + "' has no class attribute");
  const std::size_t class_col = *d.class_index();
  const Attribute& class_attr = d.attribute(class_col);
  if (!class_attr.is_nominal()) throw ApplicabilityError("CN2: class attribute of '" + d.name() + "' is not nominal");
  if (params.beam_width == 0 || params.max_conditions == 0 || params.bins == 0 || params.min_covered == 0)
    throw InputError("CN2: beam_width, min_covered, max_conditions and bins must be positive");

  // Rows with a known class.
  std::vector<std::size_t> rows;
  std::vector<std::size_t> label;
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    if (const auto* s = std::get_if<std::string>(&d.row(i)[class_col])) {
      rows.push_back(i);
      label.push_back(*class_attr.value_index(*s));
    }
  }
  if (rows.empty()) throw ApplicabilityError("CN2: dataset '" + d.name() + "' has no labelled rows");
  if (rows.size() < params.min_covered)
    throw ApplicabilityError("CN2: dataset '" + d.name() + "' has fewer labelled rows than min_covered");

  const std::size_t n = rows.size();
  const std::size_t num_classes = class_attr.values.size();

  std::vector<RowMask> class_rows(num_classes, RowMask(n));
  std::vector<std::size_t> class_totals(num_classes, 0);
  for (std::size_t r = 0; r < n; ++r) {
    class_rows[label[r]].set(r);
    ++class_totals[label[r]];
  }

  RuleSet result;
  result.classes = class_attr.values;
  const std::size_t default_class = majority(class_totals);
  result.default_class = class_attr.values[default_class];

  // Build selectors in attribute order.
  std::vector<Selector> selectors;
  for (std::size_t j : d.feature_indices()) {
    const Attribute& a = d.attribute(j);
    if (a.is_nominal()) {
      std::vector<std::size_t> freq(a.values.size(), 0);
      std::vector<std::optional<std::size_t>> value(n);
      for (std::size_t r = 0; r < n; ++r)
        if (const auto* s = std::get_if<std::string>(&d.row(rows[r])[j])) {
          value[r] = *a.value_index(*s);
          ++freq[*value[r]];
        }
      const std::size_t mode = majority(freq);
      for (std::size_t v = 0; v < a.values.size(); ++v) {
        RowMask m(n);
        for (std::size_t r = 0; r < n; ++r)
          if (value[r].value_or(mode) == v) m.set(r);
        selectors.push_back({j, {a.name, ConditionOp::Equal, a.values[v]}, std::move(m)});
      }
    } else {
      std::vector<double> x(n);
      double sum = 0;
      std::size_t present = 0;
      for (std::size_t r = 0; r < n; ++r)
        if (const auto* v = std::get_if<double>(&d.row(rows[r])[j])) {
          sum += *v;
          ++present;
        }
      if (present == 0) continue;
      const double fill = sum / static_cast<double>(present);
      for (std::size_t r = 0; r < n; ++r) {
        const auto* v = std::get_if<double>(&d.row(rows[r])[j]);
        x[r] = v ? *v : fill;
      }
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      if (!(*hi > *lo)) continue;
      const double width = (*hi - *lo) / static_cast<double>(params.bins);
      for (std::size_t t = 1; t < params.bins; ++t) {
        const double edge = *lo + width * static_cast<double>(t);
        RowMask le(n), gt(n);
        for (std::size_t r = 0; r < n; ++r) (x[r] <= edge ? le : gt).set(r);
        const std::string text = format_number(edge);
        selectors.push_back({j, {a.name, ConditionOp::LessEqual, text}, std::move(le)});
        selectors.push_back({j, {a.name, ConditionOp::Greater, text}, std::move(gt)});
      }
    }
  }

  auto evaluate = [&](Candidate& c) {
    std::vector<std::size_t> counts(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) counts[k] = c.rows.count_and(class_rows[k]);
    c.predicted = majority(counts);
    c.correct = counts[c.predicted];
    c.laplace = static_cast<double>(c.correct + 1) / static_cast<double>(c.coverage + num_classes);
  };

  auto compatible = [&](const std::vector<std::size_t>& chosen, std::size_t s) {
    const Selector& cand = selectors[s];
    for (auto o : chosen) {
      const Selector& have = selectors[o];
      if (have.attribute != cand.attribute) continue;
      if (cand.condition.op == ConditionOp::Equal || have.condition.op == cand.condition.op) return false;
    }
    return true;
  };

  // Baseline: Laplace accuracy of predicting the default class on the whole dataset.
  const double default_laplace =
      static_cast<double>(class_totals[default_class] + 1) / static_cast<double>(n + num_classes);

  RowMask remaining(n, true);
  while (true) {
    const std::size_t left = remaining.count();
    if (left < params.min_covered) break;

    std::optional<Candidate> best;
    std::vector<Candidate> star{Candidate{{}, remaining, left, 0, 0, 0}};
    for (std::size_t depth = 0; depth < params.max_conditions && !star.empty(); ++depth) {
      std::vector<Candidate> next;
      std::set<std::vector<std::size_t>> seen;
      for (const Candidate& parent : star) {
        for (std::size_t s = 0; s < selectors.size(); ++s) {
          if (std::binary_search(parent.selectors.begin(), parent.selectors.end(), s)) continue;
          if (!compatible(parent.selectors, s)) continue;
          Candidate c;
          c.rows = parent.rows & selectors[s].rows;
          c.coverage = c.rows.count();
          if (c.coverage < params.min_covered) continue;
          c.selectors = parent.selectors;
          c.selectors.insert(std::upper_bound(c.selectors.begin(), c.selectors.end(), s), s);
          if (!seen.insert(c.selectors).second) continue;
          evaluate(c);
          if (!best || better(c, *best)) best = c;
          next.push_back(std::move(c));
        }
      }
      std::sort(next.begin(), next.end(), better);
      if (next.size() > params.beam_width) next.resize(params.beam_width);
      star = std::move(next);
    }

    if (!best || !(best->laplace > default_laplace)) break;

    Rule rule;
    for (auto s : best->selectors) rule.conditions.push_back(selectors[s].condition);
    std::sort(rule.conditions.begin(), rule.conditions.end());
    rule.predicted_class = class_attr.values[best->predicted];
    rule.coverage = best->coverage;
    rule.correct = best->correct;
    rule.accuracy = static_cast<double>(best->correct) / static_cast<double>(best->coverage);
    rule.laplace = best->laplace;
    result.rules.push_back(std::move(rule));
    remaining.subtract(best->rows);
  }
  return result;
}

}  // namespace mrprio
