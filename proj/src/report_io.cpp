#include "mrprio/report_io.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mrprio/error.hpp"

namespace mrprio {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

Ordering ordering_from_json(const json& doc, const std::string& where) {
  try {
    if (doc.is_array()) return doc.get<Ordering>();
    if (doc.contains("entries")) {
      auto entries = doc.at("entries");
      std::vector<std::pair<std::size_t, std::string>> ranked;
      for (const auto& e : entries) ranked.emplace_back(e.at("rank").get<std::size_t>(), e.at("mr_id").get<std::string>());
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      Ordering out;
      for (auto& [r, id] : ranked) out.push_back(std::move(id));
      return out;
    }
    if (doc.contains("ordering")) return doc.at("ordering").get<Ordering>();
  } catch (const json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
  throw InputError(where + ": no ordering, entries or ranking found");
}

}  // namespace

json ranking_json(const Ranking& ranking, bool degenerate, std::uint64_t seed, const json& params) {
  json entries = json::array();
  for (const auto& e : ranking.entries)
    entries.push_back({{"rank", e.rank},
                       {"mr_id", e.mr_id},
                       {"catalog_index", e.catalog_index},
                       {"raw", e.raw},
                       {"normalized", e.normalized}});
  return {{"kind", "ranking"},   {"seed", seed},          {"metric", to_string(ranking.metric)},
          {"params", params},    {"degenerate", degenerate}, {"tie_note", ranking.tie_note},
          {"entries", entries}, {"ordering", ranking.order()}};
}

json diagnostics_json(const std::vector<MrPair>& pairs, const std::vector<DiversityScore>& scores,
                      std::uint64_t seed) {
  json mrs = json::array();
  for (const auto& s : scores) {
    const MrPair& p = pairs.at(s.catalog_index);
    mrs.push_back({{"mr_id", s.mr_id},
                   {"name", p.mr.name},
                   {"transform", transform_name(p.mr.transform)},
                   {"params", p.mr.params},
                   {"source_rows", p.source.num_rows()},
                   {"followup_rows", p.followup.num_rows()},
                   {"raw", s.raw},
                   {"details", s.diagnostics}});
  }
  return {{"kind", "diagnostics"},
          {"seed", seed},
          {"metric", scores.empty() ? std::string() : to_string(scores.front().metric)},
          {"mrs", mrs}};
}

json eval_report_json(const EvalReport& r, std::uint64_t seed) {
  json sizes = json::array();
  for (const auto& e : r.effective_sizes) sizes.push_back({{"threshold", e.threshold}, {"size", e.size}});
  json positions = json::array();
  for (std::size_t j = 0; j < r.killable_mutants.size(); ++j)
    positions.push_back({{"mutant", r.killable_mutants[j]}, {"position", r.first_killer_positions.at(j)}});
  return {{"kind", "eval_report"},
          {"seed", seed},
          {"runs", r.runs},
          {"ordering", r.ordering},
          {"curve", r.curve},
          {"apfd", r.apfd},
          {"effective_sizes", sizes},
          {"avg_time_to_fault", r.avg_time_to_fault},
          {"killable_mutants", r.killable_mutants},
          {"unkillable_mutants", r.unkillable_mutants},
          {"first_killer_positions", positions},
          {"detection_by_size", r.detection_by_size}};
}

json ordering_json(const Ordering& order, const std::string& method, std::uint64_t seed) {
  return {{"kind", "ordering"}, {"seed", seed}, {"method", method}, {"ordering", order}};
}

json comparison_json(const Comparison& c, std::uint64_t seed) {
  json sizes = json::array();
  for (const auto& s : c.sizes)
    sizes.push_back({{"size", s.size},
                     {"treatment", s.treatment},
                     {"baseline", s.baseline},
                     {"improvement", s.improvement ? json(*s.improvement) : json(nullptr)},
                     {"p_value", s.p_value},
                     {"significant", s.significant}});
  return {{"kind", "comparison"},
          {"seed", seed},
          {"alternative", to_string(c.alternative)},
          {"alpha", c.alpha},
          {"sizes", sizes},
          {"apfd", {{"treatment", c.treatment_apfd},
                    {"baseline", c.baseline_apfd},
                    {"p_value", c.apfd_p_value},
                    {"significant", c.apfd_significant}}}};
}

EvalReport eval_report_from_json(const json& doc) {
  try {
    if (doc.value("kind", "") != "eval_report") throw InputError("not an evaluation report");
    EvalReport r;
    r.ordering = doc.at("ordering").get<Ordering>();
    r.runs = doc.at("runs").get<std::size_t>();
    r.curve = doc.at("curve").get<std::vector<double>>();
    r.apfd = doc.at("apfd").get<double>();
    for (const auto& e : doc.at("effective_sizes"))
      r.effective_sizes.push_back({e.at("threshold").get<double>(), e.at("size").get<std::size_t>()});
    r.avg_time_to_fault = doc.at("avg_time_to_fault").get<double>();
    r.killable_mutants = doc.at("killable_mutants").get<std::vector<std::string>>();
    r.unkillable_mutants = doc.at("unkillable_mutants").get<std::vector<std::string>>();
    for (const auto& p : doc.at("first_killer_positions")) r.first_killer_positions.push_back(p.at("position").get<double>());
    r.detection_by_size = doc.at("detection_by_size").get<std::vector<std::vector<double>>>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed evaluation report: ") + e.what());
  }
}

EvalReport load_eval_report(const std::filesystem::path& path) {
  try {
    return eval_report_from_json(parse_json(path));
  } catch (const InputError& e) {
    throw InputError("'" + path.string() + "': " + e.what());
  }
}

Ordering load_ordering(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw InputError("'" + path.string() + "': " + e.what());
    }
    return ordering_from_json(doc, "'" + path.string() + "'");
  }
  Ordering out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    out.push_back(line);
  }
  if (out.empty()) throw InputError("'" + path.string() + "': empty ordering");
  return out;
}

std::string render(const json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace mrprio
