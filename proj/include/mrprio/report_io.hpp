#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mrprio/eval.hpp"
#include "mrprio/metrics.hpp"
#include "mrprio/prioritizer.hpp"

namespace mrprio {

using nlohmann::json;

json ranking_json(const Ranking& ranking, bool degenerate, std::uint64_t seed, const json& params);
json diagnostics_json(const std::vector<MrPair>& pairs, const std::vector<DiversityScore>& scores,
                      std::uint64_t seed);
json eval_report_json(const EvalReport& report, std::uint64_t seed);
json ordering_json(const Ordering& order, const std::string& method, std::uint64_t seed);
json comparison_json(const Comparison& c, std::uint64_t seed);

EvalReport eval_report_from_json(const json& doc);
EvalReport load_eval_report(const std::filesystem::path& path);

/// Reads an MR ordering from a ranking, ordering or evaluation report file
/// (JSON), or from plain text with one id per line.
Ordering load_ordering(const std::filesystem::path& path);

/// Pretty-printed document followed by a newline.
std::string render(const json& doc);
/// Writes `text` to `path`, or to stdout when the path is empty or "-".
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mrprio
