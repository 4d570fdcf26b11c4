#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "mrprio/dataset.hpp"
#include "mrprio/error.hpp"

namespace mrprio {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class ArffError : public InputError {
 public:
  ArffError(const std::string& source, std::size_t line, const std::string& what)
      : InputError("ARFF " + source + " line " + std::to_string(line) + ": " + what) {}
};

// Cursor over one line; understands single/double quoted tokens.
struct Scanner {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size() || text[pos] == '%';
  }
  // A bare word ends at whitespace or any of `stops`.
  std::string token(const char* stops = "") {
    skip_ws();
    if (pos >= text.size()) return {};
    const char q = text[pos];
    if (q == '\'' || q == '"') {
      std::string out;
      ++pos;
      while (pos < text.size() && text[pos] != q) {
        if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
        out.push_back(text[pos++]);
      }
      if (pos >= text.size()) throw std::runtime_error("unterminated quote");
      ++pos;
      return out;
    }
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ' ' && text[pos] != '\t' && !std::strchr(stops, text[pos])) ++pos;
    return text.substr(start, pos - start);
  }
};

std::vector<std::string> split_values(const std::string& body, const std::string& source, std::size_t line) {
  std::vector<std::string> out;
  Scanner sc{body};
  try {
    while (true) {
      std::string v = sc.token(",");
      out.push_back(v);
      sc.skip_ws();
      if (sc.pos >= body.size()) break;
      if (body[sc.pos] != ',') throw ArffError(source, line, "expected ',' in value list");
      ++sc.pos;
    }
  } catch (const ArffError&) {
    throw;
  } catch (const std::exception& e) {
    throw ArffError(source, line, e.what());
  }
  return out;
}

bool needs_quotes(const std::string& s) {
  return s.empty() || s.find_first_of(" \t,{}'\"%?") != std::string::npos;
}

std::string quoted(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

Dataset read_arff(std::istream& in, std::string source_name) {
  std::string relation = "data";
  std::vector<Attribute> attributes;
  std::vector<Row> rows;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      if (line.front() != '@') throw ArffError(source_name, line_no, "expected a declaration");
      Scanner sc{line};
      const std::string keyword = lower(sc.token());
      try {
        if (keyword == "@relation") {
          relation = sc.token();
        } else if (keyword == "@attribute") {
          const std::string name = sc.token("{");
          if (name.empty()) throw ArffError(source_name, line_no, "attribute without a name");
          sc.skip_ws();
          if (sc.pos < line.size() && line[sc.pos] == '{') {
            const auto close = line.find('}', sc.pos);
            if (close == std::string::npos) throw ArffError(source_name, line_no, "unterminated nominal value-set");
            auto values = split_values(line.substr(sc.pos + 1, close - sc.pos - 1), source_name, line_no);
            std::set<std::string> seen;
            for (const auto& v : values) {
              if (v.empty()) throw ArffError(source_name, line_no, "empty nominal value");
              if (!seen.insert(v).second) throw ArffError(source_name, line_no, "duplicate nominal value '" + v + "'");
            }
            attributes.push_back(Attribute::nominal(name, std::move(values)));
          } else {
            const std::string type = lower(sc.token());
            if (type == "numeric" || type == "real" || type == "integer")
              attributes.push_back(Attribute::numeric(name));
            else
              throw ArffError(source_name, line_no, "unsupported attribute type '" + type + "'");
          }
        } else if (keyword == "@data") {
          if (attributes.empty()) throw ArffError(source_name, line_no, "@data before any @attribute");
          in_data = true;
        } else {
          throw ArffError(source_name, line_no, "unsupported declaration '" + keyword + "'");
        }
      } catch (const ArffError&) {
        throw;
      } catch (const std::exception& e) {
        throw ArffError(source_name, line_no, e.what());
      }
      continue;
    }

    if (line.front() == '{') throw ArffError(source_name, line_no, "sparse data rows are not supported");
    std::string body = line;
    if (const auto pct = body.find('%'); pct != std::string::npos && body.find_first_of("'\"") == std::string::npos)
      body = trim(body.substr(0, pct));
    const auto values = split_values(body, source_name, line_no);
    if (values.size() != attributes.size())
      throw ArffError(source_name, line_no,
                      "row has " + std::to_string(values.size()) + " values, expected " + std::to_string(attributes.size()));
    Row row;
    row.reserve(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
      const std::string& v = values[j];
      const Attribute& a = attributes[j];
      if (v == "?") {
        row.emplace_back(Missing{});
      } else if (a.is_numeric()) {
        auto x = parse_number(v);
        if (!x) throw ArffError(source_name, line_no, "attribute '" + a.name + "': '" + v + "' is not a number");
        row.emplace_back(*x);
      } else {
        if (!a.value_index(v))
          throw ArffError(source_name, line_no, "attribute '" + a.name + "': undeclared nominal value '" + v + "'");
        row.emplace_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (attributes.empty()) throw InputError("ARFF " + source_name + ": no attributes declared");
  if (!in_data) throw InputError("ARFF " + source_name + ": missing @data section");

  const std::size_t class_index = attributes.size() - 1;
  return Dataset(relation, std::move(attributes), class_index, std::move(rows));
}

Dataset load_arff(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_arff(in, path.string());
}

void write_arff(std::ostream& out, const Dataset& d) {
  out << "@relation " << quoted(d.name()) << "\n\n";
  for (const auto& a : d.attributes()) {
    out << "@attribute " << quoted(a.name) << ' ';
    if (a.is_numeric()) {
      out << "numeric\n";
    } else {
      out << '{';
      for (std::size_t k = 0; k < a.values.size(); ++k) out << (k ? "," : "") << quoted(a.values[k]);
      out << "}\n";
    }
  }
  out << "\n@data\n";
  for (const Row& row : d.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      if (is_missing(row[j]))
        out << '?';
      else if (const double* v = std::get_if<double>(&row[j]))
        out << format_number(*v);
      else
        out << quoted(std::get<std::string>(row[j]));
    }
    out << '\n';
  }
}

std::string to_arff(const Dataset& d) {
  std::ostringstream out;
  write_arff(out, d);
  return out.str();
}

}  // namespace mrprio
