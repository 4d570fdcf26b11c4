#include <fstream>
#include <set>
#include <sstream>

#include "mrprio/dataset.hpp"
#include "mrprio/error.hpp"

namespace mrprio {
namespace {

using Record = std::vector<std::string>;

}  // namespace

// Blank lines are skipped.
std::vector<Record> parse_csv_records(std::istream& in) {
  std::vector<Record> records;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool any_content = false;
  char ch;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    if (any_content) {
      end_field();
      records.push_back(std::move(record));
    }
    record.clear();
    field.clear();
    field_started = false;
    any_content = false;
  };

  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty()) throw InputError("CSV: stray quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        any_content = true;
        break;
      case ',':
        any_content = true;
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
        any_content = true;
    }
  }
  if (in_quotes) throw InputError("CSV: unterminated quoted field");
  end_record();
  return records;
}

namespace {

bool is_missing_text(const std::string& s) { return s.empty() || s == "?"; }

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos || s.empty() || s == "?" || s.front() == ' ' ||
         s.back() == ' ';
}

void write_field(std::ostream& out, const std::string& s) {
  if (!needs_quotes(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

ClassSelector ClassSelector::parse(const std::string& text) {
  if (text.empty() || text == "none") return none();
  if (text == "last") return last();
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); }))
    return by_index(std::stoul(text));
  return by_name(text);
}

Dataset read_csv(std::istream& in, const CsvOptions& options, std::string name) {
  auto records = parse_csv_records(in);
  if (records.empty() || (options.header && records.size() == 1 && records.front().empty()))
    throw InputError("CSV '" + name + "': empty file");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  const std::size_t width = records.front().size();
  if (options.header) {
    names = records.front();
    first_data = 1;
    std::set<std::string> seen;
    for (const auto& n : names)
      if (!seen.insert(n).second) throw InputError("CSV '" + name + "': duplicate header name '" + n + "'");
  } else {
    for (std::size_t j = 0; j < width; ++j) names.push_back("col" + std::to_string(j + 1));
  }
  for (std::size_t r = first_data; r < records.size(); ++r)
    if (records[r].size() != width)
      throw InputError("CSV '" + name + "': ragged rows (record " + std::to_string(r + 1) + " has " +
                       std::to_string(records[r].size()) + " fields, expected " + std::to_string(width) + ")");

  std::optional<std::size_t> class_index;
  switch (options.class_column.kind) {
    case ClassSelector::Kind::None:
      break;
    case ClassSelector::Kind::Last:
      class_index = width - 1;
      break;
    case ClassSelector::Kind::ByIndex:
      if (options.class_column.index >= width)
        throw InputError("CSV '" + name + "': class column " + std::to_string(options.class_column.index) +
                         " out of range");
      class_index = options.class_column.index;
      break;
    case ClassSelector::Kind::ByName: {
      auto it = std::find(names.begin(), names.end(), options.class_column.name);
      if (it == names.end()) throw InputError("CSV '" + name + "': no column named '" + options.class_column.name + "'");
      class_index = static_cast<std::size_t>(it - names.begin());
      break;
    }
  }

  std::vector<Attribute> attributes;
  for (std::size_t j = 0; j < width; ++j) {
    bool numeric = !(options.nominal_class && class_index == j);
    std::vector<std::string> observed;
    std::set<std::string> seen;
    for (std::size_t r = first_data; r < records.size(); ++r) {
      const std::string& s = records[r][j];
      if (is_missing_text(s)) continue;
      if (numeric && !parse_number(s)) numeric = false;
      if (seen.insert(s).second) observed.push_back(s);
    }
    if (numeric) {
      attributes.push_back(Attribute::numeric(names[j]));
    } else {
      if (observed.empty()) throw InputError("CSV '" + name + "': nominal column '" + names[j] + "' has no values");
      attributes.push_back(Attribute::nominal(names[j], std::move(observed)));
    }
  }

  std::vector<Row> rows;
  rows.reserve(records.size() - first_data);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    Row row;
    row.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
      const std::string& s = records[r][j];
      if (is_missing_text(s))
        row.emplace_back(Missing{});
      else if (attributes[j].is_numeric())
        row.emplace_back(*parse_number(s));
      else
        row.emplace_back(s);
    }
    rows.push_back(std::move(row));
  }
  return Dataset(std::move(name), std::move(attributes), class_index, std::move(rows));
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_csv(in, options, path.stem().string());
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (std::size_t j = 0; j < d.num_attributes(); ++j) {
    if (j) out << ',';
    write_field(out, d.attribute(j).name);
  }
  out << '\n';
  for (const Row& row : d.rows()) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      if (is_missing(row[j]))
        out << '?';
      else if (const double* v = std::get_if<double>(&row[j]))
        out << format_number(*v);
      else
        write_field(out, std::get<std::string>(row[j]));
    }
    out << '\n';
  }
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  write_csv(out, d);
  return out.str();
}

}  // namespace mrprio
