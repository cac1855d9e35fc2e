#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace spotkick::csv {

// RFC-4180-ish reader: comma separated, double-quoted fields with "" escapes,
// quoted fields may contain commas and newlines, CRLF tolerated.
class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Blank lines are skipped.
  std::optional<std::vector<std::string>> next() {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    int ch;
    while ((ch = in_.get()) != EOF) {
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            field.push_back('"');
            in_.get();
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        saw_any = true;
        continue;
      }
      switch (c) {
        case '"':
          in_quotes = true;
          saw_any = true;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          saw_any = true;
          break;
        case '\r':
          break;
        case '\n':
          ++line_;
          if (!saw_any) break;  // skip blank line
          fields.push_back(std::move(field));
          return fields;
        default:
          field.push_back(c);
          saw_any = true;
      }
    }
    if (!saw_any) return std::nullopt;
    ++line_;
    fields.push_back(std::move(field));
    return fields;
  }

  // 1-based line number of the most recently returned record.
  std::size_t line() const { return line_; }

private:
  std::istream& in_;
  std::size_t line_ = 0;
};

inline std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << escape(fields[i]);
  }
  out << '\n';
}

}  // namespace spotkick::csv
