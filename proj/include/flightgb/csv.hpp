#pragma once

// Comma-separated values: UTF-8, mandatory header, double-quote quoting with
// doubled-quote escaping. Quoted fields may span lines. Lines that are
// completely empty are skipped.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "flightgb/error.hpp"

namespace flightgb {

inline std::string_view trim(std::string_view s) noexcept {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Strict finite decimal parse of the trimmed text; a leading '+' is allowed.
inline std::optional<double> parse_number(std::string_view text) noexcept {
  auto s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

/// Shortest text that parses back to exactly `value`.
inline std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

/// Streaming record reader.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  /// Reads the next record; returns false at end of input.
  bool next(CsvRecord& rec) {
    rec.fields.clear();
    for (;;) {
      if (!in_.good() || in_.peek() == std::char_traits<char>::eof()) return false;
      rec.line = line_ + 1;
      if (read_record(rec.fields)) return true;
      rec.fields.clear();  // blank line
    }
  }

 private:
  // Returns false for a blank line.
  bool read_record(std::vector<std::string>& fields) {
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      const char c = static_cast<char>(ch);
      if (in_quotes) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        in_quotes = true;
        any = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        any = true;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r') {
        if (in_.peek() == '\n') continue;
        field.push_back(c);
        any = true;
      } else {
        field.push_back(c);
        any = true;
      }
    }
    if (in_quotes) throw Error(Errc::ParseError, "unterminated quoted field near line " + std::to_string(line_ + 1));
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
  }

  std::istream& in_;
  std::size_t line_ = 0;
};

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

}  // namespace flightgb
