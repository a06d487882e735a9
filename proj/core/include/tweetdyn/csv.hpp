#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tweetdyn {

/// Streaming RFC-4180 reader. Quoted fields may contain separators, doubled
/// quotes and line breaks; CRLF and LF line endings are both accepted.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, char separator = ',') : in_(in), sep_(separator) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws Error on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based physical line on which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  char sep_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

std::string csv_escape(std::string_view field, char separator = ',');
void write_csv_row(std::ostream& out, std::span<const std::string> fields, char separator = ',');

/// True if `bytes` is well-formed UTF-8.
bool is_valid_utf8(std::string_view bytes);

}  // namespace tweetdyn
