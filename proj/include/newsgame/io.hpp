#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace newsgame {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest round-trip decimal form (std::to_chars); NaN renders as the empty
// string so undefined cells become empty CSV fields.
std::string format_double(double x);

// FNV-1a over a canonical string; emitted in every output header so results
// can be traced back to the exact configuration.
uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

// Minimal RFC-4180 reader: quoted fields, embedded commas/quotes/newlines.
// Returns rows of fields; empty input gives no rows.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string read_file(const std::string& path);  // throws std::runtime_error
void write_file(const std::string& path, const std::string& content);

// CSV with a "# config_hash=... version=..." comment line, then the header.
class CsvWriter {
 public:
  CsvWriter(std::string config_hash, std::vector<std::string> columns);
  void add_row(const std::vector<std::string>& fields);
  std::string str() const;

 private:
  std::string head_;
  std::vector<std::string> rows_;
  size_t width_;
};

std::string csv_escape(const std::string& field);

}  // namespace newsgame
