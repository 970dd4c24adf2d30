#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wstress::io {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numeric CSV: optional '#' comment lines, a header row, then rows.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
  /// Comment lines without the leading '#', in file order.
  std::vector<std::string> comments;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  bool has(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;
};

Table read_csv(const std::filesystem::path& path);

/// Shortest round-trip form is not used; always 17 significant digits.
std::string format_double(double v);

/// Writes `# config_hash=<hash>` then the header and the columns.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns, const std::string& config_hash);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wstress::io
