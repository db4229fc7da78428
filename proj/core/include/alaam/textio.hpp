#pragma once

// Small text helpers shared by the loaders and the CSV writers.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace alaam::textio {

// Shortest decimal representation that round-trips through parseDouble.
std::string formatDouble(double v);

std::optional<double> parseDouble(std::string_view token);
std::optional<long long> parseInteger(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> splitWhitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string toLower(std::string_view s);

// Flat "key = value" files (configs, manifests, status sidecars). Lines
// starting with '#' and blank lines are skipped. Order is preserved.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues readKeyValues(std::istream& in);
KeyValues readKeyValueFile(const std::filesystem::path& path);
void writeKeyValues(std::ostream& out, const KeyValues& kv);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable readCsv(std::istream& in);
CsvTable readCsvFile(const std::filesystem::path& path);

}  // namespace alaam::textio
