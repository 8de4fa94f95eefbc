#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nhsta/error.hpp"
#include "nhsta/experiment/config.hpp"

namespace nhsta::experiment {

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error(ErrorKind::InvalidArgument, "row width does not match header");
    rows.push_back(std::move(row));
  }
};

/// Header line, then one comma-separated row per line, doubles with 17
/// significant digits.
inline std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* d = std::get_if<double>(&row[i])) out += detail::format_double(*d);
      else out += std::get<std::string>(row[i]);
    }
    out += '\n';
  }
  return out;
}

/// {"columns": [...], "rows": [[...], ...]}; non-finite doubles become null.
inline std::string to_json(const Table& table) {
  nlohmann::ordered_json j;
  j["columns"] = table.columns;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& cell : row) {
      if (const auto* d = std::get_if<double>(&cell)) r.push_back(*d);
      else r.push_back(std::get<std::string>(cell));
    }
    j["rows"].push_back(std::move(r));
  }
  return j.dump(1) + "\n";
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidArgument, "SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct WrittenFile {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

inline WrittenFile write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Config, "cannot create output directory '" + dir.string() + "': " + ec.message());
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw Error(ErrorKind::Config, "cannot write '" + (dir / name).string() + "'");
  return {name, sha256_hex(content), content.size()};
}

inline WrittenFile write_table(const std::filesystem::path& dir, const std::string& stem, const Table& table,
                               OutputFormat format) {
  return format == OutputFormat::Csv ? write_file(dir, stem + ".csv", to_csv(table))
                                     : write_file(dir, stem + ".json", to_json(table));
}

/// gamma as it appears in file names: shortest %g form, '.' kept.
inline std::string gamma_tag(double gamma) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", gamma);
  return buf;
}

}  // namespace nhsta::experiment
