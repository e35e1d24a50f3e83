#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fracdeg {

// Deterministic CSV: header row, comma separators, '.' decimal point,
// shortest round-trip formatting for doubles.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(std::int64_t v);

  const std::string& text() const { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  size_t columns_;
  std::string text_;
};

// 16-bit binary PGM (P5, big-endian samples, maxval 65535).
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels);

// FNV-1a 64-bit, the checksum recorded in run manifests.
std::uint64_t fnv1a64(const void* data, size_t bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

// Plain-text run manifest: config echo plus per-file checksums.
class RunManifest {
 public:
  void set(const std::string& key, const std::string& value);
  void add_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<std::filesystem::path> files_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fracdeg
