#include "fracdeg/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace fracdeg {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
  for (size_t i = 0; i < header.size(); ++i) {
    text_ += header[i];
    text_ += (i + 1 < header.size()) ? "," : "\n";
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    text_ += cells[i];
    text_ += (i + 1 < cells.size()) ? "," : "\n";
  }
}

std::string CsvWriter::num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

void CsvWriter::save(const std::filesystem::path& path) const { write_text_file(path, text_); }

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& pixels) {
  if (static_cast<size_t>(width) * height != pixels.size())
    throw std::invalid_argument("write_pgm16: pixel count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm16: cannot open " + path.string());
  out << "P5\n" << width << " " << height << "\n65535\n";
  for (std::uint16_t p : pixels) {
    const unsigned char hi = static_cast<unsigned char>(p >> 8);
    const unsigned char lo = static_cast<unsigned char>(p & 0xff);
    out.put(static_cast<char>(hi));
    out.put(static_cast<char>(lo));
  }
  if (!out) throw std::runtime_error("write_pgm16: write failed for " + path.string());
}

std::uint64_t fnv1a64(const void* data, size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("fnv1a64_file: cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof buf)) break;
  }
  return h;
}

void RunManifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void RunManifest::add_file(const std::filesystem::path& path) { files_.push_back(path); }

void RunManifest::save(const std::filesystem::path& path) const {
  std::string text;
  for (const auto& [k, v] : entries_) text += k + "=" + v + "\n";
  for (const auto& f : files_) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(f)));
    text += "file=" + f.filename().string() + ";bytes=" +
            std::to_string(std::filesystem::file_size(f)) + ";fnv1a64=" + buf + "\n";
  }
  write_text_file(path, text);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write_text_file: write failed for " + path.string());
}

}  // namespace fracdeg
