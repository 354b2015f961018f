#include "io.hpp"

#include <fstream>
#include <random>

namespace metaglyph::font {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  thread_local std::mt19937_64 rng{std::random_device{}()};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rng() % 1000000);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.close();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move into place " + path.string());
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace metaglyph::font

namespace metaglyph::font {

std::string safe_file_name(const std::string& name) {
  static const std::string illegal = "\"*+/:<>?[\\]|";
  std::string out;
  for (unsigned char c : name) {
    if (c < 0x20 || c == 0x7F || illegal.find(static_cast<char>(c)) != std::string::npos) {
      out += '_';
    } else {
      out += static_cast<char>(c);
      if (c >= 'A' && c <= 'Z') out += '_';
    }
  }
  if (!out.empty() && out[0] == '.') out[0] = '_';
  return out;
}

}  // namespace metaglyph::font
