#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace metaglyph::font {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string xml_escape(const std::string& s);

}  // namespace metaglyph::font

namespace metaglyph::font {

/// UFO user-name-to-file-name convention without the collision suffix:
/// capitals get a trailing '_', reserved characters become '_'.
std::string safe_file_name(const std::string& name);

}  // namespace metaglyph::font
