#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

#include "metaglyph/font/variation.hpp"

namespace metaglyph::font {

class DesignspaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Designspace (format 4.1) text. `ufo_paths` maps master name to its UFO,
/// written relative to the document's directory `base`. Every master needs
/// an existing UFO.
std::string designspace_document(const MasterSet& set, const std::string& family,
                                 const std::map<std::string, std::filesystem::path>& ufo_paths,
                                 const std::filesystem::path& base);

void write_designspace(const MasterSet& set, const std::string& family,
                       const std::map<std::string, std::filesystem::path>& ufo_paths,
                       const std::filesystem::path& file);

}  // namespace metaglyph::font
