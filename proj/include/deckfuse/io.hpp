#pragma once

#include <filesystem>
#include <string>

namespace deckfuse::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace deckfuse::io
