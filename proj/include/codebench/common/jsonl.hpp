#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace codebench::jsonl {

using Json = nlohmann::json;

// Calls `fn(record, index)` for every non-blank line. Throws MalformedDump
// naming the zero-based record index on a parse failure.
void for_each(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn);

std::vector<Json> read_all(const std::filesystem::path& path);

// Writes one compact record per line. Keys are emitted in sorted order so
// identical records always serialize to identical bytes.
void write_all(const std::filesystem::path& path, const std::vector<Json>& records);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace codebench::jsonl
