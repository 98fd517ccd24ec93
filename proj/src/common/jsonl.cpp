#include "codebench/common/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "codebench/common/errors.hpp"
#include "codebench/common/text.hpp"

namespace codebench::jsonl {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling temp file and rename so readers never see partial output.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void for_each(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn) {
  std::string content = read_file(path);
  std::size_t index = 0;
  for (std::string_view line : text::split_lines(content)) {
    if (text::is_blank(line)) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw MalformedDump(path.string() + ": record " + std::to_string(index) + ": " + e.what());
    }
    fn(record, index);
    ++index;
  }
}

std::vector<Json> read_all(const std::filesystem::path& path) {
  std::vector<Json> out;
  for_each(path, [&](const Json& j, std::size_t) { out.push_back(j); });
  return out;
}

void write_all(const std::filesystem::path& path, const std::vector<Json>& records) {
  std::string content;
  for (const auto& r : records) {
    content += r.dump();
    content.push_back('\n');
  }
  write_file(path, content);
}

}  // namespace codebench::jsonl
