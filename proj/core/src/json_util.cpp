#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace mdp::detail {

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void save_json_file(const std::filesystem::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

}  // namespace mdp::detail
