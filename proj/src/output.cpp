#include "mbgf/output.hpp"

#include <fstream>

#include "mbgf/errors.hpp"
#include "mbgf/version.hpp"

namespace mbgf {

std::string csv_table(const artifact_header& h, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  out += "# mbgf ";
  out += version_string;
  out += "\n# config: " + h.config;
  out += "\n# input: " + h.input + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json json_envelope(const artifact_header& h) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["tool"] = "mbgf";
  j["version"] = version_string;
  j["config"] = h.config;
  j["input"] = h.input;
  return j;
}

std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mbgf_error(error_category::input, "cannot open " + path + " for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw mbgf_error(error_category::input, "write failed for " + path);
}

}  // namespace mbgf
