#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace mbgf {

// Header stamped into every artifact: tool version, the effective config, and
// the input checksum, so identical configs are provably identical runs.
struct artifact_header {
  std::string config;
  std::string input;  // "fnv1a:<hex16>"
};

std::string csv_table(const artifact_header& h, const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows);

// {"schema": 1, "tool", "version", "config", "input"}; payload keys follow.
nlohmann::ordered_json json_envelope(const artifact_header& h);

// Serialized with a trailing newline; two-space indent.
std::string json_text(const nlohmann::ordered_json& j);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mbgf
