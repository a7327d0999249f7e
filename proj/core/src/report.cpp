#include "fjscb/report.hpp"

#include <fstream>

#include "fjscb/errors.hpp"

namespace fjscb {

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing " + path.string());
}

nlohmann::json manifest(std::string_view command, const nlohmann::json& resolved_config) {
  return {{"tool", "fjscb"}, {"version", kVersion}, {"command", command}, {"config", resolved_config}};
}

}  // namespace fjscb
