#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sparse_rhc/rhc.hpp"

namespace srhc {

struct RunConfig {
  RhcConfig rhc;
  std::string out_dir = "out";
  bool verbose = false;
  unsigned seed = 0;  // consumed by test utilities only

  bool operator==(const RunConfig&) const = default;
};

/// One documented `key = value` entry of the INI format.
struct ConfigKey {
  std::string section;
  std::string name;
  std::string doc;
};

/// Every accepted key, in serialization order. `[actuators] rect` may repeat.
const std::vector<ConfigKey>& config_keys();

/// INI text with sections [mesh] [rhc] [prox] [pod] [actuators] [output].
/// Missing keys keep their defaults; unknown sections or keys, malformed
/// lines and unparsable values throw ConfigError with the line number.
/// Numbers may be written as fractions ("1/80"). The first `rect` line
/// replaces the default actuator layout. The result is validated.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parse_config maps back to an equal RunConfig.
std::string serialize_config(const RunConfig& config);

/// Key listing with defaults, for --help.
std::string config_help();

}  // namespace srhc
