#pragma once

#include <string>

#include "codevo/controller.hpp"
#include "codevo/model_provider.hpp"
#include "codevo/taskspec.hpp"

namespace codevo {

// Everything a run needs, decoded from one config document.
struct LoadedConfig {
    TaskSpec task;
    RunConfig run;
    ModelProvider provider;
    std::uint64_t seed = 0;
};

// Parses a config document (JSON, // and /* */ comments allowed). Relative
// "from" file references are resolved against base_dir. Throws
// Error("ConfigParseError") with a field path in the message on any problem.
LoadedConfig parse_config(const std::string& text, const std::string& base_dir);

// Reads and parses the config file at path; base_dir is the file's directory.
LoadedConfig load_config(const std::string& path);

}  // namespace codevo
