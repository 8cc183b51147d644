#pragma once

#include "mec/model.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace mec {

/// A loaded configuration. `physical` is set when the file described the
/// device through raw physical inputs and the slot constants were derived.
struct Config {
    SystemParams params;
    std::optional<PhysicalInputs> physical;
};

/// Parses a flat `key = value` document ('#' starts a comment). Keys are the
/// snake_case field names of SystemParams and PhysicalInputs; unknown or
/// repeated keys are errors reported with their line number.
Config parse_config(std::istream& is);
Config load_config(const std::string& path);

} // namespace mec
