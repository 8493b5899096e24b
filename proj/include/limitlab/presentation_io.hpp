#pragma once

#include <string>

#include <json.hpp>

#include "limitlab/marked_group.hpp"

namespace limitlab {

inline constexpr const char* kSchemaVersion = "1";

/// {"schema_version", "id", "generators": [{"name", "matrix": [a,b,c,d]}],
///  "relator": [tokens] | null, "characters": [{"name", "images": [[...] per generator]}]}
nlohmann::ordered_json to_json(const MarkedGroup& group);
MarkedGroup group_from_json(const nlohmann::json& doc);

void save_group(const MarkedGroup& group, const std::string& path);
MarkedGroup load_group(const std::string& path);

}  // namespace limitlab
