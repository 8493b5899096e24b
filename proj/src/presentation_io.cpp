#include "limitlab/presentation_io.hpp"

#include <fstream>

namespace limitlab {

nlohmann::ordered_json to_json(const MarkedGroup& group) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["id"] = group.id();
  doc["generators"] = nlohmann::ordered_json::array();
  for (const Generator& g : group.generators()) {
    const auto& m = g.matrix;
    doc["generators"].push_back({{"name", g.name}, {"matrix", {m.a(), m.b(), m.c(), m.d()}}});
  }
  if (group.relator()) {
    doc["relator"] = group.relator()->tokens(group.generator_names());
  } else {
    doc["relator"] = nullptr;
  }
  doc["characters"] = nlohmann::ordered_json::array();
  for (const Character& c : group.characters()) {
    nlohmann::ordered_json images = nlohmann::ordered_json::array();
    for (Eigen::Index col = 0; col < c.images.cols(); ++col) {
      std::vector<int> column;
      for (Eigen::Index row = 0; row < c.images.rows(); ++row) column.push_back(c.images(row, col));
      images.push_back(column);
    }
    doc["characters"].push_back({{"name", c.name}, {"images", images}});
  }
  return doc;
}

MarkedGroup group_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema_version").get<std::string>() != kSchemaVersion) {
      throw Error(ErrorCode::InvalidInput, "unsupported schema_version");
    }
    std::vector<Generator> generators;
    for (const auto& g : doc.at("generators")) {
      const auto entries = g.at("matrix").get<std::vector<double>>();
      if (entries.size() != 4) throw Error(ErrorCode::InvalidInput, "generator matrix needs 4 entries");
      generators.push_back(
          {g.at("name").get<std::string>(), Mobius<double>::from_entries(entries[0], entries[1], entries[2], entries[3])});
    }
    std::vector<std::string> names;
    for (const Generator& g : generators) names.push_back(g.name);
    std::optional<Word> relator;
    if (doc.contains("relator") && !doc.at("relator").is_null()) {
      relator = Word::from_tokens(doc.at("relator").get<std::vector<std::string>>(), names);
    }
    std::vector<Character> characters;
    if (doc.contains("characters")) {
      for (const auto& c : doc.at("characters")) {
        const auto columns = c.at("images").get<std::vector<std::vector<int>>>();
        if (columns.size() != generators.size()) {
          throw Error(ErrorCode::InvalidInput, "character needs one image per generator");
        }
        const std::size_t dim = columns.empty() ? 0 : columns.front().size();
        Eigen::MatrixXi images(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(columns.size()));
        for (std::size_t col = 0; col < columns.size(); ++col) {
          if (columns[col].size() != dim) throw Error(ErrorCode::InvalidInput, "ragged character images");
          for (std::size_t row = 0; row < dim; ++row) {
            images(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = columns[col][row];
          }
        }
        characters.push_back({c.at("name").get<std::string>(), images});
      }
    }
    return MarkedGroup(doc.value("id", std::string("custom")), std::move(generators), relator, std::move(characters));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed presentation: ") + e.what());
  }
}

void save_group(const MarkedGroup& group, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path);
  out << to_json(group).dump(2) << '\n';
}

MarkedGroup load_group(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return group_from_json(doc);
}

}  // namespace limitlab
