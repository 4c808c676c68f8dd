#include "mazescope/analysis/classification.hpp"

#include <json.hpp>

#include <algorithm>
#include <unordered_map>

#include "mazescope/analysis/dataset.hpp"
#include "mazescope/error.hpp"

namespace mazescope::analysis {

using nlohmann::json;

std::map<ClassId, std::size_t> Classification::counts() const {
  std::map<ClassId, std::size_t> out;
  for (const auto& [id, info] : classes) out[id] = 0;
  for (ClassId id : assignment) ++out[id];
  return out;
}

void Classification::validate() const {
  if (assignment.size() != height * width) {
    throw Error(ErrorCode::kConfiguration, "classification has " + std::to_string(assignment.size()) +
                                               " assignments for a " + std::to_string(height) + "x" +
                                               std::to_string(width) + " layer");
  }
  for (ClassId id : assignment) {
    if (!classes.contains(id)) {
      throw Error(ErrorCode::kConfiguration, "assignment references unknown class " + std::to_string(id));
    }
  }
}

static ClassInfo default_info(ClassId id) { return ClassInfo{"class " + std::to_string(id), Rgb{}, false}; }

Classification classify(const PixelDataset& dataset, std::span<const std::size_t> labels) {
  if (labels.size() != dataset.size()) {
    throw Error(ErrorCode::kConfiguration, "label count does not match dataset size");
  }
  Classification out;
  out.layer = dataset.layer;
  out.height = dataset.height;
  out.width = dataset.width;
  out.channels = dataset.channels;
  out.assignment.reserve(labels.size());
  std::unordered_map<std::size_t, ClassId> dense;
  for (std::size_t label : labels) {
    auto [it, inserted] = dense.try_emplace(label, static_cast<ClassId>(dense.size()));
    if (inserted) out.classes.emplace(it->second, default_info(it->second));
    out.assignment.push_back(it->second);
  }
  return out;
}

Classification reassign_points(const Classification& classification, std::span<const std::size_t> points,
                               ReassignTarget target) {
  for (std::size_t p : points) {
    if (p >= classification.size()) {
      throw Error(ErrorCode::kRange, "point " + std::to_string(p) + " outside classification of " +
                                         std::to_string(classification.size()) + " points");
    }
  }
  Classification out = classification;
  ClassId id;
  if (const auto* existing = std::get_if<ClassId>(&target)) {
    if (!out.classes.contains(*existing)) {
      throw Error(ErrorCode::kNotFound, "unknown class id " + std::to_string(*existing));
    }
    id = *existing;
  } else {
    id = out.classes.empty() ? 0 : out.classes.rbegin()->first + 1;
    out.classes.emplace(id, default_info(id));
  }
  for (std::size_t p : points) out.assignment[p] = id;
  return out;
}

Classification canonicalize(const Classification& classification) {
  Classification out = classification;
  out.classes.clear();
  std::map<ClassId, ClassId> remap;
  for (const auto& [id, info] : classification.classes) {
    const auto dense = static_cast<ClassId>(remap.size());
    remap.emplace(id, dense);
    out.classes.emplace(dense, info);
  }
  for (auto& id : out.assignment) id = remap.at(id);
  return out;
}

std::string to_json_text(const Classification& classification) {
  classification.validate();
  const Classification c = canonicalize(classification);
  json classes = json::object();
  for (const auto& [id, info] : c.classes) {
    classes[std::to_string(id)] = json{{"label", info.label}, {"color", to_hex(info.color)}, {"hidden", info.hidden}};
  }
  json doc{{"version", kClassificationVersion},
           {"layer", c.layer},
           {"shape", {c.height, c.width, c.channels}},
           {"assignment", c.assignment},
           {"classes", std::move(classes)}};
  return doc.dump();
}

Classification parse_classification_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("classification JSON: ") + e.what());
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kClassificationVersion) {
      throw Error(ErrorCode::kFormat, "unsupported classification version " + std::to_string(version));
    }
    Classification c;
    c.layer = doc.at("layer").get<std::string>();
    const auto shape = doc.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw Error(ErrorCode::kFormat, "classification shape must be [H, W, C]");
    c.height = shape[0];
    c.width = shape[1];
    c.channels = shape[2];
    c.assignment = doc.at("assignment").get<std::vector<ClassId>>();
    for (const auto& [key, value] : doc.at("classes").items()) {
      std::size_t used = 0;
      const unsigned long id = std::stoul(key, &used);
      if (used != key.size()) throw Error(ErrorCode::kFormat, "class id must be an integer: " + key);
      c.classes.emplace(static_cast<ClassId>(id),
                        ClassInfo{value.at("label").get<std::string>(),
                                  parse_hex_color(value.at("color").get<std::string>()),
                                  value.at("hidden").get<bool>()});
    }
    try {
      c.validate();
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormat, e.what());
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("classification JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::kFormat, "classification JSON: class ids must be integers");
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::kFormat, "classification JSON: class id out of range");
  }
}

}  // namespace mazescope::analysis
