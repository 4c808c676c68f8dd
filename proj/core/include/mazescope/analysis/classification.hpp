#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mazescope/image.hpp"

namespace mazescope::analysis {

struct PixelDataset;

using ClassId = std::uint32_t;

struct ClassInfo {
  std::string label;
  Rgb color;  // black until the user picks one
  bool hidden = false;

  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

/// One class id per pixel of a layer, plus the class table.
struct Classification {
  std::string layer;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<ClassId> assignment;
  std::map<ClassId, ClassInfo> classes;

  std::size_t size() const noexcept { return assignment.size(); }
  /// Counts for every id in the table (emptied classes report 0).
  std::map<ClassId, std::size_t> counts() const;
  /// Throws kConfiguration if the assignment length or id closure is broken.
  void validate() const;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Builds a classification from raw labels, numbering classes densely by
/// first appearance in point order. Labels read "class <id>".
Classification classify(const PixelDataset& dataset, std::span<const std::size_t> labels);

struct NewClass {};
using ReassignTarget = std::variant<ClassId, NewClass>;

/// Moves the listed points to `target`. NewClass allocates max id + 1.
/// Emptied classes stay in the table.
Classification reassign_points(const Classification& classification, std::span<const std::size_t> points,
                               ReassignTarget target);

/// Renumbers ids densely (ascending order of the existing ids).
Classification canonicalize(const Classification& classification);

/// {version, layer, shape:[H,W,C], assignment, classes:{id:{label,color,hidden}}}
/// with sorted keys and dense ids.
std::string to_json_text(const Classification& classification);
Classification parse_classification_json(std::string_view text);

inline constexpr int kClassificationVersion = 1;

}  // namespace mazescope::analysis
