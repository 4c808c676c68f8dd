#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "mazescope/analysis/classification.hpp"
#include "mazescope/analysis/grand_tour.hpp"
#include "mazescope/maze/maze.hpp"
#include "mazescope/nn/forward.hpp"

namespace mazescope::session {

inline constexpr int kBundleVersion = 1;
inline constexpr std::size_t kDefaultUndoLimit = 100;

/// Cache key for a forward pass: same weights, same maze, same capture set.
struct TraceKey {
  std::uint32_t weights_checksum = 0;
  std::uint64_t maze_hash = 0;
  std::set<std::string> capture;
  friend auto operator<=>(const TraceKey&, const TraceKey&) = default;
};

struct WeightsReference {
  std::string path;
  std::uint32_t checksum = 0;
  friend bool operator==(const WeightsReference&, const WeightsReference&) = default;
};

struct ClassificationView {
  analysis::Classification value;
  std::uint64_t version = 0;
  std::optional<std::string> trace_id;
  std::size_t undo_depth = 0;
  std::size_t redo_depth = 0;
};

/// Registries for one workbench session. Writers are serialized; readers
/// run concurrently. Classification edits keep a bounded undo stack.
class Session {
 public:
  explicit Session(std::string id, std::size_t undo_limit = kDefaultUndoLimit);

  const std::string& id() const noexcept { return id_; }
  std::size_t undo_limit() const noexcept { return undo_limit_; }

  std::string put_maze(maze::MazeGrid grid);
  void replace_maze(const std::string& maze_id, maze::MazeGrid grid);
  maze::MazeGrid maze(const std::string& maze_id) const;
  std::map<std::string, maze::MazeGrid> mazes() const;

  void set_weights_reference(WeightsReference ref);
  std::optional<WeightsReference> weights_reference() const;

  /// Returns the cached trace id when the key was seen before.
  std::string put_trace(const TraceKey& key, std::shared_ptr<const nn::ActivationTrace> trace);
  std::optional<std::string> find_trace(const TraceKey& key) const;
  std::shared_ptr<const nn::ActivationTrace> trace(const std::string& trace_id) const;

  std::string put_classification(analysis::Classification value, std::optional<std::string> trace_id = {});
  ClassificationView classification(const std::string& cls_id) const;
  std::vector<std::string> classification_ids() const;
  /// Replaces the current value, pushing the old one on the undo stack.
  /// A stale expected_version raises kConflict. Returns the new version.
  std::uint64_t update_classification(const std::string& cls_id, analysis::Classification value,
                                      std::optional<std::uint64_t> expected_version = {});
  std::uint64_t reassign(const std::string& cls_id, std::span<const std::size_t> points,
                         analysis::ReassignTarget target);
  std::uint64_t undo(const std::string& cls_id);
  std::uint64_t redo(const std::string& cls_id);

  /// Projection state per classification; created from the dataset dims on first use.
  analysis::ProjectionState projection(const std::string& cls_id, std::size_t dims) const;
  void set_projection(const std::string& cls_id, analysis::ProjectionState state);

  /// Writes manifest.json, mazes/*.maze, classifications/*.json (current
  /// value plus undo/redo history) and optionally weights.impw.
  void export_bundle(const std::filesystem::path& dir, const nn::WeightStore* weights_copy = nullptr) const;
  static std::unique_ptr<Session> import_bundle(const std::filesystem::path& dir);

 private:
  friend class SessionStore;

  struct ClassificationRecord {
    analysis::Classification current;
    std::deque<analysis::Classification> undo;
    std::vector<analysis::Classification> redo;
    std::uint64_t version = 1;
    std::optional<std::string> trace_id;
  };

  ClassificationRecord& record(const std::string& cls_id);
  const ClassificationRecord& record(const std::string& cls_id) const;
  void push_undo(ClassificationRecord& rec);

  std::string id_;
  std::size_t undo_limit_;
  mutable std::shared_mutex mutex_;
  std::uint64_t next_maze_ = 1;
  std::uint64_t next_trace_ = 1;
  std::uint64_t next_classification_ = 1;
  std::map<std::string, maze::MazeGrid> mazes_;
  std::optional<WeightsReference> weights_;
  std::map<std::string, std::shared_ptr<const nn::ActivationTrace>> traces_;
  std::map<TraceKey, std::string> trace_cache_;
  std::map<std::string, ClassificationRecord> classifications_;
  std::map<std::string, analysis::ProjectionState> projections_;
};

/// Process-wide session registry; sessions never share state.
class SessionStore {
 public:
  std::shared_ptr<Session> create(std::size_t undo_limit = kDefaultUndoLimit);
  std::shared_ptr<Session> get(const std::string& session_id) const;
  /// Imports a bundle as a new session (fresh id) and returns it.
  std::shared_ptr<Session> import_bundle(const std::filesystem::path& dir);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::uint64_t next_ = 1;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace mazescope::session
