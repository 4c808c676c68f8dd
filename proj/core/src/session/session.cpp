#include "mazescope/session/session.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "mazescope/error.hpp"

namespace mazescope::session {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

// Ids become file names inside a bundle.
void check_safe_id(const std::string& id) {
  if (id.empty() || id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_") !=
                        std::string::npos) {
    throw Error(ErrorCode::kFormat, "invalid registry id '" + id + "'");
  }
}

std::uint64_t counter_after(const std::string& id, std::string_view prefix, std::uint64_t current) {
  if (!id.starts_with(prefix)) return current;
  try {
    return std::max<std::uint64_t>(current, std::stoull(id.substr(prefix.size())) + 1);
  } catch (const std::exception&) {
    return current;
  }
}

}  // namespace

Session::Session(std::string id, std::size_t undo_limit) : id_(std::move(id)), undo_limit_(undo_limit) {
  if (undo_limit_ == 0) throw Error(ErrorCode::kParameter, "undo limit must be positive");
}

std::string Session::put_maze(maze::MazeGrid grid) {
  std::unique_lock lock(mutex_);
  std::string maze_id = "maze-" + std::to_string(next_maze_++);
  mazes_.emplace(maze_id, std::move(grid));
  return maze_id;
}

void Session::replace_maze(const std::string& maze_id, maze::MazeGrid grid) {
  std::unique_lock lock(mutex_);
  auto it = mazes_.find(maze_id);
  if (it == mazes_.end()) throw Error(ErrorCode::kNotFound, "unknown maze " + maze_id);
  it->second = std::move(grid);
}

maze::MazeGrid Session::maze(const std::string& maze_id) const {
  std::shared_lock lock(mutex_);
  auto it = mazes_.find(maze_id);
  if (it == mazes_.end()) throw Error(ErrorCode::kNotFound, "unknown maze " + maze_id);
  return it->second;
}

std::map<std::string, maze::MazeGrid> Session::mazes() const {
  std::shared_lock lock(mutex_);
  return mazes_;
}

void Session::set_weights_reference(WeightsReference ref) {
  std::unique_lock lock(mutex_);
  weights_ = std::move(ref);
}

std::optional<WeightsReference> Session::weights_reference() const {
  std::shared_lock lock(mutex_);
  return weights_;
}

std::string Session::put_trace(const TraceKey& key, std::shared_ptr<const nn::ActivationTrace> trace) {
  std::unique_lock lock(mutex_);
  if (auto it = trace_cache_.find(key); it != trace_cache_.end()) return it->second;
  std::string trace_id = "trace-" + std::to_string(next_trace_++);
  traces_.emplace(trace_id, std::move(trace));
  trace_cache_.emplace(key, trace_id);
  return trace_id;
}

std::optional<std::string> Session::find_trace(const TraceKey& key) const {
  std::shared_lock lock(mutex_);
  if (auto it = trace_cache_.find(key); it != trace_cache_.end()) return it->second;
  return std::nullopt;
}

std::shared_ptr<const nn::ActivationTrace> Session::trace(const std::string& trace_id) const {
  std::shared_lock lock(mutex_);
  auto it = traces_.find(trace_id);
  if (it == traces_.end()) throw Error(ErrorCode::kNotFound, "unknown trace " + trace_id);
  return it->second;
}

Session::ClassificationRecord& Session::record(const std::string& cls_id) {
  auto it = classifications_.find(cls_id);
  if (it == classifications_.end()) throw Error(ErrorCode::kNotFound, "unknown classification " + cls_id);
  return it->second;
}

const Session::ClassificationRecord& Session::record(const std::string& cls_id) const {
  auto it = classifications_.find(cls_id);
  if (it == classifications_.end()) throw Error(ErrorCode::kNotFound, "unknown classification " + cls_id);
  return it->second;
}

std::string Session::put_classification(analysis::Classification value, std::optional<std::string> trace_id) {
  value.validate();
  std::unique_lock lock(mutex_);
  if (trace_id && !traces_.contains(*trace_id)) throw Error(ErrorCode::kNotFound, "unknown trace " + *trace_id);
  std::string cls_id = "cls-" + std::to_string(next_classification_++);
  classifications_.emplace(cls_id, ClassificationRecord{std::move(value), {}, {}, 1, std::move(trace_id)});
  return cls_id;
}

ClassificationView Session::classification(const std::string& cls_id) const {
  std::shared_lock lock(mutex_);
  const auto& rec = record(cls_id);
  return {rec.current, rec.version, rec.trace_id, rec.undo.size(), rec.redo.size()};
}

std::vector<std::string> Session::classification_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, rec] : classifications_) ids.push_back(id);
  return ids;
}

void Session::push_undo(ClassificationRecord& rec) {
  rec.undo.push_back(rec.current);
  while (rec.undo.size() > undo_limit_) rec.undo.pop_front();
}

std::uint64_t Session::update_classification(const std::string& cls_id, analysis::Classification value,
                                             std::optional<std::uint64_t> expected_version) {
  value.validate();
  std::unique_lock lock(mutex_);
  auto& rec = record(cls_id);
  if (expected_version && *expected_version != rec.version) {
    throw Error(ErrorCode::kConflict, "classification " + cls_id + " is at version " + std::to_string(rec.version) +
                                          ", edit was based on " + std::to_string(*expected_version));
  }
  if (value.size() != rec.current.size()) {
    throw Error(ErrorCode::kParameter, "classification size cannot change from " +
                                           std::to_string(rec.current.size()) + " points");
  }
  push_undo(rec);
  rec.redo.clear();
  rec.current = std::move(value);
  return ++rec.version;
}

std::uint64_t Session::reassign(const std::string& cls_id, std::span<const std::size_t> points,
                                analysis::ReassignTarget target) {
  std::unique_lock lock(mutex_);
  auto& rec = record(cls_id);
  auto next = analysis::reassign_points(rec.current, points, target);
  push_undo(rec);
  rec.redo.clear();
  rec.current = std::move(next);
  return ++rec.version;
}

std::uint64_t Session::undo(const std::string& cls_id) {
  std::unique_lock lock(mutex_);
  auto& rec = record(cls_id);
  if (rec.undo.empty()) throw Error(ErrorCode::kParameter, "nothing to undo for " + cls_id);
  rec.redo.push_back(std::move(rec.current));
  rec.current = std::move(rec.undo.back());
  rec.undo.pop_back();
  return ++rec.version;
}

std::uint64_t Session::redo(const std::string& cls_id) {
  std::unique_lock lock(mutex_);
  auto& rec = record(cls_id);
  if (rec.redo.empty()) throw Error(ErrorCode::kParameter, "nothing to redo for " + cls_id);
  push_undo(rec);
  rec.current = std::move(rec.redo.back());
  rec.redo.pop_back();
  return ++rec.version;
}

analysis::ProjectionState Session::projection(const std::string& cls_id, std::size_t dims) const {
  std::shared_lock lock(mutex_);
  record(cls_id);
  if (auto it = projections_.find(cls_id); it != projections_.end() && it->second.dims == dims) return it->second;
  return analysis::ProjectionState::initial(dims);
}

void Session::set_projection(const std::string& cls_id, analysis::ProjectionState state) {
  std::unique_lock lock(mutex_);
  record(cls_id);
  projections_[cls_id] = std::move(state);
}

void Session::export_bundle(const fs::path& dir, const nn::WeightStore* weights_copy) const {
  std::shared_lock lock(mutex_);
  std::error_code ec;
  fs::create_directories(dir / "mazes", ec);
  fs::create_directories(dir / "classifications", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create bundle directory " + dir.string() + ": " + ec.message());

  json manifest{{"version", kBundleVersion}, {"session", id_}, {"undo_limit", undo_limit_}};
  json maze_index = json::array();
  for (const auto& [maze_id, grid] : mazes_) {
    const std::string file = "mazes/" + maze_id + ".maze";
    write_file(dir / file, maze::to_maze_text(grid));
    maze_index.push_back({{"id", maze_id}, {"file", file}});
  }
  manifest["mazes"] = std::move(maze_index);

  json cls_index = json::array();
  for (const auto& [cls_id, rec] : classifications_) {
    const std::string file = "classifications/" + cls_id + ".json";
    write_file(dir / file, analysis::to_json_text(rec.current));
    auto history = [&](const auto& items, const std::string& kind) {
      json files = json::array();
      std::size_t k = 0;
      for (const auto& item : items) {
        const std::string f = "classifications/" + cls_id + "." + kind + "." + std::to_string(k++) + ".json";
        write_file(dir / f, analysis::to_json_text(item));
        files.push_back(f);
      }
      return files;
    };
    json entry{{"id", cls_id},
               {"file", file},
               {"version", rec.version},
               {"undo", history(rec.undo, "undo")},
               {"redo", history(rec.redo, "redo")}};
    if (rec.trace_id) entry["trace"] = *rec.trace_id;
    cls_index.push_back(std::move(entry));
  }
  manifest["classifications"] = std::move(cls_index);

  if (weights_copy) {
    nn::save_weights(*weights_copy, dir / "weights.impw");
    manifest["weights"] = {{"file", "weights.impw"}, {"checksum", weights_copy->checksum()}};
  } else if (weights_) {
    manifest["weights"] = {{"path", weights_->path}, {"checksum", weights_->checksum}};
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

std::unique_ptr<Session> Session::import_bundle(const fs::path& dir) {
  json manifest;
  try {
    manifest = json::parse(read_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bundle manifest: ") + e.what());
  }
  try {
    const int version = manifest.at("version").get<int>();
    if (version != kBundleVersion) {
      throw Error(ErrorCode::kFormat, "unsupported bundle version " + std::to_string(version));
    }
    auto session = std::make_unique<Session>(manifest.at("session").get<std::string>(),
                                             manifest.value("undo_limit", kDefaultUndoLimit));
    for (const auto& entry : manifest.at("mazes")) {
      const auto maze_id = entry.at("id").get<std::string>();
      check_safe_id(maze_id);
      session->mazes_.emplace(maze_id, maze::parse_maze_text(read_file(dir / entry.at("file").get<std::string>())));
      session->next_maze_ = counter_after(maze_id, "maze-", session->next_maze_);
    }
    for (const auto& entry : manifest.at("classifications")) {
      const auto cls_id = entry.at("id").get<std::string>();
      check_safe_id(cls_id);
      auto load = [&](const std::string& file) {
        return analysis::parse_classification_json(read_file(dir / file));
      };
      ClassificationRecord rec;
      rec.current = load(entry.at("file").get<std::string>());
      rec.version = entry.value("version", std::uint64_t{1});
      for (const auto& f : entry.value("undo", json::array())) rec.undo.push_back(load(f.get<std::string>()));
      for (const auto& f : entry.value("redo", json::array())) rec.redo.push_back(load(f.get<std::string>()));
      // traces are a cache and are not persisted
      session->classifications_.emplace(cls_id, std::move(rec));
      session->next_classification_ = counter_after(cls_id, "cls-", session->next_classification_);
    }
    if (manifest.contains("weights")) {
      const auto& w = manifest.at("weights");
      WeightsReference ref;
      ref.checksum = w.at("checksum").get<std::uint32_t>();
      ref.path = w.contains("file") ? (dir / w.at("file").get<std::string>()).string() : w.at("path").get<std::string>();
      session->weights_ = std::move(ref);
    }
    return session;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bundle manifest: ") + e.what());
  }
}

std::shared_ptr<Session> SessionStore::create(std::size_t undo_limit) {
  std::lock_guard lock(mutex_);
  auto session = std::make_shared<Session>("s" + std::to_string(next_++), undo_limit);
  sessions_.emplace(session->id(), session);
  return session;
}

std::shared_ptr<Session> SessionStore::get(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kNotFound, "unknown session " + session_id);
  return it->second;
}

std::shared_ptr<Session> SessionStore::import_bundle(const fs::path& dir) {
  std::shared_ptr<Session> imported = Session::import_bundle(dir);
  std::lock_guard lock(mutex_);
  const std::string fresh = "s" + std::to_string(next_++);
  imported->id_ = fresh;
  sessions_.emplace(fresh, imported);
  return imported;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace mazescope::session
