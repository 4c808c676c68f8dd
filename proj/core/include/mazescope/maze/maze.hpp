#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mazescope::maze {

enum class Cell : std::uint8_t { kBlocked, kFree };

struct GridPos {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

inline constexpr int kMinWorldSize = 3;
inline constexpr int kMaxWorldSize = 63;

/// Square world of blocked/free cells with a mouse and an optional cheese.
/// Rooms sit at odd (row, col); the outer border is always part of the lattice
/// walls for generated mazes. Value type: edits return a new grid.
class MazeGrid {
 public:
  /// All cells blocked; mouse parked at the bottom-left room position.
  /// Entity-on-free is only enforced by the placement operations, so this
  /// starting grid is a canvas, not a valid maze.
  static MazeGrid all_blocked(int size);

  int size() const noexcept { return size_; }
  Cell at(GridPos p) const { return cells_.at(index(p)); }
  bool in_bounds(GridPos p) const noexcept {
    return p.row >= 0 && p.col >= 0 && p.row < size_ && p.col < size_;
  }
  bool is_free(GridPos p) const noexcept { return in_bounds(p) && cells_[index(p)] == Cell::kFree; }

  GridPos mouse() const noexcept { return mouse_; }
  const std::optional<GridPos>& cheese() const noexcept { return cheese_; }

  /// Throws kRange for out-of-bounds, kPlacement when blocking an occupied cell.
  MazeGrid with_cell(GridPos p, Cell kind) const;
  /// Throws kPlacement unless the target is free and not occupied by the other entity.
  MazeGrid with_mouse(GridPos p) const;
  MazeGrid with_cheese(GridPos p) const;
  MazeGrid without_cheese() const;

  const std::vector<Cell>& cells() const noexcept { return cells_; }

  friend bool operator==(const MazeGrid&, const MazeGrid&) = default;

 private:
  friend MazeGrid parse_maze_text(std::string_view text);
  friend struct Generator;

  std::size_t index(GridPos p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(p.col);
  }
  void check_bounds(GridPos p) const;

  int size_ = 0;
  std::vector<Cell> cells_;
  GridPos mouse_;
  std::optional<GridPos> cheese_;
};

/// Throws kParameter unless 3 <= size <= 63 and size is odd.
void check_world_size(int size);

/// Room positions at the default corners.
GridPos bottom_left_room(int size);
GridPos top_right_room(int size);

struct GenerateOptions {
  std::optional<GridPos> mouse;   // default: bottom-left room
  std::optional<GridPos> cheese;  // default: top-right room (absent for size 3)
  bool place_cheese = true;
};

/// Randomized Kruskal over the room lattice: a spanning tree of rooms.
/// Deterministic for (seed, size).
MazeGrid generate_kruskal(std::uint64_t seed, int size, const GenerateOptions& options = {});

/// Shortest path from -> to (inclusive) by BFS, expanding up, down, left, right.
std::optional<std::vector<GridPos>> solve_bfs(const MazeGrid& grid, GridPos from, GridPos to);

/// Structural report for generated or hand-edited grids.
struct MazeValidity {
  std::size_t free_cells = 0;
  std::size_t adjacencies = 0;    // 4-neighbour edges between free cells
  std::size_t rooms = 0;          // free cells at odd-odd positions
  std::size_t corridors = 0;      // free cells elsewhere
  bool free_cells_connected = false;
  bool is_tree = false;           // connected and adjacencies == free_cells - 1
  bool entities_on_free = false;
  bool mouse_cheese_distinct = false;
  bool path_to_cheese = false;    // false when cheese is absent
};

MazeValidity check_validity(const MazeGrid& grid);

/// "W=<n>" then n rows of '#', '.', 'M', 'C'. Throws kPlacement for a grid whose
/// mouse or cheese stands on a blocked cell (such as the all_blocked canvas).
std::string to_maze_text(const MazeGrid& grid);
MazeGrid parse_maze_text(std::string_view text);

/// Stable content hash of the text form.
std::uint64_t content_hash(const MazeGrid& grid);

}  // namespace mazescope::maze
