#include "mazescope/maze/maze.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

#include "mazescope/error.hpp"

namespace mazescope::maze {

namespace {

std::string pos_string(GridPos p) { return "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")"; }

constexpr std::array<GridPos, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};  // up, down, left, right

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

void check_world_size(int size) {
  if (size < kMinWorldSize || size > kMaxWorldSize || size % 2 == 0) {
    throw Error(ErrorCode::kParameter,
                "world size must be odd and within [3, 63], got " + std::to_string(size));
  }
}

GridPos bottom_left_room(int size) { return {size - 2, 1}; }
GridPos top_right_room(int size) { return {1, size - 2}; }

MazeGrid MazeGrid::all_blocked(int size) {
  check_world_size(size);
  MazeGrid grid;
  grid.size_ = size;
  grid.cells_.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), Cell::kBlocked);
  grid.mouse_ = bottom_left_room(size);
  return grid;
}

void MazeGrid::check_bounds(GridPos p) const {
  if (!in_bounds(p)) {
    throw Error(ErrorCode::kRange, "cell " + pos_string(p) + " outside a " + std::to_string(size_) + "x" +
                                       std::to_string(size_) + " grid");
  }
}

MazeGrid MazeGrid::with_cell(GridPos p, Cell kind) const {
  check_bounds(p);
  if (kind == Cell::kBlocked && (p == mouse_ || (cheese_ && *cheese_ == p))) {
    throw Error(ErrorCode::kPlacement, "cannot block " + pos_string(p) + ": occupied by an entity");
  }
  MazeGrid next = *this;
  next.cells_[index(p)] = kind;
  return next;
}

MazeGrid MazeGrid::with_mouse(GridPos p) const {
  check_bounds(p);
  if (cells_[index(p)] != Cell::kFree) throw Error(ErrorCode::kPlacement, "mouse placed on blocked cell " + pos_string(p));
  if (cheese_ && *cheese_ == p) throw Error(ErrorCode::kPlacement, "mouse placed on the cheese at " + pos_string(p));
  MazeGrid next = *this;
  next.mouse_ = p;
  return next;
}

MazeGrid MazeGrid::with_cheese(GridPos p) const {
  check_bounds(p);
  if (cells_[index(p)] != Cell::kFree) throw Error(ErrorCode::kPlacement, "cheese placed on blocked cell " + pos_string(p));
  if (mouse_ == p) throw Error(ErrorCode::kPlacement, "cheese placed on the mouse at " + pos_string(p));
  MazeGrid next = *this;
  next.cheese_ = p;
  return next;
}

MazeGrid MazeGrid::without_cheese() const {
  MazeGrid next = *this;
  next.cheese_.reset();
  return next;
}

struct Generator {
  static MazeGrid run(std::uint64_t seed, int size, const GenerateOptions& options) {
    MazeGrid grid = MazeGrid::all_blocked(size);
    const int rooms_per_side = (size - 1) / 2;
    auto room_id = [rooms_per_side](int a, int b) { return static_cast<std::size_t>(a * rooms_per_side + b); };
    for (int a = 0; a < rooms_per_side; ++a) {
      for (int b = 0; b < rooms_per_side; ++b) grid.cells_[grid.index({2 * a + 1, 2 * b + 1})] = Cell::kFree;
    }

    struct Wall {
      std::size_t from, to;
      GridPos cell;
    };
    std::vector<Wall> walls;
    for (int a = 0; a < rooms_per_side; ++a) {
      for (int b = 0; b < rooms_per_side; ++b) {
        if (b + 1 < rooms_per_side) walls.push_back({room_id(a, b), room_id(a, b + 1), {2 * a + 1, 2 * b + 2}});
        if (a + 1 < rooms_per_side) walls.push_back({room_id(a, b), room_id(a + 1, b), {2 * a + 2, 2 * b + 1}});
      }
    }

    // Fisher-Yates with an explicit bounded draw so the order does not depend
    // on the standard library's distribution implementation.
    std::mt19937_64 rng(seed);
    for (std::size_t i = walls.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * i) >> 64);
      std::swap(walls[i - 1], walls[j]);
    }

    DisjointSets sets(static_cast<std::size_t>(rooms_per_side * rooms_per_side));
    for (const auto& wall : walls) {
      if (sets.unite(wall.from, wall.to)) grid.cells_[grid.index(wall.cell)] = Cell::kFree;
    }

    grid = grid.with_mouse(options.mouse.value_or(bottom_left_room(size)));
    if (options.place_cheese) {
      if (options.cheese) {
        grid = grid.with_cheese(*options.cheese);
      } else if (top_right_room(size) != grid.mouse()) {
        grid = grid.with_cheese(top_right_room(size));
      } else if (bottom_left_room(size) != grid.mouse()) {
        grid = grid.with_cheese(bottom_left_room(size));
      }
    }
    return grid;
  }
};

MazeGrid generate_kruskal(std::uint64_t seed, int size, const GenerateOptions& options) {
  check_world_size(size);
  return Generator::run(seed, size, options);
}

std::optional<std::vector<GridPos>> solve_bfs(const MazeGrid& grid, GridPos from, GridPos to) {
  if (!grid.is_free(from) || !grid.is_free(to)) {
    throw Error(ErrorCode::kParameter, "path endpoints must be free cells");
  }
  const auto n = static_cast<std::size_t>(grid.size());
  auto flat = [n](GridPos p) { return static_cast<std::size_t>(p.row) * n + static_cast<std::size_t>(p.col); };
  std::vector<int> parent(n * n, -1);
  std::vector<bool> seen(n * n, false);
  std::queue<GridPos> frontier;
  frontier.push(from);
  seen[flat(from)] = true;
  while (!frontier.empty()) {
    const GridPos cur = frontier.front();
    frontier.pop();
    if (cur == to) break;
    for (const auto& step : kSteps) {
      const GridPos next{cur.row + step.row, cur.col + step.col};
      if (!grid.is_free(next) || seen[flat(next)]) continue;
      seen[flat(next)] = true;
      parent[flat(next)] = static_cast<int>(flat(cur));
      frontier.push(next);
    }
  }
  if (!seen[flat(to)]) return std::nullopt;
  std::vector<GridPos> path;
  for (int at = static_cast<int>(flat(to)); at != -1; at = parent[static_cast<std::size_t>(at)]) {
    path.push_back({at / static_cast<int>(n), at % static_cast<int>(n)});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

MazeValidity check_validity(const MazeGrid& grid) {
  MazeValidity report;
  const int n = grid.size();
  std::optional<GridPos> first;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (!grid.is_free({r, c})) continue;
      ++report.free_cells;
      if (r % 2 == 1 && c % 2 == 1) {
        ++report.rooms;
      } else {
        ++report.corridors;
      }
      if (grid.is_free({r, c + 1})) ++report.adjacencies;
      if (grid.is_free({r + 1, c})) ++report.adjacencies;
      if (!first) first = GridPos{r, c};
    }
  }
  if (first) {
    std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
    std::vector<GridPos> stack{*first};
    seen[static_cast<std::size_t>(first->row * n + first->col)] = true;
    std::size_t reached = 0;
    while (!stack.empty()) {
      const GridPos cur = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto& step : kSteps) {
        const GridPos next{cur.row + step.row, cur.col + step.col};
        const auto k = static_cast<std::size_t>(next.row * n + next.col);
        if (grid.is_free(next) && !seen[k]) {
          seen[k] = true;
          stack.push_back(next);
        }
      }
    }
    report.free_cells_connected = reached == report.free_cells;
  }
  report.is_tree = report.free_cells_connected && report.adjacencies + 1 == report.free_cells;
  const auto& cheese = grid.cheese();
  report.entities_on_free = grid.is_free(grid.mouse()) && (!cheese || grid.is_free(*cheese));
  report.mouse_cheese_distinct = !cheese || *cheese != grid.mouse();
  report.path_to_cheese =
      cheese && report.entities_on_free && solve_bfs(grid, grid.mouse(), *cheese).has_value();
  return report;
}

std::string to_maze_text(const MazeGrid& grid) {
  if (!grid.is_free(grid.mouse()) || (grid.cheese() && !grid.is_free(*grid.cheese()))) {
    throw Error(ErrorCode::kPlacement, "maze text needs mouse and cheese on free cells");
  }
  const int n = grid.size();
  std::string out = "W=" + std::to_string(n) + "\n";
  out.reserve(out.size() + static_cast<std::size_t>(n * (n + 1)));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const GridPos p{r, c};
      char ch = grid.at(p) == Cell::kFree ? '.' : '#';
      if (p == grid.mouse()) ch = 'M';
      if (grid.cheese() && *grid.cheese() == p) ch = 'C';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

MazeGrid parse_maze_text(std::string_view text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in{std::string(text)};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || !lines[0].starts_with("W=")) throw Error(ErrorCode::kFormat, "maze text must start with W=<n>");
  int size = 0;
  try {
    std::size_t used = 0;
    size = std::stoi(lines[0].substr(2), &used);
    if (used != lines[0].size() - 2) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "bad maze header '" + lines[0] + "'");
  }
  try {
    check_world_size(size);
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, e.what());
  }
  if (lines.size() != static_cast<std::size_t>(size) + 1) {
    throw Error(ErrorCode::kFormat, "expected " + std::to_string(size) + " maze rows, got " +
                                        std::to_string(lines.size() - 1));
  }
  MazeGrid grid = MazeGrid::all_blocked(size);
  std::optional<GridPos> mouse;
  for (int r = 0; r < size; ++r) {
    const auto& row = lines[static_cast<std::size_t>(r) + 1];
    if (row.size() != static_cast<std::size_t>(size)) {
      throw Error(ErrorCode::kFormat, "maze row " + std::to_string(r) + " has length " + std::to_string(row.size()));
    }
    for (int c = 0; c < size; ++c) {
      const GridPos p{r, c};
      switch (row[static_cast<std::size_t>(c)]) {
        case '#': break;
        case '.': grid.cells_[grid.index(p)] = Cell::kFree; break;
        case 'M':
          if (mouse) throw Error(ErrorCode::kFormat, "maze text has more than one mouse");
          grid.cells_[grid.index(p)] = Cell::kFree;
          mouse = p;
          break;
        case 'C':
          if (grid.cheese_) throw Error(ErrorCode::kFormat, "maze text has more than one cheese");
          grid.cells_[grid.index(p)] = Cell::kFree;
          grid.cheese_ = p;
          break;
        default:
          throw Error(ErrorCode::kFormat, std::string("invalid maze character '") + row[static_cast<std::size_t>(c)] + "'");
      }
    }
  }
  if (!mouse) throw Error(ErrorCode::kFormat, "maze text has no mouse");
  grid.mouse_ = *mouse;
  return grid;
}

std::uint64_t content_hash(const MazeGrid& grid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_maze_text(grid)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mazescope::maze
