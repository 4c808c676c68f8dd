// Acceptance harness: one PASS/FAIL (or SKIP) line per criterion, exit status
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

#include "mazescope/analysis/actions.hpp"
#include "mazescope/analysis/bias_probe.hpp"
#include "mazescope/analysis/classification.hpp"
#include "mazescope/analysis/clustering.hpp"
#include "mazescope/analysis/dataset.hpp"
#include "mazescope/analysis/grand_tour.hpp"
#include "mazescope/image.hpp"
#include "mazescope/io/tensor_wire.hpp"
#include "mazescope/maze/maze.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"
#include "mazescope/nn/layers.hpp"
#include "mazescope/nn/weights.hpp"
#include "oracles.hpp"

using namespace mazescope;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)}; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const nn::NetworkSpec& impala() {
  static const auto spec = nn::NetworkSpec::impala();
  return spec;
}

int random_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// 1 ------------------------------------------------------------------------

Outcome layer_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  constexpr int kCases = 100;
  double worst = 0.0;
  std::map<std::string, double> per_kind;
  auto note = [&](const std::string& kind, double err) {
    per_kind[kind] = std::max(per_kind[kind], err);
    worst = std::max(worst, err);
  };
  for (int i = 0; i < kCases; ++i) {
    const auto c = static_cast<std::size_t>(random_int(rng, 1, 8));
    const auto o = static_cast<std::size_t>(random_int(rng, 1, 8));
    const auto h = static_cast<std::size_t>(random_int(rng, 1, 13));
    const auto w = static_cast<std::size_t>(random_int(rng, 1, 13));
    const auto x = oracle::random_tensor({c, h, w}, rng);
    const auto k = oracle::random_tensor({o, c, 3, 3}, rng);
    const auto b = oracle::random_tensor({o}, rng);
    note("conv", oracle::max_abs_diff(nn::conv2d_forward(x, k, b).data(), oracle::conv3x3(x, k, b).data()));
    note("pool", oracle::max_abs_diff(nn::maxpool_forward(x).output.data(), oracle::maxpool3x3s2(x).data()));
    note("relu", oracle::max_abs_diff(nn::relu(x).data(), oracle::relu(x).data()));
    const auto y = oracle::random_tensor({c, h, w}, rng);
    note("resadd", oracle::max_abs_diff(nn::resadd(x, y).data(), oracle::add(x, y).data()));

    const auto in = static_cast<std::size_t>(random_int(rng, 1, 300));
    const auto out = static_cast<std::size_t>(random_int(rng, 1, 40));
    const auto v = oracle::random_tensor({in}, rng);
    const auto dk = oracle::random_tensor({out, in}, rng);
    const auto db = oracle::random_tensor({out}, rng);
    note("dense", oracle::max_abs_diff(nn::dense_forward(v, dk, db).data(), oracle::dense(v, dk, db).data()));

    const auto z = oracle::random_tensor({static_cast<std::size_t>(random_int(rng, 1, 30))}, rng, -20.0f, 20.0f);
    const auto p = nn::softmax(z.data());
    const auto q = oracle::softmax(z.data());
    double e = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) e = std::max(e, std::abs(p[j] - q[j]));
    note("softmax", e);
  }
  const double secs = seconds_since(t0);
  std::string kinds;
  for (const auto& [kind, err] : per_kind) kinds += fmt(" %s=%.1e", kind.c_str(), err);
  return pass_if(worst <= 1e-5 && secs < 60.0,
                 fmt("%d cases x %zu kinds, max abs err", kCases, per_kind.size()) + kinds + fmt(", %.2f s", secs));
}

// 2 ------------------------------------------------------------------------

Outcome gradient_check() {
  const auto t0 = Clock::now();
  const auto table = analysis::ActionTable::default_table();
  double worst = 0.0;
  std::size_t samples = 0, rejected = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const auto weights = nn::init_random_weights(impala(), seed);
    const auto x = oracle::random_tensor(impala().input_shape(), rng, 0.0f, 1.0f);
    const auto group = static_cast<analysis::EffectiveAction>(random_int(rng, 0, 4));
    const std::vector<nn::GradientTarget> targets{
        nn::LogitTarget{static_cast<std::size_t>(random_int(rng, 0, 14))},
        nn::ProbabilityTarget{static_cast<std::size_t>(random_int(rng, 0, 14))},
        nn::ProbabilityGroupTarget{table.outputs_for(group)}};
    const auto check = oracle::check_gradients(impala(), weights, x, targets, 20, rng, 1e-3);
    samples += check.samples.size();
    rejected += check.rejected;
    worst = std::max(worst, check.worst);
  }
  const double secs = seconds_since(t0);
  return pass_if(samples == 300 && worst < 1e-2 && secs < 120.0,
                 fmt("%zu samples (5 seeds x 20 coords x 3 targets, eps=1e-3), worst rel err %.2e, "
                     "%zu kink-straddling candidates redrawn, %.1f s",
                     samples, worst, rejected, secs));
}

// 3 ------------------------------------------------------------------------

Outcome shape_ladder() {
  std::mt19937_64 rng(3);
  const auto weights = nn::init_random_weights(impala(), 7);
  std::vector<Tensor> inputs{maze::render_observation(maze::generate_kruskal(42, 15)),
                             oracle::random_tensor(impala().input_shape(), rng, 0.0f, 1.0f),
                             oracle::random_tensor(impala().input_shape(), rng, -5.0f, 5.0f),
                             Tensor(impala().input_shape(), 0.0f)};
  std::set<std::string> all;
  for (const auto& l : impala().layers()) all.insert(l.name);
  bool ok = true;
  for (const auto& x : inputs) {
    const auto trace = nn::forward_with_capture(impala(), weights, x, all);
    ok &= trace.layers.at("block1.conv").shape() == Shape{64, 64, 64};
    ok &= trace.layers.at("block2.res1.resadd").shape() == Shape{128, 16, 16};
    ok &= trace.logits.shape() == Shape{15};
    for (const auto& l : impala().layers()) ok &= trace.layers.at(l.name).shape() == l.output_shape;
  }
  return pass_if(ok, fmt("%zu inputs, %zu layers each; block1.conv 64x64x64, block2.res1.resadd 128x16x16, "
                         "15 logits",
                         inputs.size(), all.size()));
}

// 4 ------------------------------------------------------------------------

Outcome maze_properties() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto seed = rng();
    const int size = 2 * random_int(rng, 1, 31) + 1;
    const auto g = maze::generate_kruskal(seed, size);
    const auto v = maze::check_validity(g);
    const auto graph = oracle::cell_graph(g);
    const bool tree = v.free_cells_connected && v.corridors + 1 == v.rooms && v.is_tree && graph.is_tree();
    const bool unique = !g.cheese() || oracle::count_simple_paths(g) == 1;
    const bool has_path = !g.cheese() || v.path_to_cheese;
    if (!(tree && unique && has_path)) ++bad;
  }
  const double secs = seconds_since(t0);
  return pass_if(bad == 0 && secs < 30.0,
                 fmt("1000 mazes, sizes 3..63; %zu violate spanning-tree or unique-path, %.2f s", bad, secs));
}

// 5 ------------------------------------------------------------------------

Outcome rendering() {
  std::mt19937_64 rng(5);
  const maze::RenderPalette palettes[] = {
      {}, {{0, 0, 0}, {255, 255, 255}, {255, 0, 0}, {0, 0, 255}}, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {10, 11, 12}}};
  std::size_t pixels = 0, off_palette = 0, off_rule = 0;
  for (int i = 0; i < 200; ++i) {
    const auto& pal = palettes[i % 3];
    const int size = 2 * random_int(rng, 1, 31) + 1;
    auto g = maze::generate_kruskal(rng(), size);
    if (i % 4 == 0) g = g.without_cheese();
    const auto obs = maze::render_observation(g, pal);
    for (std::size_t y = 0; y < 64; ++y) {
      for (std::size_t x = 0; x < 64; ++x) {
        const Rgb px{static_cast<std::uint8_t>(std::lround(obs.at(0, y, x) * 255.0f)),
                     static_cast<std::uint8_t>(std::lround(obs.at(1, y, x) * 255.0f)),
                     static_cast<std::uint8_t>(std::lround(obs.at(2, y, x) * 255.0f))};
        ++pixels;
        if (px != pal.block && px != pal.floor && px != pal.cheese && px != pal.mouse) ++off_palette;
        // Nearest-neighbour source cell of pixel p: floor((p + 1/2) * W / 64).
        const maze::GridPos cell{static_cast<int>((2 * y + 1) * size / 128), static_cast<int>((2 * x + 1) * size / 128)};
        Rgb want = g.at(cell) == maze::Cell::kFree ? pal.floor : pal.block;
        if (cell == g.mouse()) want = pal.mouse;
        if (g.cheese() && cell == *g.cheese()) want = pal.cheese;
        if (px != want) ++off_rule;
      }
    }
  }
  std::set<std::size_t> widths;
  for (int i = 0; i < 25; ++i) widths.insert(maze::cell_pixel_start(i + 1, 25) - maze::cell_pixel_start(i, 25));
  return pass_if(off_palette == 0 && off_rule == 0 && widths == std::set<std::size_t>{2, 3},
                 fmt("%zu pixels over 200 mazes and 3 palettes: %zu off-palette, %zu off nearest-neighbour rule; "
                     "W=25 widths {%zu..%zu}",
                     pixels, off_palette, off_rule, *widths.begin(), *widths.rbegin()));
}

// 6 ------------------------------------------------------------------------

Outcome action_aggregation() {
  const auto table = analysis::ActionTable::default_table();
  const auto noop = table.outputs_for(analysis::EffectiveAction::kNoop).size();
  std::mt19937_64 rng(6);
  std::normal_distribution<float> g(0.0f, 4.0f);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<float> z(15);
    for (auto& v : z) v = g(rng);
    const auto p = analysis::action_distribution(z, table);
    worst = std::max(worst, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
  }
  const std::vector<float> uniform(15, 0.0f);
  const double p_noop = analysis::action_distribution(uniform, table)[static_cast<std::size_t>(
      analysis::EffectiveAction::kNoop)];
  return pass_if(noop == 7 && worst <= 1e-6 && std::abs(p_noop - 7.0 / 15.0) < 1e-12,
                 fmt("%zu NOOP indices; 10^4 random logits, max |sum-1| = %.1e; uniform NOOP = %.6f (7/15 = %.6f)",
                     noop, worst, p_noop, 7.0 / 15.0));
}

// 7 ------------------------------------------------------------------------

analysis::PixelDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t dims, double spread) {
  analysis::PixelDataset d;
  d.layer = "synthetic";
  d.channels = dims;
  d.height = 1;
  d.width = n;
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::uniform_real_distribution<float> centre(static_cast<float>(-spread), static_cast<float>(spread));
  const std::size_t blobs = 1 + rng() % 5;
  std::vector<float> centres(blobs * dims);
  for (auto& c : centres) c = centre(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = rng() % blobs;
    for (std::size_t c = 0; c < dims; ++c) d.values.push_back(centres[b * dims + c] + g(rng));
  }
  return d;
}

Outcome clustering() {
  std::mt19937_64 rng(7);
  std::size_t nonmonotone = 0;
  for (int i = 0; i < 100; ++i) {
    const auto n = 20 + rng() % 200;
    const auto dims = 1 + rng() % 16;
    const auto d = random_dataset(rng, n, dims, 5.0);
    const auto r = analysis::kmeans(d, {.k = 1 + rng() % 8, .seed = rng()});
    for (std::size_t s = 1; s < r.inertia_history.size(); ++s) {
      if (r.inertia_history[s] > r.inertia_history[s - 1]) {
        ++nonmonotone;
        break;
      }
    }
  }

  // Two blobs 100 sigma apart.
  std::size_t misassigned = 0;
  for (int trial = 0; trial < 10; ++trial) {
    analysis::PixelDataset d;
    d.layer = "blobs";
    d.channels = 4;
    d.height = 1;
    d.width = 300;
    std::normal_distribution<float> g(0.0f, 1.0f);
    std::vector<int> truth;
    for (std::size_t i = 0; i < 300; ++i) {
      const int blob = static_cast<int>(rng() % 2);
      truth.push_back(blob);
      for (int c = 0; c < 4; ++c) d.values.push_back(g(rng) + (blob ? 100.0f : 0.0f));
    }
    const auto km = analysis::kmeans(d, {.k = 2, .seed = rng()}).classification.assignment;
    const auto ag = analysis::agglomerative(d, {.threshold = std::nullopt, .count = 2}).classification.assignment;
    for (std::size_t i = 0; i < 300; ++i) {
      if ((km[i] == km[0]) != (truth[i] == truth[0])) ++misassigned;
      if ((ag[i] == ag[0]) != (truth[i] == truth[0])) ++misassigned;
    }
  }

  const auto d = random_dataset(rng, 150, 6, 3.0);
  const auto singles = analysis::agglomerative(d, {.threshold = 0.0, .count = std::nullopt});
  const auto one = analysis::agglomerative(d, {.threshold = std::nullopt, .count = 1});
  const bool cuts = singles.classification.classes.size() == 150 && one.classification.classes.size() == 1;

  const bool deterministic =
      analysis::kmeans(d, {.k = 5, .seed = 42}).classification ==
          analysis::kmeans(d, {.k = 5, .seed = 42}).classification &&
      analysis::agglomerative(d, {.threshold = 2.0, .count = std::nullopt}).classification ==
          analysis::agglomerative(d, {.threshold = 2.0, .count = std::nullopt}).classification;

  return pass_if(nonmonotone == 0 && misassigned == 0 && cuts && deterministic,
                 fmt("k-means inertia increased on %zu/100 datasets; two-blob misassigned %zu/6000; "
                     "threshold 0 -> %zu classes (n=150), count 1 -> %zu; deterministic: %s",
                     nonmonotone, misassigned, singles.classification.classes.size(),
                     one.classification.classes.size(), deterministic ? "yes" : "no"));
}

// 8 ------------------------------------------------------------------------

Outcome projection() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dt(0.0, 0.1);
  auto s = analysis::ProjectionState::initial(64);
  double drift = 0.0;
  for (int i = 0; i < 10000; ++i) {
    s = analysis::grand_tour_step(s, dt(rng));
    drift = std::max(drift, s.orthonormality_error());
  }

  // d = 2: every projected point rotates by the accumulated angle omega0 * t.
  analysis::PixelDataset pts;
  pts.layer = "plane";
  pts.channels = 2;
  pts.height = 1;
  pts.width = 4;
  pts.values = {1.0f, 0.0f, 0.0f, 1.0f, 3.0f, -2.0f, -0.5f, 0.25f};
  double worst2 = 0.0;
  auto s2 = analysis::ProjectionState::initial(2);
  const auto start = analysis::project(s2, pts);
  double theta = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double step = dt(rng);
    s2 = analysis::grand_tour_step(s2, step);
    theta += 0.5 * step;
    const auto now = analysis::project(s2, pts);
    for (std::size_t k = 0; k < start.size(); ++k) {
      const double x = start[k][0], y = start[k][1];
      worst2 = std::max(worst2, std::abs(now[k][0] - (std::cos(theta) * x - std::sin(theta) * y)));
      worst2 = std::max(worst2, std::abs(now[k][1] - (std::sin(theta) * x + std::cos(theta) * y)));
    }
  }
  return pass_if(drift < 1e-5 && worst2 < 1e-6,
                 fmt("d=64, 10^4 steps: max orthonormality error %.1e; d=2 closed form over 1000 steps: "
                     "max deviation %.1e",
                     drift, worst2));
}

// 9 ------------------------------------------------------------------------

Outcome formats() {
  std::size_t failures = 0;
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    const auto w = nn::init_random_weights(impala(), seed);
    const auto bytes = nn::encode_impw(w);
    const auto back = nn::decode_impw(bytes);
    if (nn::encode_impw(back) != bytes) ++failures;
    if (back.size() != w.size()) ++failures;
    for (const auto& [name, a] : w.entries()) {
      const auto& b = back.at(name);
      if (a.kernel.shape() != b.kernel.shape() ||
          std::memcmp(a.kernel.data().data(), b.kernel.data().data(), a.kernel.numel() * sizeof(float)) != 0 ||
          std::memcmp(a.bias.data().data(), b.bias.data().data(), a.bias.numel() * sizeof(float)) != 0) {
        ++failures;
      }
    }
  }

  std::mt19937_64 rng(9);
  const auto weights = nn::init_random_weights(impala(), 0);
  std::size_t classifications = 0;
  for (int i = 0; i < 20; ++i) {
    const auto trace = nn::forward_with_capture(impala(), weights,
                                                maze::render_observation(maze::generate_kruskal(rng(), 2 * random_int(rng, 1, 31) + 1)),
                                                {"block3.conv"});
    const auto d = analysis::flatten_activations(trace, "block3.conv");
    auto c = analysis::kmeans(d, {.k = 1 + rng() % 6, .seed = rng()}).classification;
    const std::vector<std::size_t> pts{rng() % c.size(), rng() % c.size()};
    c = analysis::reassign_points(c, pts, analysis::NewClass{});
    c.classes.begin()->second.label = "edited \"label\" " + std::to_string(i);
    c.classes.begin()->second.hidden = i % 2 == 0;
    const auto text = analysis::to_json_text(c);
    const auto parsed = analysis::parse_classification_json(text);
    if (analysis::to_json_text(parsed) != text || parsed != analysis::canonicalize(c)) ++failures;
    ++classifications;
  }

  std::size_t mazes = 0;
  for (int i = 0; i < 200; ++i) {
    auto g = maze::generate_kruskal(rng(), 2 * random_int(rng, 1, 31) + 1);
    if (i % 2 == 0) g = g.without_cheese();
    const auto text = maze::to_maze_text(g);
    const auto back = maze::parse_maze_text(text);
    if (!(back == g) || maze::to_maze_text(back) != text || back.cheese().has_value() != g.cheese().has_value()) {
      ++failures;
    }
    ++mazes;
  }
  return pass_if(failures == 0, fmt("IMPW bitwise x3 seeds, %zu classification JSON byte-equal, %zu maze texts "
                                    "(half without cheese); %zu failures",
                                    classifications, mazes, failures));
}

// 10 -----------------------------------------------------------------------

std::string cli_path() {
  if (const char* env = std::getenv("MAZESCOPE_CLI")) return env;
#ifdef MAZESCOPE_CLI_PATH
  return MAZESCOPE_CLI_PATH;
#else
  return {};
#endif
}

Outcome cli_end_to_end() {
  const auto cli = cli_path();
  if (cli.empty() || !fs::exists(cli)) return {Verdict::kFail, "mazescope executable not found"};
  const auto dir = fs::temp_directory_path() / ("mazescope_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto t0 = Clock::now();
  auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > \"" + (dir / "log.txt").string() + "\" 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  const auto p = [&](const char* name) { return "\"" + (dir / name).string() + "\""; };
  bool ok = sh("make-weights --seed 0 --out " + p("w.impw")) &&
            sh("gen-maze --seed 42 --size 15 --out " + p("m.maze")) &&
            sh("gen-maze --seed 7 --size 15 --no-cheese --out " + p("open.maze")) &&
            sh("forward --weights " + p("w.impw") + " --maze " + p("m.maze") +
               " --capture block1.conv,block2.res1.resadd --out " + p("forward.json")) &&
            sh("feature-maps --weights " + p("w.impw") + " --maze " + p("m.maze") +
               " --layer block1.conv --out-dir " + p("fmaps")) &&
            sh("saliency --weights " + p("w.impw") + " --maze " + p("open.maze") +
               " --target group:UP --out " + p("saliency.png"));
  const double secs = seconds_since(t0);
  std::size_t images = 0, sized = 0;
  std::size_t sal_w = 0, sal_h = 0;
  if (ok) {
    for (const auto& e : fs::directory_iterator(dir / "fmaps")) {
      ++images;
      const auto img = read_png(e.path());
      if (img.width == 64 && img.height == 64) ++sized;
    }
    const auto sal = read_png(dir / "saliency.png");
    sal_w = sal.width;
    sal_h = sal.height;
    ok = fs::file_size(dir / "forward.json") > 0;
  }
  fs::remove_all(dir);
  return pass_if(ok && images == 64 && sized == 64 && sal_w == 64 && sal_h == 64 && secs < 60.0,
                 fmt("make-weights, gen-maze, forward, feature-maps -> %zu images (%zu at 64x64), "
                     "saliency -> %zux%zu PNG; %.2f s",
                     images, sized, sal_w, sal_h, secs));
}

// 11 -----------------------------------------------------------------------

Outcome behavioral_harness() {
  const char* path = std::getenv("MAZESCOPE_TRAINED_WEIGHTS");
  if (!path || !*path) {
    // Smoke run on random weights; its numbers are not reported.
    analysis::BiasProbeOptions smoke;
    smoke.mazes = 3;
    smoke.max_size = 9;
    smoke.max_steps = 20;
    const auto r = analysis::run_bias_probe(impala(), nn::init_random_weights(impala(), 0), smoke);
    return {Verdict::kSkip, fmt("set MAZESCOPE_TRAINED_WEIGHTS to an IMPW file to run the 100-maze report "
                                "(harness smoke run on random weights: %zu mazes, %zu steps)",
                                r.mazes, r.steps)};
  }
  const auto weights = nn::load_weights(path, impala());
  analysis::BiasProbeOptions opts;
  opts.mazes = 100;
  if (const char* steps = std::getenv("MAZESCOPE_PROBE_MAX_STEPS")) opts.max_steps = std::stoul(steps);
  const auto r = analysis::run_bias_probe(impala(), weights, opts);
  return {Verdict::kPass, fmt("report only: %zu no-cheese mazes, top-right terminal rate %.3f, "
                              "mean per-step UP mass %.3f, RIGHT mass %.3f over %zu steps",
                              r.mazes, r.top_right_rate, r.mean_up_mass, r.mean_right_mass, r.steps)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"layer oracle equivalence", layer_oracles},
      {"gradient check", gradient_check},
      {"shape ladder", shape_ladder},
      {"maze properties", maze_properties},
      {"rendering", rendering},
      {"action aggregation", action_aggregation},
      {"clustering", clustering},
      {"projection", projection},
      {"formats", formats},
      {"end-to-end CLI", cli_end_to_end},
      {"behavioral harness", behavioral_harness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = outcome.verdict == Verdict::kPass ? "PASS" : outcome.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    if (outcome.verdict == Verdict::kFail) ++failed;
    std::cout << tag << " [" << (i + 1) << "] " << criteria[i].first << ": " << outcome.detail << std::endl;
  }
  std::cout << (failed == 0 ? "acceptance: all criteria met" : "acceptance: " + std::to_string(failed) + " failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
