#include "mazescope/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "mazescope/analysis/actions.hpp"
#include "mazescope/analysis/bias_probe.hpp"
#include "mazescope/analysis/classification.hpp"
#include "mazescope/analysis/clustering.hpp"
#include "mazescope/analysis/dataset.hpp"
#include "mazescope/analysis/saliency.hpp"
#include "mazescope/error.hpp"
#include "mazescope/image.hpp"
#include "mazescope/io/tensor_wire.hpp"
#include "mazescope/maze/maze.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/forward.hpp"
#include "mazescope/nn/weights.hpp"
#include "mazescope/service/server.hpp"

namespace mazescope::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

maze::GridPos parse_pos(const std::string& text) {
  int row = 0;
  int col = 0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> row >> comma >> col) || comma != ',' || !in.eof()) {
    throw Error(ErrorCode::kParameter, "expected ROW,COL but got '" + text + "'");
  }
  return {row, col};
}

/// Flags shared by every command that renders a maze and runs the network.
struct ModelFlags {
  std::string weights;
  std::string maze;
  std::string layout = "chw";
  std::string actions;
  std::string block_color = "#3C2A14";
  std::string floor_color = "#BFA66A";
  std::string cheese_color = "#FFE93E";
  std::string mouse_color = "#808080";

  void attach(CLI::App& cmd, bool needs_maze = true) {
    cmd.add_option("--weights", weights, "IMPW weight file")->required()->check(CLI::ExistingFile);
    if (needs_maze) cmd.add_option("--maze", maze, "maze text file")->required()->check(CLI::ExistingFile);
    cmd.add_option("--layout", layout, "observation layout fed to the network")
        ->check(CLI::IsMember({"chw", "chw-transposed"}))
        ->capture_default_str();
    cmd.add_option("--actions", actions, "comma list of 15 effective actions (default table when empty)");
    cmd.add_option("--block-color", block_color)->capture_default_str();
    cmd.add_option("--floor-color", floor_color)->capture_default_str();
    cmd.add_option("--cheese-color", cheese_color)->capture_default_str();
    cmd.add_option("--mouse-color", mouse_color)->capture_default_str();
  }

  maze::RenderPalette palette() const {
    maze::RenderPalette p{parse_hex_color(block_color), parse_hex_color(floor_color), parse_hex_color(cheese_color),
                          parse_hex_color(mouse_color)};
    p.validate();
    return p;
  }
  analysis::ActionTable table() const {
    return actions.empty() ? analysis::ActionTable::default_table() : analysis::ActionTable::parse(actions);
  }
  maze::MazeGrid load_maze() const { return maze::parse_maze_text(read_file(maze)); }
  nn::WeightStore load(const nn::NetworkSpec& spec) const { return nn::load_weights(weights, spec); }
  Tensor input(const maze::MazeGrid& grid) const {
    return maze::to_network_input(maze::render_observation(grid, palette()), maze::parse_input_layout(layout));
  }
};

RgbImage upscale(const RgbImage& image, std::size_t width, std::size_t height) {
  RgbImage out(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      out.set(x, y, image.get(x * image.width / width, y * image.height / height));
    }
  }
  return out;
}

json distribution_json(const std::array<double, analysis::kNumEffectiveActions>& dist) {
  json out = json::object();
  for (auto a : analysis::kEffectiveActions) out[std::string(analysis::action_name(a))] = dist[static_cast<int>(a)];
  return out;
}

std::atomic<service::WorkbenchServer*> g_server{nullptr};

extern "C" void handle_stop_signal(int) {
  if (auto* server = g_server.load()) server->stop();
}

bool is_flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.starts_with(flag + "="); });
}

/// Replaces `--config FILE` with the flags it holds, inserted right after the
/// subcommand name. Bare keys and keys under a [<command>] section apply;
/// flags given explicitly on the command line win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, const CLI::App& app) {
  std::vector<std::string> rest;
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
      config_path = args[++i];
    } else if (args[i].starts_with("--config=")) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path) return rest;
  if (!fs::is_regular_file(*config_path)) throw CLI::ValidationError("--config", "File does not exist: " + *config_path);

  auto command = std::find_if(rest.begin(), rest.end(), [&](const std::string& a) {
    return !a.starts_with("-") && app.get_subcommand_ptr(a) != nullptr;
  });
  if (command == rest.end()) throw CLI::RequiredError("a command");

  std::vector<std::string> injected;
  for (const auto& item : CLI::ConfigTOML().from_file(*config_path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == *command)) continue;
    const std::string flag = "--" + item.name;
    if (is_flag_given(rest, flag)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") injected.push_back(flag);
      continue;
    }
    for (const auto& value : item.inputs) {
      injected.push_back(flag);
      injected.push_back(value);
    }
  }
  rest.insert(command + 1, injected.begin(), injected.end());
  return rest;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameter:
    case ErrorCode::kRange:
    case ErrorCode::kPlacement:
    case ErrorCode::kNotFound:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"mazescope: inspect a maze-solving policy network"};
  app.require_subcommand(1);
  app.add_option("--config", "key=value file supplying flags of the chosen command (also accepted after it)");

  std::function<void()> action;
  const auto spec = nn::NetworkSpec::impala();

  // gen-maze
  auto* gen = app.add_subcommand("gen-maze", "generate a maze text file");
  struct {
    std::uint64_t seed = 0;
    int size = 15;
    std::string out;
    bool no_cheese = false;
    std::string mouse;
    std::string cheese;
  } gen_flags;
  gen->add_option("--seed", gen_flags.seed)->required();
  gen->add_option("--size", gen_flags.size, "odd world size in [3, 63]")->capture_default_str();
  gen->add_option("--out", gen_flags.out)->required();
  gen->add_flag("--no-cheese", gen_flags.no_cheese);
  gen->add_option("--mouse", gen_flags.mouse, "ROW,COL");
  gen->add_option("--cheese", gen_flags.cheese, "ROW,COL");
  gen->callback([&] {
    action = [&] {
      maze::GenerateOptions opts;
      if (!gen_flags.mouse.empty()) opts.mouse = parse_pos(gen_flags.mouse);
      if (!gen_flags.cheese.empty()) opts.cheese = parse_pos(gen_flags.cheese);
      opts.place_cheese = !gen_flags.no_cheese;
      const auto grid = maze::generate_kruskal(gen_flags.seed, gen_flags.size, opts);
      write_file(gen_flags.out, maze::to_maze_text(grid));
    };
  });

  // render
  auto* render = app.add_subcommand("render", "render a maze to PNG");
  struct {
    std::string maze;
    std::string out;
    std::size_t scale = 8;
    std::string tensor_out;
  } render_flags;
  ModelFlags render_palette;
  render->add_option("--maze", render_flags.maze)->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_flags.out)->required();
  render->add_option("--scale", render_flags.scale, "pixels per observation pixel")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  render->add_option("--tensor-out", render_flags.tensor_out, "also write the 3x64x64 observation as TNSR");
  render->add_option("--block-color", render_palette.block_color)->capture_default_str();
  render->add_option("--floor-color", render_palette.floor_color)->capture_default_str();
  render->add_option("--cheese-color", render_palette.cheese_color)->capture_default_str();
  render->add_option("--mouse-color", render_palette.mouse_color)->capture_default_str();
  render->callback([&] {
    action = [&] {
      const auto grid = maze::parse_maze_text(read_file(render_flags.maze));
      const auto palette = render_palette.palette();
      write_png(maze::render_display(grid, palette, render_flags.scale), render_flags.out);
      if (!render_flags.tensor_out.empty()) {
        write_file(render_flags.tensor_out, io::encode_tensor_wire(maze::render_observation(grid, palette)));
      }
    };
  });

  // forward
  auto* forward = app.add_subcommand("forward", "run the network and summarize logits and actions");
  ModelFlags fwd;
  struct {
    std::vector<std::string> capture;
    std::string out;
    std::string dump_dir;
  } fwd_flags;
  fwd.attach(*forward);
  forward->add_option("--capture", fwd_flags.capture, "layer names to capture")->delimiter(',');
  forward->add_option("--out", fwd_flags.out, "JSON summary path (stdout when omitted)");
  forward->add_option("--dump-dir", fwd_flags.dump_dir, "write each captured layer as <name>.tnsr");
  forward->callback([&] {
    action = [&] {
      const auto weights = fwd.load(spec);
      const auto grid = fwd.load_maze();
      const std::set<std::string> capture(fwd_flags.capture.begin(), fwd_flags.capture.end());
      const auto trace = nn::forward_with_capture(spec, weights, fwd.input(grid), capture);
      const auto dist = analysis::action_distribution(trace.logits.data(), fwd.table());
      json layers = json::object();
      for (const auto& [name, t] : trace.layers) layers[name] = t.shape();
      const json summary{{"maze_hash", maze::content_hash(grid)},
                         {"weights_checksum", weights.checksum()},
                         {"logits", trace.logits.values()},
                         {"value", trace.value},
                         {"actions", distribution_json(dist)},
                         {"captured", layers}};
      if (fwd_flags.out.empty()) {
        out << summary.dump(2) << '\n';
      } else {
        write_file(fwd_flags.out, summary.dump(2) + "\n");
      }
      if (!fwd_flags.dump_dir.empty()) {
        for (const auto& [name, t] : trace.layers) {
          write_file(fs::path(fwd_flags.dump_dir) / (name + ".tnsr"), io::encode_tensor_wire(t));
        }
      }
    };
  });

  // feature-maps
  auto* fmaps = app.add_subcommand("feature-maps", "write one diverging-colormap PNG per channel of a layer");
  ModelFlags fm;
  struct {
    std::string layer;
    std::string out_dir;
    std::size_t size = maze::kObservationSize;
    std::string low = "#5E3C99";
    std::string mid = "#F7F7F7";
    std::string high = "#1B7837";
  } fm_flags;
  fm.attach(*fmaps);
  fmaps->add_option("--layer", fm_flags.layer)->required();
  fmaps->add_option("--out-dir", fm_flags.out_dir)->required();
  fmaps->add_option("--image-size", fm_flags.size, "output edge length (nearest-neighbour upscale)")
      ->check(CLI::Range(1, 4096))
      ->capture_default_str();
  fmaps->add_option("--low-color", fm_flags.low)->capture_default_str();
  fmaps->add_option("--mid-color", fm_flags.mid)->capture_default_str();
  fmaps->add_option("--high-color", fm_flags.high)->capture_default_str();
  fmaps->callback([&] {
    action = [&] {
      spec.index_of(fm_flags.layer);
      const DivergingColormap cmap{parse_hex_color(fm_flags.low), parse_hex_color(fm_flags.mid),
                                   parse_hex_color(fm_flags.high)};
      const auto weights = fm.load(spec);
      const auto trace = nn::forward_with_capture(spec, weights, fm.input(fm.load_maze()), {fm_flags.layer});
      const auto dataset = analysis::flatten_activations(trace.layers.at(fm_flags.layer), fm_flags.layer);
      const Tensor& t = trace.layers.at(fm_flags.layer);
      const std::size_t h = dataset.height;
      const std::size_t w = dataset.width;
      fs::create_directories(fm_flags.out_dir);
      for (std::size_t c = 0; c < dataset.channels; ++c) {
        const auto plane = t.data().subspan(c * h * w, h * w);
        const auto image = upscale(colormap_field(plane, w, h, cmap), fm_flags.size, fm_flags.size);
        std::ostringstream name;
        name << fm_flags.layer << "_c" << std::setw(3) << std::setfill('0') << c << ".png";
        write_png(image, fs::path(fm_flags.out_dir) / name.str());
      }
      out << dataset.channels << " images written to " << fm_flags.out_dir << '\n';
    };
  });

  // saliency
  auto* sal = app.add_subcommand("saliency", "write an input-gradient heatmap over the observation");
  ModelFlags sf;
  struct {
    std::string target;
    std::string reduction = "l2";
    std::string out;
    double alpha = 0.6;
    std::string values_out;
  } sal_flags;
  sf.attach(*sal);
  sal->add_option("--target", sal_flags.target, "logit:<k> or group:<UP|DOWN|LEFT|RIGHT|NOOP>")->required();
  sal->add_option("--reduction", sal_flags.reduction)->check(CLI::IsMember({"l2", "sum"}))->capture_default_str();
  sal->add_option("--out", sal_flags.out, "PNG path")->required();
  sal->add_option("--alpha", sal_flags.alpha)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  sal->add_option("--values-out", sal_flags.values_out, "raw 64x64 map as TNSR");
  sal->callback([&] {
    action = [&] {
      const auto target = analysis::parse_saliency_target(sal_flags.target);
      const auto reduction = analysis::parse_reduction(sal_flags.reduction);
      const auto weights = sf.load(spec);
      const auto grid = sf.load_maze();
      const auto ctx = nn::forward_for_gradient(spec, weights, sf.input(grid));
      const auto map = analysis::saliency_for(spec, weights, ctx, target, sf.table(), reduction);
      const auto base = maze::render_display(grid, sf.palette(), 1);
      write_png(overlay_heatmap(base, map.values, sal_flags.alpha), sal_flags.out);
      if (!sal_flags.values_out.empty()) {
        write_file(sal_flags.values_out, io::encode_tensor_wire(Tensor({map.height, map.width}, map.values)));
      }
    };
  });

  // cluster
  auto* cluster = app.add_subcommand("cluster", "cluster the pixels of a layer into a classification JSON");
  ModelFlags cf;
  struct {
    std::string layer;
    std::string method = "agglomerative";
    std::size_t k = 8;
    std::uint64_t seed = 0;
    std::optional<double> threshold;
    std::optional<std::size_t> count;
    bool standardize = false;
    std::string out;
  } cl_flags;
  cf.attach(*cluster);
  cluster->add_option("--layer", cl_flags.layer)->required();
  cluster->add_option("--method", cl_flags.method)
      ->check(CLI::IsMember({"kmeans", "agglomerative"}))
      ->capture_default_str();
  cluster->add_option("--k", cl_flags.k)->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--seed", cl_flags.seed)->capture_default_str();
  cluster->add_option("--threshold", cl_flags.threshold, "agglomerative: merge while distance < threshold")
      ->check(CLI::NonNegativeNumber);
  cluster->add_option("--count", cl_flags.count, "agglomerative: stop at this many clusters")
      ->check(CLI::PositiveNumber);
  cluster->add_flag("--standardize", cl_flags.standardize, "z-score channels first");
  cluster->add_option("--out", cl_flags.out)->required();
  cluster->callback([&] {
    action = [&] {
      spec.index_of(cl_flags.layer);
      const auto weights = cf.load(spec);
      const auto trace = nn::forward_with_capture(spec, weights, cf.input(cf.load_maze()), {cl_flags.layer});
      auto dataset = analysis::flatten_activations(trace, cl_flags.layer);
      if (cl_flags.standardize) dataset = analysis::standardize(dataset);
      analysis::Classification cls;
      if (cl_flags.method == "kmeans") {
        cls = analysis::kmeans(dataset, {.k = cl_flags.k, .seed = cl_flags.seed}).classification;
      } else {
        if (!cl_flags.threshold && !cl_flags.count) {
          throw Error(ErrorCode::kParameter, "agglomerative clustering needs --threshold or --count");
        }
        cls = analysis::agglomerative(dataset, {.threshold = cl_flags.threshold, .count = cl_flags.count})
                  .classification;
      }
      write_file(cl_flags.out, analysis::to_json_text(cls));
      out << cls.classes.size() << " classes over " << dataset.size() << " pixels\n";
    };
  });

  // make-weights
  auto* mk = app.add_subcommand("make-weights", "write random weights for testing");
  struct {
    std::uint64_t seed = 0;
    std::string out;
  } mk_flags;
  mk->add_option("--seed", mk_flags.seed)->required();
  mk->add_option("--out", mk_flags.out)->required();
  mk->callback([&] {
    action = [&] {
      const auto store = nn::init_random_weights(spec, mk_flags.seed);
      if (fs::path(mk_flags.out).has_parent_path()) fs::create_directories(fs::path(mk_flags.out).parent_path());
      nn::save_weights(store, mk_flags.out);
    };
  });

  // probe-bias
  auto* probe = app.add_subcommand("probe-bias", "roll out the policy on cheese-free mazes and report direction bias");
  ModelFlags pf;
  analysis::BiasProbeOptions probe_opts;
  std::string probe_out;
  pf.attach(*probe, false);
  probe->add_option("--mazes", probe_opts.mazes)->check(CLI::PositiveNumber)->capture_default_str();
  probe->add_option("--seed", probe_opts.seed)->capture_default_str();
  probe->add_option("--min-size", probe_opts.min_size)->capture_default_str();
  probe->add_option("--max-size", probe_opts.max_size)->capture_default_str();
  probe->add_option("--max-steps", probe_opts.max_steps, "0 selects 4*size*size")->capture_default_str();
  probe->add_option("--out", probe_out, "JSON report path (stdout when omitted)");
  probe->callback([&] {
    action = [&] {
      probe_opts.layout = maze::parse_input_layout(pf.layout);
      const auto weights = pf.load(spec);
      const auto r = analysis::run_bias_probe(spec, weights, probe_opts, pf.table(), pf.palette());
      const json report{{"mazes", r.mazes},
                        {"reached_top_right", r.reached_top_right},
                        {"top_right_rate", r.top_right_rate},
                        {"steps", r.steps},
                        {"mean_up_mass", r.mean_up_mass},
                        {"mean_right_mass", r.mean_right_mass}};
      if (probe_out.empty()) {
        out << report.dump(2) << '\n';
      } else {
        write_file(probe_out, report.dump(2) + "\n");
      }
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "start the HTTP workbench service");
  ModelFlags svf;
  struct {
    std::string host = "127.0.0.1";
    int port = service::kDefaultPort;
    std::size_t workers = 2;
    std::string cors = "*";
  } serve_flags;
  svf.attach(*serve, false);
  serve->add_option("--host", serve_flags.host)->capture_default_str();
  serve->add_option("--port", serve_flags.port)->check(CLI::Range(1, 65535))->capture_default_str();
  serve->add_option("--workers", serve_flags.workers)->check(CLI::Range(1, 64))->capture_default_str();
  serve->add_option("--cors-origin", serve_flags.cors)->capture_default_str();
  serve->callback([&] {
    action = [&] {
      service::ServiceConfig config;
      config.weights = std::make_shared<const nn::WeightStore>(svf.load(config.spec));
      config.weights_path = fs::absolute(svf.weights).string();
      config.palette = svf.palette();
      config.action_table = svf.table();
      config.layout = maze::parse_input_layout(svf.layout);
      config.workers = serve_flags.workers;
      config.cors_origin = serve_flags.cors;
      service::WorkbenchServer server(std::move(config));
      g_server = &server;
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      err << "listening on http://" << serve_flags.host << ':' << serve_flags.port << '\n';
      const bool ok = server.listen(serve_flags.host, serve_flags.port);
      g_server = nullptr;
      if (!ok) throw Error(ErrorCode::kIo, "cannot bind " + serve_flags.host + ":" + std::to_string(serve_flags.port));
    };
  });

  try {
    const auto expanded = expand_config(args, app);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    action();
  } catch (const Error& e) {
    err << "error (" << error_code_name(e.code()) << "): " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mazescope::cli
