#include "mazescope/service/server.hpp"

#include <httplib.h>
#include <json.hpp>

#include "job_pool.hpp"
#include "mazescope/analysis/clustering.hpp"
#include "mazescope/analysis/dataset.hpp"
#include "mazescope/analysis/grand_tour.hpp"
#include "mazescope/analysis/saliency.hpp"
#include "mazescope/error.hpp"
#include "mazescope/io/tensor_wire.hpp"
#include "mazescope/nn/forward.hpp"

namespace mazescope::service {

using nlohmann::json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kCancelled: return 409;
    case ErrorCode::kIo: return 500;
    case ErrorCode::kConfiguration:
    case ErrorCode::kRange:
    case ErrorCode::kFormat:
    case ErrorCode::kParameter:
    case ErrorCode::kPlacement: return 422;
  }
  return 500;
}

namespace {

json error_body(std::string_view code, const std::string& message, const std::string& details = {}) {
  return json{{"error", {{"code", code}, {"message", message}, {"details", details}}}};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParameter, std::string("request body is not valid JSON: ") + e.what());
  }
}

json pos_json(maze::GridPos p) { return json::array({p.row, p.col}); }

maze::GridPos pos_from(const json& body) {
  return {body.at("row").get<int>(), body.at("col").get<int>()};
}

json maze_json(const std::string& id, const maze::MazeGrid& grid) {
  const auto v = maze::check_validity(grid);
  return json{{"id", id},
              {"size", grid.size()},
              {"text", maze::to_maze_text(grid)},
              {"mouse", pos_json(grid.mouse())},
              {"cheese", grid.cheese() ? pos_json(*grid.cheese()) : json(nullptr)},
              {"validity",
               {{"free_cells", v.free_cells},
                {"rooms", v.rooms},
                {"corridors", v.corridors},
                {"connected", v.free_cells_connected},
                {"is_tree", v.is_tree},
                {"path_to_cheese", v.path_to_cheese}}}};
}

json distribution_json(const std::array<double, analysis::kNumEffectiveActions>& dist) {
  json out = json::object();
  for (auto action : analysis::kEffectiveActions) {
    out[std::string(analysis::action_name(action))] = dist[static_cast<std::size_t>(action)];
  }
  return out;
}

json classification_view_json(const std::string& id, const session::ClassificationView& view) {
  return json{{"id", id},
              {"version", view.version},
              {"trace", view.trace_id ? json(*view.trace_id) : json(nullptr)},
              {"undo_depth", view.undo_depth},
              {"redo_depth", view.redo_depth},
              {"classification", json::parse(analysis::to_json_text(view.value))}};
}

}  // namespace

struct WorkbenchServer::Impl {
  explicit Impl(ServiceConfig cfg) : config(std::move(cfg)), jobs(config.workers) {
    if (!config.weights) throw Error(ErrorCode::kConfiguration, "service requires a weight store");
    nn::validate_weights(*config.weights, config.spec);
    config.palette.validate();
    weights_checksum = config.weights->checksum();
    routes();
  }

  ServiceConfig config;
  std::uint32_t weights_checksum = 0;
  session::SessionStore store;
  JobPool jobs;
  httplib::Server http;

  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  Handler guarded(Handler inner) {
    return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
      try {
        inner(req, res);
      } catch (const Error& e) {
        send_json(res, error_body(error_code_name(e.code()), e.what(), e.details()), http_status(e.code()));
      } catch (const json::exception& e) {
        send_json(res, error_body(error_code_name(ErrorCode::kParameter), std::string("bad request field: ") + e.what()),
                  422);
      } catch (const std::exception& e) {
        send_json(res, error_body("internal_error", e.what()), 500);
      }
    };
  }

  std::shared_ptr<session::Session> session_of(const httplib::Request& req) { return store.get(req.matches[1]); }

  Tensor network_input(const maze::MazeGrid& grid) const {
    return maze::to_network_input(maze::render_observation(grid, config.palette), config.layout);
  }

  std::pair<std::string, std::shared_ptr<const nn::ActivationTrace>> trace_for(session::Session& s,
                                                                               const std::string& maze_id,
                                                                               const std::set<std::string>& capture) {
    const auto grid = s.maze(maze_id);
    session::TraceKey key{weights_checksum, maze::content_hash(grid), capture};
    if (auto cached = s.find_trace(key)) return {*cached, s.trace(*cached)};
    auto trace = std::make_shared<const nn::ActivationTrace>(
        nn::forward_with_capture(config.spec, *config.weights, network_input(grid), capture));
    const auto id = s.put_trace(key, trace);
    return {id, s.trace(id)};
  }

  json job_json(const Job& job) {
    json out{{"id", job.id}, {"status", job_status_name(job.status.load())}, {"progress", job.progress.load()}};
    std::lock_guard lock(const_cast<Job&>(job).mutex);
    if (!job.result.empty()) out["classification"] = job.result;
    if (!job.error.empty()) out["error"] = job.error;
    return out;
  }

  std::shared_ptr<Job> job_of(const httplib::Request& req) {
    auto job = jobs.find(req.matches[2]);
    if (!job || job->session_id != req.matches[1]) {
      throw Error(ErrorCode::kNotFound, "unknown job " + std::string(req.matches[2]));
    }
    return job;
  }

  void routes() {
    http.set_default_headers({{"Access-Control-Allow-Origin", config.cors_origin}});
    http.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });

    http.Get("/api/spec", guarded([this](const httplib::Request&, httplib::Response& res) {
      json layers = json::array();
      for (const auto& l : config.spec.layers()) {
        layers.push_back({{"name", l.name}, {"kind", nn::layer_kind_name(l.kind)}, {"shape", l.output_shape}});
      }
      json table = json::array();
      for (auto a : config.action_table.mapping()) table.push_back(analysis::action_name(a));
      send_json(res, {{"layers", layers}, {"action_table", table}, {"weights_checksum", weights_checksum}});
    }));

    http.Post("/api/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
      auto s = store.create();
      if (!config.weights_path.empty()) s->set_weights_reference({config.weights_path, weights_checksum});
      send_json(res, {{"id", s->id()}}, 201);
    }));

    http.Post("/api/sessions/import", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      auto s = store.import_bundle(body.at("dir").get<std::string>());
      send_json(res, {{"id", s->id()}}, 201);
    }));

    http.Get(R"(/api/sessions/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      json mazes = json::array();
      for (const auto& [id, grid] : s->mazes()) mazes.push_back(id);
      send_json(res, {{"id", s->id()}, {"mazes", mazes}, {"classifications", s->classification_ids()}});
    }));

    http.Post(R"(/api/sessions/([^/]+)/export)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      const auto body = parse_body(req);
      const bool copy = body.value("copy_weights", false);
      s->export_bundle(body.at("dir").get<std::string>(), copy ? config.weights.get() : nullptr);
      send_json(res, {{"dir", body.at("dir")}});
    }));

    // Mazes
    http.Post(R"(/api/sessions/([^/]+)/mazes)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      const auto body = parse_body(req);
      maze::MazeGrid grid;
      if (body.contains("text")) {
        grid = maze::parse_maze_text(body.at("text").get<std::string>());
      } else {
        maze::GenerateOptions opts;
        if (body.contains("mouse")) opts.mouse = maze::GridPos{body["mouse"].at(0), body["mouse"].at(1)};
        if (body.contains("cheese") && !body["cheese"].is_null()) {
          opts.cheese = maze::GridPos{body["cheese"].at(0), body["cheese"].at(1)};
        }
        opts.place_cheese = !(body.contains("cheese") && body["cheese"].is_null());
        grid = maze::generate_kruskal(body.at("seed").get<std::uint64_t>(), body.at("size").get<int>(), opts);
      }
      const auto id = s->put_maze(grid);
      send_json(res, maze_json(id, grid), 201);
    }));

    http.Get(R"(/api/sessions/([^/]+)/mazes/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               send_json(res, maze_json(req.matches[2], s->maze(req.matches[2])));
             }));

    http.Get(R"(/api/sessions/([^/]+)/mazes/([^/]+)/observation)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               const auto obs = maze::render_observation(s->maze(req.matches[2]), config.palette);
               res.set_content(io::encode_tensor_wire(obs), std::string(io::kTensorContentType));
             }));

    http.Put(R"(/api/sessions/([^/]+)/mazes/([^/]+)/cells)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               const auto body = parse_body(req);
               const std::string id = req.matches[2];
               const auto kind_name = body.at("kind").get<std::string>();
               maze::Cell kind;
               if (kind_name == "free") {
                 kind = maze::Cell::kFree;
               } else if (kind_name == "blocked") {
                 kind = maze::Cell::kBlocked;
               } else {
                 throw Error(ErrorCode::kParameter, "cell kind must be free or blocked");
               }
               auto grid = s->maze(id).with_cell(pos_from(body), kind);
               s->replace_maze(id, grid);
               send_json(res, maze_json(id, grid));
             }));

    http.Post(R"(/api/sessions/([^/]+)/mazes/([^/]+)/entities)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session_of(req);
                const auto body = parse_body(req);
                const std::string id = req.matches[2];
                const auto entity = body.at("entity").get<std::string>();
                auto grid = s->maze(id);
                if (entity == "cheese" && body.value("remove", false)) {
                  grid = grid.without_cheese();
                } else if (entity == "cheese") {
                  grid = grid.with_cheese(pos_from(body));
                } else if (entity == "mouse") {
                  grid = grid.with_mouse(pos_from(body));
                } else {
                  throw Error(ErrorCode::kParameter, "entity must be mouse or cheese");
                }
                s->replace_maze(id, grid);
                send_json(res, maze_json(id, grid));
              }));

    // Forward and traces
    http.Post(R"(/api/sessions/([^/]+)/forward)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      const auto body = parse_body(req);
      std::set<std::string> capture;
      for (const auto& name : body.value("capture", json::array())) capture.insert(name.get<std::string>());
      auto [trace_id, trace] = trace_for(*s, body.at("maze").get<std::string>(), capture);
      const auto dist = analysis::action_distribution(trace->logits.data(), config.action_table);
      json dist_vec = json::array();
      for (double p : dist) dist_vec.push_back(p);
      send_json(res, {{"trace", trace_id},
                      {"logits", trace->logits.values()},
                      {"value", trace->value},
                      {"actions", distribution_json(dist)},
                      {"distribution", dist_vec},
                      {"captured", capture}});
    }));

    http.Get(R"(/api/sessions/([^/]+)/traces/([^/]+)/layers/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               auto trace = s->trace(req.matches[2]);
               const std::string name = req.matches[3];
               const Tensor* tensor = nullptr;
               if (auto it = trace->layers.find(name); it != trace->layers.end()) {
                 tensor = &it->second;
               } else if (name == "input") {
                 tensor = &trace->input;
               } else if (name == "logits") {
                 tensor = &trace->logits;
               } else {
                 throw Error(ErrorCode::kNotFound, "layer " + name + " was not captured in this trace", name);
               }
               res.set_content(io::encode_tensor_wire(*tensor), std::string(io::kTensorContentType));
             }));

    // Clustering jobs
    http.Post(R"(/api/sessions/([^/]+)/cluster)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      const auto body = parse_body(req);
      const auto trace_id = body.at("trace").get<std::string>();
      const auto layer = body.at("layer").get<std::string>();
      auto dataset = analysis::flatten_activations(*s->trace(trace_id), layer);
      const auto params = body.value("params", json::object());
      if (params.value("standardize", false)) dataset = analysis::standardize(dataset);
      const auto method = body.value("method", std::string("agglomerative"));
      Job::Work work;
      if (method == "kmeans") {
        analysis::KMeansOptions opts;
        opts.k = params.value("k", opts.k);
        opts.seed = params.value("seed", opts.seed);
        opts.max_iters = params.value("max_iters", opts.max_iters);
        opts.tol = params.value("tol", opts.tol);
        if (opts.k < 1 || opts.k > dataset.size()) {
          throw Error(ErrorCode::kParameter, "k must be within [1, " + std::to_string(dataset.size()) + "]");
        }
        work = [s, dataset = std::move(dataset), opts, trace_id](const analysis::RunControl& control) {
          auto result = analysis::kmeans(dataset, opts, control);
          control.check();
          return s->put_classification(std::move(result.classification), trace_id);
        };
      } else if (method == "agglomerative") {
        analysis::AgglomerativeOptions opts;
        if (params.contains("threshold")) opts.threshold = params.at("threshold").get<double>();
        if (params.contains("count")) opts.count = params.at("count").get<std::size_t>();
        if (!opts.threshold && !opts.count) {
          throw Error(ErrorCode::kParameter, "agglomerative clustering needs params.threshold or params.count");
        }
        if (opts.threshold && *opts.threshold < 0) throw Error(ErrorCode::kParameter, "threshold must be >= 0");
        work = [s, dataset = std::move(dataset), opts, trace_id](const analysis::RunControl& control) {
          auto result = analysis::agglomerative(dataset, opts, control);
          control.check();
          return s->put_classification(std::move(result.classification), trace_id);
        };
      } else {
        throw Error(ErrorCode::kParameter, "method must be kmeans or agglomerative");
      }
      auto job = jobs.submit(s->id(), std::move(work));
      send_json(res, job_json(*job), 202);
    }));

    http.Get(R"(/api/sessions/([^/]+)/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
      session_of(req);
      send_json(res, job_json(*job_of(req)));
    }));

    http.Delete(R"(/api/sessions/([^/]+)/jobs/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  session_of(req);
                  auto job = job_of(req);
                  jobs.cancel(*job);
                  send_json(res, job_json(*job));
                }));

    // Classifications
    http.Post(R"(/api/sessions/([^/]+)/classifications)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session_of(req);
                const auto body = parse_body(req);
                std::optional<std::string> trace_id;
                if (body.contains("trace") && !body["trace"].is_null()) trace_id = body["trace"].get<std::string>();
                auto cls = analysis::parse_classification_json(body.at("classification").dump());
                const auto id = s->put_classification(std::move(cls), trace_id);
                send_json(res, classification_view_json(id, s->classification(id)), 201);
              }));

    http.Get(R"(/api/sessions/([^/]+)/classifications/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               send_json(res, classification_view_json(req.matches[2], s->classification(req.matches[2])));
             }));

    http.Put(R"(/api/sessions/([^/]+)/classifications/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto s = session_of(req);
               const auto body = parse_body(req);
               std::optional<std::uint64_t> expected;
               if (body.contains("version")) expected = body.at("version").get<std::uint64_t>();
               auto cls = analysis::parse_classification_json(body.at("classification").dump());
               s->update_classification(req.matches[2], std::move(cls), expected);
               send_json(res, classification_view_json(req.matches[2], s->classification(req.matches[2])));
             }));

    http.Post(R"(/api/sessions/([^/]+)/classifications/([^/]+)/reassign)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session_of(req);
                const auto body = parse_body(req);
                const auto points = body.at("points").get<std::vector<std::size_t>>();
                const auto& target = body.at("target");
                analysis::ReassignTarget tgt = analysis::NewClass{};
                if (target.is_number_unsigned()) {
                  tgt = target.get<analysis::ClassId>();
                } else if (!(target.is_string() && target.get<std::string>() == "new")) {
                  throw Error(ErrorCode::kParameter, "target must be a class id or \"new\"");
                }
                s->reassign(req.matches[2], points, tgt);
                send_json(res, classification_view_json(req.matches[2], s->classification(req.matches[2])));
              }));

    http.Post(R"(/api/sessions/([^/]+)/classifications/([^/]+)/(undo|redo))",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session_of(req);
                if (req.matches[3] == "undo") {
                  s->undo(req.matches[2]);
                } else {
                  s->redo(req.matches[2]);
                }
                send_json(res, classification_view_json(req.matches[2], s->classification(req.matches[2])));
              }));

    // Saliency and projection
    http.Post(R"(/api/sessions/([^/]+)/saliency)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      auto s = session_of(req);
      const auto body = parse_body(req);
      const auto target = analysis::parse_saliency_target(body.at("target").get<std::string>());
      const auto reduction = analysis::parse_reduction(body.value("reduction", std::string("l2")));
      const auto grid = s->maze(body.at("maze").get<std::string>());
      const auto ctx = nn::forward_for_gradient(config.spec, *config.weights, network_input(grid));
      const auto map = analysis::saliency_for(config.spec, *config.weights, ctx, target, config.action_table, reduction);
      send_json(res, {{"height", map.height},
                      {"width", map.width},
                      {"target", map.target},
                      {"reduction", body.value("reduction", std::string("l2"))},
                      {"values", map.values}});
    }));

    http.Post(R"(/api/sessions/([^/]+)/projection)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto s = session_of(req);
                const auto body = parse_body(req);
                const auto cls_id = body.at("classification").get<std::string>();
                const auto view = s->classification(cls_id);
                if (!view.trace_id) {
                  throw Error(ErrorCode::kParameter, "classification " + cls_id + " is not linked to a trace");
                }
                const auto dataset = analysis::flatten_activations(*s->trace(*view.trace_id), view.value.layer);
                analysis::ProjectionState state;
                if (body.contains("basis")) {
                  state = analysis::ProjectionState::from_basis(dataset.dims(), body["basis"].get<std::vector<double>>());
                } else if (body.value("reset", false)) {
                  state = analysis::ProjectionState::initial(dataset.dims());
                } else {
                  state = s->projection(cls_id, dataset.dims());
                }
                const double dt = body.value("dt", 0.0);
                const auto steps = body.value("steps", std::size_t{1});
                for (std::size_t i = 0; i < steps; ++i) state = analysis::grand_tour_step(state, dt);
                s->set_projection(cls_id, state);
                const auto points = analysis::project(state, dataset);
                json pts = json::array();
                for (const auto& p : points) pts.push_back({p[0], p[1]});
                send_json(res, {{"dims", state.dims},
                                {"basis", state.basis},
                                {"orthonormality_error", state.orthonormality_error()},
                                {"points", pts}});
              }));
  }
};

WorkbenchServer::WorkbenchServer(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

WorkbenchServer::~WorkbenchServer() { stop(); }

bool WorkbenchServer::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

int WorkbenchServer::bind_to_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool WorkbenchServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void WorkbenchServer::stop() {
  if (impl_) impl_->http.stop();
}

bool WorkbenchServer::is_running() const { return impl_->http.is_running(); }

session::SessionStore& WorkbenchServer::sessions() { return impl_->store; }

}  // namespace mazescope::service
