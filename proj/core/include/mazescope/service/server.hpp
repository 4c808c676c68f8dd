#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "mazescope/analysis/actions.hpp"
#include "mazescope/error.hpp"
#include "mazescope/maze/render.hpp"
#include "mazescope/nn/network_spec.hpp"
#include "mazescope/nn/weights.hpp"
#include "mazescope/session/session.hpp"

namespace mazescope::service {

inline constexpr int kDefaultPort = 8737;

struct ServiceConfig {
  nn::NetworkSpec spec = nn::NetworkSpec::impala();
  std::shared_ptr<const nn::WeightStore> weights;
  /// Recorded as the weights reference of every new session.
  std::string weights_path;
  maze::RenderPalette palette;
  analysis::ActionTable action_table = analysis::ActionTable::default_table();
  maze::InputLayout layout = maze::InputLayout::kChannelFirst;
  std::size_t workers = 2;
  std::string cors_origin = "*";
};

/// HTTP/1.1 facade over the core. JSON bodies everywhere except tensor
/// payloads (TNSR wire format). Long clustering runs go through a bounded
/// worker pool and can be cancelled.
class WorkbenchServer {
 public:
  explicit WorkbenchServer(ServiceConfig config);
  ~WorkbenchServer();
  WorkbenchServer(const WorkbenchServer&) = delete;
  WorkbenchServer& operator=(const WorkbenchServer&) = delete;

  /// Binds and serves until stop(); returns false if binding failed.
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and returns it (or -1).
  int bind_to_any_port(const std::string& host);
  /// Serves on a port previously bound by bind_to_any_port.
  bool listen_after_bind();
  void stop();
  bool is_running() const;

  session::SessionStore& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP status for an error code.
int http_status(ErrorCode code) noexcept;

}  // namespace mazescope::service
