#pragma once

#include <memory>
#include <string>

#include "clic/trainer/config.hpp"

namespace clic::serve {

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;  // 0 picks a free port
  double tick_hz = 10.0;
  std::string static_dir;      // served over plain HTTP when set
};

// WebSocket front end for TeachSession. Everything runs on one thread, so
// ticks, client frames and training never overlap.
class TeachServer {
 public:
  TeachServer(trainer::ExperimentConfig config, ServerOptions options);
  ~TeachServer();

  unsigned short port() const;  // the bound port
  void run();                   // blocks until stop()
  void stop();                  // safe from any thread

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void run_teach_server(const trainer::ExperimentConfig& config, const ServerOptions& options);

}  // namespace clic::serve
