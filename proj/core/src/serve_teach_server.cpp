#include "clic/serve/teach_server.hpp"

#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "clic/error.hpp"
#include "clic/serve/teach_session.hpp"

namespace clic::serve {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

class Client;

struct Hub {
  std::set<std::shared_ptr<Client>> clients;
  TeachSession* session = nullptr;
  std::string static_dir;
};

class Client : public std::enable_shared_from_this<Client> {
 public:
  Client(websocket::stream<beast::tcp_stream> ws, Hub& hub) : ws_(std::move(ws)), hub_(hub) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->hub_.clients.insert(self);
      self->send(self->hub_.session->state_frame().dump());
      self->read();
    });
  }

  void send(std::string text) {
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->hub_.clients.erase(self);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      auto reply = self->hub_.session->handle_message(text);
      for (auto& f : reply.to_sender) self->send(f.dump());
      for (auto& f : reply.to_all) {
        const std::string s = f.dump();
        for (const auto& c : self->hub_.clients) c->send(s);
      }
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->hub_.clients.erase(self);
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

std::string mime_type(const std::string& ext) {
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  return "application/octet-stream";
}

// First request on a new connection: either a WebSocket upgrade or a static
// file fetch.
class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, Hub& hub) : stream_(std::move(socket)), hub_(hub) {}

  void start() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (!ec) self->dispatch();
                     });
  }

 private:
  void dispatch() {
    if (websocket::is_upgrade(req_)) {
      stream_.expires_never();
      auto client = std::make_shared<Client>(
          websocket::stream<beast::tcp_stream>(std::move(stream_)), hub_);
      client->start(std::move(req_));
      return;
    }
    auto res = std::make_shared<http::response<http::string_body>>(file_response());
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  http::response<http::string_body> file_response() {
    http::response<http::string_body> res;
    res.version(req_.version());
    res.keep_alive(false);
    std::string target(req_.target());
    if (target == "/") target = "/index.html";
    const bool safe = target.find("..") == std::string::npos;
    const std::filesystem::path path = std::filesystem::path(hub_.static_dir) / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (req_.method() != http::verb::get || hub_.static_dir.empty() || !safe || !in) {
      res.result(http::status::not_found);
      res.set(http::field::content_type, "text/plain");
      res.body() = "not found\n";
    } else {
      std::stringstream body;
      body << in.rdbuf();
      res.result(http::status::ok);
      res.set(http::field::content_type, mime_type(path.extension().string()));
      res.body() = body.str();
    }
    res.prepare_payload();
    return res;
  }

  beast::tcp_stream stream_;
  Hub& hub_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

struct TeachServer::Impl {
  Impl(trainer::ExperimentConfig config, ServerOptions opts)
      : options(std::move(opts)),
        session(std::move(config)),
        acceptor(io),
        timer(io) {
    if (!(options.tick_hz > 0.0)) throw ConfigError("serve: tick rate must be > 0");
    const auto dims = envs::env_dims(session.session().config().env);
    if (dims.action_dim != 2) throw ConfigError("serve: needs an environment with 2D actions");
    hub.session = &session;
    hub.static_dir = options.static_dir;
    const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpConnection>(std::move(socket), hub)->start();
      accept();
    });
  }

  void schedule() {
    const auto period = std::chrono::duration<double>(1.0 / options.tick_hz);
    timer.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(period));
    timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      std::vector<json> frames;
      try {
        frames = session.tick();
      } catch (const NumericError& e) {
        frames.push_back(error_frame(std::string("training diverged: ") + e.what()));
      }
      for (const auto& f : frames) {
        const std::string text = f.dump();
        for (const auto& c : hub.clients) c->send(text);
      }
      schedule();
    });
  }

  ServerOptions options;
  asio::io_context io;
  TeachSession session;
  Hub hub;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
};

TeachServer::TeachServer(trainer::ExperimentConfig config, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(options))) {}

TeachServer::~TeachServer() = default;

unsigned short TeachServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void TeachServer::run() {
  impl_->accept();
  impl_->schedule();
  impl_->io.run();
}

void TeachServer::stop() {
  asio::post(impl_->io, [impl = impl_.get()] {
    beast::error_code ec;
    impl->acceptor.close(ec);
    impl->timer.cancel();
    for (const auto& c : impl->hub.clients) c->close();
    impl->hub.clients.clear();
    impl->io.stop();
  });
}

void run_teach_server(const trainer::ExperimentConfig& config, const ServerOptions& options) {
  TeachServer server(config, options);
  std::cerr << "teaching service on ws://" << options.address << ':' << server.port() << '\n';
  server.run();
}

}  // namespace clic::serve
