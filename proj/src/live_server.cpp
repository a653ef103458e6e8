// Copyright 2026 The Mentum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mentum/live_server.h"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "json.hpp"

#include "mentum/error.h"

namespace mentum {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

namespace {

// Slow clients lose messages rather than stall the session.
constexpr std::size_t kMaxQueuedMessages = 8192;

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, LiveServer::CommandHandler& handler)
      : ws_(std::move(socket)), handler_(handler) {}

  void start(std::string greeting, std::function<void(std::shared_ptr<Connection>)> on_open,
             std::function<void(Connection*)> on_close) {
    on_close_ = std::move(on_close);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this(), greeting = std::move(greeting), on_open = std::move(on_open)](
                         beast::error_code ec) mutable {
      if (ec) return self->fail();
      on_open(self);
      self->deliver(std::make_shared<std::string>(std::move(greeting)));
      self->read();
    });
  }

  // Safe from any thread.
  void send(std::shared_ptr<const std::string> text) {
    net::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)] { self->deliver(text); });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      if (self->closed_) return;
      self->ws_.async_close(websocket::close_code::normal, [self](beast::error_code) { self->fail(); });
    });
  }

 private:
  void deliver(std::shared_ptr<const std::string> text) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedMessages) {
      ++dropped_;
      return;
    }
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->fail();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->fail();
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      try {
        self->handler_(text);
      } catch (const Error& e) {
        self->deliver(std::make_shared<std::string>(
            nlohmann::json{{"type", "error"}, {"reason", e.what()}}.dump()));
      }
      self->read();
    });
  }

  void fail() {
    if (closed_) return;
    closed_ = true;
    queue_.clear();
    if (on_close_) on_close_(this);
  }

  websocket::stream<tcp::socket> ws_;
  LiveServer::CommandHandler& handler_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::function<void(Connection*)> on_close_;
  bool closed_ = false;
  std::uint64_t dropped_ = 0;
};

}  // namespace

struct LiveServer::Impl {
  Impl(MessageHub& hub, CommandHandler handler, Greeting greeting, std::uint16_t port, const std::string& address)
      : hub(hub), handler(std::move(handler)), greeting(std::move(greeting)), acceptor(io) {
    beast::error_code ec;
    const tcp::endpoint ep(net::ip::make_address(address, ec), port);
    if (ec) throw IoError("bad listen address " + address);
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw IoError("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    bound_port = acceptor.local_endpoint().port();

    sub = hub.subscribe([this](const LiveMessage& m) {
      auto text = std::make_shared<const std::string>(m.json);
      std::lock_guard lock(mu);
      for (const auto& c : conns) c->send(text);
    });
    accept();
    thread = std::thread([this] { io.run(); });
  }

  ~Impl() { shutdown(); }

  void accept() {
    acceptor.async_accept(net::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      auto conn = std::make_shared<Connection>(std::move(socket), handler);
      conn->start(
          greeting ? greeting() : std::string("{\"type\":\"hello\"}"),
          [this](std::shared_ptr<Connection> c) {
            std::lock_guard lock(mu);
            conns.insert(std::move(c));
          },
          [this](Connection* c) {
            std::lock_guard lock(mu);
            for (auto it = conns.begin(); it != conns.end(); ++it) {
              if (it->get() == c) {
                conns.erase(it);
                break;
              }
            }
          });
      accept();
    });
  }

  void shutdown() {
    if (stopped.exchange(true)) return;
    hub.unsubscribe(sub);
    net::post(io, [this] {
      beast::error_code ec;
      acceptor.close(ec);
      std::lock_guard lock(mu);
      for (const auto& c : conns) c->close();
    });
    // Give clients a moment to see the close handshake.
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    io.stop();
    if (thread.joinable()) thread.join();
    std::lock_guard lock(mu);
    conns.clear();
  }

  MessageHub& hub;
  CommandHandler handler;
  Greeting greeting;
  net::io_context io;
  tcp::acceptor acceptor;
  std::uint16_t bound_port = 0;
  std::uint64_t sub = 0;
  mutable std::mutex mu;
  std::set<std::shared_ptr<Connection>> conns;
  std::thread thread;
  std::atomic<bool> stopped{false};
};

LiveServer::LiveServer(MessageHub& hub, CommandHandler on_command, Greeting greeting, std::uint16_t port,
                       const std::string& address)
    : impl_(std::make_unique<Impl>(hub, std::move(on_command), std::move(greeting), port, address)) {}

LiveServer::~LiveServer() = default;

std::uint16_t LiveServer::port() const { return impl_->bound_port; }

std::size_t LiveServer::clients() const {
  std::lock_guard lock(impl_->mu);
  return impl_->conns.size();
}

void LiveServer::stop() { impl_->shutdown(); }

// ---------------------------------------------------------------------------

struct LiveClient::Impl {
  Impl(const std::string& host, std::uint16_t port) : ws(io) {
    tcp::resolver resolver(io);
    beast::error_code ec;
    const auto results = resolver.resolve(host, std::to_string(port), ec);
    if (ec) throw IoError("cannot resolve " + host + ": " + ec.message());
    net::connect(ws.next_layer(), results, ec);
    if (ec) throw IoError("cannot connect to " + host + ":" + std::to_string(port) + ": " + ec.message());
    ws.handshake(host + ":" + std::to_string(port), "/", ec);
    if (ec) throw IoError("websocket handshake failed: " + ec.message());
    read();
    thread = std::thread([this] { io.run(); });
  }

  ~Impl() {
    close();
    if (thread.joinable()) thread.join();
  }

  void read() {
    ws.async_read(buffer, [this](beast::error_code ec, std::size_t) {
      std::lock_guard lock(mu);
      if (ec) {
        is_closed = true;
        cv.notify_all();
        return;
      }
      inbox.push_back(beast::buffers_to_string(buffer.data()));
      buffer.consume(buffer.size());
      cv.notify_all();
      read();
    });
  }

  void close() {
    if (closing.exchange(true)) return;
    net::post(io, [this] {
      if (is_closed_unlocked()) return;
      ws.async_close(websocket::close_code::normal, [](beast::error_code) {});
    });
  }

  bool is_closed_unlocked() {
    std::lock_guard lock(mu);
    return is_closed;
  }

  net::io_context io;
  websocket::stream<tcp::socket> ws;
  beast::flat_buffer buffer;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::string> inbox;
  bool is_closed = false;
  std::atomic<bool> closing{false};
  std::thread thread;
};

LiveClient::LiveClient(const std::string& host, std::uint16_t port) : impl_(std::make_unique<Impl>(host, port)) {}

LiveClient::~LiveClient() = default;

void LiveClient::send(const std::string& text) {
  // Writes are posted to the client's own thread so they never overlap.
  std::promise<beast::error_code> done;
  auto result = done.get_future();
  net::post(impl_->io, [this, &text, &done] {
    beast::error_code ec;
    impl_->ws.text(true);
    impl_->ws.write(net::buffer(text), ec);
    done.set_value(ec);
  });
  if (const auto ec = result.get()) throw IoError("websocket send failed: " + ec.message());
}

std::optional<std::string> LiveClient::next(std::chrono::milliseconds timeout) {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait_for(lock, timeout, [this] { return !impl_->inbox.empty() || impl_->is_closed; });
  if (impl_->inbox.empty()) return std::nullopt;
  std::string s = std::move(impl_->inbox.front());
  impl_->inbox.pop_front();
  return s;
}

bool LiveClient::closed() const {
  std::lock_guard lock(impl_->mu);
  return impl_->is_closed;
}

void LiveClient::close() { impl_->close(); }

}  // namespace mentum
