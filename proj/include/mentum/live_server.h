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

// WebSocket transport for live session messages. Every connected client gets
// a greeting, then every message published on the hub; text frames from a
// client are handed to the command handler.

#ifndef MENTUM_LIVE_SERVER_H_
#define MENTUM_LIVE_SERVER_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "mentum/session.h"

namespace mentum {

class LiveServer {
 public:
  // Throwing a mentum::Error from the handler sends {"type":"error"} back to
  // the client that sent the command.
  using CommandHandler = std::function<void(const std::string&)>;
  using Greeting = std::function<std::string()>;

  // Port 0 picks a free port; see port().
  LiveServer(MessageHub& hub, CommandHandler on_command, Greeting greeting, std::uint16_t port,
             const std::string& address = "127.0.0.1");
  ~LiveServer();
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  std::uint16_t port() const;
  std::size_t clients() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Minimal client used by tests and the watch command.
class LiveClient {
 public:
  LiveClient(const std::string& host, std::uint16_t port);
  ~LiveClient();
  LiveClient(const LiveClient&) = delete;
  LiveClient& operator=(const LiveClient&) = delete;

  void send(const std::string& text);
  // Next received message, or nullopt on timeout or after the server closed.
  std::optional<std::string> next(std::chrono::milliseconds timeout);
  bool closed() const;
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mentum

#endif  // MENTUM_LIVE_SERVER_H_
