// Copyright 2026 The exchat Authors.
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

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "exchat/app.hpp"
#include "exchat/state.hpp"

namespace exchat {

// Error reported to API clients as {"error": {"code", "message"}}.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(std::string code, int status, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), status_(status) {}

  const std::string& code() const { return code_; }
  int status() const { return status_; }

 private:
  std::string code_;
  int status_;
};

// In-memory chat sessions over one shared dialogue engine. Requests for
// different sessions run concurrently; requests for one session are served
// one at a time in arrival order.
class ChatService {
 public:
  using Clock = std::chrono::steady_clock;

  explicit ChatService(App app, std::uint64_t seed = std::random_device{}());

  // {"session_id", "topic", "utterances", "trace", "closed", "turn"}.
  // Throws ServiceError unknown_topic / no_topics.
  nlohmann::json create_session(std::optional<std::string> topic,
                                const std::set<std::string>& exclude = {});

  // Same shape as create_session. The turn that reaches max_turns carries
  // the closing message and closes the session. Throws ServiceError
  // no_such_session / session_closed.
  nlohmann::json post_utterance(const std::string& id, const std::string& text);

  // {"session_id", "topic", "closed", "turns": [...]}, opening first.
  nlohmann::json get_history(const std::string& id) const;

  // Drops sessions idle for longer than the configured expiry.
  std::size_t expire_idle(Clock::time_point now);

  std::size_t session_count() const;
  void dump_sessions(const std::filesystem::path& path) const;
  const App& app() const { return app_; }

 private:
  struct Session {
    std::string id;
    DialogueState state;
    int turns = 0;
    bool closed = false;
    Clock::time_point created;
    Clock::time_point last_active;

    mutable std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::uint64_t> next_ticket{0};
    std::uint64_t serving = 0;
  };

  std::shared_ptr<Session> find(const std::string& id) const;
  std::string new_id();
  void log_turn(const std::string& id, const Turn& turn);

  App app_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
  std::mutex log_mu_;
  std::ofstream log_;
};

}  // namespace exchat
