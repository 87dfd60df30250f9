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

#include "exchat/service.hpp"


#include "exchat/trace_json.hpp"

namespace exchat {

using nlohmann::json;

namespace {

json turn_payload(const std::string& id, const std::string& topic,
                  const SystemTurn& turn, bool closed, int n) {
  return {{"session_id", id},
          {"topic", topic},
          {"utterances", turn.utterances()},
          {"trace", trace_to_json(turn.trace)},
          {"closed", closed},
          {"turn", n}};
}

}  // namespace

ChatService::ChatService(App app, std::uint64_t seed)
    : app_(std::move(app)), rng_(seed) {
  if (!app_.config.log.empty()) {
    log_.open(app_.config.log, std::ios::app);
    if (!log_) throw ConfigError("cannot open log " + app_.config.log.string());
  }
}

std::string ChatService::new_id() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  do {
    id.clear();
    for (int part = 0; part < 2; ++part) {
      auto v = rng_();
      for (int i = 0; i < 16; ++i, v >>= 4) id.push_back(kHex[v & 0xf]);
    }
  } while (sessions_.count(id));
  return id;
}

json ChatService::create_session(std::optional<std::string> topic,
                                 const std::set<std::string>& exclude) {
  const auto now = Clock::now();
  expire_idle(now);
  auto session = std::make_shared<Session>();
  SystemTurn opening;
  {
    std::lock_guard lock(mu_);
    try {
      auto [state, turn] = app_.engine->start_session(topic, rng_, exclude);
      session->state = std::move(state);
      opening = std::move(turn);
    } catch (const EngineError& e) {
      if (topic && !app_.kb->find_topic(*topic)) {
        throw ServiceError("unknown_topic", 400, e.what());
      }
      throw ServiceError("no_topics", 400, e.what());
    }
    session->id = new_id();
    session->created = session->last_active = now;
    sessions_.emplace(session->id, session);
  }
  log_turn(session->id, session->state.history.back());
  return turn_payload(session->id, session->state.session_topic, opening, false, 0);
}

std::shared_ptr<ChatService::Session> ChatService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    throw ServiceError("no_such_session", 404, "no session with id " + id);
  }
  return it->second;
}

json ChatService::post_utterance(const std::string& id, const std::string& text) {
  auto s = find(id);
  const auto ticket = s->next_ticket.fetch_add(1);
  std::unique_lock lock(s->mu);
  s->cv.wait(lock, [&] { return s->serving == ticket; });
  struct Release {
    Session& s;
    ~Release() {
      ++s.serving;
      s.cv.notify_all();
    }
  } release{*s};

  if (s->closed) {
    throw ServiceError("session_closed", 409, "session " + id + " is closed");
  }
  auto turn = app_.engine->process_turn(s->state, text);
  ++s->turns;
  s->last_active = Clock::now();
  if (s->turns >= app_.config.max_turns) {
    s->closed = true;
    turn.groups.push_back({app_.config.closing_message});
    s->state.history.back().utterances.push_back(app_.config.closing_message);
  }
  log_turn(id, s->state.history.back());
  return turn_payload(id, s->state.session_topic, turn, s->closed, s->turns);
}

json ChatService::get_history(const std::string& id) const {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  json turns = json::array();
  for (const auto& t : s->state.history) turns.push_back(turn_to_json(t));
  return {{"session_id", id},
          {"topic", s->state.session_topic},
          {"closed", s->closed},
          {"turns", std::move(turns)}};
}

std::size_t ChatService::expire_idle(Clock::time_point now) {
  const auto limit = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double, std::ratio<3600>>(app_.config.idle_expiry_hours));
  std::lock_guard lock(mu_);
  return std::erase_if(sessions_, [&](const auto& kv) {
    std::lock_guard slock(kv.second->mu);
    return now - kv.second->last_active > limit;
  });
}

std::size_t ChatService::session_count() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

void ChatService::dump_sessions(const std::filesystem::path& path) const {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, _] : sessions_) ids.push_back(id);
  }
  json all = json::array();
  for (const auto& id : ids) {
    try {
      all.push_back(get_history(id));
    } catch (const ServiceError&) {
    }
  }
  std::ofstream out(path);
  out << all.dump(1) << '\n';
}

void ChatService::log_turn(const std::string& id, const Turn& turn) {
  if (!log_.is_open()) return;
  const auto line = turn_log_record(id, turn).dump();
  std::lock_guard lock(log_mu_);
  log_ << line << '\n';
  log_.flush();
}

}  // namespace exchat
