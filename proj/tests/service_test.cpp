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

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "exchat/http.hpp"
#include "exchat/service.hpp"
#include "support.hpp"

namespace exchat {
namespace {

using nlohmann::json;

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "exchat-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

App app_with(std::function<void(ServiceConfig&)> edit = {}) {
  auto cfg = load_config(testing::minifood_dir() / "config.json");
  if (edit) edit(cfg);
  return load_app(std::move(cfg));
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    return e.code();
  }
  return "";
}

std::vector<std::vector<std::string>> utterances_of(const json& history) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : history.at("turns")) {
    out.push_back(t.at("utterances").get<std::vector<std::string>>());
  }
  return out;
}

TEST(ChatService, CreateSessionWithTopic) {
  ChatService svc(app_with(), 1);
  const auto r = svc.create_session("breakfast");
  EXPECT_EQ(r.at("topic"), "breakfast");
  EXPECT_FALSE(r.at("session_id").get<std::string>().empty());
  const auto u = r.at("utterances").get<std::vector<std::string>>();
  ASSERT_GE(u.size(), 4u);
  EXPECT_EQ(u[0], "Hi! I'm Mia. I moved here from Canada last spring.");
}

TEST(ChatService, CreateSessionWithoutTopicHonorsExclude) {
  ChatService svc(app_with(), 1);
  std::set<std::string> exclude{"breakfast", "coffee", "ramen", "pizza"};
  for (int i = 0; i < 5; ++i) EXPECT_EQ(svc.create_session(std::nullopt, exclude).at("topic"), "sweets");
  std::set<std::string> topics;
  for (int i = 0; i < 60; ++i) topics.insert(svc.create_session(std::nullopt).at("topic").get<std::string>());
  EXPECT_EQ(topics.size(), 5u);
}

TEST(ChatService, Errors) {
  ChatService svc(app_with(), 1);
  EXPECT_EQ(error_code([&] { svc.create_session("karaoke"); }), "unknown_topic");
  EXPECT_EQ(error_code([&] { svc.post_utterance("nope", "hi"); }), "no_such_session");
  EXPECT_EQ(error_code([&] { svc.get_history("nope"); }), "no_such_session");
  std::set<std::string> all{"breakfast", "coffee", "ramen", "pizza", "sweets"};
  EXPECT_EQ(error_code([&] { svc.create_session(std::nullopt, all); }), "no_topics");
}

TEST(ChatService, TurnPayloadAndHistory) {
  ChatService svc(app_with(), 1);
  const auto id = svc.create_session("coffee").at("session_id").get<std::string>();
  EXPECT_EQ(svc.get_history(id).at("turns").size(), 1u);
  const auto r = svc.post_utterance(id, "Yes.");
  EXPECT_EQ(r.at("utterances"), json::array({"Which coffee shops do you like?"}));
  EXPECT_EQ(r.at("trace").at("branch"), 1);
  EXPECT_EQ(r.at("trace").at("expert"), "network");
  EXPECT_EQ(r.at("trace").at("kind"), "network");
  EXPECT_EQ(r.at("closed"), false);
  svc.post_utterance(id, "I like Tully's.");
  const auto h = svc.get_history(id);
  ASSERT_EQ(h.at("turns").size(), 3u);
  EXPECT_EQ(h.at("turns")[2].at("user"), "I like Tully's.");
  EXPECT_EQ(h.at("turns")[2].at("utterances"), json::array({"I like Tully's, too!"}));
}

TEST(ChatService, ClosesAfterMaxTurns) {
  ChatService svc(app_with(), 1);
  const auto id = svc.create_session("ramen").at("session_id").get<std::string>();
  json last;
  for (int i = 1; i <= 15; ++i) {
    last = svc.post_utterance(id, i % 2 ? "Yes." : "I like sushi.");
    EXPECT_EQ(last.at("turn"), i);
    EXPECT_EQ(last.at("closed"), i == 15);
  }
  EXPECT_EQ(last.at("utterances").back(), svc.app().config.closing_message);
  EXPECT_EQ(error_code([&] { svc.post_utterance(id, "Hello?"); }), "session_closed");
  EXPECT_EQ(svc.get_history(id).at("turns").size(), 16u);
}

const std::vector<std::string> kScriptA{"Yes.", "I like Tully's.", "Do you like ramen?",
                                        "What is your name?", "I like sushi."};
const std::vector<std::string> kScriptB{"Toast.", "Yes.", "I drink coffee.", "No.",
                                        "Which do you like, tea or coffee?"};

TEST(ChatService, InterleavedSessionsMatchSerialRuns) {
  auto serial = [&](const std::string& topic, const std::vector<std::string>& script) {
    ChatService svc(app_with(), 1);
    const auto id = svc.create_session(topic).at("session_id").get<std::string>();
    for (const auto& u : script) svc.post_utterance(id, u);
    return utterances_of(svc.get_history(id));
  };
  const auto want_a = serial("coffee", kScriptA);
  const auto want_b = serial("breakfast", kScriptB);

  ChatService svc(app_with(), 1);
  const auto a = svc.create_session("coffee").at("session_id").get<std::string>();
  const auto b = svc.create_session("breakfast").at("session_id").get<std::string>();
  std::thread ta([&] {
    for (const auto& u : kScriptA) svc.post_utterance(a, u);
  });
  std::thread tb([&] {
    for (const auto& u : kScriptB) svc.post_utterance(b, u);
  });
  ta.join();
  tb.join();
  EXPECT_EQ(utterances_of(svc.get_history(a)), want_a);
  EXPECT_EQ(utterances_of(svc.get_history(b)), want_b);
}

TEST(ChatService, ConcurrentPostsToOneSessionAreSerialized) {
  ChatService svc(app_with([](ServiceConfig& c) { c.max_turns = 100; }), 1);
  const auto id = svc.create_session("pizza").at("session_id").get<std::string>();
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      for (int k = 0; k < 5; ++k) svc.post_utterance(id, "msg " + std::to_string(i));
    });
  }
  for (auto& t : threads) t.join();
  const auto h = svc.get_history(id);
  ASSERT_EQ(h.at("turns").size(), 41u);
  std::map<std::string, int> counts;
  for (std::size_t i = 1; i < h.at("turns").size(); ++i) {
    ++counts[h.at("turns")[i].at("user").get<std::string>()];
  }
  for (const auto& [user, n] : counts) EXPECT_EQ(n, 5) << user;
}

TEST(ChatService, EveryTurnLoggedOnce) {
  const auto log = temp_path("turns.jsonl");
  std::filesystem::remove(log);
  {
    ChatService svc(app_with([&](ServiceConfig& c) { c.log = log; }), 1);
    const auto id = svc.create_session("coffee").at("session_id").get<std::string>();
    for (const auto& u : kScriptA) svc.post_utterance(id, u);
  }
  std::ifstream in(log);
  std::string line;
  std::vector<json> records;
  while (std::getline(in, line)) records.push_back(json::parse(line));
  ASSERT_EQ(records.size(), kScriptA.size() + 1);
  for (std::size_t i = 1; i < records.size(); ++i) {
    EXPECT_EQ(records[i].at("user"), kScriptA[i - 1]);
    for (const char* k : {"session", "frame", "branch", "expert", "kind", "utterances",
                          "elapsed_ms"}) {
      EXPECT_TRUE(records[i].contains(k)) << k;
    }
  }
}

TEST(ChatService, IdleSessionsExpire) {
  ChatService svc(app_with(), 1);
  svc.create_session("coffee");
  EXPECT_EQ(svc.expire_idle(ChatService::Clock::now()), 0u);
  EXPECT_EQ(svc.expire_idle(ChatService::Clock::now() + std::chrono::hours(25)), 1u);
  EXPECT_EQ(svc.session_count(), 0u);
}

TEST(Config, ValidationAndEnvironment) {
  const auto dir = testing::minifood_dir();
  EXPECT_THROW(parse_config("{", dir), ConfigError);
  EXPECT_THROW(parse_config(R"({"declarations":"declarations.xml","knowledge":[],"model":"missing.json"})", dir),
               ConfigError);
  EXPECT_THROW(load_config(dir / "absent.json"), ConfigError);
  auto cfg = load_config(dir / "config.json");
  EXPECT_EQ(cfg.max_turns, 15);
  ::setenv("EXCHAT_BIND", "0.0.0.0:9999", 1);
  apply_env_overrides(cfg);
  ::unsetenv("EXCHAT_BIND");
  EXPECT_EQ(cfg.bind, "0.0.0.0:9999");
  EXPECT_EQ(parse_bind("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_THROW(parse_bind("nope"), ConfigError);
}

class HttpApi : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<ChatService>(app_with(), 1);
    install_routes(server_, *service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<ChatService> service_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(HttpApi, SessionLifecycle) {
  auto c = client();
  auto health = c.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);

  auto created = c.Post("/sessions", R"({"topic":"coffee"})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const auto id = json::parse(created->body).at("session_id").get<std::string>();

  auto turn = c.Post("/sessions/" + id + "/utterances", R"({"text":"Yes."})", "application/json");
  ASSERT_TRUE(turn);
  EXPECT_EQ(turn->status, 200);
  const auto body = json::parse(turn->body);
  EXPECT_EQ(body.at("utterances"), json::array({"Which coffee shops do you like?"}));
  EXPECT_EQ(turn->get_header_value("Access-Control-Allow-Origin"), "*");

  auto history = c.Get("/sessions/" + id + "/history");
  ASSERT_TRUE(history);
  EXPECT_EQ(json::parse(history->body).at("turns").size(), 2u);
}

TEST_F(HttpApi, ErrorPayloads) {
  auto c = client();
  auto bad_topic = c.Post("/sessions", R"({"topic":"karaoke"})", "application/json");
  ASSERT_TRUE(bad_topic);
  EXPECT_EQ(bad_topic->status, 400);
  EXPECT_EQ(json::parse(bad_topic->body).at("error").at("code"), "unknown_topic");

  auto missing = c.Post("/sessions/zzz/utterances", R"({"text":"hi"})", "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body).at("error").at("code"), "no_such_session");

  auto no_history = c.Get("/sessions/zzz/history");
  ASSERT_TRUE(no_history);
  EXPECT_EQ(no_history->status, 404);

  auto malformed = c.Post("/sessions", "{", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);
}

}  // namespace
}  // namespace exchat
