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

#include "exchat/http.hpp"

#include <csignal>
#include <ostream>

namespace exchat {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code,
                 const std::string& message) {
  reply(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

// Runs `fn` and maps failures to error payloads.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ServiceError& e) {
    reply_error(res, e.status(), e.code(), e.what());
  } catch (const json::exception& e) {
    reply_error(res, 400, "bad_request", e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body);
  if (!j.is_object()) throw ServiceError("bad_request", 400, "body must be a JSON object");
  return j;
}

httplib::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

void install_routes(httplib::Server& server, ChatService& service) {
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}});
  });

  server.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      std::optional<std::string> topic;
      if (body.contains("topic") && !body["topic"].is_null()) {
        topic = body["topic"].get<std::string>();
      }
      std::set<std::string> exclude;
      if (body.contains("exclude")) {
        for (const auto& t : body["exclude"]) exclude.insert(t.get<std::string>());
      }
      reply(res, 201, service.create_session(topic, exclude));
    });
  });

  server.Post(R"(/sessions/([^/]+)/utterances)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const auto body = parse_body(req);
                  if (!body.contains("text") || !body["text"].is_string()) {
                    throw ServiceError("bad_request", 400, "missing string field 'text'");
                  }
                  reply(res, 200,
                        service.post_utterance(req.matches[1], body["text"].get<std::string>()));
                });
              });

  server.Get(R"(/sessions/([^/]+)/history)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] { reply(res, 200, service.get_history(req.matches[1])); });
             });

  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == bind.size()) {
    throw ConfigError("bind address must look like host:port, got '" + bind + "'");
  }
  try {
    std::size_t used = 0;
    const int port = std::stoi(bind.substr(colon + 1), &used);
    if (used != bind.size() - colon - 1 || port < 0 || port > 65535) throw std::out_of_range("");
    return {bind.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw ConfigError("bad port in bind address '" + bind + "'");
  }
}

int run_server(ChatService& service, std::ostream& log) {
  const auto [host, port] = parse_bind(service.app().config.bind);
  httplib::Server server;
  install_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  log << "listening on " << host << ":" << port << std::endl;
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  if (!service.app().config.session_dump.empty()) {
    service.dump_sessions(service.app().config.session_dump);
  }
  if (!ok) {
    log << "cannot listen on " << host << ":" << port << std::endl;
    return 2;
  }
  return 0;
}

}  // namespace exchat
