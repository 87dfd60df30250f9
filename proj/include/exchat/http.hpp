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

#include <string>

#include "httplib.h"

#include "exchat/service.hpp"

namespace exchat {

// POST /sessions, POST /sessions/{id}/utterances, GET /sessions/{id}/history,
// GET /healthz.
void install_routes(httplib::Server& server, ChatService& service);

// Splits "host:port". Throws ConfigError.
std::pair<std::string, int> parse_bind(const std::string& bind);

// Serves until SIGINT/SIGTERM, then writes the session dump when one is
// configured. Returns a process exit code.
int run_server(ChatService& service, std::ostream& log);

}  // namespace exchat
