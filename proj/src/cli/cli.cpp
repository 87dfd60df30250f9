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

#include "exchat/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "exchat/app.hpp"
#include "exchat/http.hpp"
#include "exchat/minifood.hpp"
#include "exchat/service.hpp"
#include "exchat/text.hpp"
#include "exchat/trace_json.hpp"
#include "exchat/validate.hpp"

namespace exchat {

namespace fs = std::filesystem;

namespace {

// Missing or unreadable input, reported with exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string system_line(const std::vector<std::string>& utterances) {
  return "System: " + join(utterances, " | ");
}

std::string fixed3(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(3) << v;
  return ss.str();
}

// Maps the library's exceptions to exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitContent;
  }
}

// --- chat -----------------------------------------------------------------

struct ChatOptions {
  std::string config;
  std::string topic;
  std::uint64_t seed = 1;
  bool echo = false;
};

int cmd_chat(const ChatOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const App app = load_app(load_config(o.config));
    std::mt19937_64 rng(o.seed);
    auto [state, opening] = app.engine->start_session(
        o.topic.empty() ? std::nullopt : std::optional<std::string>(o.topic), rng);
    out << system_line(opening.utterances()) << std::endl;
    bool trace = false;
    std::string line;
    while (std::getline(in, line)) {
      const auto text = std::string(trim(line));
      if (text == "/quit") break;
      if (text == "/trace") {
        trace = !trace;
        out << "(trace " << (trace ? "on" : "off") << ")" << std::endl;
        continue;
      }
      if (text.empty()) continue;
      if (o.echo) out << "User: " << text << '\n';
      const auto turn = app.engine->process_turn(state, text);
      out << system_line(turn.utterances()) << std::endl;
      if (trace) out << "  trace: " << trace_to_json(turn.trace).dump() << std::endl;
    }
    return kExitOk;
  });
}

// --- lint -----------------------------------------------------------------

struct LintOptions {
  std::string config;
  std::string declarations;
  std::string domain = "none";
  std::string relations;
  std::size_t max_depth = 6;
  std::vector<std::string> files;
};

int cmd_lint(const LintOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    ServiceConfig cfg;
    std::vector<fs::path> files(o.files.begin(), o.files.end());
    fs::path decls = o.declarations;
    std::string domain = o.domain;
    fs::path relations = o.relations;
    if (!o.config.empty()) {
      cfg = load_config(o.config);
      if (files.empty()) files = cfg.knowledge;
      if (decls.empty()) decls = cfg.declarations;
      domain = cfg.domain;
      if (relations.empty()) relations = cfg.relations;
    }
    if (decls.empty()) throw ConfigError("lint needs --declarations or --config");
    for (const auto& f : files) read_text(f);
    read_text(decls);

    std::shared_ptr<const KnowledgeBase> kb;
    try {
      kb = std::make_shared<KnowledgeBase>(load_knowledge(files, decls));
    } catch (const KnowledgeError& e) {
      Diagnostic d{Severity::kError, "load-error", e.what(), e.file(), e.element_path()};
      out << to_json_line(d) << '\n';
      return kExitContent;
    }
    FunctionRegistry registry = FunctionRegistry::with_builtins();
    if (domain == "minifood") {
      auto graph = std::make_shared<const minifood::FoodGraph>(
          relations.empty() ? minifood::FoodGraph{} : minifood::FoodGraph::load(relations));
      registry = minifood::make_registry(kb, graph);
    } else if (domain != "none") {
      throw ConfigError("unknown domain '" + domain + "'");
    }
    const auto diags = validate(*kb, registry, ValidateOptions{o.max_depth});
    for (const auto& d : diags) out << to_json_line(d) << '\n';
    return count_errors(diags) == 0 ? kExitOk : kExitContent;
  });
}

// --- train ----------------------------------------------------------------

struct TrainOptions {
  std::string data;
  std::string declarations;
  std::vector<std::string> knowledge;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t cap = 4;
  double holdout = 0.2;
  LinearClassifier::Params params;
  Thresholds thresholds;
};

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto examples = parse_training_jsonl(read_text(o.data));
    std::vector<fs::path> files(o.knowledge.begin(), o.knowledge.end());
    for (const auto& f : files) read_text(f);
    read_text(o.declarations);
    const KnowledgeBase kb = load_knowledge(files, o.declarations);
    if (examples.empty()) throw NluError("no training examples in " + o.data);

    TrainConfig tc;
    tc.params = o.params;
    tc.params.seed = o.seed;
    tc.thresholds = o.thresholds;
    tc.declarations = &kb.act_types;
    tc.dictionary = &kb.dictionary;

    const auto split = split_examples(examples, o.holdout, o.seed);
    auto train_set = split.train;
    const auto extra = augment_examples(split.train, kb.dictionary, o.cap);
    train_set.insert(train_set.end(), extra.begin(), extra.end());
    const auto held = train_nlu(train_set, tc);
    const auto m = evaluate(held.model, kb, split.heldout);

    out << "examples: " << examples.size() << " (train " << split.train.size()
        << ", augmented " << train_set.size() << ", held-out " << split.heldout.size()
        << ")\n";
    out << "held-out supertype accuracy: " << fixed3(m.supertype_accuracy) << '\n';
    out << "held-out type accuracy: " << fixed3(m.type_accuracy) << '\n';
    out << "held-out slot precision: " << fixed3(m.slot_precision)
        << " recall: " << fixed3(m.slot_recall) << " f1: " << fixed3(m.slot_f1) << '\n';

    auto all = examples;
    const auto all_extra = augment_examples(examples, kb.dictionary, o.cap);
    all.insert(all.end(), all_extra.begin(), all_extra.end());
    const auto final_model = train_nlu(all, tc);
    out << "training supertype accuracy: " << fixed3(final_model.report.supertype_accuracy)
        << '\n';
    out << "training type accuracy: " << fixed3(final_model.report.type_accuracy) << '\n';
    if (!o.out.empty()) {
      final_model.model.save(o.out);
      out << "model written to " << o.out << '\n';
    }
    return kExitOk;
  });
}

// --- replay ---------------------------------------------------------------

struct ReplayOptions {
  std::string config;
  std::string script;
  std::string golden;
  std::uint64_t seed = 1;
  bool stats = true;
};

int cmd_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    ReplayScript script;
    try {
      script = parse_replay_script(read_text(o.script));
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      err << o.script << ":" << e.what() << '\n';
      return kExitContent;
    }
    const std::string golden = o.golden.empty() ? std::string() : read_text(o.golden);
    const App app = load_app(load_config(o.config));
    if (!app.kb->find_topic(script.topic)) {
      err << o.script << ":1: unknown topic '" << script.topic << "'\n";
      return kExitContent;
    }
    std::mt19937_64 rng(o.seed);
    auto [state, opening] = app.engine->start_session(script.topic, rng);
    for (const auto& u : script.utterances) app.engine->process_turn(state, u);

    const auto transcript = render_transcript(state.history);
    out << transcript;
    if (o.stats) out << '\n' << render_frequency_table(frequency_table(state.history));
    if (!o.golden.empty()) {
      const auto diff = unified_diff(golden, transcript, o.golden, "replay");
      if (!diff.empty()) {
        out << diff;
        return kExitContent;
      }
    }
    return kExitOk;
  });
}

// --- csv2dict -------------------------------------------------------------

int cmd_csv2dict(const std::string& in_path, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto entries = parse_dictionary_csv(read_text(in_path));
    const auto xml = dictionary_to_xml(entries);
    if (out_path.empty()) {
      out << xml;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw IoError("cannot write " + out_path);
      f << xml;
    }
    return kExitOk;
  });
}

int cmd_serve(const std::string& config, std::ostream& err) {
  return guarded(err, [&]() -> int {
    auto cfg = load_config(config);
    apply_env_overrides(cfg);
    ChatService service(load_app(std::move(cfg)));
    return run_server(service, err);
  });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Closed-domain chat dialogue system toolkit", "exchat"};
  app.require_subcommand(1);

  ChatOptions chat;
  auto* chat_cmd = app.add_subcommand("chat", "Chat with the system on the console");
  chat_cmd->add_option("-c,--config", chat.config, "Service config file")->required();
  chat_cmd->add_option("-t,--topic", chat.topic, "Session topic (random when omitted)");
  chat_cmd->add_option("--seed", chat.seed, "Seed for topic choice");
  chat_cmd->add_flag("--echo", chat.echo, "Echo user lines");

  LintOptions lint;
  auto* lint_cmd = app.add_subcommand("lint", "Check dialogue knowledge files");
  lint_cmd->add_option("files", lint.files, "Knowledge files");
  lint_cmd->add_option("-c,--config", lint.config, "Take files and domain from a config");
  lint_cmd->add_option("-d,--declarations", lint.declarations, "Act type declarations");
  lint_cmd->add_option("--domain", lint.domain, "Domain functions: none or minifood");
  lint_cmd->add_option("--relations", lint.relations, "Food relations file");
  lint_cmd->add_option("--max-depth", lint.max_depth, "Longest acceptable network path");

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train the understanding models");
  train_cmd->add_option("data", train.data, "Training JSONL")->required();
  train_cmd->add_option("-d,--declarations", train.declarations, "Act type declarations")
      ->required();
  train_cmd->add_option("-k,--knowledge", train.knowledge, "Knowledge files (dictionary)");
  train_cmd->add_option("-o,--out", train.out, "Model output path");
  train_cmd->add_option("--seed", train.seed, "Seed for split and training");
  train_cmd->add_option("--cap", train.cap, "Augmented variants per example");
  train_cmd->add_option("--holdout", train.holdout, "Held-out fraction")
      ->check(CLI::Range(0.0, 0.9));
  train_cmd->add_option("--epochs", train.params.epochs, "Training epochs");
  train_cmd->add_option("--lr", train.params.learning_rate, "Learning rate");
  train_cmd->add_option("--l2", train.params.l2, "L2 weight");
  train_cmd->add_option("--theta-super", train.thresholds.supertype, "Supertype threshold");
  train_cmd->add_option("--theta-type", train.thresholds.type, "Type threshold");

  ReplayOptions replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a scripted session");
  replay_cmd->add_option("script", replay.script, "Replay script")->required();
  replay_cmd->add_option("-c,--config", replay.config, "Service config file")->required();
  replay_cmd->add_option("-g,--golden", replay.golden, "Expected transcript");
  replay_cmd->add_option("--seed", replay.seed, "Seed");
  bool no_stats = false;
  replay_cmd->add_flag("--no-stats", no_stats, "Omit the frequency table");

  std::string csv_in;
  std::string csv_out;
  auto* csv_cmd = app.add_subcommand("csv2dict", "Convert a CSV dictionary to XML");
  csv_cmd->add_option("csv", csv_in, "CSV file")->required();
  csv_cmd->add_option("-o,--out", csv_out, "Output XML file");

  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP chat service");
  serve_cmd->add_option("-c,--config", serve_config, "Service config file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  replay.stats = !no_stats;

  if (chat_cmd->parsed()) return cmd_chat(chat, in, out, err);
  if (lint_cmd->parsed()) return cmd_lint(lint, out, err);
  if (train_cmd->parsed()) return cmd_train(train, out, err);
  if (replay_cmd->parsed()) return cmd_replay(replay, out, err);
  if (csv_cmd->parsed()) return cmd_csv2dict(csv_in, csv_out, out, err);
  if (serve_cmd->parsed()) return cmd_serve(serve_config, err);
  return kExitUsage;
}

ReplayScript parse_replay_script(std::string_view text) {
  ReplayScript script;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  bool have_topic = false;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!have_topic) {
      constexpr std::string_view kPrefix = "topic:";
      if (t.substr(0, kPrefix.size()) != kPrefix || trim(t.substr(kPrefix.size())).empty()) {
        throw std::runtime_error(std::to_string(n) + ": expected 'topic: <name>'");
      }
      script.topic = std::string(trim(t.substr(kPrefix.size())));
      have_topic = true;
      continue;
    }
    script.utterances.emplace_back(t);
  }
  if (!have_topic) throw std::runtime_error("1: expected 'topic: <name>'");
  return script;
}

std::string render_transcript(const std::vector<Turn>& history) {
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) out += "User: " + history[i].user_text + "\n";
    out += system_line(history[i].utterances) + "\n";
  }
  return out;
}

std::string frequency_row(const Turn& turn) {
  const auto& tr = turn.trace;
  std::string row;
  if (tr.kind == KnowledgeKind::kInitial) {
    row = "initial";
  } else if (tr.kind == KnowledgeKind::kNetwork) {
    row = "network";
  } else {
    std::string kind(to_string(tr.kind));
    std::replace(kind.begin(), kind.end(), '-', ' ');
    if (tr.kind == KnowledgeKind::kNonResponse) kind = "non-response";
    row = "response (" + kind + ")";
  }
  if (tr.activation_chain.size() > 1) row += " -> network";
  return row;
}

FrequencyTable frequency_table(const std::vector<Turn>& history) {
  FrequencyTable t;
  for (const char* r : {"initial -> network", "response (response pair)",
                        "response (default response)", "response (example response)",
                        "response (related response)", "response (non-response) -> network",
                        "network"}) {
    t.rows.emplace_back(r, 0);
  }
  for (const auto& turn : history) {
    const auto row = frequency_row(turn);
    auto it = std::find_if(t.rows.begin(), t.rows.end(),
                           [&](const auto& r) { return r.first == row; });
    if (it == t.rows.end()) {
      t.rows.emplace_back(row, 1);
    } else {
      ++it->second;
    }
    ++t.total;
  }
  return t;
}

std::string render_frequency_table(const FrequencyTable& table) {
  std::ostringstream out;
  out << std::left << std::setw(40) << "expert (knowledge)" << "count\n";
  for (const auto& [row, n] : table.rows) out << std::setw(40) << row << n << '\n';
  out << std::setw(40) << "total" << table.total << '\n';
  return out.str();
}

std::string unified_diff(std::string_view a, std::string_view b, std::string_view a_name,
                         std::string_view b_name) {
  auto lines = [](std::string_view s) {
    std::vector<std::string> v;
    std::istringstream in{std::string(s)};
    std::string l;
    while (std::getline(in, l)) v.push_back(l);
    return v;
  };
  const auto x = lines(a);
  const auto y = lines(b);
  if (x == y) return {};

  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<std::vector<std::size_t>> lcs(n + 1, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1
                               : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  struct Op {
    char tag;  // ' ', '-', '+'
    std::size_t ai, bi;
  };
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) {
      ops.push_back({' ', i++, j++});
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', i++, j});
    } else {
      ops.push_back({'+', i, j++});
    }
  }

  constexpr std::size_t kContext = 3;
  std::ostringstream out;
  out << "--- " << a_name << "\n+++ " << b_name << "\n";
  std::size_t k = 0;
  while (k < ops.size()) {
    while (k < ops.size() && ops[k].tag == ' ') ++k;
    if (k == ops.size()) break;
    std::size_t begin = k >= kContext ? k - kContext : 0;
    std::size_t end = k;
    // Extend while changes are separated by at most 2 * context equal lines.
    while (end < ops.size()) {
      if (ops[end].tag != ' ') {
        ++end;
        continue;
      }
      std::size_t run = end;
      while (run < ops.size() && ops[run].tag == ' ') ++run;
      if (run == ops.size() || run - end > 2 * kContext) {
        end = std::min(ops.size(), end + kContext);
        break;
      }
      end = run;
    }
    std::size_t a_start = ops[begin].ai, b_start = ops[begin].bi, a_len = 0, b_len = 0;
    for (std::size_t q = begin; q < end; ++q) {
      if (ops[q].tag != '+') ++a_len;
      if (ops[q].tag != '-') ++b_len;
    }
    out << "@@ -" << (a_len ? a_start + 1 : a_start) << "," << a_len << " +"
        << (b_len ? b_start + 1 : b_start) << "," << b_len << " @@\n";
    for (std::size_t q = begin; q < end; ++q) {
      const auto& op = ops[q];
      out << op.tag << (op.tag == '+' ? y[op.bi] : x[op.ai]) << '\n';
    }
    k = end;
  }
  return out.str();
}

}  // namespace exchat
