// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Command implementations for the qkdlab binary. Kept in a header so the
// test suite can drive the commands in-process.
//
// Exit codes: 0 ok, 1 runtime error, 2 detection triggered (run),
// 3 trace mismatch (verify-trace), 64 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkdlab/qkdlab.hpp"

namespace qkdlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDetected = 2;
inline constexpr int kExitMismatch = 3;
inline constexpr int kExitUsage = 64;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliConfig {
  std::string subcommand;
  std::string dims = "3";
  std::optional<int> rounds;
  std::optional<std::string> key;
  std::optional<std::uint64_t> key_seed;
  std::string attack = "none";
  std::string intercept_rounds = "1";
  std::string mode = "exact";
  std::string announce = "none";
  std::optional<std::string> trace;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 1000;
  std::optional<std::string> out;
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

inline int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + ": '" + text + "'");
  }
}

inline std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (const auto& p : split_commas(text)) out.push_back(parse_int(p, what));
  return out;
}

inline std::uint64_t effective_seed(const CliConfig& cfg) {
  if (cfg.seed) return *cfg.seed;
  if (const char* env = std::getenv("QKDLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("QKDLAB_SEED is not an integer: '") + env + "'");
    }
  }
  return 0;
}

inline AttackKind parse_attack(const std::string& name) {
  if (name == "none") return AttackKind::none;
  if (name == "intercept") return AttackKind::intercept_resend;
  if (name == "ancilla") return AttackKind::ancilla;
  throw UsageError("unknown attack '" + name + "' (expected none, intercept or ancilla)");
}

inline ArithmeticMode parse_mode(const std::string& name, int d) {
  if (name == "float") return ArithmeticMode::floating;
  if (name != "exact") throw UsageError("unknown mode '" + name + "' (expected exact or float)");
  if (!is_prime(d)) throw UsageError("exact mode requires prime d, got " + std::to_string(d));
  return ArithmeticMode::exact;
}

inline int parse_dim(const std::string& text) {
  const int d = parse_int(text, "--d");
  if (d < 2) throw UsageError("--d must be >= 2");
  return d;
}

inline std::set<int> parse_intercept_rounds(const std::string& text) {
  std::set<int> rounds;
  for (int r : parse_int_list(text, "--intercept-rounds")) {
    if (r < 1) throw UsageError("--intercept-rounds entries must be >= 1");
    rounds.insert(r);
  }
  return rounds;
}

/// "none", "odd", "even" or a comma list of 1-based indices.
inline std::vector<int> parse_announce(const std::string& text, int n) {
  std::vector<int> out;
  if (text == "none") return out;
  if (text == "odd" || text == "even") {
    for (int i = (text == "odd" ? 1 : 2); i <= n; i += 2) out.push_back(i);
    return out;
  }
  out = parse_int_list(text, "--announce");
  for (int i : out) {
    if (i < 1 || i > n) throw UsageError("--announce index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  }
  return out;
}

/// Key from --key, --key-seed, or the run seed, in that order.
inline std::vector<Dit> resolve_key(const CliConfig& cfg, int d, int& rounds, std::uint64_t seed) {
  if (cfg.key && cfg.key_seed) throw UsageError("--key and --key-seed are mutually exclusive");
  if (cfg.key) {
    std::vector<Dit> key = parse_int_list(*cfg.key, "--key");
    if (key.empty()) throw UsageError("--key is empty");
    for (Dit q : key) {
      if (q < 0 || q >= d) throw UsageError("--key dit " + std::to_string(q) + " outside 0.." + std::to_string(d - 1));
    }
    if (cfg.rounds && *cfg.rounds != static_cast<int>(key.size())) {
      throw UsageError("--key has " + std::to_string(key.size()) + " dits but --rounds is " + std::to_string(*cfg.rounds));
    }
    rounds = static_cast<int>(key.size());
    return key;
  }
  return random_key(d, rounds, cfg.key_seed ? *cfg.key_seed : seed);
}

inline std::string join(const std::vector<Dit>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw Error("failed writing '" + path + "'");
}

template <Amplitude A>
int run_session_command(const CliConfig& cfg, ProtocolConfig pc, AdversaryStrategy strategy, std::ostream& out) {
  auto session = run_session<A>(pc, std::move(strategy));
  announce_subsequence(session, parse_announce(cfg.announce, pc.num_rounds));
  const auto metrics = compute_metrics(session, pc.key);
  const auto knowledge = eve_knowledge(session);
  const auto inference = infer_keys(knowledge, session.announced);
  if (cfg.trace) write_file(*cfg.trace, transcript_to_json(session).dump(2) + "\n");

  std::vector<Dit> observations;
  for (const auto& r : session.rounds) {
    if (r.eve_observation) observations.push_back(*r.eve_observation);
  }
  if (cfg.format.value_or("text") == "json") {
    Json j;
    j["d"] = pc.dim;
    j["rounds"] = pc.num_rounds;
    j["attack"] = attack_name(session.attack);
    j["mode"] = mode_name(pc.mode);
    j["seed"] = pc.rng_seed;
    j["key"] = pc.key;
    j["bob_outcomes"] = session.bob_outcomes();
    j["qber"] = to_string(metrics.qber_overall);
    j["eve_observations"] = observations;
    j["detection_triggered"] = metrics.detection_triggered;
    j["eve_known_fraction"] = to_string(metrics.eve_known_fraction);
    j["eve_candidate_count"] = metrics.eve_candidate_count;
    j["eve"] = inference_to_json(knowledge, inference);
    out << j.dump(2) << "\n";
  } else {
    out << "d=" << pc.dim << " rounds=" << pc.num_rounds << " attack=" << attack_name(session.attack)
        << " mode=" << mode_name(pc.mode) << " seed=" << pc.rng_seed << "\n";
    out << "key:                " << join(pc.key) << "\n";
    out << "bob outcomes:       " << join(session.bob_outcomes()) << "\n";
    out << "qber:               " << metrics.qber_overall << " (" << std::setprecision(6) << metrics.qber_overall.get_d() << ")\n";
    out << "eve observations:   [" << join(observations) << "]\n";
    std::vector<Dit> announced_rounds;
    for (const auto& [m, q] : session.announced) announced_rounds.push_back(m);
    out << "announced rounds:   [" << join(announced_rounds) << "]\n";
    out << "detection:          " << (metrics.detection_triggered ? "triggered" : "none") << "\n";
    out << "eve q1 candidates:  " << metrics.eve_candidate_count << "\n";
    out << "eve known fraction: " << metrics.eve_known_fraction << "\n";
  }
  return metrics.detection_triggered ? kExitDetected : kExitOk;
}

template <Amplitude A>
int verify_command(int d, const std::vector<Dit>& key, std::uint64_t seed, std::ostream& out) {
  const auto checks = verify_attack_trace<A>(d, key, seed);
  std::size_t passed = 0;
  const StageCheck* first_failure = nullptr;
  out << "d=" << d << " key=" << join(key) << " mode=" << amplitude_traits<A>::mode_name << "\n";
  out << "round  stage        result\n";
  for (const auto& c : checks) {
    out << std::left << std::setw(7) << c.round << std::setw(13) << c.label << (c.passed ? "pass" : "FAIL") << "\n";
    if (c.passed) {
      ++passed;
    } else if (first_failure == nullptr) {
      first_failure = &c;
    }
  }
  out << passed << "/" << checks.size() << " stages match\n";
  if (first_failure != nullptr) {
    out << "first mismatch: round " << first_failure->round << " " << first_failure->label << ": "
        << first_failure->detail << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

}  // namespace detail

inline int cmd_run(const CliConfig& cfg, std::ostream& out) {
  using namespace detail;
  const int d = parse_dim(cfg.dims);
  const auto mode = parse_mode(cfg.mode, d);
  const std::string format = cfg.format.value_or("text");
  if (format != "json" && format != "text") throw UsageError("run supports --format json or text");
  const std::uint64_t seed = effective_seed(cfg);
  int rounds = cfg.rounds.value_or(5);
  if (rounds < 1) throw UsageError("--rounds must be >= 1");
  ProtocolConfig pc;
  pc.dim = d;
  pc.key = resolve_key(cfg, d, rounds, seed);
  pc.num_rounds = rounds;
  pc.mode = mode;
  pc.rng_seed = seed;
  const auto strategy = make_strategy(parse_attack(cfg.attack), parse_intercept_rounds(cfg.intercept_rounds));
  if (mode == ArithmeticMode::exact) return run_session_command<CycloElem>(cfg, pc, strategy, out);
  return run_session_command<ComplexF>(cfg, pc, strategy, out);
}

inline int cmd_verify_trace(const CliConfig& cfg, std::ostream& out) {
  using namespace detail;
  const int d = parse_dim(cfg.dims);
  if (!is_prime(d)) throw UsageError("verify-trace requires prime d, got " + std::to_string(d));
  const auto mode = parse_mode(cfg.mode, d);
  const std::uint64_t seed = effective_seed(cfg);
  int rounds = cfg.rounds.value_or(5);
  const auto key = resolve_key(cfg, d, rounds, seed);
  if (key.size() < 5) throw UsageError("verify-trace needs a key of at least 5 dits");
  if (mode == ArithmeticMode::exact) return verify_command<CycloElem>(d, key, seed, out);
  return verify_command<ComplexF>(d, key, seed, out);
}

inline int cmd_experiment(const CliConfig& cfg, std::ostream& out) {
  using namespace detail;
  const std::string format = cfg.format.value_or("json");
  if (format != "json" && format != "csv") throw UsageError("experiment supports --format json or csv");
  if (cfg.key || cfg.key_seed) throw UsageError("experiment draws a fresh key per trial; --key/--key-seed not accepted");
  if (cfg.trials < 1) throw UsageError("--trials must be >= 1");
  const std::uint64_t seed = effective_seed(cfg);
  const auto intercept_rounds = parse_intercept_rounds(cfg.intercept_rounds);
  ExperimentReport report;
  for (const auto& attack_text : split_commas(cfg.attack)) {
    const AttackKind attack = parse_attack(attack_text);
    for (const auto& d_text : split_commas(cfg.dims)) {
      ExperimentConfig ec;
      ec.dim = parse_dim(d_text);
      ec.mode = parse_mode(cfg.mode, ec.dim);
      ec.attack = attack;
      ec.intercept_rounds = intercept_rounds;
      ec.num_rounds = cfg.rounds.value_or(attack == AttackKind::intercept_resend ? *intercept_rounds.rbegin() + 1 : 5);
      if (ec.num_rounds < 1) throw UsageError("--rounds must be >= 1");
      ec.trials = cfg.trials;
      ec.seed = seed;
      ec.announce = parse_announce(cfg.announce, ec.num_rounds);
      report.rows.push_back(monte_carlo(ec));
    }
  }
  const std::string text = format == "csv" ? report_to_csv(report) : report_to_json(report).dump(2) + "\n";
  if (cfg.out) {
    write_file(*cfg.out, text);
    for (const auto& row : report.rows) {
      out << attack_name(row.attack) << " d=" << row.dim << " trials=" << row.trials << " qber=" << row.qber.mean;
      if (row.next_round) {
        const auto& r = row.error_by_round[static_cast<std::size_t>(*row.next_round - 1)];
        out << " round" << *row.next_round << "_error=" << r.mean;
        if (r.exact) out << " exact=" << *r.exact;
      }
      out << "\n";
    }
  } else {
    out << text;
  }
  return kExitOk;
}

/// Parses argv-style arguments (without the program name) and dispatches.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"qkdlab: entanglement-reuse QKD simulator with adversarial channels"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--d", cfg.dims, "Qudit dimension (experiment: comma list)");
    sub->add_option("--rounds", cfg.rounds, "Number of rounds");
    sub->add_option("--key", cfg.key, "Key dits, comma separated");
    sub->add_option("--key-seed", cfg.key_seed, "Seed for a random key");
    sub->add_option("--attack", cfg.attack, "none | intercept | ancilla (experiment: comma list)");
    sub->add_option("--intercept-rounds", cfg.intercept_rounds, "Rounds attacked by intercept-resend");
    sub->add_option("--mode", cfg.mode, "exact | float");
    sub->add_option("--announce", cfg.announce, "none | odd | even | comma list of rounds");
    sub->add_option("--seed", cfg.seed, "Measurement seed (default: $QKDLAB_SEED or 0)");
  };
  auto* run = app.add_subcommand("run", "Run one session and print its metrics");
  add_common(run);
  run->add_option("--trace", cfg.trace, "Write the stage-labeled transcript JSON here");
  run->add_option("--format", cfg.format, "Summary format: text (default) | json");
  auto* verify = app.add_subcommand("verify-trace", "Check a five-round attack trace against closed forms");
  add_common(verify);
  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo and exact error statistics");
  add_common(experiment);
  experiment->add_option("--trials", cfg.trials, "Trials per strategy and dimension");
  experiment->add_option("--format", cfg.format, "json | csv");
  experiment->add_option("--out", cfg.out, "Write the report here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(cfg, out);
    if (verify->parsed()) return cmd_verify_trace(cfg, out);
    return cmd_experiment(cfg, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace qkdlab::cli
