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

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/protocol.hpp"
#include "qkdlab/random.hpp"
#include "qkdlab/serialize.hpp"

namespace qkdlab {

// Exact enumeration is capped at this size (state dimension d^4 per stage).
inline constexpr int kMaxEnumerationDim = 7;
inline constexpr int kMaxEnumerationRounds = 6;

struct SessionMetrics {
  Rational qber_overall{0};
  std::vector<Rational> qber_by_round;
  bool detection_triggered = false;
  Rational eve_known_fraction{0};
  int eve_candidate_count = 0;
};

/// QBER counts only non-announced rounds when announced dits are discarded.
template <Amplitude A>
SessionMetrics compute_metrics(const SessionTranscript<A>& session, const std::vector<Dit>& true_key) {
  if (true_key.size() != session.rounds.size()) {
    throw ConfigError("true key length " + std::to_string(true_key.size()) + " != rounds " +
                      std::to_string(session.rounds.size()));
  }
  SessionMetrics m;
  long errors = 0, counted = 0;
  for (std::size_t i = 0; i < session.rounds.size(); ++i) {
    const bool wrong = session.rounds[i].bob_outcome != true_key[i];
    m.qber_by_round.emplace_back(wrong ? 1 : 0);
    if (session.config.discard_announced && session.is_announced(static_cast<int>(i + 1))) continue;
    ++counted;
    errors += wrong ? 1 : 0;
  }
  if (counted > 0) m.qber_overall = Rational(errors, counted);
  m.qber_overall.canonicalize();
  m.detection_triggered = session.detection_triggered;
  const auto inference = infer_from_session(session);
  m.eve_known_fraction = Rational(static_cast<long>(inference.known_dits.size()), static_cast<long>(session.rounds.size()));
  m.eve_known_fraction.canonicalize();
  m.eve_candidate_count = static_cast<int>(inference.q1_candidates.size());
  return m;
}

// ---------------------------------------------------------------------------
// Exact branch enumeration

/// Replays a session once per measurement-outcome path, depth first. The
/// path of choices is an odometer; the fan-out at each depth is learned on
/// the first visit.
class BranchEnumerator final : public OutcomePicker {
 public:
  void begin_run() { depth_ = 0; }

  std::size_t pick(std::span<const double> weights) override {
    if (depth_ < path_.size()) {
      fanout_[depth_] = weights.size();
      return path_[depth_++];
    }
    path_.push_back(0);
    fanout_.push_back(weights.size());
    ++depth_;
    return 0;
  }

  /// Moves to the next unexplored path; false when all are done.
  bool advance() {
    path_.resize(depth_);
    fanout_.resize(depth_);
    while (!path_.empty()) {
      if (path_.back() + 1 < fanout_.back()) {
        ++path_.back();
        return true;
      }
      path_.pop_back();
      fanout_.pop_back();
    }
    return false;
  }

 private:
  std::vector<std::size_t> path_;
  std::vector<std::size_t> fanout_;
  std::size_t depth_ = 0;
};

struct SessionBranch {
  Rational probability;
  std::vector<Dit> bob_outcomes;
  std::vector<std::optional<Dit>> eve_observations;
};

/// Every measurement branch of an exact session with its probability.
inline std::vector<SessionBranch> enumerate_branches(ProtocolConfig config, const AdversaryStrategy& adversary) {
  config.mode = ArithmeticMode::exact;
  config.record_stages = false;
  config.validate();
  if (!is_prime(config.dim)) throw ConfigError("exact enumeration requires prime d");
  if (config.dim > kMaxEnumerationDim || config.num_rounds > kMaxEnumerationRounds) {
    throw ConfigError("exact enumeration is capped at d <= 7 and 6 rounds");
  }
  std::vector<SessionBranch> out;
  BranchEnumerator enumerator;
  do {
    enumerator.begin_run();
    const auto session = run_session<CycloElem>(config, adversary, enumerator);
    SessionBranch b{session.path_probability, session.bob_outcomes(), {}};
    for (const auto& r : session.rounds) b.eve_observations.push_back(r.eve_observation);
    out.push_back(std::move(b));
  } while (enumerator.advance());
  return out;
}

/// Exact probability that Bob decodes round `round` incorrectly.
inline Rational exact_round_error(const ProtocolConfig& config, const AdversaryStrategy& adversary, int round) {
  if (round < 1 || round > config.num_rounds) throw ConfigError("round outside the session");
  Rational p(0);
  for (const auto& b : enumerate_branches(config, adversary)) {
    if (b.bob_outcomes[static_cast<std::size_t>(round - 1)] != config.key[static_cast<std::size_t>(round - 1)]) {
      p += b.probability;
    }
  }
  p.canonicalize();
  return p;
}

namespace detail {

inline std::vector<Dit> reference_key(int d, int n) {
  std::vector<Dit> key;
  for (int i = 1; i <= n; ++i) key.push_back(static_cast<Dit>((i * 2 + 1) % d));
  return key;
}

}  // namespace detail

/// Error probability of round attack_round + 1 after an intercept-resend
/// attack on round attack_round of an otherwise honest session.
inline Rational exact_next_round_error(int d, int attack_round, std::optional<std::vector<Dit>> key = std::nullopt) {
  require_dimension(d);
  if (attack_round < 1) throw ConfigError("attack round must be >= 1");
  ProtocolConfig cfg;
  cfg.dim = d;
  cfg.num_rounds = attack_round + 1;
  cfg.key = key ? *key : detail::reference_key(d, cfg.num_rounds);
  return exact_round_error(cfg, InterceptResend({attack_round}), attack_round + 1);
}

/// Exact distribution of the intercept-resend observation at `attack_round`.
inline std::map<Dit, Rational> intercept_observation_distribution(int d, int attack_round, const std::vector<Dit>& key) {
  ProtocolConfig cfg;
  cfg.dim = d;
  cfg.num_rounds = attack_round;
  cfg.key = key;
  std::map<Dit, Rational> dist;
  for (Dit v = 0; v < d; ++v) dist[v] = 0;
  for (const auto& b : enumerate_branches(cfg, InterceptResend({attack_round}))) {
    const auto& obs = b.eve_observations.at(static_cast<std::size_t>(attack_round - 1));
    if (!obs) throw InvariantViolation("attacked round produced no observation");
    dist[*obs] += b.probability;
  }
  for (auto& [v, p] : dist) p.canonicalize();
  return dist;
}

inline Rational total_variation(const std::map<Dit, Rational>& p, const std::map<Dit, Rational>& q) {
  std::set<Dit> keys;
  for (const auto& kv : p) keys.insert(kv.first);
  for (const auto& kv : q) keys.insert(kv.first);
  Rational sum(0);
  for (Dit k : keys) {
    const Rational a = p.contains(k) ? p.at(k) : Rational(0);
    const Rational b = q.contains(k) ? q.at(k) : Rational(0);
    sum += abs(Rational(a - b));
  }
  Rational out = sum / 2;
  out.canonicalize();
  return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo

struct ExperimentConfig {
  int dim = 3;
  int num_rounds = 2;
  AttackKind attack = AttackKind::none;
  std::set<int> intercept_rounds{1};
  ArithmeticMode mode = ArithmeticMode::exact;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  /// Announced indices (1-based) in every trial.
  std::vector<int> announce;
  bool discard_announced = true;
};

struct RateEstimate {
  std::size_t events = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  /// Binomial standard error sqrt(p (1 - p) / n) at the observed mean.
  double sigma = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<Rational> exact;

  static RateEstimate from_counts(std::size_t events, std::size_t samples) {
    RateEstimate r;
    r.events = events;
    r.samples = samples;
    if (samples > 0) {
      r.mean = static_cast<double>(events) / static_cast<double>(samples);
      r.sigma = std::sqrt(r.mean * (1.0 - r.mean) / static_cast<double>(samples));
    }
    r.lo = std::max(0.0, r.mean - 3.0 * r.sigma);
    r.hi = std::min(1.0, r.mean + 3.0 * r.sigma);
    return r;
  }

  /// |mean - exact| <= 3 sigma, sigma taken at the exact rate.
  bool within_3_sigma() const {
    if (!exact || samples == 0) return false;
    const double p = exact->get_d();
    const double s = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return std::abs(mean - p) <= 3.0 * s;
  }
};

struct StrategyReport {
  AttackKind attack = AttackKind::none;
  int dim = 0;
  int num_rounds = 0;
  std::size_t trials = 0;
  ArithmeticMode mode = ArithmeticMode::exact;
  std::uint64_t seed = 0;
  std::set<int> intercept_rounds;
  RateEstimate qber;
  std::vector<RateEstimate> error_by_round;
  std::size_t zero_qber_trials = 0;
  RateEstimate detection;
  double mean_known_fraction = 0.0;
  /// Round after the first intercepted one, when intercepting.
  std::optional<int> next_round;
};

struct ExperimentReport {
  std::vector<StrategyReport> rows;
};

inline AdversaryStrategy make_strategy(AttackKind kind, const std::set<int>& intercept_rounds) {
  switch (kind) {
    case AttackKind::intercept_resend: return InterceptResend(intercept_rounds);
    case AttackKind::ancilla: return AncillaAttack{};
    case AttackKind::none: break;
  }
  return NoAdversary{};
}

namespace detail {

template <Amplitude A>
void run_trials(const ExperimentConfig& cfg, StrategyReport& report) {
  const RandomStream root(cfg.seed);
  std::size_t qber_events = 0, qber_samples = 0, detections = 0;
  std::vector<std::size_t> round_errors(static_cast<std::size_t>(cfg.num_rounds), 0);
  double known_sum = 0.0;
  std::vector<int> announce;
  for (int i : cfg.announce) {
    if (i >= 1 && i <= cfg.num_rounds) announce.push_back(i);
  }
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const RandomStream trial = root.split(t);
    ProtocolConfig pc;
    pc.dim = cfg.dim;
    pc.num_rounds = cfg.num_rounds;
    pc.key = random_key(cfg.dim, cfg.num_rounds, trial.split(0).seed());
    pc.mode = mode_of<A>();
    pc.rng_seed = trial.split(1).seed();
    pc.record_stages = false;
    pc.discard_announced = cfg.discard_announced;
    auto session = run_session<A>(pc, make_strategy(cfg.attack, cfg.intercept_rounds));
    announce_subsequence(session, announce);
    const auto m = compute_metrics(session, pc.key);
    for (int r = 0; r < cfg.num_rounds; ++r) {
      const bool wrong = session.rounds[static_cast<std::size_t>(r)].bob_outcome != pc.key[static_cast<std::size_t>(r)];
      round_errors[static_cast<std::size_t>(r)] += wrong ? 1 : 0;
      if (cfg.discard_announced && session.is_announced(r + 1)) continue;
      ++qber_samples;
      qber_events += wrong ? 1 : 0;
    }
    if (sgn(m.qber_overall) == 0) ++report.zero_qber_trials;
    if (m.detection_triggered) ++detections;
    known_sum += m.eve_known_fraction.get_d();
  }
  report.qber = RateEstimate::from_counts(qber_events, qber_samples);
  for (auto e : round_errors) report.error_by_round.push_back(RateEstimate::from_counts(e, cfg.trials));
  report.detection = RateEstimate::from_counts(detections, cfg.trials);
  report.mean_known_fraction = known_sum / static_cast<double>(cfg.trials);
}

}  // namespace detail

/// Independent seeded sessions: trial t uses RandomStream(seed).split(t),
/// whose split(0) seeds the key and split(1) the measurements. Per-round
/// exact error rates are attached when exact enumeration is within bounds.
inline StrategyReport monte_carlo(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  require_dimension(cfg.dim);
  if (cfg.mode == ArithmeticMode::exact && !is_prime(cfg.dim)) throw ConfigError("exact mode requires prime d");
  StrategyReport report;
  report.attack = cfg.attack;
  report.dim = cfg.dim;
  report.num_rounds = cfg.num_rounds;
  report.trials = cfg.trials;
  report.mode = cfg.mode;
  report.seed = cfg.seed;
  if (cfg.attack == AttackKind::intercept_resend) report.intercept_rounds = cfg.intercept_rounds;
  if (cfg.mode == ArithmeticMode::exact) {
    detail::run_trials<CycloElem>(cfg, report);
  } else {
    detail::run_trials<ComplexF>(cfg, report);
  }

  if (is_prime(cfg.dim) && cfg.dim <= kMaxEnumerationDim && cfg.num_rounds <= kMaxEnumerationRounds) {
    ProtocolConfig pc;
    pc.dim = cfg.dim;
    pc.num_rounds = cfg.num_rounds;
    pc.key = detail::reference_key(cfg.dim, cfg.num_rounds);
    const auto strategy = make_strategy(cfg.attack, cfg.intercept_rounds);
    const auto branches = enumerate_branches(pc, strategy);
    for (int r = 1; r <= cfg.num_rounds; ++r) {
      Rational p(0);
      for (const auto& b : branches) {
        if (b.bob_outcomes[static_cast<std::size_t>(r - 1)] != pc.key[static_cast<std::size_t>(r - 1)]) p += b.probability;
      }
      p.canonicalize();
      report.error_by_round[static_cast<std::size_t>(r - 1)].exact = p;
    }
  }
  if (cfg.attack == AttackKind::intercept_resend && !cfg.intercept_rounds.empty()) {
    const int next = *cfg.intercept_rounds.begin() + 1;
    if (next <= cfg.num_rounds) report.next_round = next;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report output

inline Json rate_to_json(const RateEstimate& r) {
  Json j;
  j["events"] = r.events;
  j["samples"] = r.samples;
  j["mean"] = r.mean;
  j["sigma"] = r.sigma;
  j["lo"] = r.lo;
  j["hi"] = r.hi;
  j["exact"] = r.exact ? Json(to_string(*r.exact)) : Json(nullptr);
  if (r.exact) j["within_3_sigma"] = r.within_3_sigma();
  return j;
}

inline Json report_to_json(const ExperimentReport& report) {
  Json rows = Json::array();
  for (const auto& s : report.rows) {
    Json j;
    j["strategy"] = attack_name(s.attack);
    j["d"] = s.dim;
    j["rounds"] = s.num_rounds;
    j["trials"] = s.trials;
    j["mode"] = mode_name(s.mode);
    j["seed"] = s.seed;
    j["intercept_rounds"] = std::vector<int>(s.intercept_rounds.begin(), s.intercept_rounds.end());
    j["qber"] = rate_to_json(s.qber);
    Json by_round = Json::array();
    for (const auto& r : s.error_by_round) by_round.push_back(rate_to_json(r));
    j["error_by_round"] = std::move(by_round);
    j["zero_qber_trials"] = s.zero_qber_trials;
    j["detection"] = rate_to_json(s.detection);
    j["eve_known_fraction_mean"] = s.mean_known_fraction;
    j["next_round"] = s.next_round ? Json(*s.next_round) : Json(nullptr);
    rows.push_back(std::move(j));
  }
  Json out;
  out["schema"] = kTranscriptSchema;
  out["rows"] = std::move(rows);
  return out;
}

inline const char* kReportCsvHeader =
    "strategy,d,rounds,trials,mode,seed,qber_mean,qber_sigma,qber_lo,qber_hi,zero_qber_trials,"
    "detection_rate,eve_known_fraction_mean,next_round,next_round_error_mc,next_round_error_sigma,"
    "next_round_error_exact";

inline std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os.precision(10);
  os << kReportCsvHeader << "\n";
  for (const auto& s : report.rows) {
    os << attack_name(s.attack) << "," << s.dim << "," << s.num_rounds << "," << s.trials << "," << mode_name(s.mode)
       << "," << s.seed << "," << s.qber.mean << "," << s.qber.sigma << "," << s.qber.lo << "," << s.qber.hi << ","
       << s.zero_qber_trials << "," << s.detection.mean << "," << s.mean_known_fraction << ",";
    if (s.next_round) {
      const auto& r = s.error_by_round.at(static_cast<std::size_t>(*s.next_round - 1));
      os << *s.next_round << "," << r.mean << "," << r.sigma << "," << (r.exact ? to_string(*r.exact) : "");
    } else {
      os << ",,,";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace qkdlab
