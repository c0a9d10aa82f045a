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

// The honest session: Alice and Bob reuse one shared Bell pair to carry one
// dit per round. A round is
//   1. Alice applies H to a, Bob applies H* to b (adversary mirrors here);
//   2. Alice adjoins k = |q> and applies a controlled-right shift a -> k;
//   3. k travels through the channel (adversary transit hook);
//   4. Bob applies a controlled-left shift b -> k, measures k, discards it.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/error.hpp"
#include "qkdlab/random.hpp"
#include "qkdlab/register.hpp"

namespace qkdlab {

enum class ArithmeticMode { exact, floating };

inline std::string_view mode_name(ArithmeticMode m) { return m == ArithmeticMode::exact ? "exact" : "float"; }

template <Amplitude A>
constexpr ArithmeticMode mode_of() {
  return amplitude_traits<A>::exact ? ArithmeticMode::exact : ArithmeticMode::floating;
}

struct ProtocolConfig {
  int dim = 3;
  int num_rounds = 1;
  std::vector<Dit> key;
  ArithmeticMode mode = ArithmeticMode::exact;
  std::uint64_t rng_seed = 0;
  /// Keep per-stage state snapshots in the transcript.
  bool record_stages = true;
  /// Announced dits are removed from the usable key.
  bool discard_announced = true;

  void validate() const {
    require_dimension(dim);
    if (num_rounds < 1) throw ConfigError("num_rounds must be >= 1");
    if (key.size() != static_cast<std::size_t>(num_rounds)) {
      throw ConfigError("key length " + std::to_string(key.size()) + " != num_rounds " + std::to_string(num_rounds));
    }
    for (Dit q : key) {
      if (q < 0 || q >= dim) throw InvalidDimension("key dit " + std::to_string(q) + " outside 0.." + std::to_string(dim - 1));
    }
  }
};

/// n uniformly random dits drawn from a stream seeded with `seed`.
inline std::vector<Dit> random_key(int d, int n, std::uint64_t seed) {
  require_dimension(d);
  RandomStream stream(seed);
  std::vector<Dit> key;
  key.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) key.push_back(static_cast<Dit>(stream.uniform_below(static_cast<std::uint64_t>(d))));
  return key;
}

template <Amplitude A>
struct Stage {
  std::string label;
  PureState<A> state;
};

template <Amplitude A>
struct RoundTranscript {
  int round_index = 0;
  std::vector<Stage<A>> stages;
  Dit bob_outcome = 0;
  std::optional<Dit> eve_observation;
  /// Probability of the measurement outcomes taken in this round.
  typename amplitude_traits<A>::probability_type branch_probability{1};

  const Stage<A>* find_stage(std::string_view label) const {
    for (const auto& s : stages) {
      if (s.label == label) return &s;
    }
    return nullptr;
  }
};

template <Amplitude A>
struct SessionTranscript {
  ProtocolConfig config;
  AttackKind attack = AttackKind::none;
  std::set<int> intercept_rounds;
  std::vector<RoundTranscript<A>> rounds;
  std::optional<PureState<A>> final_shared_state;
  std::vector<std::pair<int, Dit>> announced;
  bool detection_triggered = false;
  typename amplitude_traits<A>::probability_type path_probability{1};

  std::vector<Dit> bob_outcomes() const {
    std::vector<Dit> out;
    for (const auto& r : rounds) out.push_back(r.bob_outcome);
    return out;
  }

  bool is_announced(int round) const {
    for (const auto& [m, q] : announced) {
      if (m == round) return true;
    }
    return false;
  }
};

template <Amplitude A>
struct RoundResult {
  PureState<A> state;
  RoundTranscript<A> transcript;
};

inline std::string psi_label(int round, int phase) { return "psi_" + std::to_string(round) + std::to_string(phase); }

/// Runs one round on the shared state (wires a, b and any adversary wires).
template <Amplitude A>
RoundResult<A> run_round(const PureState<A>& state, int round_index, Dit q, AdversaryStrategy& adversary,
                         OutcomePicker& picker, bool record_stages = true) {
  const int d = state.dim();
  if (q < 0 || q >= d) throw InvalidDimension("key dit " + std::to_string(q) + " outside 0.." + std::to_string(d - 1));
  if (!state.has_wire(wires::alice) || !state.has_wire(wires::bob)) {
    throw WireError("shared state must hold wires a and b");
  }
  if (state.has_wire(wires::key)) throw WireError("stale transit wire k in shared state");

  RoundTranscript<A> tr;
  tr.round_index = round_index;
  const auto family = std::visit([&](const auto& a) { return a.stage_family(round_index); }, adversary);
  int stage_index = 0;
  auto record = [&](std::string generic, const PureState<A>& st) {
    if (!record_stages) return;
    std::string label = family ? *family + "_" + std::to_string(stage_index) : std::move(generic);
    tr.stages.push_back({std::move(label), st});
    ++stage_index;
  };

  // 1. Basis change.
  auto st = apply_hadamard(state, wires::alice, false);
  st = apply_hadamard(st, wires::bob, true);
  st = std::visit([&](auto& a) { return a.template on_basis_change<A>(std::move(st), round_index); }, adversary);
  if (record_stages) tr.stages.push_back({psi_label(round_index, 0), st});

  // 2. Encoding, with k displayed between b and the adversary wires.
  std::vector<Wire> order{wires::alice, wires::bob, wires::key};
  for (const auto& w : st.wires()) {
    if (w != wires::alice && w != wires::bob) order.push_back(w);
  }
  st = permute_wires(tensor(st, basis_state<A>(d, {{wires::key, q}})), order);
  record("pre_encode", st);
  st = apply_controlled_shift(st, wires::alice, wires::key, ShiftDirection::right);
  record("post_encode", st);

  // 3. Channel.
  auto transit = std::visit([&](auto& a) { return a.template on_transit<A>(st, round_index, picker); }, adversary);
  if (!transit.state.has_wire(wires::key)) {
    throw ProtocolViolation("adversary removed the transit qudit in round " + std::to_string(round_index));
  }
  if (transit.snapshots.empty()) {
    if (!family) record("in_transit", transit.state);
  } else {
    for (const auto& snap : transit.snapshots) record("in_transit", snap);
  }
  tr.eve_observation = transit.observation;
  st = transit.state;
  // 4. Decoding.
  st = apply_controlled_shift(st, wires::bob, wires::key, ShiftDirection::left);
  record("post_decode", st);
  auto m = measure_computational(st, wires::key, picker);
  tr.bob_outcome = m.outcome;
  tr.branch_probability = transit.probability * m.probability;
  auto next = remove_wire(m.collapsed, wires::key);
  if (record_stages) tr.stages.push_back({psi_label(round_index, 1), next});
  return {std::move(next), std::move(tr)};
}

/// Folds run_round over every round, starting from the Bell pair (plus any
/// adversary ancilla). Measurements are resolved by `picker`.
template <Amplitude A>
SessionTranscript<A> run_session(const ProtocolConfig& config, AdversaryStrategy adversary, OutcomePicker& picker) {
  config.validate();
  if (config.mode != mode_of<A>()) throw ConfigError("config arithmetic mode does not match amplitude backend");
  SessionTranscript<A> session;
  session.config = config;
  session.attack = attack_kind(adversary);
  if (const auto* ir = std::get_if<InterceptResend>(&adversary)) session.intercept_rounds = ir->attack_rounds();

  auto state = std::visit([&](const auto& a) { return a.template prepare<A>(bell_state<A>(config.dim)); }, adversary);
  for (int r = 1; r <= config.num_rounds; ++r) {
    auto result = run_round(state, r, config.key[static_cast<std::size_t>(r - 1)], adversary, picker,
                            config.record_stages);
    session.path_probability *= result.transcript.branch_probability;
    state = std::move(result.state);
    session.rounds.push_back(std::move(result.transcript));
  }
  session.final_shared_state = std::move(state);
  return session;
}

/// Same, with measurements sampled from a stream seeded by config.rng_seed.
template <Amplitude A>
SessionTranscript<A> run_session(const ProtocolConfig& config, AdversaryStrategy adversary) {
  RandomStream stream(config.rng_seed);
  return run_session<A>(config, std::move(adversary), stream);
}

/// Publishes Alice's dits at `indices` (1-based). Detection triggers when an
/// announced dit differs from Bob's outcome.
template <Amplitude A>
std::vector<std::pair<int, Dit>> announce_subsequence(SessionTranscript<A>& session, const std::vector<int>& indices) {
  const int n = static_cast<int>(session.rounds.size());
  for (int i : indices) {
    if (i < 1 || i > n) throw ConfigError("announce index " + std::to_string(i) + " outside 1.." + std::to_string(n));
  }
  std::vector<std::pair<int, Dit>> out;
  for (int i : indices) {
    const Dit alice = session.config.key[static_cast<std::size_t>(i - 1)];
    out.emplace_back(i, alice);
    if (session.is_announced(i)) continue;
    session.announced.emplace_back(i, alice);
    if (session.rounds[static_cast<std::size_t>(i - 1)].bob_outcome != alice) session.detection_triggered = true;
  }
  return out;
}

/// What Eve holds after the session: her odd-round readings of the
/// entangled-ancilla attack (empty for other strategies).
template <Amplitude A>
EveKnowledge eve_knowledge(const SessionTranscript<A>& session) {
  std::vector<EveObservation> obs;
  if (session.attack == AttackKind::ancilla) {
    for (const auto& r : session.rounds) {
      if (r.eve_observation) obs.push_back(make_observation(r.round_index, *r.eve_observation));
    }
  }
  return make_knowledge(session.config.dim, std::move(obs));
}

template <Amplitude A>
InferenceResult infer_from_session(const SessionTranscript<A>& session) {
  return infer_keys(eve_knowledge(session), session.announced);
}

}  // namespace qkdlab
