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

// Eavesdropping strategies plugged into the channel between Alice and Bob,
// and the key-inference engine for the entangled-ancilla attack.
//
// Each strategy exposes the same hooks, called by the round engine:
//   prepare(state)                         once, before round 1
//   on_basis_change(state, round)          right after Alice/Bob apply H (x) H*
//   on_transit(state, round, picker)       while wire k is in the channel
//   stage_family(round)                    naming of the round's stage snapshots

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qkdlab/error.hpp"
#include "qkdlab/random.hpp"
#include "qkdlab/register.hpp"

namespace qkdlab {

enum class AttackKind { none, intercept_resend, ancilla };

inline std::string_view attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::intercept_resend: return "intercept";
    case AttackKind::ancilla: return "ancilla";
  }
  return "none";
}

template <Amplitude A>
struct TransitOutcome {
  PureState<A> state;
  /// Intermediate states produced by the adversary, in order.
  std::vector<PureState<A>> snapshots;
  std::optional<Dit> observation;
  /// Probability of any measurement outcome the adversary took.
  typename amplitude_traits<A>::probability_type probability{1};
};

struct NoAdversary {
  static constexpr AttackKind kind = AttackKind::none;

  template <Amplitude A>
  PureState<A> prepare(PureState<A> st) const { return st; }

  template <Amplitude A>
  PureState<A> on_basis_change(PureState<A> st, int /*round*/) { return st; }

  template <Amplitude A>
  TransitOutcome<A> on_transit(PureState<A> st, int /*round*/, OutcomePicker& /*picker*/) {
    return {std::move(st), {}, std::nullopt};
  }

  std::optional<std::string> stage_family(int /*round*/) const { return std::nullopt; }
};

// ---------------------------------------------------------------------------
// Naive intercept-resend

/// Measures the transit qudit in the computational basis and forwards the
/// collapsed state. The observation is the measured value.
template <Amplitude A>
MeasurementResult<A> intercept_resend_on_transit(const PureState<A>& st, OutcomePicker& picker) {
  return measure_computational(st, wires::key, picker);
}

class InterceptResend {
 public:
  static constexpr AttackKind kind = AttackKind::intercept_resend;

  explicit InterceptResend(std::set<int> attack_rounds) : attack_rounds_(std::move(attack_rounds)) {
    for (int r : attack_rounds_) {
      if (r < 1) throw ConfigError("intercept round must be >= 1, got " + std::to_string(r));
    }
  }

  const std::set<int>& attack_rounds() const { return attack_rounds_; }
  bool attacks(int round) const { return attack_rounds_.contains(round); }

  template <Amplitude A>
  PureState<A> prepare(PureState<A> st) const { return st; }

  template <Amplitude A>
  PureState<A> on_basis_change(PureState<A> st, int /*round*/) { return st; }

  template <Amplitude A>
  TransitOutcome<A> on_transit(PureState<A> st, int round, OutcomePicker& picker) {
    if (!attacks(round)) return {std::move(st), {}, std::nullopt};
    auto m = intercept_resend_on_transit(st, picker);
    std::vector<PureState<A>> snaps{m.collapsed};
    return {std::move(m.collapsed), std::move(snaps), m.outcome, std::move(m.probability)};
  }

  std::optional<std::string> stage_family(int /*round*/) const { return std::nullopt; }

 private:
  std::set<int> attack_rounds_;
};

// ---------------------------------------------------------------------------
// Entangled-ancilla attack
//
// Round 1: Eve copies the transit value into her ancilla |0>_e with a
// controlled-right shift (control k, target e). Every later round she applies
// H to e alongside Alice's H and Bob's H*. In even rounds she adds her
// ancilla to the transit qudit, which keeps Bob's decoding correct. In odd
// rounds she subtracts it, reads the now-definite transit value, and adds it
// back. The shared state recurs with period 4 from round 1 on.

/// +1 for rounds = 3 (mod 4), -1 for rounds = 1 (mod 4): the observation in
/// odd round m >= 3 is q_m + sign * q_1.
inline int observation_sign(int round) {
  if (round < 3 || round % 2 == 0) {
    throw InvariantViolation("observations exist only at odd rounds >= 3, got " + std::to_string(round));
  }
  return round % 4 == 3 ? 1 : -1;
}

/// Eve's H on her ancilla, mirroring Alice and Bob's basis change.
template <Amplitude A>
PureState<A> ancilla_on_basis_change(const PureState<A>& st, int round) {
  if (round < 2) throw StrategyOrderError("ancilla basis change is not part of round 1");
  return apply_hadamard(st, wires::eve, false);
}

template <Amplitude A>
TransitOutcome<A> ancilla_on_transit(const PureState<A>& st, int round) {
  if (round < 1) throw StrategyOrderError("round index must be >= 1");
  if (round == 1) {
    auto out = apply_controlled_shift(st, wires::key, wires::eve, ShiftDirection::right);
    std::vector<PureState<A>> snaps{out};
    return {std::move(out), std::move(snaps), std::nullopt};
  }
  if (round % 2 == 0) {
    auto out = apply_controlled_shift(st, wires::eve, wires::key, ShiftDirection::right);
    std::vector<PureState<A>> snaps{out};
    return {std::move(out), std::move(snaps), std::nullopt};
  }
  auto disentangled = apply_controlled_shift(st, wires::eve, wires::key, ShiftDirection::left);
  const auto value = deterministic_outcome(disentangled, wires::key);
  if (!value) {
    throw InvariantViolation("transit qudit not disentangled in round " + std::to_string(round) +
                             "; attack schedule is out of step");
  }
  auto restored = apply_controlled_shift(disentangled, wires::eve, wires::key, ShiftDirection::right);
  std::vector<PureState<A>> snaps{disentangled, restored};
  return {std::move(restored), std::move(snaps), *value};
}

class AncillaAttack {
 public:
  static constexpr AttackKind kind = AttackKind::ancilla;

  /// Adjoins Eve's ancilla |0>_e.
  template <Amplitude A>
  PureState<A> prepare(PureState<A> st) const {
    return tensor(st, basis_state<A>(st.dim(), {{wires::eve, 0}}));
  }

  template <Amplitude A>
  PureState<A> on_basis_change(PureState<A> st, int round) {
    if (round != current_round_ + 1) {
      throw StrategyOrderError("basis change for round " + std::to_string(round) + " after round " +
                               std::to_string(current_round_));
    }
    current_round_ = round;
    if (round == 1) return st;
    return ancilla_on_basis_change(st, round);
  }

  template <Amplitude A>
  TransitOutcome<A> on_transit(PureState<A> st, int round, OutcomePicker& /*picker*/) {
    if (round != current_round_) {
      throw StrategyOrderError("transit hook for round " + std::to_string(round) + " during round " +
                               std::to_string(current_round_));
    }
    return ancilla_on_transit(st, round);
  }

  /// Stage-name family: Phi for round 1, then Psi, Omega, Theta, Upsilon
  /// repeating with period 4.
  std::optional<std::string> stage_family(int round) const {
    if (round == 1) return "Phi";
    static const char* const kCycle[] = {"Psi", "Omega", "Theta", "Upsilon"};
    return kCycle[(round - 2) % 4];
  }

  int current_round() const { return current_round_; }

 private:
  int current_round_ = 0;
};

using AdversaryStrategy = std::variant<NoAdversary, InterceptResend, AncillaAttack>;

inline AttackKind attack_kind(const AdversaryStrategy& s) {
  return std::visit([](const auto& a) { return std::decay_t<decltype(a)>::kind; }, s);
}

// ---------------------------------------------------------------------------
// Inference

struct EveObservation {
  int round_index;
  Dit value;
  int sign;

  friend bool operator==(const EveObservation&, const EveObservation&) = default;
};

inline EveObservation make_observation(int round, Dit value) { return {round, value, observation_sign(round)}; }

struct EveKnowledge {
  int dim = 2;
  std::vector<EveObservation> observations;
  std::vector<Dit> q1_candidates;
  std::optional<Dit> resolved_q1;
};

/// Knowledge before any announcement: all d values of q1 remain possible.
inline EveKnowledge make_knowledge(int d, std::vector<EveObservation> observations) {
  require_dimension(d);
  EveKnowledge k;
  k.dim = d;
  k.observations = std::move(observations);
  for (Dit h = 0; h < d; ++h) k.q1_candidates.push_back(h);
  return k;
}

struct InferenceResult {
  std::optional<Dit> resolved_q1;
  /// round index -> dit; empty until q1 is resolved.
  std::map<int, Dit> known_dits;
  std::vector<Dit> q1_candidates;
};

namespace detail {

inline void check_observations(const EveKnowledge& k) {
  std::set<int> seen;
  for (const auto& o : k.observations) {
    if (o.sign != observation_sign(o.round_index)) {
      throw InconsistentTranscript("observation sign does not match round " + std::to_string(o.round_index));
    }
    if (o.value < 0 || o.value >= k.dim) throw InconsistentTranscript("observation value out of range");
    if (!seen.insert(o.round_index).second) {
      throw InconsistentTranscript("round " + std::to_string(o.round_index) + " observed twice");
    }
  }
  if (k.q1_candidates.empty()) throw InconsistentTranscript("empty q1 candidate set");
}

}  // namespace detail

/// The key implied by the hypothesis q1 = h over every observed round (plus q1 itself).
inline std::map<int, Dit> implied_dits(const EveKnowledge& k, Dit h) {
  std::map<int, Dit> dits{{1, h}};
  for (const auto& o : k.observations) dits[o.round_index] = static_cast<Dit>(mod_floor(o.value - o.sign * h, k.dim));
  return dits;
}

/// Resolves q1 from announced dits. An announced odd dit q_m (m >= 3, observed)
/// fixes q1 = sign_m * (r_m - q_m); an announced q1 fixes it directly. Even
/// dits carry no information about q1.
inline InferenceResult infer_keys(const EveKnowledge& knowledge, const std::vector<std::pair<int, Dit>>& announced) {
  detail::check_observations(knowledge);
  const int d = knowledge.dim;
  std::map<int, const EveObservation*> by_round;
  for (const auto& o : knowledge.observations) by_round[o.round_index] = &o;

  std::set<Dit> implied;
  for (const auto& [m, q] : announced) {
    if (m == 1) {
      implied.insert(static_cast<Dit>(mod_floor(q, d)));
    } else if (auto it = by_round.find(m); it != by_round.end()) {
      implied.insert(static_cast<Dit>(mod_floor(it->second->sign * (it->second->value - q), d)));
    }
  }
  const std::set<Dit> candidates(knowledge.q1_candidates.begin(), knowledge.q1_candidates.end());
  for (Dit h : implied) {
    if (implied.size() > 1 || !candidates.contains(h)) {
      throw InconsistentTranscript("announced dits are not explained by any single value of q1");
    }
  }

  InferenceResult out;
  if (implied.empty()) {
    out.q1_candidates = knowledge.q1_candidates;
    out.resolved_q1 = knowledge.resolved_q1;
    if (out.resolved_q1) out.known_dits = implied_dits(knowledge, *out.resolved_q1);
    return out;
  }
  const Dit h = *implied.begin();
  if (knowledge.resolved_q1 && *knowledge.resolved_q1 != h) {
    throw InconsistentTranscript("announcement contradicts previously resolved q1");
  }
  out.resolved_q1 = h;
  out.q1_candidates = {h};
  out.known_dits = implied_dits(knowledge, h);
  return out;
}

}  // namespace qkdlab
