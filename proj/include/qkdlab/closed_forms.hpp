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

// Closed-form expressions for every stage of the first five rounds of the
// entangled-ancilla attack, built term by term from formulas in (d, key)
// without running any gate. Comparing them against a simulated session is a
// genuine cross-check of the gate engine and the attack schedule.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/protocol.hpp"
#include "qkdlab/register.hpp"

namespace qkdlab {

template <Amplitude A>
struct ExpectedStage {
  int round;
  std::string label;
  PureState<A> state;
};

namespace closed_form {

inline const std::vector<Wire>& abe() {
  static const std::vector<Wire> w{wires::alice, wires::bob, wires::eve};
  return w;
}

inline const std::vector<Wire>& abke() {
  static const std::vector<Wire> w{wires::alice, wires::bob, wires::key, wires::eve};
  return w;
}

/// d^(-1/2) sum_j |f(j)>
template <Amplitude A>
PureState<A> single_sum(int d, const std::vector<Wire>& ws, const std::function<BasisTuple(long)>& f) {
  typename PureState<A>::TermMap terms;
  for (long j = 0; j < d; ++j) {
    BasisTuple t = f(j);
    for (auto& v : t) v = static_cast<Dit>(mod_floor(v, d));
    if (!terms.emplace(std::move(t), amplitude_traits<A>::one(d)).second) {
      throw InvariantViolation("closed form produced a repeated basis tuple");
    }
  }
  return PureState<A>(d, ws, 1, std::move(terms));
}

/// d^(-1) sum_{k,l} zeta^(phase(k,l)) |f(k,l)>
template <Amplitude A>
PureState<A> double_sum(int d, const std::vector<Wire>& ws, const std::function<long(long, long)>& phase,
                        const std::function<BasisTuple(long, long)>& f) {
  typename PureState<A>::TermMap terms;
  for (long k = 0; k < d; ++k) {
    for (long l = 0; l < d; ++l) {
      BasisTuple t = f(k, l);
      for (auto& v : t) v = static_cast<Dit>(mod_floor(v, d));
      if (!terms.emplace(std::move(t), amplitude_traits<A>::zeta(d, phase(k, l))).second) {
        throw InvariantViolation("closed form produced a repeated basis tuple");
      }
    }
  }
  return PureState<A>(d, ws, 2, std::move(terms));
}

}  // namespace closed_form

/// The 32 labeled stage states of rounds 1-5, in transcript order.
template <Amplitude A>
std::vector<ExpectedStage<A>> expected_attack_stages(int d, std::span<const Dit> key) {
  using namespace closed_form;
  require_dimension(d);
  if (key.size() < 5) throw ConfigError("closed forms need at least 5 key dits");
  const long q1 = key[0], q2 = key[1], q3 = key[2], q4 = key[3], q5 = key[4];
  using T = BasisTuple;
  auto D = [](long v) { return static_cast<Dit>(v); };
  std::vector<ExpectedStage<A>> out;
  auto add = [&](int round, std::string label, PureState<A> st) { out.push_back({round, std::move(label), std::move(st)}); };

  // Round 1: Eve's ancilla picks up a copy of a + q1.
  add(1, "psi_10", single_sum<A>(d, abe(), [&](long j) { return T{D(j), D(j), 0}; }));
  add(1, "Phi_0", single_sum<A>(d, abke(), [&](long j) { return T{D(j), D(j), D(q1), 0}; }));
  add(1, "Phi_1", single_sum<A>(d, abke(), [&](long j) { return T{D(j), D(j), D(j + q1), 0}; }));
  add(1, "Phi_2", single_sum<A>(d, abke(), [&](long j) { return T{D(j), D(j), D(j + q1), D(j + q1)}; }));
  add(1, "Phi_3", single_sum<A>(d, abke(), [&](long j) { return T{D(j), D(j), D(q1), D(j + q1)}; }));
  add(1, "psi_11", single_sum<A>(d, abe(), [&](long j) { return T{D(j), D(j), D(j + q1)}; }));

  // Rounds 2 and 4: detection avoidance, phases zeta^(+-q1 (l-k)).
  auto avoidance = [&](int round, const std::string& fam, long sign, long q) {
    auto phase = [=](long k, long l) { return sign * q1 * (l - k); };
    add(round, psi_label(round, 0), double_sum<A>(d, abe(), phase, [&](long k, long l) { return T{D(k), D(l), D(l - k)}; }));
    add(round, fam + "_0", double_sum<A>(d, abke(), phase, [&](long k, long l) { return T{D(k), D(l), D(q), D(l - k)}; }));
    add(round, fam + "_1", double_sum<A>(d, abke(), phase, [&](long k, long l) { return T{D(k), D(l), D(k + q), D(l - k)}; }));
    add(round, fam + "_2", double_sum<A>(d, abke(), phase, [&](long k, long l) { return T{D(k), D(l), D(l + q), D(l - k)}; }));
    add(round, fam + "_3", double_sum<A>(d, abke(), phase, [&](long k, long l) { return T{D(k), D(l), D(q), D(l - k)}; }));
    add(round, psi_label(round, 1), double_sum<A>(d, abe(), phase, [&](long k, long l) { return T{D(k), D(l), D(l - k)}; }));
  };

  // Rounds 3 and 5: extraction; ancilla holds m - q1 (round 3) or m + q1 (round 5).
  auto extraction = [&](int round, const std::string& fam, long offset, long q) {
    add(round, psi_label(round, 0), single_sum<A>(d, abe(), [&](long m) { return T{D(m), D(m), D(m + offset)}; }));
    add(round, fam + "_0", single_sum<A>(d, abke(), [&](long m) { return T{D(m), D(m), D(q), D(m + offset)}; }));
    add(round, fam + "_1", single_sum<A>(d, abke(), [&](long m) { return T{D(m), D(m), D(m + q), D(m + offset)}; }));
    add(round, fam + "_2", single_sum<A>(d, abke(), [&](long m) { return T{D(m), D(m), D(q - offset), D(m + offset)}; }));
    add(round, fam + "_3", single_sum<A>(d, abke(), [&](long m) { return T{D(m), D(m), D(m + q), D(m + offset)}; }));
    add(round, fam + "_4", single_sum<A>(d, abke(), [&](long m) { return T{D(m), D(m), D(q), D(m + offset)}; }));
    add(round, psi_label(round, 1), single_sum<A>(d, abe(), [&](long m) { return T{D(m), D(m), D(m + offset)}; }));
  };

  avoidance(2, "Psi", +1, q2);
  extraction(3, "Omega", -q1, q3);
  avoidance(4, "Theta", -1, q4);
  extraction(5, "Upsilon", +q1, q5);
  return out;
}

struct StageCheck {
  int round;
  std::string label;
  bool passed;
  /// First differing term, or why the stage could not be compared.
  std::string detail;
};

/// Compares every recorded stage of the first five rounds of `session`
/// against its closed form. Exact backend: zero tolerance. Float backend:
/// kFloatTolerance per amplitude.
template <Amplitude A>
std::vector<StageCheck> check_attack_trace(const SessionTranscript<A>& session) {
  if (session.attack != AttackKind::ancilla) throw ConfigError("trace check needs an entangled-ancilla session");
  if (session.rounds.size() < 5) throw ConfigError("trace check needs at least 5 rounds");
  const auto expected = expected_attack_stages<A>(session.config.dim, session.config.key);
  std::vector<StageCheck> checks;
  for (const auto& e : expected) {
    const auto& round = session.rounds.at(static_cast<std::size_t>(e.round - 1));
    const auto* stage = round.find_stage(e.label);
    if (stage == nullptr) {
      checks.push_back({e.round, e.label, false, "stage not recorded"});
      continue;
    }
    auto diff = first_difference(stage->state, e.state, CompareMode::exact);
    checks.push_back({e.round, e.label, !diff.has_value(), diff.value_or("")});
  }
  return checks;
}

/// Runs a five-round attack session on key[0..4] and checks its trace.
template <Amplitude A>
std::vector<StageCheck> verify_attack_trace(int d, std::span<const Dit> key, std::uint64_t seed = 0) {
  if (key.size() < 5) throw ConfigError("verification needs a key of length >= 5");
  ProtocolConfig cfg;
  cfg.dim = d;
  cfg.num_rounds = 5;
  cfg.key.assign(key.begin(), key.begin() + 5);
  cfg.mode = mode_of<A>();
  cfg.rng_seed = seed;
  return check_attack_trace(run_session<A>(cfg, AncillaAttack{}));
}

}  // namespace qkdlab
