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

// JSON forms of states and session transcripts. Key order is fixed
// (ordered_json), so identical runs serialize to identical bytes.

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/protocol.hpp"
#include "qkdlab/register.hpp"

namespace qkdlab {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTranscriptSchema = "v1";

namespace detail {

inline Json probability_json(const Rational& p) { return to_string(p); }
inline Json probability_json(double p) { return p; }

}  // namespace detail

/// {dim, wires, scale_exp, terms: [{basis, coeffs}]}; exact coefficients are
/// "n/d" strings, float amplitudes are [re, im] under "amp".
template <Amplitude A>
Json state_to_json(const PureState<A>& st) {
  Json j;
  j["dim"] = st.dim();
  Json ws = Json::array();
  for (const auto& w : st.wires()) ws.push_back(w.label);
  j["wires"] = std::move(ws);
  j["scale_exp"] = st.scale_exp();
  if (st.norm_factor() != 1) j["norm_factor"] = to_string(st.norm_factor());
  Json terms = Json::array();
  for (const auto& [t, amp] : st.terms()) {
    Json term;
    term["basis"] = t;
    if constexpr (amplitude_traits<A>::exact) {
      Json coeffs = Json::array();
      for (const auto& c : amp.coeffs()) coeffs.push_back(to_string(c));
      term["coeffs"] = std::move(coeffs);
    } else {
      term["amp"] = {amp.real(), amp.imag()};
    }
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

template <Amplitude A>
PureState<A> state_from_json(const Json& j) {
  const int d = j.at("dim").get<int>();
  std::vector<Wire> ws;
  for (const auto& w : j.at("wires")) ws.emplace_back(w.get<std::string>());
  Rational c(1);
  if (j.contains("norm_factor")) c = rational_from_string(j["norm_factor"].get<std::string>());
  typename PureState<A>::TermMap terms;
  for (const auto& term : j.at("terms")) {
    BasisTuple t = term.at("basis").get<BasisTuple>();
    if constexpr (amplitude_traits<A>::exact) {
      std::vector<Rational> coeffs;
      for (const auto& c : term.at("coeffs")) coeffs.push_back(rational_from_string(c.get<std::string>()));
      terms.emplace(std::move(t), canonical_reduce(CycloElem::from_coefficients(d, std::move(coeffs))));
    } else {
      const auto& a = term.at("amp");
      terms.emplace(std::move(t), ComplexF{a.at(0).get<double>(), a.at(1).get<double>()});
    }
  }
  return PureState<A>(d, std::move(ws), j.at("scale_exp").get<int>(), std::move(terms), c);
}

inline Json inference_to_json(const EveKnowledge& knowledge, const InferenceResult& inference) {
  Json eve;
  Json obs = Json::array();
  for (const auto& o : knowledge.observations) {
    Json e;
    e["round"] = o.round_index;
    e["value"] = o.value;
    e["sign"] = o.sign;
    obs.push_back(std::move(e));
  }
  eve["observations"] = std::move(obs);
  eve["resolved_q1"] = inference.resolved_q1 ? Json(*inference.resolved_q1) : Json(nullptr);
  Json known = Json::array();
  for (const auto& [m, q] : inference.known_dits) known.push_back({{"round", m}, {"dit", q}});
  eve["known_dits"] = std::move(known);
  eve["q1_candidates"] = inference.q1_candidates;
  return eve;
}

template <Amplitude A>
Json transcript_to_json(const SessionTranscript<A>& session) {
  const auto& cfg = session.config;
  Json j;
  j["schema"] = kTranscriptSchema;
  Json c;
  c["dim"] = cfg.dim;
  c["num_rounds"] = cfg.num_rounds;
  c["key"] = cfg.key;
  c["arithmetic_mode"] = mode_name(cfg.mode);
  c["rng_seed"] = cfg.rng_seed;
  c["attack"] = attack_name(session.attack);
  c["intercept_rounds"] = std::vector<int>(session.intercept_rounds.begin(), session.intercept_rounds.end());
  c["discard_announced"] = cfg.discard_announced;
  j["config"] = std::move(c);

  Json rounds = Json::array();
  for (const auto& r : session.rounds) {
    Json jr;
    jr["index"] = r.round_index;
    Json stages = Json::array();
    for (const auto& s : r.stages) stages.push_back({{"label", s.label}, {"state", state_to_json(s.state)}});
    jr["stages"] = std::move(stages);
    jr["bob_outcome"] = r.bob_outcome;
    jr["eve_observation"] = r.eve_observation ? Json(*r.eve_observation) : Json(nullptr);
    jr["branch_probability"] = detail::probability_json(r.branch_probability);
    rounds.push_back(std::move(jr));
  }
  j["rounds"] = std::move(rounds);

  Json announced = Json::array();
  for (const auto& [m, q] : session.announced) announced.push_back({{"round", m}, {"dit", q}});
  j["announced"] = std::move(announced);
  j["detection_triggered"] = session.detection_triggered;
  j["path_probability"] = detail::probability_json(session.path_probability);
  if (session.final_shared_state) j["final_shared_state"] = state_to_json(*session.final_shared_state);

  const auto knowledge = eve_knowledge(session);
  j["eve"] = inference_to_json(knowledge, infer_keys(knowledge, session.announced));
  return j;
}

}  // namespace qkdlab
