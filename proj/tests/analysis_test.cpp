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

#include <gtest/gtest.h>

#include "qkdlab/analysis.hpp"

namespace qkdlab {
namespace {

ProtocolConfig config_for(int d, std::vector<Dit> key, std::uint64_t seed = 0) {
  ProtocolConfig cfg;
  cfg.dim = d;
  cfg.num_rounds = static_cast<int>(key.size());
  cfg.key = std::move(key);
  cfg.rng_seed = seed;
  return cfg;
}

TEST(Metrics, HonestAndAncillaSessionsHaveZeroQber) {
  const std::vector<Dit> key{1, 0, 2, 1, 2};
  const auto honest = compute_metrics(run_session<CycloElem>(config_for(3, key), NoAdversary{}), key);
  EXPECT_EQ(honest.qber_overall, Rational(0));
  EXPECT_EQ(honest.eve_known_fraction, Rational(0));
  EXPECT_EQ(honest.eve_candidate_count, 3);
  const auto ancilla = compute_metrics(run_session<CycloElem>(config_for(3, key), AncillaAttack{}), key);
  EXPECT_EQ(ancilla.qber_overall, Rational(0));
  EXPECT_FALSE(ancilla.detection_triggered);
}

TEST(Metrics, KnownFractionAfterAnnouncement) {
  // Nine rounds: q1 and readings at 3, 5, 7, 9 become known once any odd dit is announced.
  const auto key = random_key(3, 9, 12);
  auto s = run_session<CycloElem>(config_for(3, key), AncillaAttack{});
  EXPECT_EQ(compute_metrics(s, key).eve_known_fraction, Rational(0));
  announce_subsequence(s, {7});
  const auto m = compute_metrics(s, key);
  EXPECT_EQ(m.eve_known_fraction, Rational(5, 9));
  EXPECT_EQ(m.eve_candidate_count, 1);
}

TEST(Metrics, AnnouncedRoundsLeaveTheQber) {
  // Round 2 differs from the key; announcing it removes it from the sample.
  const std::vector<Dit> key{1, 1};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto s = run_session<CycloElem>(config_for(2, key, seed), InterceptResend({1}));
    if (s.rounds[1].bob_outcome == 1) continue;
    EXPECT_EQ(compute_metrics(s, key).qber_overall, Rational(1, 2));
    announce_subsequence(s, {2});
    const auto m = compute_metrics(s, key);
    EXPECT_EQ(m.qber_overall, Rational(0));
    EXPECT_TRUE(m.detection_triggered);
    return;
  }
  FAIL() << "no erroneous round 2 in 30 seeds";
}

TEST(Metrics, KeyLengthMustMatch) {
  const auto s = run_session<CycloElem>(config_for(3, {1, 2}), NoAdversary{});
  EXPECT_THROW(compute_metrics(s, {1}), ConfigError);
}

TEST(ExactError, InterceptNextRound) {
  for (int d : {2, 3, 5}) {
    for (int round : {1, 2}) EXPECT_EQ(exact_next_round_error(d, round), Rational(d - 1, d)) << d << " " << round;
  }
  EXPECT_EQ(exact_next_round_error(3, 1, std::vector<Dit>{0, 0}), Rational(2, 3));
  EXPECT_THROW(exact_next_round_error(3, 0), ConfigError);
}

TEST(ExactError, AttackedRoundItselfIsCorrect) {
  ProtocolConfig cfg = config_for(3, {2, 1, 0});
  EXPECT_EQ(exact_round_error(cfg, InterceptResend({2}), 2), Rational(0));
  EXPECT_EQ(exact_round_error(cfg, InterceptResend({2}), 1), Rational(0));
  EXPECT_EQ(exact_round_error(cfg, InterceptResend({2}), 3), Rational(2, 3));
  EXPECT_EQ(exact_round_error(cfg, AncillaAttack{}, 3), Rational(0));
}

TEST(Enumeration, ProbabilitiesSumToOne) {
  const auto branches = enumerate_branches(config_for(3, {1, 2, 0}), InterceptResend({1, 2}));
  Rational total(0);
  for (const auto& b : branches) total += b.probability;
  EXPECT_EQ(total, Rational(1));
  EXPECT_GT(branches.size(), 1u);
}

TEST(Enumeration, Limits) {
  EXPECT_THROW(enumerate_branches(config_for(11, {1}), NoAdversary{}), ConfigError);
  EXPECT_THROW(enumerate_branches(config_for(2, std::vector<Dit>(7, 0)), NoAdversary{}), ConfigError);
  EXPECT_THROW(enumerate_branches(config_for(4, {1}), NoAdversary{}), ConfigError);
}

TEST(TotalVariation, Examples) {
  const std::map<Dit, Rational> p{{0, Rational(1, 2)}, {1, Rational(1, 2)}};
  const std::map<Dit, Rational> q{{0, Rational(1)}};
  EXPECT_EQ(total_variation(p, p), Rational(0));
  EXPECT_EQ(total_variation(p, q), Rational(1, 2));
}

TEST(MonteCarlo, InterceptWithinThreeSigma) {
  ExperimentConfig cfg;
  cfg.dim = 3;
  cfg.num_rounds = 2;
  cfg.attack = AttackKind::intercept_resend;
  cfg.intercept_rounds = {1};
  cfg.trials = 2000;
  cfg.seed = 11;
  const auto r = monte_carlo(cfg);
  ASSERT_TRUE(r.next_round.has_value());
  const auto& e = r.error_by_round[1];
  ASSERT_TRUE(e.exact.has_value());
  EXPECT_EQ(*e.exact, Rational(2, 3));
  EXPECT_TRUE(e.within_3_sigma()) << e.mean;
  EXPECT_EQ(r.error_by_round[0].events, 0u);
}

TEST(MonteCarlo, AncillaNeverErrs) {
  ExperimentConfig cfg;
  cfg.dim = 3;
  cfg.num_rounds = 5;
  cfg.attack = AttackKind::ancilla;
  cfg.trials = 1000;
  const auto r = monte_carlo(cfg);
  EXPECT_EQ(r.qber.events, 0u);
  EXPECT_EQ(r.zero_qber_trials, 1000u);
  EXPECT_EQ(r.detection.events, 0u);
}

TEST(MonteCarlo, SeedDeterminesReport) {
  ExperimentConfig cfg;
  cfg.dim = 2;
  cfg.attack = AttackKind::intercept_resend;
  cfg.trials = 200;
  cfg.seed = 5;
  ExperimentReport a{{monte_carlo(cfg)}}, b{{monte_carlo(cfg)}};
  EXPECT_EQ(report_to_json(a).dump(), report_to_json(b).dump());
  EXPECT_EQ(report_to_csv(a), report_to_csv(b));
}

TEST(Report, CsvLayout) {
  ExperimentConfig cfg;
  cfg.dim = 2;
  cfg.attack = AttackKind::intercept_resend;
  cfg.trials = 10;
  const auto csv = report_to_csv(ExperimentReport{{monte_carlo(cfg)}});
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, kReportCsvHeader);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_EQ(row.rfind("intercept,2,2,10,exact,0,", 0), 0u) << row;
  EXPECT_EQ(row.substr(row.size() - 4), ",1/2");
}

TEST(Report, JsonFields) {
  ExperimentConfig cfg;
  cfg.dim = 3;
  cfg.attack = AttackKind::none;
  cfg.trials = 10;
  const auto j = report_to_json(ExperimentReport{{monte_carlo(cfg)}});
  ASSERT_EQ(j["rows"].size(), 1u);
  const auto& row = j["rows"][0];
  EXPECT_EQ(row["strategy"], "none");
  EXPECT_EQ(row["qber"]["events"], 0);
  EXPECT_EQ(row["error_by_round"][1]["exact"], "0/1");
  EXPECT_TRUE(row["next_round"].is_null());
}

}  // namespace
}  // namespace qkdlab
