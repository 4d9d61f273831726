#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "exante/exante.hpp"
#include "support/random_instances.hpp"

using namespace exante;

TEST_CASE("ranks follow the priority tables") {
  MarketInstance inst = examples::market_a();
  // p3: s1 > s3 > s2 > s4
  CHECK(inst.rank(2, 0) == 1);
  // p1: s3 > s2 > s1 > s4
  CHECK(inst.rank(0, 3) == 4);
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(inst.rank(p, inst.priorities[p][0]) == 1);
  }
  CHECK_THROWS_AS(inst.rank(7, 0), std::out_of_range);
  CHECK_THROWS_AS(inst.rank(0, 9), std::out_of_range);
}

TEST_CASE("rank is a bijection per program") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    MarketInstance inst = testing::random_instance(rng);
    for (std::size_t p = 0; p < inst.num_programs(); ++p) {
      std::vector<bool> seen(inst.num_students(), false);
      for (std::size_t k = 0; k < inst.num_students(); ++k) {
        std::size_t r = inst.rank(p, k);
        REQUIRE(r >= 1);
        REQUIRE(r <= inst.num_students());
        CHECK_FALSE(seen[r - 1]);
        seen[r - 1] = true;
      }
    }
  }
}

TEST_CASE("continuum rank offsets the integer rank") {
  MarketInstance inst = examples::market_a();
  CHECK(inst.rank_continuum(2, 2, 0.5) == Catch::Approx(1.5));  // p3, s3
  CHECK(inst.rank_continuum(0, 2, 0.0) == Catch::Approx(0.0));  // p1, s3 top
  CHECK(inst.rank_continuum(0, 3, 1.0) == Catch::Approx(4.0));  // p1, s4
  CHECK_THROWS_AS(inst.rank_continuum(0, 0, 1.5), std::out_of_range);

  std::mt19937_64 rng(12);
  MarketInstance random = testing::random_instance(rng);
  for (std::size_t p = 0; p < random.num_programs(); ++p) {
    for (std::size_t k = 0; k < random.num_students(); ++k) {
      for (double e : {0.0, 0.25, 1.0}) {
        CHECK(random.rank_continuum(p, k, e) ==
              Catch::Approx(static_cast<double>(random.rank(p, k)) - 1.0 + e));
      }
    }
  }
}

TEST_CASE("instance validation accepts the reference market") {
  MarketInstance inst = examples::market_a();
  ValidationReport report = validate_instance(inst);
  CHECK(report.pass());
  // Re-running changes nothing.
  CHECK(validate_instance(inst).pass());
}

TEST_CASE("instance validation flags broken inputs") {
  SECTION("prior not normalized") {
    MarketInstance inst = examples::market_a();
    inst.prior = {0.6, 0.6, 0.6};
    ValidationReport report = validate_instance(inst);
    REQUIRE_FALSE(report.pass());
    CHECK(report.issues[0].code == "prior");
  }
  SECTION("rank values not strictly decreasing") {
    MarketInstance inst = examples::market_a({3, 3, 2, 1});
    ValidationReport report = validate_instance(inst);
    REQUIRE_FALSE(report.pass());
    CHECK(report.issues[0].code == "utility");
  }
  SECTION("capacity not positive") {
    MarketInstance inst = examples::market_a();
    inst.capacities[1] = 0.0;
    CHECK_FALSE(validate_instance(inst).pass());
  }
  SECTION("priority not a permutation") {
    MarketInstance inst = examples::market_a();
    inst.priorities[0] = {0, 0, 1, 2};
    inst.finalize();
    CHECK_FALSE(validate_instance(inst).pass());
  }
  SECTION("program utilities inconsistent with priority") {
    MarketInstance inst = examples::market_b();
    (*inst.program_utilities)[0] = {1.0, 2.0};  // s2 valued above s1
    CHECK_FALSE(validate_instance(inst).pass());
  }
  SECTION("explicit utilities must be strict per state") {
    MarketInstance inst = examples::market_b();
    inst.utilities.mode = UtilityMode::Explicit;
    inst.utilities.values = {
        {{1.0, 1.0}, {2.0, 0.5}},
        {{2.0, 1.0}, {2.0, 1.0}},
    };
    inst.utilities.rankings.clear();
    inst.finalize();
    ValidationReport report = validate_instance(inst);
    REQUIRE_FALSE(report.pass());
    CHECK(report.issues[0].code == "utility");
  }
}

TEST_CASE("partial rankings complete in program-index order") {
  std::vector<std::size_t> appended;
  auto full = complete_ranking({1}, 4, &appended);
  CHECK(full == std::vector<std::size_t>{1, 0, 2, 3});
  CHECK(appended == std::vector<std::size_t>{0, 2, 3});

  MarketInstance inst = examples::market_a();
  REQUIRE(inst.completions.size() == 3);  // one per state for s2
  for (const auto& record : inst.completions) {
    CHECK(record.student == 1);
  }
}

TEST_CASE("completed tail of the partial ranking is never pivotal") {
  // The second student's ranking below her top choice is a loader
  // completion. Swapping in a different completion must not change any
  // outcome at the cutoffs under study: her top choice is always available.
  MarketInstance base = examples::market_a();
  MarketInstance alt = examples::market_a();
  for (std::size_t w = 0; w < 3; ++w) {
    auto& ranking = alt.utilities.rankings[1][w];
    std::reverse(ranking.begin() + 1, ranking.end());
  }
  alt.finalize();

  for (const SignalProfile& profile :
       {examples::partition_profile_a(), examples::full_profile(base)}) {
    NaiveRule rule_base(base, profile);
    NaiveRule rule_alt(alt, profile);
    for (const ExAnteCutoff& b :
         {ExAnteCutoff{{4, 4, 4, 4}}, ExAnteCutoff{{2, 4, 1.7, 1}}}) {
      MatchingDistribution m_base =
          matching_distribution(base, profile, rule_base, b);
      MatchingDistribution m_alt =
          matching_distribution(alt, profile, rule_alt, b);
      for (std::size_t k = 0; k < 4; ++k) {
        for (std::size_t p = 0; p <= 4; ++p) {
          CHECK(m_base.match_probability[k][p] ==
                Catch::Approx(m_alt.match_probability[k][p]).margin(1e-12));
        }
      }
    }
  }
}

TEST_CASE("expected-utility tie hook reports ties under a given belief") {
  MarketInstance inst = examples::market_b();
  // Under the belief (0.5, 0.5), s1 values p1 and p2 equally by symmetry of
  // her state-flipped ranking.
  auto ties = expected_utility_ties(inst, {0.5, 0.5});
  REQUIRE(ties.size() == 1);
  CHECK(ties[0].student == 0);

  // Under a lopsided belief there is no tie.
  CHECK(expected_utility_ties(inst, {0.9, 0.1}).empty());
}
