#include <map>

#include "doctest.h"
#include "support.hpp"

using namespace landr;

namespace {

DenseBlock<double> orthonormal_block(std::size_t n, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> vs;
  for (std::size_t i = 0; i < cols; ++i) vs.push_back(rng.normal_vector<double>(n));
  return oracle::gram_schmidt(vs);
}

LanDrResult<double> example3_run(const std::string& policy, bool trace = false) {
  MatrixRecipe r;
  r.name = "example3";
  DiagonalOperator<double> op(recipe_diagonal(r));
  SolverConfig cfg;
  cfg.m = 120;
  cfg.k = 40;
  cfg.max_cycles = 12;
  cfg.run_all_cycles = true;
  cfg.policy = ReorthPolicy::parse(policy);
  cfg.trace_omega = trace;
  cfg.record_orthodefect = false;
  const auto b = make_rhs<double>(RhsSpec{}, op.size())[0];
  return lan_dr<double>(op, b, {}, cfg);
}

}  // namespace

TEST_CASE("policy parsing round-trips") {
  for (const char* text : {"full", "k-so", "periodic:40", "k-periodic:75", "pro:0.5",
                           "k-pro:0.75", "restart-only"})
    CHECK(ReorthPolicy::parse(text).to_string() == text);
  CHECK(ReorthPolicy::parse("pro").eta_exponent == 0.5);
  CHECK(ReorthPolicy::parse("k-pro:0.75").eta() == doctest::Approx(std::pow(2.0, -52 * 0.75)));
  CHECK_THROWS_AS(ReorthPolicy::parse("sometimes"), std::invalid_argument);
  CHECK_THROWS_AS(ReorthPolicy::parse("periodic"), std::invalid_argument);
  CHECK_THROWS_AS(ReorthPolicy::parse("periodic:0"), std::invalid_argument);
  CHECK_THROWS_AS(ReorthPolicy::parse("k-so:3"), std::invalid_argument);
  CHECK_THROWS_AS(ReorthPolicy::parse("pro:1.5"), std::invalid_argument);
}

TEST_CASE("policy schedule") {
  const ReorthDirective full = policy_step(ReorthPolicy::full(), 17, nullptr, 40);
  CHECK(full.range == ReorthRange::AllFilled);
  CHECK(policy_step(ReorthPolicy::k_so(), 3, nullptr, 40).range == ReorthRange::FirstK);

  const ReorthPolicy kp = ReorthPolicy::k_periodic(40);
  CHECK_FALSE(policy_step(kp, 39, nullptr, 40).active());
  const ReorthDirective hit = policy_step(kp, 40, nullptr, 40);
  CHECK(hit.range == ReorthRange::FirstK);
  CHECK(hit.pair);
  CHECK(policy_step(kp, 80, nullptr, 40).pair);
  CHECK_FALSE(policy_step(kp, 41, nullptr, 40).active());
  CHECK(policy_step(ReorthPolicy::periodic(40), 40, nullptr, 40).range == ReorthRange::AllFilled);
  CHECK_FALSE(policy_step(ReorthPolicy::restart_only(), 40, nullptr, 40).active());
  CHECK_FALSE(policy_step(ReorthPolicy::pro(0.5), 40, nullptr, 40).active());
}

TEST_CASE("Gram-Schmidt") {
  const DenseBlock<double> V = orthonormal_block(300, 40, 11);

  SUBCASE("already orthogonal vector is untouched") {
    DenseBlock<double> W = orthonormal_block(300, 41, 11);
    std::vector<double> v(W.col(40).begin(), W.col(40).end());
    const auto before = v;
    reorthogonalize<double>(v, V, 40);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(v[i] - before[i]) <= 1e-15);
  }
  SUBCASE("vector in the span breaks down") {
    std::vector<double> v(V.col(0).begin(), V.col(0).end());
    CHECK(reorthogonalize<double>(v, V, 40).breakdown);
  }
  SUBCASE("random vector against 40 columns") {
    Rng rng(12);
    auto v = rng.normal_vector<double>(300);
    const auto res = reorthogonalize<double>(v, V, 40);
    CHECK_FALSE(res.breakdown);
    DenseBlock<double> aug(300, 41);
    for (std::size_t j = 0; j < 40; ++j) aug.set_col(j, V.col(j));
    aug.set_col(40, v);
    CHECK(orthodefect(aug) <= 1e-14);
  }
  SUBCASE("complex") {
    Rng rng(13);
    std::vector<std::vector<Complex>> vs;
    for (int i = 0; i < 20; ++i) vs.push_back(rng.normal_vector<Complex>(200));
    const DenseBlock<Complex> Q = oracle::gram_schmidt(vs);
    auto v = rng.normal_vector<Complex>(200);
    reorthogonalize<Complex>(v, Q, 20);
    DenseBlock<Complex> aug(200, 21);
    for (std::size_t j = 0; j < 20; ++j) aug.set_col(j, Q.col(j));
    aug.set_col(20, v);
    CHECK(orthodefect(aug) <= 1e-14);
  }
}

TEST_CASE("omega estimates sit at the floor after reorthogonalization") {
  OmegaState w(20, 1000);
  w.reset(5);
  for (double x : w.latest()) CHECK(std::abs(x) == OmegaState::eps);
  CHECK(w.max_estimate(w.latest_column()) == OmegaState::eps);
}

TEST_CASE("omega recurrence bounds the measured loss of orthogonality") {
  const auto res = example3_run("pro:0.5", true);
  REQUIRE_FALSE(res.history.omega_trace.empty());
  std::size_t checked = 0, violations = 0;
  for (const OmegaSample& s : res.history.omega_trace) {
    if (!s.triggered) continue;
    ++checked;
    if (s.measured > 10 * s.estimate) ++violations;
  }
  CHECK(checked > 0);
  CHECK(violations == 0);
}

TEST_CASE("periodic schedule reorthogonalizes consecutive pairs") {
  const auto res = example3_run("periodic:40");
  std::map<std::pair<int, std::size_t>, bool> seen;
  for (const ReorthEvent& e : res.history.reorth.events)
    if (e.iter > 1 && e.cycle > 1) seen[{e.cycle, e.column}] = true;
  REQUIRE_FALSE(seen.empty());
  for (const auto& [key, _] : seen) {
    // A trigger on the last step hits v_{m+1}; its partner is the restart.
    if (key.second == 120) continue;
    const bool paired = seen.count({key.first, key.second + 1}) > 0 ||
                        (key.second > 0 && seen.count({key.first, key.second - 1}) > 0);
    CHECK(paired);
  }
}

TEST_CASE("every policy reorthogonalizes the restart vectors") {
  for (const char* p : {"restart-only", "k-periodic:75", "pro:0.5"}) {
    const auto res = example3_run(p);
    std::map<int, int> restart_events;
    for (const ReorthEvent& e : res.history.reorth.events)
      if (e.cycle > 1 && e.iter <= 1) ++restart_events[e.cycle];
    CHECK(restart_events.size() == 11);
    for (const auto& [cycle, count] : restart_events) CHECK(count >= 2);
  }
}

TEST_CASE("reorthogonalization counts on Example 3") {
  // 12 cycles of (120,40): k-PRO(eps^.5) needs 44 vectors, k-periodic(40) about 50.
  CHECK(example3_run("k-pro:0.5").history.reorth.count_after(1) == 44);
  const std::size_t kp = example3_run("k-periodic:40").history.reorth.count_after(1);
  CHECK(kp >= 45);
  CHECK(kp <= 60);
}
