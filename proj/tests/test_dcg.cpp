#include <thread>

#include "doctest.h"
#include "properties.hpp"

using namespace landr;

namespace {

LanDrResult<double> example1_space(std::size_t m, std::size_t k, int cycles,
                                   ReorthPolicy policy = ReorthPolicy::k_so()) {
  const auto op = props::example1_operator();
  SolverConfig cfg;
  cfg.m = m;
  cfg.k = k;
  cfg.max_cycles = cycles;
  cfg.run_all_cycles = true;
  cfg.policy = policy;
  cfg.record_orthodefect = false;
  return lan_dr<double>(op, make_rhs<double>(RhsSpec{}, op.size())[0], {}, cfg);
}

}  // namespace

TEST_CASE("CG finite termination") {
  DiagonalOperator<double> id(std::vector<double>(10, 1.0));
  const auto one = cg<double>(id, Vector<double>(10, 3.0), {}, CgOptions{});
  CHECK(one.status == SolveStatus::Converged);
  CHECK(one.iterations == 1);
  CHECK(one.x[4] == doctest::Approx(3.0));

  DiagonalOperator<double> two({1, 2});
  const auto res = cg<double>(two, Vector<double>{1, 1}, {}, CgOptions{});
  CHECK(res.iterations == 2);
  CHECK(res.x[0] == doctest::Approx(1.0));
  CHECK(res.x[1] == doctest::Approx(0.5));
  // Two steps plus one b - A x to confirm convergence.
  CHECK(res.history.matvecs == 3);
}

TEST_CASE("CG flags an indefinite operator") {
  DiagonalOperator<double> op({-1, 2});
  const auto res = cg<double>(op, Vector<double>{1, 0}, {}, CgOptions{});
  CHECK(res.status == SolveStatus::Indefinite);
}

TEST_CASE("CG matches a textbook oracle on Example 1") {
  MatrixRecipe r;
  r.name = "example1";
  const auto d = recipe_diagonal(r);
  DiagonalOperator<double> op(d);
  const auto b = make_rhs<double>(RhsSpec{}, op.size())[0];
  const auto want = oracle::naive_cg(d, b, 1e-8, 5000);
  // Without residual replacement it is the same recurrence, step for step.
  CgOptions plain;
  plain.replace_every = 0;
  const auto same = cg<double>(op, b, {}, plain);
  REQUIRE(same.history.points.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(std::abs(same.history.points[i].resid_rel - want[i]) <= 1e-12);
  // Replacement changes the recursive residual only at rounding level.
  const auto got = cg<double>(op, b, {}, CgOptions{});
  REQUIRE(got.status == SolveStatus::Converged);
  CHECK(got.iterations == same.iterations);
  // The reported residual is b - A x.
  auto ax = op.apply(got.x);
  double diff = 0, xn = oracle::naive_norm(got.x);
  for (std::size_t i = 0; i < ax.size(); ++i) diff = std::max(diff, std::abs(b[i] - ax[i] - got.r[i]));
  CHECK(diff <= 1e-12 * (4910 * xn + oracle::naive_norm(b)));
}

TEST_CASE("deflation_project special cases") {
  const auto ld = example1_space(100, 40, 30);
  const DeflationSpace<double>& ds = ld.deflation;
  const std::size_t n = ds.v.rows();
  const Vector<double> x0(n, 0.0);

  SUBCASE("r0 orthogonal to V_k is left alone") {
    Rng rng(3);
    auto r0 = rng.normal_vector<double>(n);
    std::vector<double> h(ds.k() + 1);
    block_adjoint_times<double>(ds.v, ds.k(), std::span<const double>(r0), std::span<double>(h).first(ds.k()));
    for (std::size_t i = 0; i < ds.k(); ++i)
      for (std::size_t t = 0; t < n; ++t) r0[t] -= h[i] * ds.v.col(i)[t];
    const auto p = deflation_project<double>(ds, x0, r0);
    for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(p.r[t] - r0[t]) <= 1e-12);
    CHECK(oracle::naive_norm(p.x) <= 1e-12);
  }
  SUBCASE("r0 a converged Ritz vector is removed") {
    const std::vector<double> y(ds.v.col(0).begin(), ds.v.col(0).end());
    const auto p = deflation_project<double>(ds, x0, y);
    CHECK(std::abs(oracle::naive_dot(y, p.r)) <= 1e-12);
    CHECK(oracle::naive_norm(p.r) <= 1e-8);
    CHECK(p.x[0] * 0.1 == doctest::Approx(y[0]).epsilon(1e-6));
  }
  SUBCASE("zero Ritz value is excluded") {
    DeflationSpace<double> z = ds;
    z.tbar(1, 1) = 0.0;
    const auto p = deflation_project<double>(z, x0, make_rhs<double>(RhsSpec{1, "random", 4}, n)[0]);
    CHECK(p.excluded == 1);
    for (double v : p.x) CHECK(std::isfinite(v));
  }
}

TEST_CASE("projection reduces converged eigencomponents") {
  const auto ld = example1_space(100, 40, 65);
  std::size_t converged = 0;
  while (converged < ld.ritz.size() && ld.ritz.residuals[converged] <= 1e-8) ++converged;
  REQUIRE(converged >= 30);
  const std::size_t n = ld.deflation.v.rows();
  const auto r0 = make_rhs<double>(RhsSpec{2, "random", 1}, n)[1];
  const auto p = deflation_project<double>(ld.deflation, Vector<double>(n, 0.0), r0);
  // Eigenvectors of a diagonal matrix are unit vectors, so the components
  // are entries; the 30 smallest eigenvalues sit at indices 0..29.
  for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(p.r[i]) * 1e3 <= std::abs(r0[i]));
}

TEST_CASE("empty deflation space is plain CG") {
  const auto op = props::example1_operator();
  const auto b = make_rhs<double>(RhsSpec{}, op.size())[0];
  const auto a = cg<double>(op, b, {}, CgOptions{});
  const auto c = d_cg<double>(op, b, {}, DeflationSpace<double>{}, CgOptions{});
  CHECK(a.iterations == c.iterations);
  CHECK(a.history.matvecs == c.history.matvecs);
  CHECK(a.x == c.x);
}

TEST_CASE("SolutionSpace projection") {
  DiagonalOperator<double> op({1, 2, 3, 4, 5, 6});
  SolutionSpace<double> sp(6);
  const Vector<double> x1{1, 0, 1, 0, 0, 0}, x2{0, 1, 0, 0, 1, 0};
  CHECK(sp.add(x1, op.apply(x1)));
  CHECK(sp.add(x2, op.apply(x2)));
  CHECK_FALSE(sp.add(x1, op.apply(x1)));
  CHECK(sp.size() == 2);
  // b = A(2 x1 - x2) lies in A U: the projection solves it.
  Vector<double> xs(6);
  for (std::size_t i = 0; i < 6; ++i) xs[i] = 2 * x1[i] - x2[i];
  const auto b = op.apply(xs);
  const auto p = sp.project(Vector<double>(6, 0.0), b);
  for (std::size_t i = 0; i < 6; ++i) CHECK(p.x[i] == doctest::Approx(xs[i]).epsilon(1e-12));
  CHECK(oracle::naive_norm(p.r) <= 1e-12);
}

TEST_CASE("Example 3: D-CG second right-hand side near 57 iterations") {
  MatrixRecipe r;
  r.name = "example3";
  DiagonalOperator<double> op(recipe_diagonal(r));
  const auto rhs = make_rhs<double>(RhsSpec{2, "random", 1}, op.size());
  SolverConfig cfg;
  cfg.m = 120;
  cfg.k = 40;
  cfg.max_cycles = 12;
  cfg.run_all_cycles = true;
  cfg.policy = ReorthPolicy::full();
  const auto ld = lan_dr<double>(op, rhs[0], {}, cfg);
  const auto res = d_cg<double>(op, rhs[1], {}, ld.deflation, CgOptions{});
  CHECK(res.status == SolveStatus::Converged);
  CHECK(res.iterations >= 47);
  CHECK(res.iterations <= 67);
  // Deflation saves a lot against plain CG.
  CHECK(cg<double>(op, rhs[1], {}, CgOptions{}).iterations > 3 * res.iterations);
}

TEST_CASE("deflating more eigenvalues is better") {
  const auto op = props::example1_operator();
  const auto b2 = make_rhs<double>(RhsSpec{2, "random", 1}, op.size())[1];
  int prev = 1 << 30;
  for (std::size_t k : {10, 40, 80, 120}) {
    const auto ld = example1_space(k + 60, k, 50);
    const int its = d_cg<double>(op, b2, {}, ld.deflation, CgOptions{}).iterations;
    MESSAGE("k = " << k << ": " << its << " iterations");
    CHECK(its < prev);
    prev = its;
  }
}

TEST_CASE("concurrent D-CG solves share one deflation space") {
  const auto op = props::example1_operator();
  const auto ld = example1_space(100, 40, 20);
  const auto rhs = make_rhs<double>(RhsSpec{5, "random", 2}, op.size());
  std::vector<SolveResult<double>> seq, par(4);
  for (int i = 0; i < 4; ++i) seq.push_back(d_cg<double>(op, rhs[i + 1], {}, ld.deflation, CgOptions{}));
  std::vector<std::thread> ts;
  for (int i = 0; i < 4; ++i)
    ts.emplace_back([&, i] { par[i] = d_cg<double>(op, rhs[i + 1], {}, ld.deflation, CgOptions{}); });
  for (auto& t : ts) t.join();
  for (int i = 0; i < 4; ++i) {
    CHECK(par[i].x == seq[i].x);
    CHECK(par[i].iterations == seq[i].iterations);
  }
}

TEST_CASE("complex D-CG") {
  std::vector<double> spec;
  for (int i = 1; i <= 200; ++i) spec.push_back(i <= 5 ? 0.01 * i : double(i));
  const auto op = oracle::random_hermitian(spec, 41);
  Rng rng(42);
  const auto b1 = rng.normal_vector<Complex>(op.size());
  const auto b2 = rng.normal_vector<Complex>(op.size());
  SolverConfig cfg;
  cfg.m = 40;
  cfg.k = 10;
  cfg.max_cycles = 10;
  cfg.run_all_cycles = true;
  const auto ld = lan_dr<Complex>(op, b1, {}, cfg);
  CHECK(props::projection_orthogonality<Complex>(ld.deflation, b2) <= 1e-12);
  const auto plain = cg<Complex>(op, b2, {}, CgOptions{});
  const auto defl = d_cg<Complex>(op, b2, {}, ld.deflation, CgOptions{});
  CHECK(defl.status == SolveStatus::Converged);
  CHECK(defl.iterations < plain.iterations);
}
