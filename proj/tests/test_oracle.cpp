#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "llenv/functions.hpp"
#include "llenv/oracle.hpp"

using namespace llenv;

namespace {
Grid1D sample(const SeparableFunction& f) {
  return Grid1D::sample(kOracleLo, kOracleHi, kOracleStep,
                        [&](double w) { return f.eval_1d(w); });
}
}  // namespace

TEST_CASE("grid construction and interpolation") {
  Grid1D g = Grid1D::sample(-1.0, 1.0, 0.5, [](double w) { return w * w; });
  REQUIRE(g.size() == 5);
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(4) == 1.0);
  CHECK(g.value_at(0.25) == Catch::Approx(0.125));  // chord between 0 and 0.25
  CHECK_THROWS_AS(g.value_at(2.0), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D::axis(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("indicators sample as the finite sentinel") {
  BinaryIndicator f;
  Grid1D g = sample(f);
  CHECK(g.value_at(0.0) == 0.0);
  CHECK(g.values[0] == kInfSentinel);
}

TEST_CASE("grid moreau of the zero function is zero") {
  ZeroFunction z;
  Grid1D g = sample(z);
  Grid1D m = grid_moreau(g, 1.0);
  for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(m.values[i] == 0.0);
}

TEST_CASE("grid moreau of the binary indicator matches the analytic form") {
  BinaryIndicator f;
  Grid1D g = sample(f);
  const double at_half = grid_moreau_at(g, 1.0, 0.5);
  CHECK(at_half == Catch::Approx(0.125).margin(1e-4));
  // Cross-check against min(x^2, (x-1)^2) / (2 lambda) at several points.
  for (double x : {-0.7, 0.1, 0.33, 0.9, 1.8}) {
    const double expect = std::min(x * x, (x - 1) * (x - 1)) / 2.0;
    CHECK(grid_moreau_at(g, 1.0, x) == Catch::Approx(expect).margin(1e-4));
  }
  CHECK(grid_moreau(g, 1.0).values.size() == g.size());
}

TEST_CASE("grid moreau of the counting penalty matches min(x^2/2, beta)") {
  ScaledL0 f(1.0);
  Grid1D g = sample(f);
  CHECK(grid_moreau_at(g, 1.0, 3.0) == Catch::Approx(1.0).margin(1e-4));
  CHECK(grid_moreau_at(g, 1.0, 0.5) == Catch::Approx(0.125).margin(1e-4));
}

TEST_CASE("grid ll on the binary indicator") {
  BinaryIndicator f;
  Grid1D g = sample(f);
  Grid1D m = grid_moreau(g, 1.0);
  CHECK(grid_ll_at(m, 0.5, 0.5) == Catch::Approx(0.125).margin(1e-4));
  CHECK(grid_ll_at(m, 0.5, 0.0) == Catch::Approx(0.0).margin(1e-4));
  CHECK(grid_ll_at(m, 0.5, 0.25) == Catch::Approx(0.0625).margin(1e-4));
  Grid1D full = grid_ll(g, 1.0, 0.5);
  CHECK(full.value_at(0.5) == Catch::Approx(0.125).margin(1e-4));
  CHECK_THROWS_AS(grid_ll(g, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("grid ll of zero grid is zero") {
  ZeroFunction z;
  Grid1D g = sample(z);
  Grid1D out = grid_ll(g, 2.0, 0.7);
  for (double v : out.values) REQUIRE(v == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("empty grids are rejected") {
  Grid1D empty;
  CHECK_THROWS_AS(grid_moreau(empty, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(grid_conjugate(empty, Grid1D::axis(-1, 1, 0.1)),
                  std::invalid_argument);
}

TEST_CASE("discrete conjugate of the squared norm is itself") {
  Grid1D q = Grid1D::sample(kOracleLo, kOracleHi, kOracleStep,
                            [](double w) { return 0.5 * w * w; });
  Grid1D slopes = Grid1D::axis(-4.0, 4.0, 1e-2);
  Grid1D conj = grid_conjugate(q, slopes);
  for (double s : {-3.0, -1.0, 0.0, 0.5, 2.5})
    CHECK(conj.value_at(s) == Catch::Approx(0.5 * s * s).margin(1e-3));
}

TEST_CASE("discrete conjugate of point indicators") {
  // delta_{0}: conjugate vanishes.
  Grid1D d0 = Grid1D::sample(-2.0, 2.0, 1e-3,
                             [](double w) { return w == 0.0 ? 0.0 : kInf; });
  Grid1D slopes = Grid1D::axis(-5.0, 5.0, 1e-2);
  Grid1D c0 = grid_conjugate(d0, slopes);
  for (double s : {-4.0, 0.0, 3.0})
    CHECK(c0.value_at(s) == Catch::Approx(0.0).margin(1e-9));

  // delta_{0,1}: conjugate is max(0, s).
  BinaryIndicator f;
  Grid1D c01 = grid_conjugate(sample(f), slopes);
  for (double s : {-4.0, -0.5, 0.0, 1.0, 4.5})
    CHECK(c01.value_at(s) == Catch::Approx(std::max(0.0, s)).margin(1e-3));
}

TEST_CASE("discrete conjugate output is convex") {
  ScaledL0 f(1.0);
  Grid1D conj = grid_conjugate(sample(f), Grid1D::axis(-20.0, 20.0, 1e-2));
  for (std::size_t i = 1; i + 1 < conj.size(); ++i) {
    const double second =
        conj.values[i - 1] - 2.0 * conj.values[i] + conj.values[i + 1];
    REQUIRE(second >= -1e-9);
  }
}

TEST_CASE("envelope recursion agrees with the quadratic scan") {
  // Both routes minimize/maximize over the same finite candidate set.
  ScaledL0 f(1.0);
  Grid1D g = Grid1D::sample(-3.0, 3.0, 1e-2,
                            [&](double w) { return f.eval_1d(w); });
  Grid1D m = grid_moreau(g, 0.7);
  for (std::size_t i = 0; i < m.size(); i += 37)
    REQUIRE(m.values[i] == Catch::Approx(grid_moreau_at(g, 0.7, m.x(i)))
                               .margin(1e-12));
  Grid1D env = grid_sup_envelope(m, 0.3);
  for (std::size_t i = 0; i < env.size(); i += 41)
    REQUIRE(env.values[i] == Catch::Approx(grid_ll_at(m, 0.3, env.x(i)))
                                 .margin(1e-12));
}

TEST_CASE("central finite differences") {
  CHECK(finite_diff_grad([](double x) { return x * x; }, 1.0, 1e-5) ==
        Catch::Approx(2.0).margin(1e-9));
  CHECK(finite_diff_grad([](double) { return 3.14; }, -2.0, 1e-5) == 0.0);
  CHECK_THROWS_AS(
      finite_diff_grad([](double) { return kInf; }, 0.0, 1e-5),
      std::runtime_error);
  CHECK_THROWS_AS(
      finite_diff_grad([](double x) { return x; }, 0.0, 0.0),
      std::invalid_argument);
}

TEST_CASE("finite differences of the closed-form envelope match its gradient") {
  BinaryIndicator f;
  EnvelopeParams p(1.0, 0.5);
  auto val = [&](double x) { return f.ll_value_1d(p, x); };
  CHECK(finite_diff_grad(val, 0.25, 1e-5) == Catch::Approx(0.5).margin(1e-5));
}
