#include <doctest.h>

#include <cmath>

#include "pbco/ogd.hpp"

using namespace pbco;

namespace {

Vector vec1(double a) {
  Vector v(1);
  v << a;
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("ogd");

TEST_CASE("ogd_defaults reproduce the parameter formulas") {
  const ProblemConfig cfg = ProblemConfig::linear_link(3, 10000, 1, 1, 1, 1);
  const OgdParams p = ogd_defaults(cfg);
  CHECK(p.delta == doctest::Approx(std::sqrt(1.0 / 300.0)));
  CHECK(p.delta == doctest::Approx(0.05774).epsilon(1e-3));
  CHECK(p.eta == doctest::Approx(0.05774 / 100.0).epsilon(1e-3));
  CHECK(p.alpha == p.delta);
}

TEST_CASE("one_point_gradient scales the link gradient") {
  Vector g(2);
  g << 1, 0;
  const Vector out = one_point_gradient(2.25, 1, 0.5, g);
  CHECK(out[0] == doctest::Approx(4.5));
  CHECK(out[1] == 0.0);
  CHECK(one_point_gradient(0.0, -1, 0.5, g).norm() == 0.0);
}

TEST_CASE("u-average of the one-point estimator is the smoothed derivative") {
  // Quadratic loss: the average over u = +-1 equals d/dy E_u[l(y + d u)].
  const auto loss = [](double y) { return y * y; };
  const double delta = 0.5, y = 1.0;
  Vector g(2);
  g << 1, 0;
  const Vector avg = 0.5 * (one_point_gradient(loss(y + delta), 1, delta, g) +
                            one_point_gradient(loss(y - delta), -1, delta, g));
  CHECK(avg[0] == doctest::Approx(2.0));  // d/dy (y^2 + delta^2) at y = 1
  CHECK(avg[1] == 0.0);
}

TEST_CASE("one_point_gradient is linear in the loss and odd in u") {
  Vector g(3);
  g << 0.5, -1.0, 2.0;
  const Vector a = one_point_gradient(1.2, 1, 0.25, g);
  const Vector b = one_point_gradient(2.4, 1, 0.25, g);
  CHECK((2.0 * a).isApprox(b, 1e-12));
  const Vector c = one_point_gradient(1.2, -1, 0.25, g);
  CHECK((a + c).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS(one_point_gradient(1.0, 0, 0.25, g), std::invalid_argument);
  CHECK_THROWS_AS(one_point_gradient(1.0, 1, 0.0, g), std::invalid_argument);
}

TEST_CASE("ogd_step hand trace") {
  const ProblemConfig cfg = ProblemConfig::linear_link(1, 100, 1, 1, 1, 1);
  OgdParams params{0.1, 0.5, 0.1};
  OgdState state = make_ogd_state(1);

  // Find a seed whose first coin lands on u = +1.
  Rng probe(0);
  uint64_t seed = 0;
  for (;; ++seed) {
    Rng r(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    if (coin(r) == 1) break;
  }
  Rng rng(seed);
  const OgdStepResult res = ogd_step(
      state, vec1(1.0), [](double y) { return y * y; }, params, cfg, rng);
  CHECK(res.a_t == doctest::Approx(0.5));
  CHECK(res.incurred_loss == doctest::Approx(0.25));
  CHECK(state.w[0] == doctest::Approx(-0.05));
}

TEST_CASE("zero losses keep the iterate at the origin") {
  const ProblemConfig cfg = ProblemConfig::linear_link(3, 100, 1, 1, 1, 1);
  const OgdParams params = ogd_defaults(cfg);
  OgdState state = make_ogd_state(3);
  Rng rng(4);
  Vector x(3);
  x << 0.3, -0.5, 0.2;
  for (int t = 0; t < 50; ++t) {
    ogd_step(state, x, [](double) { return 0.0; }, params, cfg, rng);
    CHECK(state.w.norm() == 0.0);
  }
}

TEST_CASE("played prediction respects the margin") {
  const ProblemConfig cfg = ProblemConfig::linear_link(2, 400, 1, 1, 1, 1);
  const OgdParams params = ogd_defaults(cfg);
  OgdState state = make_ogd_state(2);
  state.w << 0.9, 0.4;  // intentionally near the boundary
  Rng rng(6);
  Vector x(2);
  x << 1.0, 0.0;
  for (int t = 0; t < 200; ++t) {
    const OgdStepResult res = ogd_step(
        state, x, [](double y) { return 0.2 * std::abs(y); }, params, cfg,
        rng);
    CHECK(res.a_t >= cfg.alpha_W - 1e-9);
    CHECK(res.a_t <= cfg.beta_W + 1e-9);
  }
}

TEST_CASE("gradient estimate norm stays below DC/delta") {
  const ProblemConfig cfg = ProblemConfig::linear_link(2, 100, 1, 1, 1, 1);
  Rng rng(8);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Vector x(2);
    x << unif(rng), unif(rng);
    if (x.norm() > cfg.D) x *= cfg.D / x.norm();
    const double loss = std::abs(unif(rng)) * cfg.C;
    const int u = unif(rng) > 0 ? 1 : -1;
    const double delta = 0.2;
    CHECK(one_point_gradient(loss, u, delta, x).norm() <=
          cfg.D * cfg.C / delta + 1e-12);
  }
}

TEST_CASE("mean ogd update direction matches the smoothed gradient") {
  // Repeated single steps from a fixed iterate; the average displacement
  // converges to -eta times the analytic smoothed gradient.
  const ProblemConfig cfg = ProblemConfig::linear_link(1, 100, 1, 1, 4, 4);
  const OgdParams params{0.05, 0.25, 0.05};
  const auto loss = [](double y) { return y * y; };
  const double y0 = 0.3;
  Rng rng(10);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    OgdState state = make_ogd_state(1);
    state.w[0] = y0;
    ogd_step(state, vec1(1.0), loss, params, cfg, rng);
    const double step = state.w[0] - y0;
    sum += step;
    sum_sq += step * step;
  }
  const double mean = sum / n;
  const double se =
      std::sqrt(std::max(0.0, sum_sq / n - mean * mean) / n);
  // d/dy E_u[(y + delta u)^2] = 2y, so the expected step is -eta * 2 y0.
  CHECK(std::abs(mean - (-params.eta * 2.0 * y0)) <= 3.0 * se + 1e-12);
}

TEST_CASE("flaxman_step is stationary under zero loss") {
  const ProblemConfig cfg = ProblemConfig::linear_link(3, 100, 1, 1, 1, 1);
  const OgdParams params = flaxman_defaults(cfg);
  OgdState state = make_ogd_state(3);
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const FlaxmanStepResult res = flaxman_step(
        state, [](const Vector&) { return 0.0; }, params, cfg, rng);
    CHECK(state.w.norm() == 0.0);
    CHECK(res.w_played.norm() <= cfg.W + 1e-12);
  }
}

TEST_CASE("flaxman sphere estimator matches the smoothed gradient at d=3") {
  const double delta = 0.25;
  Vector w(3);
  w << 0.3, -0.2, 0.4;
  Rng rng(14);
  Vector sum = Vector::Zero(3), sum_sq = Vector::Zero(3);
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    const Vector u = sample_unit_sphere(3, rng);
    const Vector est = (3.0 / delta) * (w + delta * u).squaredNorm() * u;
    sum += est;
    sum_sq += est.cwiseProduct(est);
  }
  for (int k = 0; k < 3; ++k) {
    const double mean = sum[k] / n;
    const double se =
        std::sqrt(std::max(0.0, sum_sq[k] / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0 * w[k]) <= 3.0 * se);
  }
}

TEST_CASE("d=1 sphere sampling reduces to the sign coin") {
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    const Vector u = sample_unit_sphere(1, rng);
    CHECK(std::abs(std::abs(u[0]) - 1.0) <= 1e-12);
  }
}

TEST_CASE("flaxman keeps the iterate on the shrunk ball") {
  const ProblemConfig cfg = ProblemConfig::linear_link(4, 400, 1, 1, 4, 4);
  const OgdParams params = flaxman_defaults(cfg);
  OgdState state = make_ogd_state(4);
  Rng rng(18);
  for (int t = 0; t < 100; ++t) {
    const FlaxmanStepResult res = flaxman_step(
        state,
        [](const Vector& w) { return std::min(4.0, w.squaredNorm()); },
        params, cfg, rng);
    CHECK(state.w.norm() <= (1.0 - params.delta / cfg.W) * cfg.W + 1e-9);
    CHECK(res.w_played.norm() <= cfg.W + 1e-9);
  }
}

TEST_SUITE_END();
