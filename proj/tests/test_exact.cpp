#include <cmath>
#include <random>

#include "doctest.h"
#include "sgkink/exact.hpp"

using namespace sgk;

namespace {

double pde_fd_residual(const ExactSolution& s, double t, double x, double h = 1e-3) {
  const double f = evaluate(s, t, x).f;
  const double ftt = (evaluate(s, t + h, x).f - 2.0 * f + evaluate(s, t - h, x).f) / (h * h);
  const double fxx = (evaluate(s, t, x + h).f - 2.0 * f + evaluate(s, t, x - h).f) / (h * h);
  return std::abs(ftt - fxx + std::sin(f));
}

// Unscaled long-double evaluation of the wobbling kink, valid for moderate |x|.
long double wobbler_oracle(long double b, long double t, long double x) {
  const long double c = std::cos(std::sqrt(1.0L - b * b) * t);
  const long double U = 0.5L * (1 + b) * std::exp(b * x) + 0.5L * (1 - b) * std::exp(-b * x) -
                        b * c * std::exp(x);
  const long double V = 0.5L * (1 - b) * std::exp((1 + b) * x) + 0.5L * (1 + b) * std::exp((1 - b) * x) - b * c;
  return 4.0L * std::atan2(V, U);
}

}  // namespace

TEST_CASE("kink values at the center and at the tails") {
  const KinkParams p(0.6, 1.5);
  CHECK(p.gamma() == doctest::Approx(1.25));
  CHECK(p.a() == doctest::Approx(2.0));
  const auto k = kink_identities(p, 2.0, 1.5 + 0.6 * 2.0);
  CHECK(k.Q == doctest::Approx(kPi));
  CHECK(k.sin_half == doctest::Approx(1.0));
  CHECK(k.cos_half == doctest::Approx(0.0));
  CHECK(k.Q_x == doctest::Approx(2.0 * 1.25));
  CHECK(k.Q_t == doctest::Approx(-0.6 * 2.0 * 1.25));
  CHECK(kink_identities(p, 0.0, -800.0).Q == 0.0);
  CHECK(kink_identities(p, 0.0, 800.0).Q == doctest::Approx(2.0 * kPi));
  CHECK(KinkParams::from_a(2.0, 0.0).beta == doctest::Approx(0.6));
  CHECK_THROWS(KinkParams(1.0, 0.0));
}

TEST_CASE("kink half-angle identities hold pointwise") {
  const KinkParams p(-0.35, 0.2);
  for (double x = -12.0; x <= 12.0; x += 0.41) {
    const auto k = kink_identities(p, 0.9, x);
    CHECK(std::sin(k.Q / 2.0) == doctest::Approx(k.sin_half).epsilon(1e-12));
    CHECK(std::cos(k.Q / 2.0) == doctest::Approx(k.cos_half).epsilon(1e-12));
  }
}

TEST_CASE("kink is monotone and its x-derivative matches finite differences") {
  const KinkParams p(0.4, -0.7);
  const double h = 1e-5;
  double prev = -1.0;
  for (double x = -15.0; x <= 15.0; x += 0.25) {
    const auto k = kink_identities(p, 0.3, x);
    CHECK(k.Q > prev);
    prev = k.Q;
    const double fd = (kink_identities(p, 0.3, x + h).Q - kink_identities(p, 0.3, x - h).Q) / (2.0 * h);
    CHECK(fd == doctest::Approx(k.Q_x).epsilon(1e-7));
  }
}

TEST_CASE("antikink is the negated kink") {
  const KinkParams p(0.1, 0.4);
  const auto k = ExactSolution::make_kink(p), ak = ExactSolution::make_antikink(p);
  for (double x : {-3.0, 0.0, 0.4, 2.5}) {
    CHECK(evaluate(ak, 1.1, x).f == doctest::Approx(-evaluate(k, 1.1, x).f));
    CHECK(evaluate(ak, 1.1, x).f_t == doctest::Approx(-evaluate(k, 1.1, x).f_t));
  }
  CHECK(ak.topology() == Topology::Antikink);
}

TEST_CASE("breather vanishes where the cosine factor does") {
  const BreatherParams p(0.0, 0.5, 0.0, 0.0);
  // theta = alpha t = pi/2.
  const double t = 0.5 * kPi / p.alpha();
  for (double x : {-5.0, 0.0, 3.0}) CHECK(std::abs(evaluate(ExactSolution::make_breather(p), t, x).f) < 1e-14);
  CHECK(p.gamma_v() == doctest::Approx(1.0));
  CHECK_THROWS(BreatherParams(0.0, 1.5, 0.0, 0.0));
}

TEST_CASE("wobbling kink agrees with a long-double oracle") {
  for (double b : {0.1, 0.4, 0.7}) {
    const auto s = ExactSolution::make_wobbling_kink(b);
    for (double t : {0.0, 1.3, 7.7}) {
      for (double x = -8.0; x <= 8.0; x += 0.53) {
        const double f = evaluate(s, t, x).f;
        const long double o = wobbler_oracle(b, t, x);
        // Compare modulo 2*pi.
        CHECK(std::abs(std::sin(f) - static_cast<double>(std::sin(o))) < 1e-12);
        CHECK(std::abs(std::cos(f) - static_cast<double>(std::cos(o))) < 1e-12);
      }
    }
  }
}

TEST_CASE("wobbling kink with zero amplitude is the static kink") {
  const auto w = ExactSolution::make_wobbling_kink(0.0);
  const auto k = ExactSolution::make_kink(KinkParams());
  for (double x : {-4.0, -0.5, 0.0, 2.0}) CHECK(evaluate(w, 3.0, x).f == doctest::Approx(evaluate(k, 3.0, x).f));
}

TEST_CASE("exact solutions satisfy the PDE") {
  const std::vector<ExactSolution> sols = {
      ExactSolution::make_kink(KinkParams(0.5, 0.3)),
      ExactSolution::make_antikink(KinkParams(-0.4, -0.2)),
      ExactSolution::make_breather(BreatherParams(0.3, 0.6, 0.1, -0.2)),
      ExactSolution::make_wobbling_kink(0.3),
      lorentz_boost_solution(ExactSolution::make_breather(BreatherParams(0.0, 0.4, 0.0, 0.0)), -0.5)};
  for (const auto& s : sols)
    for (double t : {0.0, 2.2})
      for (double x = -8.0; x <= 8.0; x += 0.7) CHECK(pde_fd_residual(s, t, x) < 2e-6);
}

TEST_CASE("boosting the static kink gives the moving kink") {
  const double beta = 0.45;
  const auto boosted = lorentz_boost_solution(ExactSolution::make_kink(KinkParams(0.0, 0.0)), beta);
  const auto moving = ExactSolution::make_kink(KinkParams(beta, 0.0));
  for (double t : {0.0, 1.5})
    for (double x : {-2.0, 0.3, 1.9}) {
      const auto a = evaluate(boosted, t, x), b = evaluate(moving, t, x);
      CHECK(a.f == doctest::Approx(b.f).epsilon(1e-12));
      CHECK(a.f_t == doctest::Approx(b.f_t).epsilon(1e-12));
      CHECK(a.f_x == doctest::Approx(b.f_x).epsilon(1e-12));
    }
}

TEST_CASE("boost composition and identity") {
  const auto base = ExactSolution::make_breather(BreatherParams(0.0, 0.7, 0.2, 0.0));
  CHECK(lorentz_boost_solution(base, 0.0).boosts.empty());
  // Velocities compose relativistically: (b1 + b2) / (1 + b1 b2).
  const double b1 = 0.3, b2 = 0.4;
  const auto twice = lorentz_boost_solution(lorentz_boost_solution(base, b1), b2);
  const auto once = lorentz_boost_solution(base, (b1 + b2) / (1.0 + b1 * b2));
  for (double x : {-1.0, 0.5, 2.0}) CHECK(evaluate(twice, 0.8, x).f == doctest::Approx(evaluate(once, 0.8, x).f).epsilon(1e-12));
  CHECK_THROWS(lorentz_boost_solution(base, 1.0));
}

TEST_CASE("sample_state tags topology and rejects narrow grids") {
  const Grid g = make_grid(-40.0, 40.0, 512);
  CHECK(sample_state(ExactSolution::make_kink(KinkParams()), g, 0.0).topology == Topology::Kink);
  CHECK(sample_state(ExactSolution::make_antikink(KinkParams()), g, 0.0).topology == Topology::Antikink);
  CHECK(sample_state(ExactSolution::zero(), g, 0.0).topology == Topology::Zero);
  const State w = sample_state(ExactSolution::make_wobbling_kink(0.3), make_grid(-256.0, 256.0, 4096), 2.0);
  CHECK(w.topology == Topology::Kink);
  CHECK(w.phi.values.back() == doctest::Approx(2.0 * kPi));
  CHECK_THROWS_AS(sample_state(ExactSolution::make_kink(KinkParams()), make_grid(-5.0, 5.0, 64), 0.0),
                  std::invalid_argument);
}

TEST_CASE("sech is overflow safe") {
  CHECK(sech(0.0) == 1.0);
  CHECK(sech(1000.0) == 0.0);
  CHECK(sech(-1000.0) == 0.0);
  CHECK(sech(1.0) == doctest::Approx(1.0 / std::cosh(1.0)));
}
