#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "sgkink/exact.hpp"
#include "sgkink/field.hpp"

using namespace sgk;

namespace {

double linf(const Field& f) { return norm(f, NormSpec::lp(INFINITY)); }

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "sgkink_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("make_grid spacing and nodes") {
  const Grid g = make_grid(-1.0, 1.0, 16);
  CHECK(g.dx == doctest::Approx(0.125));
  CHECK(g.x(0) == -1.0);
  CHECK(g.x(15) == doctest::Approx(0.875));
  CHECK(g.nodes().size() == 16);
}

TEST_CASE("make_grid rejects bad arguments") {
  CHECK_THROWS_AS(make_grid(1.0, -1.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 24), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("spatial_derivative of sin, constant and quadratic") {
  const Grid g = make_grid(0.0, 2.0 * kPi, 256);
  const Field s = sample(g, [](double x) { return std::sin(x); });
  const Field c = sample(g, [](double x) { return std::cos(x); });
  CHECK(linf(spatial_derivative(s, 1) - c) < 1e-6);
  CHECK(linf(spatial_derivative(s, 2) + s) < 1e-5);

  const Field k = sample(g, [](double) { return 3.5; });
  CHECK(linf(spatial_derivative(k, 1)) < 1e-12);

  const Field q = sample(g, [](double x) { return x * x; });
  const Field two_x = sample(g, [](double x) { return 2.0 * x; });
  CHECK(linf(spatial_derivative(q, 1) - two_x) < 1e-9);
  CHECK(linf(spatial_derivative(q, 2) - sample(g, [](double) { return 2.0; })) < 1e-8);
  CHECK_THROWS(spatial_derivative(q, 3));
}

TEST_CASE("spectral_derivative of a localized field") {
  const Grid g = make_grid(-20.0, 20.0, 256);
  const Field s = sample(g, [](double x) { return std::exp(-x * x) * std::sin(3.0 * x); });
  const Field c = sample(g, [](double x) {
    return std::exp(-x * x) * (3.0 * std::cos(3.0 * x) - 2.0 * x * std::sin(3.0 * x));
  });
  CHECK(linf(spectral_derivative(s, 1) - c) < 1e-11);
  CHECK(linf(spectral_derivative(s, 0) - s) < 1e-14);
  CHECK_THROWS_AS(spectral_derivative(sample(g, [](double x) { return x; }), 1), std::invalid_argument);
}

TEST_CASE("smooth_derivative handles kink tails spectrally") {
  const Grid g = make_grid(-64.0, 64.0, 1024);
  const KinkParams p(0.0, 1.3);
  const Field q = kink_state(p, g, 0.0).phi;
  const Field qx = sample(g, [&](double x) { return kink_identities(p, 0.0, x).Q_x; });
  CHECK(linf(smooth_derivative(q) - qx) < 1e-10);
  CHECK(linf(spatial_derivative(q, 1) - qx) > 1e-7);

  const Field bump = sample(g, [](double x) { return std::exp(-x * x); });
  const Field bump_x = sample(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
  CHECK(linf(smooth_derivative(bump) - bump_x) < 1e-12);

  const Field ramp = sample(g, [](double x) { return x; });
  CHECK(linf(smooth_derivative(ramp) - sample(g, [](double) { return 1.0; })) < 1e-9);
}

TEST_CASE("bessel_multiplier identities") {
  const Grid g = make_grid(-20.0, 20.0, 256);
  const Field e = sample(g, [](double x) { return std::exp(-x * x); });
  const Field e_xx = sample(g, [](double x) { return (4.0 * x * x - 2.0) * std::exp(-x * x); });
  CHECK(linf(bessel_multiplier(e, 2.0) - (e - e_xx)) < 1e-11);
  CHECK(linf(bessel_multiplier(e, 0.0) - e) < 1e-14);

  const Grid h = make_grid(-30.0, 30.0, 512);
  const Field f = sample(h, [](double x) { return std::exp(-x * x) * (1.0 + x); });
  CHECK(linf(bessel_multiplier(bessel_multiplier(f, 1.3), -1.3) - f) < 1e-12);
  CHECK(linf(bessel_multiplier(bessel_multiplier(f, 0.5), 0.5) - bessel_multiplier(f, 1.0)) < 1e-12);

  const Field kink = kink_state(KinkParams(), h, 0.0).phi;
  CHECK_THROWS_AS(bessel_multiplier(kink, 1.0), std::invalid_argument);
}

TEST_CASE("spectral energy matches the L2 norm (Parseval)") {
  const Grid g = make_grid(-20.0, 20.0, 256);
  std::mt19937 rng(7);
  std::normal_distribution<double> nd;
  ComplexField f(g);
  for (auto& v : f.values) v = {nd(rng), nd(rng)};
  const double l2 = norm(f, NormSpec::lp(2.0));
  CHECK(spectral_energy(f) == doctest::Approx(l2 * l2).epsilon(1e-12));
}

TEST_CASE("inner products of kink profiles") {
  const Grid g = make_grid(-40.0, 40.0, 4096);
  const KinkParams p;
  const Field q = kink_state(p, g, 0.0).phi;
  const Field s = sample(g, [](double x) { return sech(x); });
  CHECK(inner_product(q, s) == doctest::Approx(kPi * kPi).epsilon(1e-10));
  CHECK(inner_product(s, s) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate(s) == doctest::Approx(kPi).epsilon(1e-10));

  const ComplexField a = to_complex(s);
  ComplexField b = a;
  for (auto& v : b.values) v *= cplx(0.0, 1.0);
  const cplx ip = inner_product(a, b);
  CHECK(ip.real() == doctest::Approx(0.0));
  CHECK(ip.imag() == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("Lp norm examples") {
  const Grid g = make_grid(-30.0, 30.0, 4096);
  const Field gauss = sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(norm(gauss, NormSpec::lp(INFINITY)) == doctest::Approx(1.0));
  CHECK(norm(gauss, NormSpec::lp(1.0)) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
  CHECK(norm(gauss, NormSpec::lp(2.0)) == doctest::Approx(std::pow(kPi / 2.0, 0.25)).epsilon(1e-10));
}

TEST_CASE("L2+Linf norm is bounded by both L2 and Linf") {
  const Grid g = make_grid(-30.0, 30.0, 1024);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int k = 0; k < 20; ++k) {
    const double amp = u(rng), width = u(rng);
    const Field f = sample(g, [&](double x) { return amp * std::exp(-x * x / width); });
    const double mixed = norm(f, NormSpec::l2_plus_linf());
    CHECK(mixed <= std::min(norm(f, NormSpec::lp(2.0)), norm(f, NormSpec::lp(INFINITY))) + 1e-9);
    CHECK(mixed >= 0.0);
  }
  CHECK(norm(Field(g), NormSpec::l2_plus_linf()) == 0.0);
}

TEST_CASE("weighted Sobolev norm") {
  const Grid g = make_grid(-30.0, 30.0, 2048);
  const Field f = sample(g, [](double x) { return std::exp(-x * x) * std::cos(x); });
  CHECK(norm(f, NormSpec::weighted_sobolev(0.0, 0.0)) ==
        doctest::Approx(norm(f, NormSpec::lp(2.0))).epsilon(1e-12));
  double prev = 0.0;
  for (double m : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const double v = norm(f, NormSpec::weighted_sobolev(m, 1.0));
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(norm(f, NormSpec::weighted_sobolev(1.0, 1.0)) > norm(f, NormSpec::weighted_sobolev(1.0, 0.0)));
}

TEST_CASE("pair energy norm of a state against itself and a shift") {
  const Grid g = make_grid(-40.0, 40.0, 2048);
  const State a = kink_state(KinkParams(0.2, 0.0), g, 0.0);
  CHECK(norm(a, a, NormSpec::pair_energy()) == 0.0);
  const State b = kink_state(KinkParams(0.2, 0.01), g, 0.0);
  const double d = norm(a, b, NormSpec::pair_energy());
  CHECK(d > 0.0);
  CHECK(d < 0.1);
  CHECK_THROWS(norm(a, b, NormSpec::lp(2.0)));
}

TEST_CASE("State validation") {
  const Grid g = make_grid(-40.0, 40.0, 1024);
  State s = kink_state(KinkParams(), g, 0.0);
  CHECK_NOTHROW(s.validate());
  s.topology = Topology::Antikink;
  CHECK_THROWS(s.validate());
  s.topology = Topology::Kink;
  s.phi_t = Field(make_grid(-40.0, 40.0, 512));
  CHECK_THROWS(s.validate());
  CHECK(left_tail(Topology::Antikink) == 0.0);
  CHECK(right_tail(Topology::Antikink) == doctest::Approx(-2.0 * kPi));
  CHECK(to_string(Topology::Kink) == "kink");
}

TEST_CASE("field arithmetic requires matching grids") {
  const Field a(make_grid(0.0, 1.0, 16)), b(make_grid(0.0, 1.0, 32));
  CHECK_THROWS(a + b);
  CHECK_THROWS(BasicField<double>(make_grid(0.0, 1.0, 16), std::vector<double>(3)));
}

TEST_CASE("snapshot round trip is exact") {
  const Grid g = make_grid(-40.0, 40.0, 64);
  State s = kink_state(KinkParams(0.3, 0.5), g, 1.25);
  s.time = 1.25;
  const auto path = temp_path("snap.sgf").string();
  write_snapshot(s, path);
  const State r = read_snapshot(path);
  CHECK(r.grid() == g);
  CHECK(r.time == 1.25);
  CHECK(r.topology == Topology::Kink);
  CHECK(r.phi.values == s.phi.values);
  CHECK(r.phi_t.values == s.phi_t.values);

  std::ofstream(temp_path("bad.sgf")) << "nope";
  CHECK_THROWS(read_snapshot(temp_path("bad.sgf").string()));
}

TEST_CASE("CSV output has one row per node") {
  const Grid g = make_grid(0.0, 1.0, 16);
  const Field f = sample(g, [](double x) { return 2.0 * x; });
  const auto path = temp_path("f.csv").string();
  write_csv(f, path);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows >= 16);
  CHECK(rows <= 17);
}

TEST_CASE("interpolation reproduces polynomials") {
  const Grid g = make_grid(-5.0, 5.0, 64);
  const Field f = sample(g, [](double x) { return x * x * x - 2.0 * x; });
  for (double x : {-4.01, -0.3, 0.0, 1.7, 3.33}) {
    CHECK(interpolate(f, x) == doctest::Approx(x * x * x - 2.0 * x).epsilon(1e-12));
    CHECK(interpolate(f, x, 4) == doctest::Approx(x * x * x - 2.0 * x).epsilon(1e-12));
  }
  CHECK(interpolate(f, g.x(10)) == f[10]);
}
