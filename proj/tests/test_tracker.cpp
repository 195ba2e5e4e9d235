#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sgkink/tracker.hpp"

using namespace sgk;

namespace {

Field odd_bump(const Grid& g, double eps, double c) {
  return sample(g, [&](double x) { return eps * std::tanh(x - c) * sech(x - c); });
}

}  // namespace

TEST_CASE("center mode names") {
  CHECK(center_mode_from_string(to_string(CenterMode::PiLevel)) == CenterMode::PiLevel);
  CHECK(center_mode_from_string("orthogonality") == CenterMode::Orthogonality);
  CHECK_THROWS(center_mode_from_string("median"));
}

TEST_CASE("exact kinks give their own center in both modes") {
  const Grid g = make_grid(-64.0, 64.0, 4096);
  for (double beta : {0.0, 0.4, -0.3}) {
    const double t = 2.0, c = 0.37;
    const Field f = kink_state(KinkParams(beta, c), g, t).phi;
    CHECK(solve_center(f, beta, t, 0.0, CenterMode::Orthogonality) == doctest::Approx(c).epsilon(1e-10));
    CHECK(solve_center(f, beta, t, 0.0, CenterMode::PiLevel) == doctest::Approx(c).epsilon(1e-10));
    CHECK(std::abs(orthogonality_residual(f, beta, t, c)) < 1e-10);
  }
}

TEST_CASE("odd perturbations about the center leave it unchanged") {
  const Grid g = make_grid(-64.0, 64.0, 4096);
  const double c = -0.8;
  const Field f = kink_state(KinkParams(0.0, c), g, 0.0).phi + odd_bump(g, 0.05, c);
  CHECK(solve_center(f, 0.0, 0.0, 0.0, CenterMode::PiLevel) == doctest::Approx(c).epsilon(1e-9));
  CHECK(solve_center(f, 0.0, 0.0, 0.0, CenterMode::Orthogonality) == doctest::Approx(c).epsilon(1e-6));
}

TEST_CASE("centers are translation equivariant") {
  const Grid g = make_grid(-64.0, 64.0, 4096);
  const Field pert = sample(g, [](double x) { return 0.05 * std::exp(-(x - 0.5) * (x - 0.5)); });
  const Field shifted = sample(g, [](double x) { return 0.05 * std::exp(-(x - 2.5) * (x - 2.5)); });
  const Field f1 = kink_state(KinkParams(), g, 0.0).phi + pert;
  const Field f2 = kink_state(KinkParams(0.0, 2.0), g, 0.0).phi + shifted;
  for (auto mode : {CenterMode::Orthogonality, CenterMode::PiLevel}) {
    const double c1 = solve_center(f1, 0.0, 0.0, 0.0, mode), c2 = solve_center(f2, 0.0, 0.0, 2.0, mode);
    CHECK(c2 - c1 == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("solve_center fails without a kink") {
  const Grid g = make_grid(-32.0, 32.0, 1024);
  CHECK_THROWS(solve_center(Field(g), 0.0, 0.0, 0.0, CenterMode::PiLevel));
}

TEST_CASE("center velocity of exact kinks") {
  const Grid g = make_grid(-64.0, 64.0, 1024);
  const State s = kink_state(KinkParams(0.0, 0.2), g, 0.0);
  CHECK(std::abs(center_velocity(s, 0.0, 0.2)) < 1e-9);
  const State m = kink_state(KinkParams(0.5, 0.0), g, 1.0);
  CHECK(std::abs(center_velocity(m, 0.5, 0.0)) < 1e-9);
  // A kink moving faster than the frame drifts at the relative velocity.
  const State fast = kink_state(KinkParams(0.3, 0.0), g, 0.0);
  CHECK(center_velocity(fast, 0.0, 0.0) == doctest::Approx(0.3).epsilon(0.1));
  State flat = s;
  flat.phi = Field(g);
  CHECK_THROWS(center_velocity(flat, 0.0, 0.0));
}

TEST_CASE("tracking the exact moving kink") {
  const Grid g = make_grid(-64.0, 64.0, 2048);
  const double beta = 0.3;
  Trajectory tr;
  tr.interval = 0.5;
  for (int k = 0; k <= 8; ++k) {
    State s = kink_state(KinkParams(beta, 0.1), g, 0.5 * k);
    s.time = 0.5 * k;
    tr.states.push_back(s);
  }
  const TrackedTrajectory tt = track(tr, beta, 0.0, {CenterMode::Orthogonality, {0.0, 2.0}});
  REQUIRE(tt.records.size() == 9);
  for (const auto& r : tt.records) {
    CHECK(r.center == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(std::abs(r.center_velocity) < 1e-8);
    CHECK(r.diff_linf < 1e-10);
    CHECK(r.diff_pair_energy < 1e-10);
    CHECK(r.exterior_l2.size() == 2);
  }
}

TEST_CASE("tracker reports jumps with the snapshot time") {
  const Grid g = make_grid(-64.0, 64.0, 2048);
  Tracker tr(0.0, 0.0);
  tr.observe(kink_state(KinkParams(0.0, 0.0), g, 0.0));
  State far = kink_state(KinkParams(0.0, 1.0), g, 0.0);
  far.time = 0.25;
  try {
    tr.observe(far);
    FAIL("expected a jump error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("0.25") != std::string::npos);
  }
}

TEST_CASE("exterior bound shape") {
  CHECK(exterior_bound_shape(16.0, 16.0, 1.0) == doctest::Approx(0.5));
  double prev = INFINITY;
  for (double x = 20.0; x < 200.0; x += 10.0) {
    const double v = exterior_bound_shape(16.0, x, 1.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(exterior_bound_shape(16.0, -40.0, 1.0) == exterior_bound_shape(16.0, 40.0, 1.0));
}

TEST_CASE("exterior check of a state against itself") {
  const Grid g = make_grid(-64.0, 64.0, 1024);
  State k = kink_state(KinkParams(), g, 0.0);
  k.time = 4.0;
  const ExteriorDecay e = exterior_decay_check(k, k, 0.0, 1.0);
  CHECK(e.lhs == 0.0);
  CHECK(e.ratio == 0.0);
  CHECK(e.bound > 0.0);
  k.time = 0.5;
  CHECK_THROWS(exterior_decay_check(k, k, 0.0, 1.0));
  k.time = 4.0;
  CHECK_THROWS(exterior_decay_check(k, k, 100.0, 1.0));
}

TEST_CASE("decay fits recover exact power laws") {
  std::vector<std::pair<double, double>> series;
  for (double t = 1.0; t <= 100.0; t += 1.0) series.emplace_back(t, 3.0 * std::pow(t, -0.5));
  const DecayFit f = fit_decay_exponent(series, 10.0, 100.0);
  CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.samples == 91);
  CHECK_THROWS(fit_decay_exponent(series, 10.0, 15.0));
  series[50].second = 0.0;
  CHECK_THROWS(fit_decay_exponent(series, 10.0, 100.0));
}

TEST_CASE("tracked trajectory CSV") {
  TrackedTrajectory tt;
  tt.records.push_back({0.0, 0.1, 0.0, 1e-3, 2e-3, 3e-3, {4e-3, 5e-3}});
  const auto path = (std::filesystem::temp_directory_path() / "sgkink_tests" / "track.csv").string();
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  write_csv(tt, {0.0, 5.0}, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("center_velocity") != std::string::npos);
  CHECK(std::count(header.begin(), header.end(), ',') == 7);
}
