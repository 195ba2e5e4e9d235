#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "sgkink/exact.hpp"
#include "sgkink/integrator.hpp"

using namespace sgk;

namespace {

double linf(const Field& f) { return norm(f, NormSpec::lp(INFINITY)); }

State breather_state(const Grid& g, double t) {
  return sample_state(ExactSolution::make_breather(BreatherParams(0.0, 0.5, 0.0, 0.0)), g, t);
}

// Temporal self-convergence order on a fixed grid, so the spatial error cancels.
double time_order(Scheme::Kind kind, double dt) {
  const Grid g = make_grid(-64.0, 64.0, 1024);
  auto run = [&](double h) { return evolve_observed(breather_state(g, 0.0), {kind, h}, 2.0, 2.0, nullptr).phi; };
  const Field a = run(dt), b = run(dt / 2.0), c = run(dt / 4.0);
  return std::log2(linf(a - b) / linf(b - c));
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (auto k : {Scheme::Kind::Leapfrog, Scheme::Kind::Composition4, Scheme::Kind::StrangSplitSpectral})
    CHECK(scheme_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(scheme_kind_from_string("euler"));
}

TEST_CASE("static kink stays put under leapfrog") {
  const Grid g = make_grid(-32.0, 32.0, 2048);
  const State k = kink_state(KinkParams(), g, 0.0);
  const State s = evolve_observed(k, {Scheme::Kind::Leapfrog, 1.0 / 64.0}, 10.0, 10.0, nullptr);
  CHECK(s.time == doctest::Approx(10.0));
  CHECK(linf(s.phi - k.phi) < 1e-4);
}

TEST_CASE("zero data stays zero") {
  const Grid g = make_grid(-16.0, 16.0, 256);
  const State z{Field(g), Field(g), 0.0, Topology::Zero};
  for (auto kind : {Scheme::Kind::Leapfrog, Scheme::Kind::Composition4, Scheme::Kind::StrangSplitSpectral}) {
    const State s = evolve_observed(z, {kind, 0.05}, 1.0, 1.0, nullptr);
    CHECK(linf(s.phi) == 0.0);
    CHECK(linf(s.phi_t) == 0.0);
  }
}

TEST_CASE("breather returns after one period") {
  const Grid g = make_grid(-64.0, 64.0, 1024);
  const BreatherParams p(0.0, 0.5, 0.0, 0.0);
  const double period = 2.0 * kPi / p.alpha();
  const State s0 = breather_state(g, 0.0);
  const State s = evolve_observed(s0, {Scheme::Kind::StrangSplitSpectral, period / 400.0}, period, period, nullptr);
  CHECK(linf(s.phi - s0.phi) < 1e-3);
}

TEST_CASE("convergence orders of the schemes") {
  CHECK(time_order(Scheme::Kind::Leapfrog, 0.1) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(time_order(Scheme::Kind::Composition4, 0.1) == doctest::Approx(4.0).epsilon(0.15));
  CHECK(time_order(Scheme::Kind::StrangSplitSpectral, 0.1) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("pde_residual of exact and wrong trajectories") {
  const Grid g = make_grid(-32.0, 32.0, 1024);
  const Trajectory tr = evolve(kink_state(KinkParams(0.3, 0.0), g, 0.0), {Scheme::Kind::Composition4, 1.0 / 64.0},
                               1.0, 1.0 / 64.0);
  CHECK(linf(pde_residual(tr, 0.5)) < 1e-4);

  Trajectory zero;
  zero.interval = 0.1;
  for (int k = 0; k < 3; ++k) zero.states.push_back({Field(g), Field(g), 0.1 * k, Topology::Zero});
  CHECK(linf(pde_residual(zero, 0.1)) == 0.0);

  // A static bump is not a solution: residual equals -f_xx + sin f.
  Trajectory bump = zero;
  for (auto& s : bump.states) s.phi = sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(linf(pde_residual(bump, 0.1)) > 0.5);
}

TEST_CASE("conserved quantities of the kink") {
  const Grid g = make_grid(-40.0, 40.0, 4096);
  const Conserved c0 = conserved_quantities(kink_state(KinkParams(), g, 0.0));
  CHECK(c0.E0 == doctest::Approx(8.0).epsilon(1e-8));
  CHECK(std::abs(c0.P) < 1e-12);
  const double beta = 0.6, gamma = 1.25;
  const Conserved c = conserved_quantities(kink_state(KinkParams(beta, 0.0), g, 0.0));
  CHECK(c.E0 == doctest::Approx(8.0 * gamma).epsilon(1e-8));
  CHECK(c.P == doctest::Approx(-4.0 * beta * gamma).epsilon(1e-8));
}

TEST_CASE("energy-momentum tensor of the kink") {
  const Grid g = make_grid(-40.0, 40.0, 2048);
  const EnergyMomentum em = em_tensor(kink_state(KinkParams(), g, 0.0));
  CHECK(integrate(em.T00) == doctest::Approx(8.0).epsilon(1e-6));
  // Static kink: f_x^2/2 = 1 - cos f, so T11 vanishes up to the difference error.
  CHECK(linf(em.T11) < 1e-5);
  CHECK(linf(em.T01) == 0.0);
}

TEST_CASE("local conservation residual is small on the moving kink") {
  const Grid g = make_grid(-32.0, 32.0, 2048);
  const Trajectory tr = evolve(kink_state(KinkParams(0.4, 0.0), g, 0.0),
                               {Scheme::Kind::Composition4, 1.0 / 64.0}, 0.5, 1.0 / 64.0);
  const TensorResidual r = em_conservation_residual(tr, 0.25);
  CHECK(linf(r.r0) < 1e-4);
  CHECK(linf(r.r1) < 1e-4);
}

TEST_CASE("energy drift: second order for leapfrog, tiny for composition") {
  const Grid g = make_grid(-64.0, 64.0, 2048);
  const State s0 = breather_state(g, 0.0);
  const double E = conserved_quantities(s0).E0;
  auto drift = [&](Scheme sch) {
    double worst = 0.0;
    evolve_observed(s0, sch, 10.0, 0.5, [&](const State& s) {
      worst = std::max(worst, std::abs(conserved_quantities(s).E0 - E));
    });
    return worst / E;
  };
  const double a = drift({Scheme::Kind::Leapfrog, 0.04}), b = drift({Scheme::Kind::Leapfrog, 0.02});
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.2));
  CHECK(drift({Scheme::Kind::Composition4, 1.0 / 32.0}) < 1e-6);
}

TEST_CASE("time reversal returns the initial data") {
  const Grid g = make_grid(-40.0, 40.0, 1024);
  const State s0 = sample_state(ExactSolution::make_kink(KinkParams(0.3, 0.0)), g, 0.0);
  const Scheme sch{Scheme::Kind::Composition4, 1.0 / 32.0};
  State s = evolve_observed(s0, sch, 3.0, 3.0, nullptr);
  s.phi_t = -1.0 * s.phi_t;
  s.time = 0.0;
  State back = evolve_observed(s, sch, 3.0, 3.0, nullptr);
  CHECK(linf(back.phi - s0.phi) < 1e-9);
  CHECK(linf(back.phi_t + s0.phi_t) < 1e-9);
}

TEST_CASE("observer is called at every snapshot") {
  const Grid g = make_grid(-16.0, 16.0, 256);
  const State z{Field(g), Field(g), 0.0, Topology::Zero};
  std::vector<double> times;
  evolve_observed(z, {Scheme::Kind::Leapfrog, 0.03}, 1.0, 0.25, [&](const State& s) { times.push_back(s.time); });
  REQUIRE(times.size() == 5);
  for (std::size_t k = 0; k < times.size(); ++k) CHECK(times[k] == doctest::Approx(0.25 * k));
}

TEST_CASE("integrator rejects invalid input") {
  const Grid g = make_grid(-32.0, 32.0, 512);
  const State k = kink_state(KinkParams(), g, 0.0);
  CHECK_THROWS(evolve(k, {Scheme::Kind::Leapfrog, 0.2}, 1.0, 1.0));
  CHECK_THROWS(evolve(k, {Scheme::Kind::StrangSplitSpectral, 0.01}, 1.0, 1.0));
  CHECK_THROWS(evolve(k, {Scheme::Kind::Composition4, 0.01}, 1.0, 0.3));
  State big{sample(g, [](double x) { return 5e6 * std::exp(-x * x); }), Field(g), 0.0, Topology::Zero};
  CHECK_THROWS_AS(evolve(big, {Scheme::Kind::Leapfrog, 0.05}, 1.0, 1.0), BlowUpError);
}

TEST_CASE("trajectory index lookup and output") {
  const Grid g = make_grid(-16.0, 16.0, 64);
  const State z{Field(g), Field(g), 0.0, Topology::Zero};
  const Trajectory tr = evolve(z, {Scheme::Kind::Leapfrog, 0.1}, 1.0, 0.5);
  CHECK(tr.states.size() == 3);
  CHECK(tr.index_of(0.5) == 1);
  CHECK_THROWS_AS(tr.index_of(0.7), std::out_of_range);
  const auto dir = std::filesystem::temp_directory_path() / "sgkink_tests" / "traj";
  std::filesystem::remove_all(dir);
  write_trajectory(tr, dir.string());
  CHECK(std::filesystem::exists(dir / "snapshot_2.sgf"));
  CHECK(read_snapshot((dir / "snapshot_1.sgf").string()).time == doctest::Approx(0.5));
}
