#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "cantorlab/cantor.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/geometry.hpp"
#include "cantorlab/params.hpp"
#include "cantorlab/rng.hpp"

using namespace cantorlab;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

ParamSequences tiny() {
  return ParamSequences(derive_exponents(2, 1.5, 1.5), {2, 1}, {3, 4}, {8, 12});
}

ParamSequences tiny3() {
  return ParamSequences(derive_exponents(3, 2.5, 2.5), {2, 1}, {3, 4}, {8, 12});
}

Stage adversarial_stage(const ParamSequences& seq) {
  // Right count for stage 1 but packed flush: isolation fails.
  EndpointSet A;
  A.stage = 1;
  A.kind = 'A';
  A.keys = {1, 2, 3};
  EndpointSet P;
  P.stage = 1;
  P.kind = 'P';
  P.keys = {1, 3};
  auto shared = std::make_shared<EndpointSet>(A);
  return Stage{std::move(P), std::move(A), StageMeasure(shared, seq)};
}

}  // namespace

TEST_CASE("smooth step endpoints and monotonicity") {
  CHECK(smooth_step_down(-0.5) == 1.0);
  CHECK(smooth_step_down(0.0) == 1.0);
  CHECK(smooth_step_down(1.0) == 0.0);
  CHECK(smooth_step_down(1.5) == 0.0);
  CHECK(smooth_step_down(0.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double v = smooth_step_down(i / 20.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("cap measure closed forms") {
  CHECK(cap_measure(2, 4.0) == doctest::Approx(1.0));
  CHECK(cap_measure(3, 4.0) == doctest::Approx(1.0));
  CHECK(cap_measure(2, 0.0) == doctest::Approx(0.0));

  // Circle: arc fraction theta / pi with chord w/2 = 2 sin(theta/2).
  for (double w : {0.3, 1.0, 2.7}) {
    const double theta = 2.0 * std::asin(0.25 * w);
    CHECK(cap_measure(2, w) == doctest::Approx(theta / kPi).epsilon(1e-13));
  }

  // Sphere: the chord cap has the exact area fraction (w/4)^2.
  for (double w : {0.2, 1.1, 3.0}) {
    CHECK(cap_measure(3, w) == doctest::Approx(w * w / 16.0).epsilon(1e-12));
  }

  // Monte Carlo cross-check on the circle, 3 sigma gate.
  Rng rng(2024);
  const int trials = 200000;
  const double w = 0.9;
  int hits = 0;
  for (int i = 0; i < trials; ++i) {
    const double theta = 2.0 * kPi * rng.next_unit();
    const double chord = 2.0 * std::abs(std::sin(0.5 * theta));
    if (chord <= 0.5 * w) ++hits;
  }
  const double p = cap_measure(2, w);
  const double sigma = std::sqrt(p * (1.0 - p) / trials);
  CHECK(std::abs(static_cast<double>(hits) / trials - p) < 3.0 * sigma + 1e-9);

  CHECK_THROWS_AS(cap_measure(2, -0.1), config_error);
}

TEST_CASE("sector masses: closed form, nesting, totals") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 11);
  const StageMeasure& mu = stages[1].mu;
  const double len = mu.interval_length();

  // One interval, one cap: radial antiderivative is elementary for d = 2.
  const Key k = stages[1].A.keys.front();
  const double a = mu.value_of(k);
  SectorRegion one{2, a, len, 0.8, {}};
  const double radial = 2.0 * (std::sqrt(a + len) - std::sqrt(a));
  const double expect = mu.density() * radial * cap_measure(2, 0.8);
  CHECK(nu_region_mass(mu, 2, one) == doctest::Approx(expect).epsilon(1e-12));

  // Widening or thickening the sector never loses mass.
  SectorRegion narrow{2, a, len, 0.4, {}};
  SectorRegion wide{2, a, len, 0.8, {}};
  SectorRegion tall{2, a - len, 3.0 * len, 0.4, {}};
  CHECK(nu_region_mass(mu, 2, narrow) <= nu_region_mass(mu, 2, wide));
  CHECK(nu_region_mass(mu, 2, narrow) <= nu_region_mass(mu, 2, tall));

  // Whole-space sector equals the total, and the total matches the
  // transform at zero frequency (independent quadrature route).
  SectorRegion everything{2, 0.5, 3.0, 4.0, {}};
  const double total = nu_total_mass(mu, 2);
  CHECK(nu_region_mass(mu, 2, everything) == doctest::Approx(total).epsilon(1e-13));
  CHECK(std::abs(total - nu_hat(mu, 2, 0.0).real()) < 1e-8);

  const double total3 = nu_total_mass(stages[1].mu, 3);
  CHECK(std::abs(total3 - nu_hat(stages[1].mu, 3, 0.0).real()) < 1e-8);
}

TEST_CASE("bump evaluation: plateau, support, range") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 11);
  const StageMeasure& mu = stages[1].mu;
  const Key k = stages[1].P.keys.front();
  const BumpSpec psi = make_bump(mu, 2, k);

  // Dead center of the sector core.
  const double mid = psi.a + 0.5 * psi.thickness;
  CHECK(bump_eval(psi, {0.0, mid}) == doctest::Approx(1.0));

  // Far off the support.
  CHECK(bump_eval(psi, {0.0, -mid}) == 0.0);
  CHECK(bump_eval(psi, {3.0, 0.0}) == 0.0);

  // Radially inside, angularly on the collar: strictly between 0 and 1.
  const double chord = psi.half_width + 0.5 * psi.collar;
  const double theta = 2.0 * std::asin(0.5 * chord);
  const double v =
      bump_eval(psi, {mid * std::sin(theta), mid * std::cos(theta)});
  CHECK(v > 0.0);
  CHECK(v < 1.0);

  CHECK_THROWS_AS(make_bump(mu, 2, Key{999}), invariant_error);
}

TEST_CASE("bump integrals sit between the sector bounds") {
  for (int d : {2, 3}) {
    const ParamSequences seq = (d == 2) ? tiny() : tiny3();
    const std::vector<Stage> stages = build_all(seq, 29);
    for (int l : {1, 2}) {
      const Stage& st = stages[static_cast<std::size_t>(l)];
      const TestFunction f = make_test_function(st, seq, d);
      const double delta = f.delta;
      for (const BumpSpec& psi : f.bumps) {
        SectorRegion inner{d, psi.a, psi.thickness, delta, {}};
        SectorRegion outer{d, psi.a, psi.thickness, 2.0 * delta, {}};
        const double lo = nu_region_mass(st.mu, d, inner);
        const double hi = nu_region_mass(st.mu, d, outer);
        const double mid = bump_nu_integral(psi, st.mu);
        CHECK(lo > 0.0);
        CHECK(mid >= lo * (1.0 - 1e-12));
        CHECK(mid <= hi * (1.0 + 1e-12));
        // psi <= 1 forces the square integral under the plain one.
        CHECK(f_l2_norm_sq(f, st.mu) > 0.0);
      }
    }
  }
}

TEST_CASE("sector mass against the width yardstick stays within x8") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 29);
  for (int l : {1, 2}) {
    const Stage& st = stages[static_cast<std::size_t>(l)];
    const double delta = 1.0 / std::sqrt(st.mu.scale());
    const double T = to_double(seq.T_at(l));
    double lo = 1e300, hi = 0.0;
    for (Key k : st.A.keys) {
      for (double w : {delta, 2.0 * delta}) {
        SectorRegion reg{2, st.mu.value_of(k), st.mu.interval_length(), w, {}};
        const double ratio =
            nu_region_mass(st.mu, 2, reg) * T / w;  // w^{d-1} with d = 2
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
    CHECK(hi / lo <= 8.0);
  }
}

TEST_CASE("isolation failures are refused") {
  const ParamSequences seq = tiny();
  const Stage bad = adversarial_stage(seq);
  CHECK_FALSE(check_isolation(bad.A, bad.P, seq));
  CHECK_THROWS_AS(make_test_function(bad, seq, 2), invariant_error);

  BumpSpec psi = make_bump(bad.mu, 2, 2);
  CHECK_THROWS_AS(require_bump_isolated(psi, bad.mu), invariant_error);
  CHECK_THROWS_AS(bump_nu_integral(psi, bad.mu), invariant_error);
}

TEST_CASE("ball masses: swallowing, vanishing, monotonicity") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 37);
  const StageMeasure& mu = stages[2].mu;

  // A huge origin ball swallows the whole support.
  CHECK(nu_ball_mass(mu, 2, {0.0, 0.0}, 10.0) ==
        doctest::Approx(nu_total_mass(mu, 2)).epsilon(1e-12));

  // A ball far from the annulus misses it.
  CHECK(nu_ball_mass(mu, 2, {5.0, 5.0}, 0.5) == 0.0);

  // Growing radius never loses mass.
  const std::vector<double> x{0.3, 1.2};
  double prev = 0.0;
  for (double r : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double m = nu_ball_mass(mu, 2, x, r);
    CHECK(m >= prev - 1e-15);
    prev = m;
  }

  // Monte Carlo oracle for one concrete ball, 3 sigma gate. Sample the
  // radial coordinate uniformly per interval and the angle uniformly, then
  // weight by the nu density.
  const std::vector<double> c{0.2, 1.3};
  const double r = 0.35;
  const double mass = nu_ball_mass(mu, 2, c, r);
  Rng rng(555);
  const int trials = 400000;
  double acc = 0.0, acc2 = 0.0;
  const auto& keys = mu.endpoints().keys;
  const double len = mu.interval_length();
  for (int i = 0; i < trials; ++i) {
    const Key k = keys[rng.next_below(keys.size())];
    const double s = mu.value_of(k) + len * rng.next_unit();
    const double phi = 2.0 * kPi * rng.next_unit();
    const double dx = s * std::sin(phi) - c[0];
    const double dy = s * std::cos(phi) - c[1];
    const double inside = (dx * dx + dy * dy <= r * r) ? 1.0 : 0.0;
    // Density of the sampler against nu: interval mass uniform over length.
    const double weight = inside / std::sqrt(s);
    acc += weight;
    acc2 += weight * weight;
  }
  const double mean = acc / trials;
  const double var = std::max(0.0, acc2 / trials - mean * mean);
  const double estimate = mean;  // per-sample nu weight already normalized
  const double scale = mu.density() * len * static_cast<double>(keys.size());
  const double mc = estimate * scale;
  const double sigma = std::sqrt(var / trials) * scale;
  CHECK(std::abs(mc - mass) < 3.0 * sigma + 1e-6);
}

TEST_CASE("frostman sampler: determinism, emptiness, recomputation") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 41);
  const StageMeasure& mu = stages[2].mu;

  const FrostmanReport empty = verify_frostman(mu, 2, 1.5, 0, 9);
  CHECK(empty.rows.empty());
  CHECK(empty.sup_ratio == 0.0);

  const FrostmanReport a = verify_frostman(mu, 2, 1.5, 400, 9);
  const FrostmanReport b = verify_frostman(mu, 2, 1.5, 400, 9);
  REQUIRE(a.rows.size() == 400);
  CHECK(a.sup_ratio == b.sup_ratio);
  for (std::size_t i = 0; i < a.rows.size(); i += 37) {
    CHECK(a.rows[i].mass == b.rows[i].mass);
    CHECK(a.rows[i].r == b.rows[i].r);
    CHECK(a.rows[i].r > 0.0);
    CHECK(a.rows[i].mass >= 0.0);
    CHECK(a.rows[i].mass ==
          doctest::Approx(nu_ball_mass(mu, 2, a.rows[i].x, a.rows[i].r))
              .epsilon(1e-14));
  }
  CHECK(a.sup_ratio > 0.0);
}
