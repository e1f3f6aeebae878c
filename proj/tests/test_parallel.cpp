#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <complex>
#include <vector>

#include "cantorlab/cantor.hpp"
#include "cantorlab/energy.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/geometry.hpp"
#include "cantorlab/norms.hpp"
#include "cantorlab/params.hpp"
#include "cantorlab/reference.hpp"

using namespace cantorlab;

namespace {

ParamSequences geo() {
  return ParamSequences(derive_exponents(2, 1.5, 1.5), {2, 2, 2}, {3, 4, 5},
                        {8, 10, 12});
}

}  // namespace

TEST_CASE("stage extension is independent of thread count") {
  const ParamSequences seq = geo();
  const std::vector<Stage> base = build_all(seq, 71);
  const Stage& prev = base[2];

  omp_set_num_threads(1);
  const EndpointSet one = extend_endpoints(prev.A, prev.P, seq, 71);
  omp_set_num_threads(4);
  const EndpointSet four = extend_endpoints(prev.A, prev.P, seq, 71);
  const EndpointSet serial = reference::extend_endpoints(prev.A, prev.P, seq, 71);

  CHECK(one.keys == four.keys);
  CHECK(one.keys == serial.keys);
}

TEST_CASE("decay grids agree bit for bit across thread counts") {
  const ParamSequences seq = geo();
  const std::vector<Stage> stages = build_all(seq, 72);
  const StageMeasure& mu = stages[3].mu;
  const DecayGrid grid = stage_grid(mu, 10.0, 64);

  omp_set_num_threads(1);
  const DecayReport one = decay_profile(mu, 0.25, grid);
  omp_set_num_threads(4);
  const DecayReport four = decay_profile(mu, 0.25, grid);
  const DecayReport serial = reference::decay_profile(mu, 0.25, grid);

  CHECK(one.abs_value == four.abs_value);
  CHECK(one.weighted == serial.weighted);
  CHECK(one.c_emp == four.c_emp);
  CHECK(one.c_emp == serial.c_emp);
  CHECK(one.arg_sup == serial.arg_sup);
}

TEST_CASE("ball sampling agrees bit for bit across thread counts") {
  const ParamSequences seq = geo();
  const std::vector<Stage> stages = build_all(seq, 73);
  const StageMeasure& mu = stages[3].mu;

  omp_set_num_threads(1);
  const FrostmanReport one = verify_frostman(mu, 2, 1.5, 600, 7);
  omp_set_num_threads(4);
  const FrostmanReport four = verify_frostman(mu, 2, 1.5, 600, 7);
  const FrostmanReport serial = reference::verify_frostman(mu, 2, 1.5, 600, 7);

  REQUIRE(one.rows.size() == four.rows.size());
  REQUIRE(one.rows.size() == serial.rows.size());
  CHECK(one.sup_ratio == four.sup_ratio);
  CHECK(one.sup_ratio == serial.sup_ratio);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    CHECK(one.rows[i].mass == four.rows[i].mass);
    CHECK(one.rows[i].mass == serial.rows[i].mass);
    CHECK(one.rows[i].ratio == serial.rows[i].ratio);
    CHECK(one.rows[i].x == serial.rows[i].x);
  }
}

TEST_CASE("sumset transform route is thread invariant and matches direct") {
  const ParamSequences seq = geo();
  const std::vector<Stage> stages = build_all(seq, 74);
  const EndpointSet& P = stages[3].P;

  omp_set_num_threads(1);
  const SumsetProfile one = sumset_profile(P, seq, 2, SumsetMethod::fft);
  omp_set_num_threads(4);
  const SumsetProfile four = sumset_profile(P, seq, 2, SumsetMethod::fft);
  const SumsetProfile serial = reference::sumset_profile(P, seq, 2);

  CHECK(one.sums == four.sums);
  CHECK(one.counts == four.counts);
  CHECK(one.energy == four.energy);
  CHECK(one.sums == serial.sums);
  CHECK(one.counts == serial.counts);
  CHECK(one.energy == serial.energy);
}

TEST_CASE("frequency-side integrals are thread invariant") {
  const ParamSequences seq = geo();
  const std::vector<Stage> stages = build_all(seq, 75);
  const Stage& st = stages[1];
  const TestFunction f = make_test_function(st, seq, 2);
  const WindowG w(make_knapp_box(2, 2, f.delta));
  const Key k0 = f.bumps[0].key;
  const Key k1 = f.bumps[1].key;

  omp_set_num_threads(1);
  const double lp_one = lp_lower_direct(f, st.mu, 2, 2.0, 2, 1e-6);
  const TupleIntegral ti_one =
      tuple_window_integral({k0, k0, k1, k1}, w, f, st.mu);
  omp_set_num_threads(4);
  const double lp_four = lp_lower_direct(f, st.mu, 2, 2.0, 2, 1e-6);
  const TupleIntegral ti_four =
      tuple_window_integral({k0, k0, k1, k1}, w, f, st.mu);

  CHECK(lp_one == lp_four);
  CHECK(ti_one.value.real() == ti_four.value.real());
  CHECK(ti_one.value.imag() == ti_four.value.imag());
  CHECK(ti_one.grid_nodes == ti_four.grid_nodes);
}
