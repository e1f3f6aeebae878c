// Times the OpenMP kernels against their serial references on a mid-size
// configuration and checks that both routes agree exactly.

#include <chrono>
#include <cstdio>
#include <string>

#include "cantorlab/cantor.hpp"
#include "cantorlab/energy.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/geometry.hpp"
#include "cantorlab/params.hpp"
#include "cantorlab/reference.hpp"

using namespace cantorlab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class F>
double timed(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return seconds_since(t0);
}

void report(const char* name, double parallel_s, double serial_s, bool equal) {
  std::printf("%-22s %10.4fs %10.4fs %7.2fx %s\n", name, parallel_s, serial_s,
              serial_s / parallel_s, equal ? "match" : "MISMATCH");
}

}  // namespace

int main() {
  const Exponents e = derive_exponents(2, 1.5, 1.5);
  const ParamSequences seq(e, {2, 2, 2, 2, 2}, {3, 4, 5, 5, 6},
                           {8, 10, 12, 12, 14});
  const std::uint64_t seed = 42;
  const std::vector<Stage> stages = build_all(seq, seed);
  const Stage& deep = stages.back();

  std::printf("%-22s %10s %10s %7s\n", "kernel", "parallel", "serial", "speed");

  {
    EndpointSet par, ser;
    const Stage& prev = stages[stages.size() - 2];
    const double tp = timed([&] {
      for (int rep = 0; rep < 40; ++rep)
        par = extend_endpoints(prev.A, prev.P, seq, seed);
    });
    const double ts = timed([&] {
      for (int rep = 0; rep < 40; ++rep)
        ser = reference::extend_endpoints(prev.A, prev.P, seq, seed);
    });
    report("extend_endpoints x40", tp, ts, par.keys == ser.keys);
  }

  {
    const DecayGrid grid = stage_grid(deep.mu, 10.0, 48);
    DecayReport par, ser;
    const double tp = timed([&] { par = decay_profile(deep.mu, 0.25, grid); });
    const double ts =
        timed([&] { ser = reference::decay_profile(deep.mu, 0.25, grid); });
    report("decay_profile", tp, ts,
           par.weighted == ser.weighted && par.c_emp == ser.c_emp);
  }

  {
    const int samples = 2000;
    FrostmanReport par, ser;
    const double tp =
        timed([&] { par = verify_frostman(deep.mu, 2, 1.5, samples, seed); });
    const double ts = timed([&] {
      ser = reference::verify_frostman(deep.mu, 2, 1.5, samples, seed);
    });
    bool equal = par.sup_ratio == ser.sup_ratio &&
                 par.rows.size() == ser.rows.size();
    for (std::size_t i = 0; equal && i < par.rows.size(); ++i)
      equal = par.rows[i].mass == ser.rows[i].mass &&
              par.rows[i].r == ser.rows[i].r;
    report("verify_frostman", tp, ts, equal);
  }

  {
    SumsetProfile par, ser;
    const double tp = timed(
        [&] { par = sumset_profile(deep.P, seq, 2, SumsetMethod::fft); });
    const double ts =
        timed([&] { ser = reference::sumset_profile(deep.P, seq, 2); });
    report("sumset_profile r=2", tp, ts,
           par.sums == ser.sums && par.counts == ser.counts &&
               par.energy == ser.energy);
  }

  return 0;
}
