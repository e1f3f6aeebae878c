#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cantorlab/cantor.hpp"

namespace cantorlab {

// Transform of the unit indicator smoothing, w(u) = (1 - e^{-2pi i u})/(2pi i u)
// with w(0) = 1, evaluated in the stable product form e^{-i pi u} sinc(pi u).
std::complex<double> interval_factor(double u);

// mu_hat(xi) = (1/T_j) sum_a e^{-2 pi i a xi} * w(xi / N_j).
std::complex<double> mu_hat(const StageMeasure& mu, double xi);

// Logarithmic frequency grid [xi_min, xi_max], `points` samples.
struct DecayGrid {
  double xi_min = 1.0;
  double xi_max = 10.0;
  int points = 256;

  std::vector<double> values() const;
};

// Stage grid used throughout: 1 .. max_factor * N_j, log spaced.
DecayGrid stage_grid(const StageMeasure& mu, double max_factor = 10.0,
                     int points_per_decade = 192);

struct DecayReport {
  double exponent = 0.0;  // weight power on (1 + xi)
  std::vector<double> xi;
  std::vector<double> abs_value;
  std::vector<double> weighted;
  double c_emp = 0.0;  // sup of weighted over the grid
  double arg_sup = 0.0;
};

DecayReport decay_profile(const StageMeasure& mu, double exponent,
                          const DecayGrid& grid);

void write_decay_csv(const std::string& path, const DecayReport& rep,
                     const DecayGrid& grid, std::uint64_t seed,
                     const std::string& config_hash);

// Bessel J of integer or half-integer order >= 0: power series up to x = 12,
// large-argument expansion beyond (exact trig forms for half-integer order).
double bessel_j(double order, double x);

// Normalized transform of the unit sphere's surface measure at radius rho:
// gamma(d/2) (pi rho)^{-(d-2)/2} J_{(d-2)/2}(2 pi rho), equal to 1 at rho = 0.
double sphere_hat(int d, double rho);

// Transform of the radialized measure at |xi| = xi_mag:
//   integral of s^{-(d-1)/2} sphere_hat(d, s|xi|) dmu(s),
// real by rotational symmetry; returned as complex per the interface.
// Gauss-Legendre per endpoint interval, 8 + 4*ceil(|xi|/N_j) nodes each.
std::complex<double> nu_hat(const StageMeasure& mu, int d, double xi_mag);

// Retry harness: scan candidate seeds until the empirical decay constants of
// stages [stage_lo, stage_hi] sit within `factor` of each other.
struct DecayStability {
  bool found = false;
  std::uint64_t seed = 0;
  int attempts = 0;
  std::vector<double> c_emp;  // per stage, stage_lo..stage_hi
  double spread = 0.0;        // max / min
};

DecayStability find_stable_decay(const ParamSequences& seq, std::uint64_t seed0,
                                 int budget, int stage_lo, int stage_hi,
                                 double factor);

// Fitted constant for the radial decay envelope
// |nu_hat(xi)| <= C |xi|^{-(d-1)/2} (1+|xi|)^{-beta0/2} over the grid.
struct RadialDecayReport {
  std::vector<double> xi;
  std::vector<double> abs_value;
  double c_fit = 0.0;
};

RadialDecayReport radial_envelope_fit(const StageMeasure& mu, int d,
                                      double beta0, const DecayGrid& grid);

}  // namespace cantorlab
