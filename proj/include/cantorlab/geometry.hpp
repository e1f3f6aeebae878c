#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cantorlab/cantor.hpp"

namespace cantorlab {

// C-infinity step: 1 for u <= 0, 0 for u >= 1, strictly monotone between,
// built from the standard exp(-1/u) gluing pair. Shared by the sector bumps
// and the frequency-side window plateaus.
double smooth_step_down(double u);

// Normalized measure of the chord-metric cap {omega : |omega - e| <= w/2}.
// Closed form on the circle; polar-angle quadrature of sin^{d-2} for d >= 3.
// Equals 1 once w/2 reaches the diameter (w >= 4).
double cap_measure(int d, double w);

// Same cap by polar half-angle theta (used by the ball decomposition).
double cap_measure_theta(int d, double theta);

// Annular sector: radii in [r_lo, r_lo + thickness], directions within
// chord distance width/2 of the axis. The axis never affects its measure.
struct SectorRegion {
  int d = 2;
  double r_lo = 1.0;
  double thickness = 0.0;
  double width = 0.0;
  std::vector<double> axis;  // optional; defaults to e_d
};

// nu(sector) = cap_measure(d, width) * radial mass, with the radial factor
// integrated in closed form against s^{-(d-1)/2} dmu.
double nu_region_mass(const StageMeasure& mu, int d, const SectorRegion& region);

// Total nu mass (full sphere, all radii); equals nu_hat at 0.
double nu_total_mass(const StageMeasure& mu, int d);

// Smooth sector bump: product of a radial plateau on [a, a + delta^2] and an
// angular plateau on {chord <= delta/2}, both with collar width delta^2/2
// (the angular collar measured in the chord metric). Equal to 1 on the core
// sector and 0 outside the collar-thickened sector.
struct BumpSpec {
  int d = 2;
  Key key = 0;             // endpoint key of the carrying interval
  double a = 1.0;          // inner radius
  double thickness = 0.0;  // delta^2 = 1/N_l
  double half_width = 0.0; // delta/2, chord units
  double collar = 0.0;     // delta^2 / 2
};

BumpSpec make_bump(const StageMeasure& mu, int d, Key endpoint_key);

double bump_eval(const BumpSpec& psi, const std::vector<double>& x);

// Throws invariant_error unless the bump's carrying interval is isolated
// inside A_l (adjacent keys at distance >= 2 in key units); with isolation
// the radial collar is free of foreign mass.
void require_bump_isolated(const BumpSpec& psi, const StageMeasure& mu);

// integral of psi dnu; tensorizes into (radial plateau vs mu) x (angular
// plateau vs cap density). Errors if another endpoint interval intrudes into
// the bump's radial collar (the sector-counting reading would be wrong).
double bump_nu_integral(const BumpSpec& psi, const StageMeasure& mu,
                        int nodes = 64);

// f_l = sum of bumps over the kept progression P_l.
struct TestFunction {
  int d = 2;
  int stage = 0;
  double delta = 0.0;  // N_l^{-1/2}
  std::vector<BumpSpec> bumps;
};

// Requires check_isolation(A_l, P_l); bump supports are then pairwise
// disjoint and every norm splits into per-bump terms.
TestFunction make_test_function(const Stage& stage, const ParamSequences& seq,
                                int d);

// ||f_l||^2 in L^2(nu) = sum_a integral of psi_a^2 dnu.
double f_l2_norm_sq(const TestFunction& f, const StageMeasure& mu,
                    int nodes = 64);

// nu(B(x, r)) via radial slabs: the sphere of radius s meets the ball in a
// cap whose half-angle satisfies cos(theta) = (s^2 + |x|^2 - r^2)/(2 s |x|);
// integrate its measure against s^{-(d-1)/2} dmu.
double nu_ball_mass(const StageMeasure& mu, int d, const std::vector<double>& x,
                    double r);

struct FrostmanRow {
  std::vector<double> x;
  double r = 0.0;
  double mass = 0.0;
  double ratio = 0.0;  // mass / r^alpha
};

struct FrostmanReport {
  double alpha = 0.0;
  double sup_ratio = 0.0;
  std::vector<FrostmanRow> rows;
};

// Random balls centered on or radially jittered off the support, radius
// log-uniform in [1/N_l, 1]. Deterministic per (seed, sample index) and
// independent of thread count.
FrostmanReport verify_frostman(const StageMeasure& mu, int d, double alpha,
                               int samples, std::uint64_t seed);

void write_frostman_csv(const std::string& path, const FrostmanReport& rep,
                        std::uint64_t seed, const std::string& config_hash);

}  // namespace cantorlab
