#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "cantorlab/cantor.hpp"
#include "cantorlab/geometry.hpp"
#include "cantorlab/params.hpp"

namespace cantorlab {

// eta = 1 / (2 * 6 pi d (2^{2r} - 1)): with the phase bound |xi.(x - a e_d)|
// <= 3 d eta this keeps every coherent 2r-fold product within a factor 1/2
// of its zero-frequency value.
double choose_eta(int r, int d);

// Dual box of the stage-l sector family: |xi_j| <= eta/delta for j < d and
// |xi_d| <= eta/delta^2, with delta = N_l^{-1/2}.
struct KnappBox {
  int d = 2;
  double eta = 0.0;
  double delta = 0.0;

  double half_side(int axis, double c = 1.0) const;  // axis in [0, d)
  // Lebesgue volume of the c-scaled box, (2 c eta)^d delta^{-(d+1)}.
  double volume(double c = 1.0) const;
};

KnappBox make_knapp_box(int d, int r, double delta);

// Separable frequency window g(xi) = prod_j g_j(xi_j). Per axis, h_j is an
// even smooth plateau equal to 1 on |u| <= H_j/4 and 0 beyond H_j/2 (H_j the
// c = 1 half side), and g_j is its autocorrelation. Hence g >= 0, supp g
// inside the box, g_j <= H_j everywhere (so g <= volume(1/2)), and
// g_j(xi) >= H_j/4 for |xi| <= H_j/4 (so g >= volume(1/8) on the 1/4 box).
class WindowG {
 public:
  explicit WindowG(const KnappBox& box) : box_(box) {}

  const KnappBox& box() const { return box_; }
  double axis_h(int axis, double u) const;
  double axis_g(int axis, double xi) const;  // piecewise Gauss-Legendre
  double eval(const std::vector<double>& xi) const;

  double plateau_floor() const { return box_.volume(0.125); }
  double sup_bound() const { return box_.volume(0.5); }

 private:
  KnappBox box_;
};

struct WindowReport {
  bool nonneg_ok = false;
  bool support_ok = false;
  bool plateau_ok = false;    // g_j >= H_j/4 on |xi| <= H_j/4, every axis
  bool upper_ok = false;      // g_j <= H_j, every axis
  bool transform_ok = false;  // autocorrelation matches the |h hat|^2 route
  double min_value = 0.0;             // most negative g_j sample seen
  double worst_plateau_margin = 0.0;  // min of (g_j - H_j/4)/H_j on the plateau
  double transform_gap = 0.0;         // worst |g_j - transform route| / H_j
};

// Grid-checks the window invariants axis by axis (the product form makes the
// d-dimensional claims follow). The transform route recomputes g_j as the
// inverse cosine transform of (h_j hat)^2; agreement certifies that the
// distributional inverse transform of g is nonnegative.
WindowReport verify_window(const WindowG& w, int refinement = 4,
                           double transform_tol = 2e-3);

// Centered sector transform of one bump,
//   B_a(xi) = integral of e^{-2 pi i xi.(x - a e_d)} psi_a(x) dnu(x),
// by tensor Gauss-Legendre in (radius, polar angle), nodes doubled until the
// relative change passes rel_tol. d = 2 direct; d = 3 via the azimuthal
// Bessel reduction. Throws on non-convergence, naming the node count.
std::complex<double> sector_transform_centered(const BumpSpec& psi,
                                               const StageMeasure& mu,
                                               const std::vector<double>& xi,
                                               double rel_tol = 1e-9);

// f_l hat dnu(xi) = sum over bumps of e^{-2 pi i xi_d a} B_a(xi).
std::complex<double> f_hat_nu(const TestFunction& f, const StageMeasure& mu,
                              const std::vector<double>& xi,
                              double rel_tol = 1e-6);

// Tensor quadrature of |f hat dnu|^p over the c = 1 box; per-axis node count
// doubles until the relative change passes rel_tol. A certified lower bound
// for the global L^p norm (the integrand is nonnegative).
double lp_lower_direct(const TestFunction& f, const StageMeasure& mu, int d,
                       double p, int r, double rel_tol = 1e-6);

// Exact floor for the 2r-th moment of f_l hat dnu over the box:
// (2r)^{-l} N^{(d+1)/2} N^{-r(d-1)} T^{-2r} S^{2r-1}, evaluated in log space.
double box_moment_floor(const ParamSequences& seq, int l, int r, int d);

// Formula floor for the p-th moment:
// N^{-(p/2)(d-1+beta0) + (d+1)/2 - alpha0 + beta0/2}
//   / ((2r)^l n_{l+1}^{alpha0} ln(400 (l+1) N_{l+1})),
// with the last stage reusing n_l, N_l where l+1 would run off the end.
double lp_floor_formula(const ParamSequences& seq, int l, double p, int r,
                        int d);

// Reference scale of the squared-norm route: N^{-(p/4)(d-1+beta0)}.
double l2_scale_formula(const ParamSequences& seq, int l, double p, int d);

// p0 = (4d - 4 alpha + 2 beta) / beta; the floor/scale ratio diverges below
// it and converges above it.
double divergence_threshold(int d, double alpha, double beta);

// N-exponent of the floor/scale ratio:
// -(p/4)(d-1+beta0) + (d+1)/2 - alpha0 + beta0/2. Positive iff p < p0.
double ratio_log_slope(int d, double alpha, double beta, double p);

struct RatioSeries {
  double p = 0.0;
  int r = 0;
  int d = 0;
  double p0 = 0.0;
  double log_slope = 0.0;
  std::vector<int> stages;
  std::vector<double> values;  // floor / scale per stage
  std::string mode;            // "formula" or "measured"
  std::string classification;  // "diverging" | "threshold" | "converging"
};

RatioSeries ratio_trend_formula(const ParamSequences& seq,
                                const std::vector<int>& stages, double p,
                                int r, int d);
// Measured variant: lp_lower_direct / f_l2_norm_sq^{p/2} on built stages.
RatioSeries ratio_trend_measured(const std::vector<Stage>& built,
                                 const ParamSequences& seq,
                                 const std::vector<int>& stages, double p,
                                 int r, int d);

void write_ratio_csv(const std::string& path, const RatioSeries& series,
                     const ParamSequences& seq, std::uint64_t seed,
                     const std::string& config_hash);
void write_ratio_gnuplot(const std::string& path, const std::string& csv_path);

struct PhaseBoundReport {
  double bound = 0.0;     // 3 d eta
  double max_phase = 0.0; // max |xi.(x - a e_d)| over the samples
  int violations = 0;
  int samples = 0;
};

// Samples x in supp psi_a, xi in the box, and checks the phase bound.
PhaseBoundReport verify_phase_bound(const TestFunction& f,
                                    const StageMeasure& mu,
                                    const KnappBox& box, int samples,
                                    std::uint64_t seed);

struct PlateauReport {
  double f0_abs = 0.0;   // |f hat dnu(0)|
  double min_abs = 0.0;  // min |f hat dnu(xi)| on the 1/8-box grid
  double min_ratio = 0.0;
  bool ok = false;  // min_ratio >= 1/2
};

PlateauReport verify_knapp_plateau(const TestFunction& f,
                                   const StageMeasure& mu, const KnappBox& box,
                                   int grid_per_axis = 5);

struct TupleIntegral {
  std::complex<double> value;  // integral of g e^{-2 pi i xi_d Delta} prod B prod conj(B)
  double scale = 0.0;          // volume(1/2) * prod |B_{a_i}(0)|
  int grid_nodes = 0;          // per-axis node count at convergence
};

// One coherence integral of the 2r-fold expansion of the windowed moment:
// the first r tuple entries enter as B, the last r conjugated, and Delta is
// the (exact) difference of the two half-sums of the base points. Always
// nonnegative in exact arithmetic because the inverse transform of g is a
// square. Guards: d = 2, r = 2, stage <= 2.
TupleIntegral tuple_window_integral(const std::vector<Key>& tuple,
                                    const WindowG& w, const TestFunction& f,
                                    const StageMeasure& mu,
                                    double abs_tol_scaled = 1e-10);

}  // namespace cantorlab
