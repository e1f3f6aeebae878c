#include "cantorlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "cantorlab/errors.hpp"
#include "cantorlab/fourier.hpp"
#include "cantorlab/quadrature.hpp"
#include "cantorlab/rng.hpp"

namespace cantorlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double ang_plateau(const BumpSpec& psi, double chord) {
  if (chord <= psi.half_width) return 1.0;
  return smooth_step_down((chord - psi.half_width) / psi.collar);
}

double chord_angle_core(const BumpSpec& psi) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * psi.half_width));
}

double chord_angle_sup(const BumpSpec& psi) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * (psi.half_width + psi.collar)));
}

// n Gauss-Legendre nodes per panel over a knot-split range. Splitting at the
// plateau edges keeps each panel either analytic or glue that is flat at
// both ends, which single-panel quadrature handles poorly.
void panel_nodes(const std::vector<double>& knots, int n,
                 std::vector<double>& xs, std::vector<double>& ws) {
  const QuadRule& rule = gauss_legendre(n);
  xs.clear();
  ws.clear();
  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    const double lo = knots[p], hi = knots[p + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < n; ++i) {
      xs.push_back(mid + half * rule.x[static_cast<std::size_t>(i)]);
      ws.push_back(half * rule.w[static_cast<std::size_t>(i)]);
    }
  }
}

}  // namespace

double choose_eta(int r, int d) {
  if (r < 1 || r > 15) throw config_error("eta choice needs 1 <= r <= 15");
  if (d < 1) throw config_error("eta choice needs d >= 1");
  const double levels = static_cast<double>((1LL << (2 * r)) - 1);
  return 1.0 / (2.0 * 6.0 * M_PI * d * levels);
}

double KnappBox::half_side(int axis, double c) const {
  if (axis < 0 || axis >= d) throw config_error("box axis out of range");
  const double denom = (axis == d - 1) ? delta * delta : delta;
  return c * eta / denom;
}

double KnappBox::volume(double c) const {
  double v = 1.0;
  for (int axis = 0; axis < d; ++axis) v *= 2.0 * half_side(axis, c);
  return v;
}

KnappBox make_knapp_box(int d, int r, double delta) {
  if (delta <= 0.0) throw config_error("box needs delta > 0");
  KnappBox box;
  box.d = d;
  box.eta = choose_eta(r, d);
  box.delta = delta;
  return box;
}

double WindowG::axis_h(int axis, double u) const {
  const double H = box_.half_side(axis, 1.0);
  const double x = std::abs(u);
  if (x <= 0.25 * H) return 1.0;
  if (x >= 0.5 * H) return 0.0;
  return smooth_step_down((x - 0.25 * H) / (0.25 * H));
}

double WindowG::axis_g(int axis, double xi) const {
  const double H = box_.half_side(axis, 1.0);
  const double x = std::abs(xi);
  if (x >= H) return 0.0;
  const double lo = x - 0.5 * H, hi = 0.5 * H;

  // Split where either plateau factor changes analytic piece.
  std::vector<double> cuts{lo, hi};
  for (double c : {-0.5 * H, -0.25 * H, 0.25 * H, 0.5 * H, x - 0.25 * H,
                   x + 0.25 * H, x + 0.5 * H})
    if (c > lo && c < hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc += integrate_gl(
        [&](double u) { return axis_h(axis, u) * axis_h(axis, u - x); },
        cuts[i], cuts[i + 1], 48);
  return acc;
}

double WindowG::eval(const std::vector<double>& xi) const {
  if (static_cast<int>(xi.size()) != box_.d)
    throw config_error("window eval: point dimension mismatch");
  double v = 1.0;
  for (int axis = 0; axis < box_.d; ++axis) {
    v *= axis_g(axis, xi[static_cast<std::size_t>(axis)]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

namespace {

// h_j hat, real and even: 2 * integral of h_j(u) cos(2 pi x u) over [0, H/2].
double axis_h_hat(const WindowG& w, int axis, double x) {
  const double H = w.box().half_side(axis, 1.0);
  double core;
  if (std::abs(x) < 1e-14) {
    core = 0.25 * H;
  } else {
    core = std::sin(kTwoPi * x * 0.25 * H) / (kTwoPi * x);
  }
  const double glue = integrate_gl(
      [&](double u) { return w.axis_h(axis, u) * std::cos(kTwoPi * x * u); },
      0.25 * H, 0.5 * H, 64);
  return 2.0 * (core + glue);
}

// Independent route to g_j: inverse cosine transform of (h_j hat)^2,
// truncated where the transform has decayed.
double axis_g_via_transform(const WindowG& w, int axis, double xi) {
  const double H = w.box().half_side(axis, 1.0);
  const double X = 64.0 / H;      // truncation
  const double step = 0.125 / H;  // fraction of every oscillation period
  double acc = 0.0;
  for (double lo = 0.0; lo < X; lo += step) {
    const double hi = std::min(lo + step, X);
    acc += integrate_gl(
        [&](double x) {
          const double hh = axis_h_hat(w, axis, x);
          return hh * hh * std::cos(kTwoPi * x * xi);
        },
        lo, hi, 12);
  }
  return 2.0 * acc;
}

}  // namespace

WindowReport verify_window(const WindowG& w, int refinement,
                           double transform_tol) {
  WindowReport rep;
  const int d = w.box().d;
  int m = 1;
  for (int i = 0; i < refinement; ++i) m *= 3;

  rep.nonneg_ok = rep.support_ok = rep.upper_ok = rep.plateau_ok = true;
  rep.min_value = 0.0;
  rep.worst_plateau_margin = 1e300;
  for (int axis = 0; axis < d; ++axis) {
    const double H = w.box().half_side(axis, 1.0);
    for (int i = -m; i <= m; ++i) {
      const double xi = 1.25 * H * static_cast<double>(i) / m;
      const double g = w.axis_g(axis, xi);
      rep.min_value = std::min(rep.min_value, g / H);
      if (g < -1e-12 * H) rep.nonneg_ok = false;
      if (std::abs(xi) >= H && std::abs(g) > 1e-12 * H) rep.support_ok = false;
      if (g > H * (1.0 + 1e-12)) rep.upper_ok = false;
    }
    for (int i = 0; i <= m; ++i) {
      const double xi = 0.25 * H * static_cast<double>(i) / m;
      const double margin = (w.axis_g(axis, xi) - 0.25 * H) / H;
      rep.worst_plateau_margin = std::min(rep.worst_plateau_margin, margin);
    }
    if (rep.worst_plateau_margin < -1e-12) rep.plateau_ok = false;

    for (double frac : {0.0, 0.125, 0.37}) {
      const double xi = frac * H;
      const double gap =
          std::abs(w.axis_g(axis, xi) - axis_g_via_transform(w, axis, xi)) / H;
      rep.transform_gap = std::max(rep.transform_gap, gap);
    }
  }
  rep.transform_ok = rep.transform_gap <= transform_tol;
  return rep;
}

std::complex<double> sector_transform_centered(const BumpSpec& psi,
                                               const StageMeasure& mu,
                                               const std::vector<double>& xi,
                                               double rel_tol) {
  if (static_cast<int>(xi.size()) != psi.d)
    throw config_error("sector transform: frequency dimension mismatch");
  if (psi.d != 2 && psi.d != 3)
    throw config_error("sector transforms are implemented for d in {2, 3}");
  require_bump_isolated(psi, mu);

  const double phi_core = chord_angle_core(psi);
  const double phi_sup = chord_angle_sup(psi);
  const double a = psi.a, thick = psi.thickness;
  const double density = mu.density();

  // The radial profile is exactly 1 on the carrier (the glue lives outside
  // it, over mass-free ground), so the radial axis is one analytic panel.
  // The angular axis splits at the plateau edges.
  const std::vector<double> ang_knots =
      psi.d == 2 ? std::vector<double>{-phi_sup, -phi_core, phi_core, phi_sup}
                 : std::vector<double>{0.0, phi_core, phi_sup};

  const auto eval_n = [&](int n) -> std::complex<double> {
    const QuadRule& rule = gauss_legendre(n);
    std::vector<double> phis, wphis;
    panel_nodes(ang_knots, n, phis, wphis);
    std::complex<double> acc{0.0, 0.0};
    if (psi.d == 2) {
      for (int i = 0; i < n; ++i) {
        const double rho = a + 0.5 * thick * (rule.x[static_cast<std::size_t>(i)] + 1.0);
        const double wr = 0.5 * thick * rule.w[static_cast<std::size_t>(i)];
        const double amp_r = wr / std::sqrt(rho);
        for (std::size_t j = 0; j < phis.size(); ++j) {
          const double phi = phis[j];
          const double ang = ang_plateau(psi, 2.0 * std::sin(0.5 * std::abs(phi)));
          if (ang == 0.0) continue;
          const double phase = -kTwoPi * (xi[0] * rho * std::sin(phi) +
                                          xi[1] * (rho * std::cos(phi) - a));
          acc += std::polar(amp_r * wphis[j] * ang, phase);
        }
      }
      return acc * (density / kTwoPi);
    }
    const double xi_perp = std::hypot(xi[0], xi[1]);
    for (int i = 0; i < n; ++i) {
      const double rho = a + 0.5 * thick * (rule.x[static_cast<std::size_t>(i)] + 1.0);
      const double wr = 0.5 * thick * rule.w[static_cast<std::size_t>(i)];
      const double amp_r = wr / rho;
      for (std::size_t j = 0; j < phis.size(); ++j) {
        const double theta = phis[j];
        const double ang = ang_plateau(psi, 2.0 * std::sin(0.5 * theta));
        if (ang == 0.0) continue;
        const double bes = bessel_j(0.0, kTwoPi * rho * std::sin(theta) * xi_perp);
        const double phase = -kTwoPi * xi[2] * (rho * std::cos(theta) - a);
        acc += std::polar(amp_r * wphis[j] * ang * bes * std::sin(theta), phase);
      }
    }
    return acc * (0.5 * density);
  };

  std::complex<double> prev = eval_n(12);
  for (int n = 24; n <= 384; n *= 2) {
    const std::complex<double> cur = eval_n(n);
    if (std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  char msg[96];
  std::snprintf(msg, sizeof msg,
                "sector transform did not converge at 384 nodes per panel (|xi|=%g)",
                std::hypot(xi[0], xi.back()));
  throw invariant_error(msg);
}

std::complex<double> f_hat_nu(const TestFunction& f, const StageMeasure& mu,
                              const std::vector<double>& xi, double rel_tol) {
  if (static_cast<int>(xi.size()) != f.d)
    throw config_error("f_hat_nu: frequency dimension mismatch");
  std::complex<double> acc{0.0, 0.0};
  for (const BumpSpec& psi : f.bumps) {
    const std::complex<double> B = sector_transform_centered(psi, mu, xi, rel_tol);
    acc += std::polar(1.0, -kTwoPi * xi.back() * psi.a) * B;
  }
  return acc;
}

namespace {

// Tensor Gauss-Legendre over the c-scaled box; integrand evaluated per node
// into a flat buffer, then summed in index order so thread count never
// changes the result.
template <class F>
double box_tensor_integral(const KnappBox& box, double c, int n, F&& node_value) {
  const int d = box.d;
  std::int64_t total = 1;
  for (int axis = 0; axis < d; ++axis) total *= n;
  if (total > 2'000'000)
    throw resource_error("box quadrature grid exceeds the node budget");

  const QuadRule& rule = gauss_legendre(n);
  std::vector<double> vals(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::vector<double> xi(static_cast<std::size_t>(d));
    double wt = 1.0;
    std::int64_t rest = flat;
    for (int axis = 0; axis < d; ++axis) {
      const auto i = static_cast<std::size_t>(rest % n);
      rest /= n;
      const double h = box.half_side(axis, c);
      xi[static_cast<std::size_t>(axis)] = h * rule.x[i];
      wt *= h * rule.w[i];
    }
    vals[static_cast<std::size_t>(flat)] = wt * node_value(xi);
  }
  return std::accumulate(vals.begin(), vals.end(), 0.0);
}

}  // namespace

double lp_lower_direct(const TestFunction& f, const StageMeasure& mu, int d,
                       double p, int r, double rel_tol) {
  if (d != f.d) throw config_error("lp bound: dimension mismatch");
  if (f.stage != mu.stage()) throw invariant_error("lp bound: stage mismatch");
  if (p < 1.0 || p > 2.0 * r)
    throw config_error("lp bound needs 1 <= p <= 2r");
  const KnappBox box = make_knapp_box(d, r, 1.0 / std::sqrt(mu.scale()));
  const double inner_tol = std::max(1e-11, 1e-2 * rel_tol);

  double prev = 0.0;
  bool have_prev = false;
  for (int n = 8; n <= 64; n *= 2) {
    const double cur = box_tensor_integral(box, 1.0, n, [&](const std::vector<double>& xi) {
      return std::pow(std::abs(f_hat_nu(f, mu, xi, inner_tol)), p);
    });
    if (have_prev && std::abs(cur - prev) <= rel_tol * (std::abs(cur) + 1e-300))
      return cur;
    prev = cur;
    have_prev = true;
  }
  throw invariant_error("lp integral did not converge at 64 nodes per axis");
}

double box_moment_floor(const ParamSequences& seq, int l, int r, int d) {
  if (l < 0 || l > seq.stages()) throw config_error("stage out of range");
  const double logN = log_big(seq.N_at(l));
  const double logT = log_big(seq.T_at(l));
  const double logS = log_big(seq.S_at(l));
  const double log_val = -l * std::log(2.0 * r) + 0.5 * (d + 1) * logN -
                         r * (d - 1.0) * logN - 2.0 * r * logT +
                         (2.0 * r - 1.0) * logS;
  return std::exp(log_val);
}

double lp_floor_formula(const ParamSequences& seq, int l, double p, int r,
                        int d) {
  if (l < 1 || l > seq.stages()) throw config_error("stage out of range");
  const Exponents& e = seq.exponents();
  const double logN = log_big(seq.N_at(l));
  const int next = std::min(l + 1, seq.stages());
  const double log_n_next = std::log(static_cast<double>(seq.n_at(next)));
  const double log_factor =
      std::log(400.0) + std::log(static_cast<double>(l + 1)) + log_big(seq.N_at(next));
  const double expo = -0.5 * p * (d - 1.0 + e.beta0) + 0.5 * (d + 1.0) -
                      e.alpha0 + 0.5 * e.beta0;
  return std::exp(expo * logN - l * std::log(2.0 * r) - e.alpha0 * log_n_next) /
         log_factor;
}

double l2_scale_formula(const ParamSequences& seq, int l, double p, int d) {
  if (l < 0 || l > seq.stages()) throw config_error("stage out of range");
  const Exponents& e = seq.exponents();
  return std::exp(-0.25 * p * (d - 1.0 + e.beta0) * log_big(seq.N_at(l)));
}

double divergence_threshold(int d, double alpha, double beta) {
  if (beta <= 0.0) throw config_error("threshold needs beta > 0");
  return (4.0 * d - 4.0 * alpha + 2.0 * beta) / beta;
}

double ratio_log_slope(int d, double alpha, double beta, double p) {
  const double a0 = alpha - (d - 1.0);
  const double b0 = beta - (d - 1.0);
  return -0.25 * p * (d - 1.0 + b0) + 0.5 * (d + 1.0) - a0 + 0.5 * b0;
}

namespace {

std::string classify(double p, double p0) {
  if (std::abs(p - p0) <= 1e-9 * std::max(1.0, std::abs(p0))) return "threshold";
  return p < p0 ? "diverging" : "converging";
}

RatioSeries series_shell(const ParamSequences& seq, double p, int r, int d,
                         const char* mode) {
  const Exponents& e = seq.exponents();
  RatioSeries s;
  s.p = p;
  s.r = r;
  s.d = d;
  s.p0 = divergence_threshold(d, e.alpha, e.beta);
  s.log_slope = ratio_log_slope(d, e.alpha, e.beta, p);
  s.mode = mode;
  s.classification = classify(p, s.p0);
  return s;
}

}  // namespace

RatioSeries ratio_trend_formula(const ParamSequences& seq,
                                const std::vector<int>& stages, double p,
                                int r, int d) {
  RatioSeries s = series_shell(seq, p, r, d, "formula");
  for (int l : stages) {
    s.stages.push_back(l);
    s.values.push_back(lp_floor_formula(seq, l, p, r, d) /
                       l2_scale_formula(seq, l, p, d));
  }
  return s;
}

RatioSeries ratio_trend_measured(const std::vector<Stage>& built,
                                 const ParamSequences& seq,
                                 const std::vector<int>& stages, double p,
                                 int r, int d) {
  RatioSeries s = series_shell(seq, p, r, d, "measured");
  for (int l : stages) {
    if (l < 1 || l >= static_cast<int>(built.size()))
      throw config_error("measured ratio: stage not built");
    const Stage& st = built[static_cast<std::size_t>(l)];
    const TestFunction f = make_test_function(st, seq, d);
    const double lp = lp_lower_direct(f, st.mu, d, p, r);
    const double l2 = f_l2_norm_sq(f, st.mu);
    s.stages.push_back(l);
    s.values.push_back(lp / std::pow(l2, 0.5 * p));
  }
  return s;
}

void write_ratio_csv(const std::string& path, const RatioSeries& series,
                     const ParamSequences& seq, std::uint64_t seed,
                     const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  char buf[192];
  f << "# seed = " << seed << "\n";
  f << "# config_hash = " << config_hash << "\n";
  std::snprintf(buf, sizeof buf, "# log_slope = %.17g\n", series.log_slope);
  f << buf;
  f << "l,N_l,proxy,mode,p,p0,classification\n";
  for (std::size_t i = 0; i < series.stages.size(); ++i) {
    f << series.stages[i] << "," << seq.N_at(series.stages[i]) << ",";
    std::snprintf(buf, sizeof buf, "%.17g,%s,%.17g,%.17g,%s\n",
                  series.values[i], series.mode.c_str(), series.p, series.p0,
                  series.classification.c_str());
    f << buf;
  }
}

void write_ratio_gnuplot(const std::string& path, const std::string& csv_path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "set datafile separator ','\n"
    << "set logscale y\n"
    << "set xlabel 'stage l'\n"
    << "set ylabel 'floor / scale'\n"
    << "set key left top\n"
    << "plot '" << csv_path << "' every ::1 using 1:3 with linespoints title 'ratio proxy'\n";
}

PhaseBoundReport verify_phase_bound(const TestFunction& f,
                                    const StageMeasure& mu,
                                    const KnappBox& box, int samples,
                                    std::uint64_t seed) {
  if (f.bumps.empty()) throw config_error("phase bound needs at least one bump");
  const int d = f.d;
  PhaseBoundReport rep;
  rep.samples = samples;
  rep.bound = 3.0 * d * box.eta;
  (void)mu;

  for (int i = 0; i < samples; ++i) {
    Rng rng(seed, 0x9A5EB0DDull, static_cast<std::uint64_t>(i));
    const BumpSpec& psi = f.bumps[rng.next_below(f.bumps.size())];
    const double rho =
        rng.next_in(psi.a - psi.collar, psi.a + psi.thickness + psi.collar);
    const double chord = rng.next_unit() * (psi.half_width + psi.collar);
    const double theta = 2.0 * std::asin(std::min(1.0, 0.5 * chord));

    std::vector<double> x(static_cast<std::size_t>(d));
    if (d == 2) {
      const double sign = (rng.next() & 1) ? 1.0 : -1.0;
      x[0] = rho * std::sin(theta) * sign;
      x[1] = rho * std::cos(theta);
    } else if (d == 3) {
      const double az = kTwoPi * rng.next_unit();
      x[0] = rho * std::sin(theta) * std::cos(az);
      x[1] = rho * std::sin(theta) * std::sin(az);
      x[2] = rho * std::cos(theta);
    } else {
      throw config_error("phase bound sampling covers d in {2, 3}");
    }
    x[static_cast<std::size_t>(d - 1)] -= psi.a;

    double phase = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      const double h = box.half_side(axis, 1.0);
      phase += rng.next_in(-h, h) * x[static_cast<std::size_t>(axis)];
    }
    rep.max_phase = std::max(rep.max_phase, std::abs(phase));
    if (std::abs(phase) > rep.bound + 1e-12) ++rep.violations;
  }
  return rep;
}

PlateauReport verify_knapp_plateau(const TestFunction& f,
                                   const StageMeasure& mu, const KnappBox& box,
                                   int grid_per_axis) {
  const int d = f.d;
  if (grid_per_axis < 1) throw config_error("plateau grid needs >= 1 point per axis");
  std::int64_t total = 1;
  for (int axis = 0; axis < d; ++axis) total *= grid_per_axis;
  if (total > 100000) throw resource_error("plateau grid too large");

  PlateauReport rep;
  rep.f0_abs = std::abs(f_hat_nu(f, mu, std::vector<double>(static_cast<std::size_t>(d), 0.0), 1e-9));
  rep.min_abs = rep.f0_abs;

  std::vector<double> mins(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::vector<double> xi(static_cast<std::size_t>(d));
    std::int64_t rest = flat;
    for (int axis = 0; axis < d; ++axis) {
      const int i = static_cast<int>(rest % grid_per_axis);
      rest /= grid_per_axis;
      const double h = box.half_side(axis, 0.125);
      xi[static_cast<std::size_t>(axis)] =
          (grid_per_axis == 1)
              ? 0.0
              : -h + 2.0 * h * static_cast<double>(i) / (grid_per_axis - 1);
    }
    mins[static_cast<std::size_t>(flat)] = std::abs(f_hat_nu(f, mu, xi, 1e-9));
  }
  for (double v : mins) rep.min_abs = std::min(rep.min_abs, v);
  rep.min_ratio = rep.min_abs / rep.f0_abs;
  rep.ok = rep.min_ratio >= 0.5;
  return rep;
}

TupleIntegral tuple_window_integral(const std::vector<Key>& tuple,
                                    const WindowG& w, const TestFunction& f,
                                    const StageMeasure& mu,
                                    double abs_tol_scaled) {
  if (f.d != 2) throw config_error("tuple integral is implemented for d = 2");
  if (tuple.size() != 4)
    throw config_error("tuple integral expects a 2r-tuple with r = 2");
  if (mu.stage() > 2)
    throw resource_error("tuple integral is cost-guarded to stages <= 2");
  const int r = 2;
  const KnappBox& box = w.box();

  std::vector<const BumpSpec*> entries;
  for (Key k : tuple) {
    const BumpSpec* hit = nullptr;
    for (const BumpSpec& psi : f.bumps)
      if (psi.key == k) { hit = &psi; break; }
    if (!hit) throw invariant_error("tuple key is not a bump of this stage");
    entries.push_back(hit);
  }

  std::vector<const BumpSpec*> distinct;
  std::vector<std::size_t> which(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::size_t pos = distinct.size();
    for (std::size_t j = 0; j < distinct.size(); ++j)
      if (distinct[j]->key == entries[i]->key) { pos = j; break; }
    if (pos == distinct.size()) distinct.push_back(entries[i]);
    which[i] = pos;
  }

  // Exact half-sum difference via the integer keys.
  Key delta_scaled = 0;
  for (int i = 0; i < r; ++i) delta_scaled += tuple[static_cast<std::size_t>(i)];
  for (int i = r; i < 2 * r; ++i) delta_scaled -= tuple[static_cast<std::size_t>(i)];
  const double delta = static_cast<double>(delta_scaled) / mu.scale();

  TupleIntegral out;
  out.scale = w.sup_bound();
  for (const BumpSpec* psi : entries) {
    const std::complex<double> B0 =
        sector_transform_centered(*psi, mu, {0.0, 0.0}, 1e-12);
    out.scale *= std::abs(B0);
  }

  const auto eval_n = [&](int n) -> std::complex<double> {
    // Per-axis abscissas, weights, and window factors (g is separable).
    // Each g_j is the self-correlation of the axis profile, so its analytic
    // piece changes at the quarter multiples of the box half side. The
    // transforms in the integrand are entire, hence the axis is panelled at
    // exactly those knots; a single panel stalls short of the tolerance.
    std::vector<std::array<std::vector<double>, 3>> ax(2);
    for (int axis = 0; axis < 2; ++axis) {
      const double h = box.half_side(axis, 1.0);
      std::vector<double> knots;
      for (int k = -4; k <= 4; ++k) knots.push_back(0.25 * h * k);
      auto& [xs, ws, gs] = ax[static_cast<std::size_t>(axis)];
      panel_nodes(knots, n, xs, ws);
      gs.resize(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i)
        gs[i] = w.axis_g(axis, xs[i]);
    }

    const auto n0 = static_cast<std::int64_t>(ax[0][0].size());
    const auto n1 = static_cast<std::int64_t>(ax[1][0].size());
    const std::int64_t total = n0 * n1;
    std::vector<std::complex<double>> vals(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t flat = 0; flat < total; ++flat) {
      const auto i0 = static_cast<std::size_t>(flat % n0);
      const auto i1 = static_cast<std::size_t>(flat / n0);
      const double gval = ax[0][2][i0] * ax[1][2][i1];
      if (gval == 0.0) {
        vals[static_cast<std::size_t>(flat)] = {0.0, 0.0};
        continue;
      }
      const std::vector<double> xi{ax[0][0][i0], ax[1][0][i1]};
      std::vector<std::complex<double>> B(distinct.size());
      for (std::size_t j = 0; j < distinct.size(); ++j)
        B[j] = sector_transform_centered(*distinct[j], mu, xi, 1e-12);
      std::complex<double> prod{1.0, 0.0};
      for (int i = 0; i < r; ++i) prod *= B[which[static_cast<std::size_t>(i)]];
      for (int i = r; i < 2 * r; ++i)
        prod *= std::conj(B[which[static_cast<std::size_t>(i)]]);
      prod *= std::polar(gval * ax[0][1][i0] * ax[1][1][i1],
                         -kTwoPi * xi[1] * delta);
      vals[static_cast<std::size_t>(flat)] = prod;
    }
    return std::accumulate(vals.begin(), vals.end(),
                           std::complex<double>{0.0, 0.0});
  };

  std::complex<double> prev = eval_n(4);
  for (int n = 8; n <= 32; n *= 2) {
    const std::complex<double> cur = eval_n(n);
    if (std::abs(cur - prev) <= abs_tol_scaled * out.scale) {
      out.value = cur;
      out.grid_nodes = n;
      return out;
    }
    prev = cur;
  }
  throw invariant_error("tuple integral did not converge at 32 nodes per panel");
}

}  // namespace cantorlab
