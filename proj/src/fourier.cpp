#include "cantorlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cantorlab/errors.hpp"
#include "cantorlab/quadrature.hpp"

namespace cantorlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::complex<double> interval_factor(double u) {
  // (1 - e^{-2 pi i u}) / (2 pi i u) = e^{-i pi u} sin(pi u) / (pi u).
  // The right-hand form is cancellation free at every u.
  if (u == 0.0) return {1.0, 0.0};
  const double t = 0.5 * kTwoPi * u;
  return std::polar(std::sin(t) / t, -t);
}

std::complex<double> mu_hat(const StageMeasure& mu, double xi) {
  const std::complex<double> w = interval_factor(xi / mu.scale());
  const auto& keys = mu.endpoints().keys;
  double re = 0.0, im = 0.0;
  for (Key k : keys) {
    const double ang = -kTwoPi * xi * mu.value_of(k);
    re += std::cos(ang);
    im += std::sin(ang);
  }
  const double inv = 1.0 / static_cast<double>(keys.size());
  return std::complex<double>(re * inv, im * inv) * w;
}

std::vector<double> DecayGrid::values() const {
  std::vector<double> xs(static_cast<std::size_t>(points));
  if (points == 1) {
    xs[0] = xi_min;
    return xs;
  }
  const double step = std::log(xi_max / xi_min) / (points - 1);
  for (int i = 0; i < points; ++i)
    xs[static_cast<std::size_t>(i)] = xi_min * std::exp(step * i);
  return xs;
}

DecayGrid stage_grid(const StageMeasure& mu, double max_factor,
                     int points_per_decade) {
  DecayGrid g;
  g.xi_min = 1.0;
  g.xi_max = max_factor * mu.scale();
  const double decades = std::log10(g.xi_max / g.xi_min);
  g.points = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)));
  return g;
}

DecayReport decay_profile(const StageMeasure& mu, double exponent,
                          const DecayGrid& grid) {
  DecayReport rep;
  rep.exponent = exponent;
  rep.xi = grid.values();
  const std::int64_t m = static_cast<std::int64_t>(rep.xi.size());
  rep.abs_value.assign(rep.xi.size(), 0.0);
  rep.weighted.assign(rep.xi.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const double xi = rep.xi[static_cast<std::size_t>(i)];
    const double a = std::abs(mu_hat(mu, xi));
    rep.abs_value[static_cast<std::size_t>(i)] = a;
    rep.weighted[static_cast<std::size_t>(i)] = a * std::pow(1.0 + xi, exponent);
  }
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    if (rep.weighted[i] > rep.c_emp) {
      rep.c_emp = rep.weighted[i];
      rep.arg_sup = rep.xi[i];
    }
  }
  return rep;
}

void write_decay_csv(const std::string& path, const DecayReport& rep,
                     const DecayGrid& grid, std::uint64_t seed,
                     const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  char buf[128];
  std::snprintf(buf, sizeof buf, "# grid = log[%.17g, %.17g] x %d\n",
                grid.xi_min, grid.xi_max, grid.points);
  f << buf;
  f << "# seed = " << seed << "\n";
  f << "# config_hash = " << config_hash << "\n";
  f << "# exponent = " << rep.exponent << "\n";
  f << "xi,abs_transform,weighted_value\n";
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rep.xi[i],
                  rep.abs_value[i], rep.weighted[i]);
    f << buf;
  }
}

namespace {

double bessel_series(double p, double x) {
  // Alternating power series; fine up to x = 12 where the largest term
  // stays ~4e3, so double precision keeps ~1e-12 relative accuracy.
  const double q = 0.25 * x * x;
  double term = std::pow(0.5 * x, p) / std::tgamma(p + 1.0);
  double sum = term;
  for (int m = 1; m <= 220; ++m) {
    term *= -q / (m * (m + p));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

double bessel_asymptotic(double p, double x) {
  // Stokes expansion: J_p ~ sqrt(2/(pi x)) [P cos w - Q sin w],
  // w = x - p pi/2 - pi/4. Terminates exactly for half-integer p.
  const double w = x - (0.5 * p + 0.25) * M_PI;
  double c = 1.0;  // a_k(p) / x^k
  double P = 1.0, Q = 0.0;
  const double fourp2 = 4.0 * p * p;
  double prev = std::abs(c);
  for (int k = 1; k <= 20; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= (fourp2 - odd * odd) / (8.0 * k * x);
    if (std::abs(c) > prev) break;  // asymptotic tail started growing
    prev = std::abs(c);
    const int mod = k % 4;
    if (mod == 1) Q += c;
    else if (mod == 2) P -= c;
    else if (mod == 3) Q -= c;
    else P += c;
  }
  return std::sqrt(2.0 / (M_PI * x)) * (P * std::cos(w) - Q * std::sin(w));
}

bool is_half_integer(double p) {
  return std::abs(p - std::floor(p) - 0.5) < 1e-12;
}

double bessel_half_integer(double p, double x) {
  // J_{1/2} and J_{-1/2} in closed form, then stable upward recurrence
  // (only used with x >> order here).
  const double pref = std::sqrt(2.0 / (M_PI * x));
  double jm = pref * std::cos(x);  // J_{-1/2}
  double j = pref * std::sin(x);   // J_{+1/2}
  double nu = 0.5;
  while (nu < p - 1e-9) {
    const double jn = (2.0 * nu / x) * j - jm;
    jm = j;
    j = jn;
    nu += 1.0;
  }
  return j;
}

}  // namespace

double bessel_j(double order, double x) {
  if (x < 0.0 || order < 0.0)
    throw config_error("bessel_j requires order >= 0 and x >= 0");
  const bool integered = std::abs(order - std::round(order)) < 1e-12;
  if (!integered && !is_half_integer(order))
    throw config_error("bessel_j supports integer and half-integer orders");
  if (x <= 12.0) return bessel_series(order, x);
  if (is_half_integer(order)) return bessel_half_integer(order, x);
  return bessel_asymptotic(order, x);
}

double sphere_hat(int d, double rho) {
  if (d < 2) throw config_error("sphere_hat requires d >= 2");
  if (rho < 0.0) throw config_error("sphere_hat requires rho >= 0");
  const double nu = 0.5 * (d - 2);
  const double arg = M_PI * rho;
  if (arg < 0.5) {
    // Series form of gamma(nu+1) (pi rho)^{-nu} J_nu(2 pi rho); avoids the
    // 0/0 amplification near the origin.
    const double q = arg * arg;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m <= 40; ++m) {
      term *= -q / (m * (m + nu));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::tgamma(nu + 1.0) * std::pow(arg, -nu) * bessel_j(nu, 2.0 * arg);
}

std::complex<double> nu_hat(const StageMeasure& mu, int d, double xi_mag) {
  if (xi_mag < 0.0) throw config_error("nu_hat requires |xi| >= 0");
  const double power = -0.5 * (d - 1);
  const long need =
      8 + 4 * static_cast<long>(std::ceil(xi_mag / mu.scale()));
  if (need > 1000000)
    throw resource_error("nu_hat: per-interval node count exceeds cap");
  const int nodes = static_cast<int>(need);
  const double len = mu.interval_length();
  const auto& keys = mu.endpoints().keys;
  double acc = 0.0;
  for (Key k : keys) {
    const double a = mu.value_of(k);
    acc += integrate_gl(
        [&](double s) { return std::pow(s, power) * sphere_hat(d, s * xi_mag); },
        a, a + len, nodes);
  }
  return {acc * mu.density(), 0.0};
}

DecayStability find_stable_decay(const ParamSequences& seq, std::uint64_t seed0,
                                 int budget, int stage_lo, int stage_hi,
                                 double factor) {
  if (stage_lo < 1 || stage_hi > seq.stages() || stage_lo > stage_hi)
    throw config_error("find_stable_decay: bad stage range");
  DecayStability out;
  const double exponent = 0.5 * seq.exponents().beta0;
  for (int attempt = 0; attempt < budget; ++attempt) {
    const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(attempt);
    const auto stages = build_all(seq, seed);
    std::vector<double> cs;
    for (int j = stage_lo; j <= stage_hi; ++j) {
      const auto& m = stages[static_cast<std::size_t>(j)].mu;
      cs.push_back(decay_profile(m, exponent, stage_grid(m)).c_emp);
    }
    const double hi = *std::max_element(cs.begin(), cs.end());
    const double lo = *std::min_element(cs.begin(), cs.end());
    out.attempts = attempt + 1;
    out.c_emp = cs;
    out.seed = seed;
    out.spread = hi / lo;
    if (out.spread <= factor) {
      out.found = true;
      return out;
    }
  }
  out.found = false;
  return out;
}

RadialDecayReport radial_envelope_fit(const StageMeasure& mu, int d,
                                      double beta0, const DecayGrid& grid) {
  RadialDecayReport rep;
  rep.xi = grid.values();
  rep.abs_value.assign(rep.xi.size(), 0.0);
  const std::int64_t m = static_cast<std::int64_t>(rep.xi.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const double xi = rep.xi[static_cast<std::size_t>(i)];
    rep.abs_value[static_cast<std::size_t>(i)] = std::abs(nu_hat(mu, d, xi).real());
  }
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    const double xi = rep.xi[i];
    const double envelope =
        std::pow(xi, -0.5 * (d - 1)) * std::pow(1.0 + xi, -0.5 * beta0);
    rep.c_fit = std::max(rep.c_fit, rep.abs_value[i] / envelope);
  }
  return rep;
}

}  // namespace cantorlab
