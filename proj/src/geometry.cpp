#include "cantorlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cantorlab/errors.hpp"
#include "cantorlab/quadrature.hpp"
#include "cantorlab/rng.hpp"

namespace cantorlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double glue(double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; }

// Surface-density normalizer: integral of sin^{d-2} over [0, pi].
double full_polar_integral(int d) {
  return std::sqrt(M_PI) * std::tgamma(0.5 * (d - 1)) / std::tgamma(0.5 * d);
}

// s^{-(d-1)/2} antiderivative.
double radial_antideriv(int d, double s) {
  const double p = 0.5 * (d - 1);
  if (std::abs(p - 1.0) < 1e-14) return std::log(s);
  return std::pow(s, 1.0 - p) / (1.0 - p);
}

double chord_to_theta(double chord) {
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

}  // namespace

double smooth_step_down(double u) {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  const double rise = glue(1.0 - u);
  return rise / (rise + glue(u));
}

double cap_measure_theta(int d, double theta) {
  if (d < 2) throw config_error("cap measures need d >= 2");
  theta = std::clamp(theta, 0.0, M_PI);
  if (d == 2) return theta / M_PI;
  const auto density = [&](double t) {
    return std::pow(std::sin(t), static_cast<double>(d - 2));
  };
  return integrate_gl(density, 0.0, theta, 96) / full_polar_integral(d);
}

double cap_measure(int d, double w) {
  if (w < 0.0) throw config_error("cap width must be >= 0");
  if (w >= 4.0) return 1.0;  // chord diameter of the sphere is 2
  return cap_measure_theta(d, chord_to_theta(0.5 * w));
}

double nu_region_mass(const StageMeasure& mu, int d, const SectorRegion& region) {
  if (region.thickness < 0.0 || region.width < 0.0)
    throw config_error("sector thickness and width must be >= 0");
  const double lo = region.r_lo, hi = region.r_lo + region.thickness;
  double radial = 0.0;
  const double len = mu.interval_length();
  for (Key k : mu.endpoints().keys) {
    const double a = mu.value_of(k);
    const double l = std::max(a, lo), h = std::min(a + len, hi);
    if (l < h) radial += radial_antideriv(d, h) - radial_antideriv(d, l);
  }
  return radial * mu.density() * cap_measure(d, region.width);
}

double nu_total_mass(const StageMeasure& mu, int d) {
  SectorRegion whole;
  whole.d = d;
  whole.r_lo = 0.0;
  whole.thickness = 3.0;  // support lives in [1, 2 + 1/N]
  whole.width = 4.0;
  return nu_region_mass(mu, d, whole);
}

BumpSpec make_bump(const StageMeasure& mu, int d, Key endpoint_key) {
  if (!mu.endpoints().contains(endpoint_key))
    throw invariant_error("bump endpoint is not in the stage endpoint set");
  BumpSpec psi;
  psi.d = d;
  psi.key = endpoint_key;
  psi.a = mu.value_of(endpoint_key);
  psi.thickness = mu.interval_length();
  psi.half_width = 0.5 / std::sqrt(mu.scale());  // delta / 2
  psi.collar = 0.5 * mu.interval_length();
  return psi;
}

namespace {

double radial_plateau(const BumpSpec& psi, double rho) {
  if (rho < psi.a) return smooth_step_down((psi.a - rho) / psi.collar);
  const double top = psi.a + psi.thickness;
  if (rho > top) return smooth_step_down((rho - top) / psi.collar);
  return 1.0;
}

double angular_plateau(const BumpSpec& psi, double chord) {
  if (chord <= psi.half_width) return 1.0;
  return smooth_step_down((chord - psi.half_width) / psi.collar);
}

// integral of weight(chord(theta)) against the normalized cap density. The
// plateau edge is a non-analytic knot, so the range splits there: inside it
// the profile is exactly 1, outside it is the glue, flat at both panel ends.
template <class W>
double angular_factor(const BumpSpec& psi, W&& weight, int nodes) {
  const double theta_core = chord_to_theta(psi.half_width);
  const double theta_sup = chord_to_theta(psi.half_width + psi.collar);
  const auto integrand = [&](double t) {
    const double chord = 2.0 * std::sin(0.5 * t);
    const double w = weight(angular_plateau(psi, chord));
    if (psi.d == 2) return w;
    return w * std::pow(std::sin(t), static_cast<double>(psi.d - 2));
  };
  const double raw = integrate_gl(integrand, 0.0, theta_core, nodes) +
                     integrate_gl(integrand, theta_core, theta_sup, nodes);
  if (psi.d == 2) return raw / M_PI;
  return raw / full_polar_integral(psi.d);
}

double radial_factor(const BumpSpec& psi, const StageMeasure& mu, int nodes) {
  const double p = 0.5 * (psi.d - 1);
  const auto integrand = [&](double s) {
    return radial_plateau(psi, s) * std::pow(s, -p);
  };
  return mu.density() *
         integrate_gl(integrand, psi.a, psi.a + psi.thickness, nodes);
}

}  // namespace

void require_bump_isolated(const BumpSpec& psi, const StageMeasure& mu) {
  const auto& keys = mu.endpoints().keys;
  const auto it = std::lower_bound(keys.begin(), keys.end(), psi.key);
  if (it == keys.end() || *it != psi.key)
    throw invariant_error("bump endpoint is not in the stage endpoint set");
  if (it != keys.begin() && psi.key - *(it - 1) < 2)
    throw invariant_error("bump interval is not isolated on the left");
  if (it + 1 != keys.end() && *(it + 1) - psi.key < 2)
    throw invariant_error("bump interval is not isolated on the right");
}

double bump_eval(const BumpSpec& psi, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != psi.d)
    throw config_error("bump_eval: point dimension mismatch");
  double norm2 = 0.0;
  for (double c : x) norm2 += c * c;
  const double rho = std::sqrt(norm2);
  if (rho <= 0.0) return 0.0;
  const double chord = std::sqrt(std::max(0.0, 2.0 - 2.0 * x.back() / rho));
  return radial_plateau(psi, rho) * angular_plateau(psi, chord);
}

double bump_nu_integral(const BumpSpec& psi, const StageMeasure& mu, int nodes) {
  require_bump_isolated(psi, mu);
  return radial_factor(psi, mu, nodes) *
         angular_factor(psi, [](double v) { return v; }, nodes);
}

TestFunction make_test_function(const Stage& stage, const ParamSequences& seq,
                                int d) {
  if (!check_isolation(stage.A, stage.P, seq))
    throw invariant_error("stage fails isolation; refusing to build bumps");
  TestFunction f;
  f.d = d;
  f.stage = stage.A.stage;
  f.delta = 1.0 / std::sqrt(stage.mu.scale());
  f.bumps.reserve(stage.P.keys.size());
  for (Key k : stage.P.keys) f.bumps.push_back(make_bump(stage.mu, d, k));
  return f;
}

double f_l2_norm_sq(const TestFunction& f, const StageMeasure& mu, int nodes) {
  if (f.bumps.empty()) return 0.0;
  // All bumps share one angular profile; only the radial weight varies.
  const double ang_sq = angular_factor(
      f.bumps.front(), [](double v) { return v * v; }, nodes);
  double acc = 0.0;
  for (const BumpSpec& psi : f.bumps) {
    require_bump_isolated(psi, mu);
    acc += radial_factor(psi, mu, nodes);
  }
  return acc * ang_sq;
}

double nu_ball_mass(const StageMeasure& mu, int d, const std::vector<double>& x,
                    double r) {
  if (r < 0.0) throw config_error("ball radius must be >= 0");
  double norm2 = 0.0;
  for (double c : x) norm2 += c * c;
  const double R = std::sqrt(norm2);
  const double p = 0.5 * (d - 1);
  const double len = mu.interval_length();
  const double lo_all = std::max(0.0, R - r), hi_all = R + r;

  double acc = 0.0;
  for (Key k : mu.endpoints().keys) {
    const double a = mu.value_of(k);
    double l = std::max(a, lo_all), h = std::min(a + len, hi_all);
    if (l >= h) continue;
    if (R < 1e-12) {
      // Ball centered at the origin: spheres of radius <= r are swallowed.
      acc += radial_antideriv(d, h) - radial_antideriv(d, l);
      continue;
    }
    // Split where the cap closes (s = R + r, s = R - r) or swallows the
    // sphere (s = r - R); the integrand has kinks exactly there.
    std::vector<double> cuts{l, h};
    for (double c : {r - R, R - r}) if (c > l && c < h) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      acc += integrate_gl(
          [&](double s) {
            const double c = (s * s + R * R - r * r) / (2.0 * s * R);
            const double theta = std::acos(std::clamp(c, -1.0, 1.0));
            return cap_measure_theta(d, theta) * std::pow(s, -p);
          },
          cuts[i], cuts[i + 1], 16);
    }
  }
  return acc * mu.density();
}

FrostmanReport verify_frostman(const StageMeasure& mu, int d, double alpha,
                               int samples, std::uint64_t seed) {
  if (d < 2) throw config_error("verify_frostman needs d >= 2");
  FrostmanReport rep;
  rep.alpha = alpha;
  rep.rows.assign(static_cast<std::size_t>(samples), FrostmanRow{});
  const double logN = std::log(mu.scale());
  const auto& keys = mu.endpoints().keys;

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < samples; ++i) {
    Rng rng(seed, 0xF7057F4Bull, static_cast<std::uint64_t>(i));
    const Key k = keys[rng.next_below(keys.size())];
    const double s = mu.value_of(k) + rng.next_unit() * mu.interval_length();
    const double r = std::exp(-(1.0 - rng.next_unit()) * logN);

    std::vector<double> dir(static_cast<std::size_t>(d));
    if (d == 2) {
      const double phi = kTwoPi * rng.next_unit();
      dir[0] = std::cos(phi);
      dir[1] = std::sin(phi);
    } else {
      double n2 = 0.0;
      for (int c = 0; c < d; c += 2) {
        const double u1 = 1.0 - rng.next_unit();
        const double u2 = rng.next_unit();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        dir[static_cast<std::size_t>(c)] = mag * std::cos(kTwoPi * u2);
        if (c + 1 < d)
          dir[static_cast<std::size_t>(c + 1)] = mag * std::sin(kTwoPi * u2);
      }
      for (double c : dir) n2 += c * c;
      const double inv = 1.0 / std::sqrt(n2);
      for (double& c : dir) c *= inv;
    }

    // Half the centers sit on the support, half drift off radially.
    const double rho = (i % 2 == 0) ? s : s + (2.0 * rng.next_unit() - 1.0) * r;
    FrostmanRow& row = rep.rows[static_cast<std::size_t>(i)];
    row.x = dir;
    for (double& c : row.x) c *= rho;
    row.r = r;
    row.mass = nu_ball_mass(mu, d, row.x, r);
    row.ratio = row.mass / std::pow(r, alpha);
  }
  for (const auto& row : rep.rows) rep.sup_ratio = std::max(rep.sup_ratio, row.ratio);
  return rep;
}

void write_frostman_csv(const std::string& path, const FrostmanReport& rep,
                        std::uint64_t seed, const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "# seed = " << seed << "\n";
  f << "# config_hash = " << config_hash << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "# alpha = %.17g\n", rep.alpha);
  f << buf;
  std::snprintf(buf, sizeof buf, "# sup_ratio = %.17g\n", rep.sup_ratio);
  f << buf;
  f << "x,r,mass,ratio\n";
  for (const auto& row : rep.rows) {
    for (std::size_t c = 0; c < row.x.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g", c ? ";" : "", row.x[c]);
      f << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", row.r, row.mass,
                  row.ratio);
    f << buf;
  }
}

}  // namespace cantorlab
