#include "cantorlab/reference.hpp"

#include <algorithm>
#include <cmath>

#include "cantorlab/errors.hpp"
#include "cantorlab/rng.hpp"

namespace cantorlab::reference {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

EndpointSet extend_endpoints(const EndpointSet& A_prev,
                             const EndpointSet& P_prev,
                             const ParamSequences& seq, std::uint64_t seed) {
  const int j = A_prev.stage;
  const int next = j + 1;
  if (next > seq.stages())
    throw config_error("cannot extend past the configured stage count");
  if (P_prev.stage != j)
    throw invariant_error("progression/endpoint stage mismatch");

  const int n = seq.n_at(next);
  const int s = seq.s_at(next);
  const int t = seq.t_at(next);

  EndpointSet out;
  out.stage = next;
  out.kind = 'A';
  out.keys.assign(A_prev.keys.size() * static_cast<std::size_t>(t), 0);

  const std::int64_t parents = static_cast<std::int64_t>(A_prev.keys.size());
  for (std::int64_t i = 0; i < parents; ++i) {
    const Key parent = A_prev.keys[static_cast<std::size_t>(i)];
    Rng rng(seed, static_cast<std::uint64_t>(next),
            static_cast<std::uint64_t>(parent));
    std::vector<std::int64_t> digits;
    if (P_prev.contains(parent)) {
      digits.reserve(static_cast<std::size_t>(t));
      for (int digit = 1; digit <= 2 * s - 1; digit += 2) digits.push_back(digit);
      if (t > s) {
        auto extra = rng.sample_without_replacement(2 * s + 1, n - 1,
                                                    static_cast<std::size_t>(t - s));
        digits.insert(digits.end(), extra.begin(), extra.end());
        std::sort(digits.begin(), digits.end());
      }
    } else {
      digits = rng.sample_without_replacement(0, n - 1, static_cast<std::size_t>(t));
    }
    Key* slot = out.keys.data() + i * t;
    for (int c = 0; c < t; ++c)
      slot[c] = parent * n + static_cast<Key>(digits[static_cast<std::size_t>(c)]);
  }
  return out;
}

DecayReport decay_profile(const StageMeasure& mu, double exponent,
                          const DecayGrid& grid) {
  DecayReport rep;
  rep.exponent = exponent;
  rep.xi = grid.values();
  rep.abs_value.assign(rep.xi.size(), 0.0);
  rep.weighted.assign(rep.xi.size(), 0.0);
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    const double xi = rep.xi[i];
    const double a = std::abs(mu_hat(mu, xi));
    rep.abs_value[i] = a;
    rep.weighted[i] = a * std::pow(1.0 + xi, exponent);
  }
  for (std::size_t i = 0; i < rep.xi.size(); ++i) {
    if (rep.weighted[i] > rep.c_emp) {
      rep.c_emp = rep.weighted[i];
      rep.arg_sup = rep.xi[i];
    }
  }
  return rep;
}

FrostmanReport verify_frostman(const StageMeasure& mu, int d, double alpha,
                               int samples, std::uint64_t seed) {
  if (d < 2) throw config_error("verify_frostman needs d >= 2");
  FrostmanReport rep;
  rep.alpha = alpha;
  rep.rows.assign(static_cast<std::size_t>(samples), FrostmanRow{});
  const double logN = std::log(mu.scale());
  const auto& keys = mu.endpoints().keys;

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

SumsetProfile sumset_profile(const EndpointSet& P, const ParamSequences& seq,
                             int r) {
  return cantorlab::sumset_profile(P, seq, r, SumsetMethod::direct);
}

}  // namespace cantorlab::reference
