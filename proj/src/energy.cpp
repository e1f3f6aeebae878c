#include "cantorlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "cantorlab/errors.hpp"

namespace cantorlab {

namespace {

constexpr std::size_t kFftLengthCap = std::size_t{1} << 24;
constexpr double kDirectOpBudget = 2e8;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, decimation in time.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

void require_order(int r) {
  if (r < 1 || r > 8) throw config_error("sumset order must be in [1, 8]");
}

// Exact sparse r-fold self-convolution of the key indicator.
SumsetProfile profile_direct(const EndpointSet& P, int r) {
  SumsetProfile prof;
  prof.order = r;
  prof.method = "direct";

  std::vector<std::pair<Key, std::uint64_t>> acc{{0, 1}};
  double ops = 0.0;
  for (int step = 0; step < r; ++step) {
    ops += static_cast<double>(acc.size()) * static_cast<double>(P.size());
    if (ops > kDirectOpBudget)
      throw resource_error("sumset convolution exceeds the operation budget");
    std::unordered_map<Key, std::uint64_t> next;
    next.reserve(acc.size() * 2);
    for (const auto& [b, g] : acc)
      for (Key k : P.keys) next[b + k] += g;
    acc.assign(next.begin(), next.end());
    std::sort(acc.begin(), acc.end());
  }

  prof.sums.reserve(acc.size());
  prof.counts.reserve(acc.size());
  for (const auto& [b, g] : acc) {
    prof.sums.push_back(b);
    prof.counts.push_back(g);
    prof.total += g;
    prof.energy += BigInt(g) * g;
  }
  return prof;
}

SumsetProfile profile_fft(const EndpointSet& P, int r) {
  if (P.keys.empty()) throw config_error("sumset of an empty endpoint set");
  const Key lo = P.keys.front(), hi = P.keys.back();
  const std::size_t span = static_cast<std::size_t>(hi - lo) * r + 1;
  const std::size_t n = next_pow2(span);
  if (n > kFftLengthCap)
    throw resource_error("sumset transform exceeds the memory budget");

  std::vector<std::complex<double>> a(n, {0.0, 0.0});
  for (Key k : P.keys) a[static_cast<std::size_t>(k - lo)] = {1.0, 0.0};
  fft_inplace(a, false);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    std::complex<double> z = a[static_cast<std::size_t>(i)];
    std::complex<double> p(1.0, 0.0);
    for (int e = 0; e < r; ++e) p *= z;
    a[static_cast<std::size_t>(i)] = p;
  }
  fft_inplace(a, true);

  SumsetProfile prof;
  prof.order = r;
  prof.method = "fft";
  const Key base = static_cast<Key>(r) * lo;
  for (std::size_t b = 0; b < span; ++b) {
    const double c = a[b].real();
    const double near = std::llround(c);
    prof.fft_residue = std::max(prof.fft_residue, std::abs(c - near));
    const auto g = static_cast<std::uint64_t>(std::llround(c));
    if (g == 0) continue;
    prof.sums.push_back(base + static_cast<Key>(b));
    prof.counts.push_back(g);
    prof.total += g;
    prof.energy += BigInt(g) * g;
  }
  return prof;
}

bool fft_guards_ok(const EndpointSet& P, const BigInt& S, int r) {
  if (P.keys.empty()) return false;
  const std::size_t span =
      static_cast<std::size_t>(P.keys.back() - P.keys.front()) * r + 1;
  if (next_pow2(span) > kFftLengthCap) return false;
  // Counts must be exactly representable, with headroom for roundoff.
  return pow_big(S, r) < (BigInt(1) << 52);
}

void check_moments(const SumsetProfile& prof, const EndpointSet& P,
                   const BigInt& S, int r) {
  if (prof.total != pow_big(S, r))
    throw invariant_error("sumset multiplicities do not total S^r");
  BigInt key_sum = 0;
  for (Key k : P.keys) key_sum += k;
  BigInt first_moment = 0;
  for (std::size_t i = 0; i < prof.sums.size(); ++i)
    first_moment += BigInt(prof.sums[i]) * prof.counts[i];
  if (first_moment != BigInt(r) * pow_big(S, r - 1) * key_sum)
    throw invariant_error("sumset first moment is off; counts are corrupt");
}

}  // namespace

SumsetProfile sumset_profile(const EndpointSet& P, const ParamSequences& seq,
                             int r, SumsetMethod method) {
  require_order(r);
  const int l = P.stage;
  if (l < 0 || l > seq.stages())
    throw config_error("endpoint set stage is outside the parameter range");
  const BigInt S(static_cast<std::int64_t>(P.size()));

  SumsetProfile prof;
  switch (method) {
    case SumsetMethod::fft:
      if (!fft_guards_ok(P, S, r))
        throw resource_error("instance too large for the exact fft route");
      prof = profile_fft(P, r);
      break;
    case SumsetMethod::direct:
      prof = profile_direct(P, r);
      break;
    case SumsetMethod::automatic: {
      if (fft_guards_ok(P, S, r)) {
        prof = profile_fft(P, r);
        if (prof.fft_residue > 0.25)
          prof = profile_direct(P, r);  // roundoff got suspicious
        else if (seq.N_at(l) <= 100000) {
          const SumsetProfile ref = profile_direct(P, r);
          if (prof.sums != ref.sums || prof.counts != ref.counts)
            throw invariant_error("fft and direct sumsets disagree");
        }
      } else {
        prof = profile_direct(P, r);
      }
      break;
    }
  }

  prof.stage = l;
  prof.scale = seq.N_at(l);
  check_moments(prof, P, S, r);
  return prof;
}

BigInt energy_bruteforce(const EndpointSet& P, int r) {
  require_order(r);
  const std::size_t S = P.size();
  const double tuples = std::pow(static_cast<double>(S), 2 * r);
  if (tuples > 1e8)
    throw resource_error("brute-force energy needs S^(2r) <= 1e8");

  std::vector<std::size_t> idx(static_cast<std::size_t>(2 * r), 0);
  BigInt hits = 0;
  while (true) {
    Key left = 0, right = 0;
    for (int i = 0; i < r; ++i) left += P.keys[idx[static_cast<std::size_t>(i)]];
    for (int i = r; i < 2 * r; ++i)
      right += P.keys[idx[static_cast<std::size_t>(i)]];
    if (left == right) ++hits;

    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == S) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return hits;
}

BigRat energy_lower_bound(const ParamSequences& seq, int l, int r) {
  require_order(r);
  return BigRat(pow_big(seq.S_at(l), 2 * r - 1), pow_big(BigInt(2 * r), l));
}

BigInt sumset_size_bound(const ParamSequences& seq, int l, int r) {
  require_order(r);
  return pow_big(BigInt(2 * r), l) * seq.S_at(l);
}

EnergyReport energy_report(const EndpointSet& P, const ParamSequences& seq,
                           int r, SumsetMethod method) {
  EnergyReport rep;
  rep.profile = sumset_profile(P, seq, r, method);
  rep.lower_bound = energy_lower_bound(seq, P.stage, r);
  rep.size_bound = sumset_size_bound(seq, P.stage, r);
  rep.energy_ok = BigRat(rep.profile.energy) >= rep.lower_bound;
  rep.support_ok = BigInt(static_cast<std::int64_t>(rep.profile.support_size())) <=
                   rep.size_bound;
  return rep;
}

void write_sumset_csv(const std::string& path, const SumsetProfile& prof,
                      std::uint64_t seed, const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  f << "# stage = " << prof.stage << "\n";
  f << "# order = " << prof.order << "\n";
  f << "# N = " << prof.scale << "\n";
  f << "# method = " << prof.method << "\n";
  f << "# total = " << prof.total << "\n";
  f << "# energy = " << prof.energy << "\n";
  f << "# seed = " << seed << "\n";
  f << "# config_hash = " << config_hash << "\n";
  f << "b,count\n";
  const BigInt offset = BigInt(prof.order) * prof.scale;
  for (std::size_t i = 0; i < prof.sums.size(); ++i)
    f << (offset + prof.sums[i]) << "," << prof.counts[i] << "\n";
}

}  // namespace cantorlab
