#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cantorlab/bigint.hpp"
#include "cantorlab/cantor.hpp"
#include "cantorlab/params.hpp"

namespace cantorlab {

enum class SumsetMethod { automatic, fft, direct };

// r-fold additive sumset of an endpoint key set, with multiplicities.
// sums[i] is a realized value of key_1 + ... + key_r over ordered r-tuples,
// counts[i] how many tuples realize it. total = S^r, energy = sum of squared
// counts (the count of 2r-tuples whose half-sums agree).
struct SumsetProfile {
  int stage = 0;
  int order = 0;           // r
  BigInt scale = 1;        // N at this stage; real endpoint sum = order + sum/N
  std::vector<Key> sums;   // sorted ascending
  std::vector<std::uint64_t> counts;
  BigInt total = 0;
  BigInt energy = 0;
  double fft_residue = 0.0;  // worst |coefficient - round| seen, 0 off the fft path
  std::string method;        // "fft" or "direct", whichever produced the result

  std::size_t support_size() const { return sums.size(); }
};

// automatic: fft when the padded length and exact-count guards allow it,
// direct otherwise; small instances run both and must agree bit for bit.
SumsetProfile sumset_profile(const EndpointSet& P, const ParamSequences& seq,
                             int r, SumsetMethod method = SumsetMethod::automatic);

// Literal odometer over 2r-tuples counting matching half-sums. Exponential;
// refuses S^{2r} > 1e8.
BigInt energy_bruteforce(const EndpointSet& P, int r);

// (2r)^{-l} S_l^{2r-1}, the guaranteed floor for the energy at stage l.
BigRat energy_lower_bound(const ParamSequences& seq, int l, int r);

// (2r)^l S_l, the guaranteed ceiling for the sumset support size.
BigInt sumset_size_bound(const ParamSequences& seq, int l, int r);

struct EnergyReport {
  SumsetProfile profile;
  BigRat lower_bound = 0;
  BigInt size_bound = 0;
  bool energy_ok = false;   // energy >= lower_bound
  bool support_ok = false;  // support_size <= size_bound
};

EnergyReport energy_report(const EndpointSet& P, const ParamSequences& seq,
                           int r, SumsetMethod method = SumsetMethod::automatic);

// Rows "b,count" with b = order * N + sum, so the endpoint-value sum is b / N.
void write_sumset_csv(const std::string& path, const SumsetProfile& prof,
                      std::uint64_t seed, const std::string& config_hash);

}  // namespace cantorlab
