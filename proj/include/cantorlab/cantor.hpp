#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cantorlab/bigint.hpp"
#include "cantorlab/params.hpp"

namespace cantorlab {

// Stage-j endpoints are encoded by the scaled integer key
//   key(a) = sum_k a^(k) * N_j / N_k  in [0, N_j),
// so the endpoint value is 1 + key / N_j and a child's key is
// parent_key * n_{j+1} + digit. Keys stay exact in 64 bits for every scale
// this tool refuses to exceed.
using Key = std::int64_t;

struct EndpointSet {
  int stage = 0;
  char kind = 'A';  // 'P' = kept progression, 'A' = full endpoint set
  std::vector<Key> keys;  // sorted, strictly increasing

  std::size_t size() const { return keys.size(); }
  bool contains(Key k) const;
};

// Digit vector (a^(1), ..., a^(j)) of a stage-j key, most significant first.
std::vector<int> decode_digits(Key key, const ParamSequences& seq, int stage);

double endpoint_value(Key key, const ParamSequences& seq, int stage);

// The deterministic progression set P_j: every digit a^(k) runs over the odd
// values {1, 3, ..., 2 s_k - 1}. |P_j| = S_j.
EndpointSet build_progression(const ParamSequences& seq, int stage);

// One refinement step A_j -> A_{j+1}. Parents in P_j keep the full odd
// progression {1,...,2s-1} and draw the remaining t-s digits uniformly
// without replacement from {2s+1,...,n-1}; other parents draw t digits from
// {0,...,n-1}. Each parent's draw is keyed by (seed, stage, parent key), so
// the result is reproducible independently of thread count.
EndpointSet extend_endpoints(const EndpointSet& A_prev, const EndpointSet& P_prev,
                             const ParamSequences& seq, std::uint64_t seed);

// Uniform measure on the union of intervals [a, a + 1/N_j]: density N_j/T_j
// on each, total mass exactly 1, per-interval mass exactly 1/T_j.
class StageMeasure {
 public:
  StageMeasure() = default;
  StageMeasure(std::shared_ptr<const EndpointSet> endpoints,
               const ParamSequences& seq);

  int stage() const { return endpoints_->stage; }
  const EndpointSet& endpoints() const { return *endpoints_; }

  double interval_length() const { return interval_length_; }
  double density() const { return density_; }  // N_j / T_j
  double scale() const { return scale_; }      // N_j as double
  std::int64_t interval_count() const {
    return static_cast<std::int64_t>(endpoints_->keys.size());
  }

  double value_of(Key key) const { return 1.0 + static_cast<double>(key) * inv_scale_; }

  BigRat total_mass() const;     // exactly 1
  BigRat interval_mass() const;  // exactly 1/T_j

 private:
  std::shared_ptr<const EndpointSet> endpoints_;
  BigInt N_big_ = 1, T_big_ = 1;
  double interval_length_ = 1.0;
  double density_ = 1.0;
  double scale_ = 1.0;
  double inv_scale_ = 1.0;
};

struct Stage {
  EndpointSet P;
  EndpointSet A;
  StageMeasure mu;
};

// Builds stages 0..J. Checks P_j subset of A_j and the cardinalities
// |P_j| = S_j, |A_j| = T_j at every stage.
std::vector<Stage> build_all(const ParamSequences& seq, std::uint64_t seed);

// True when every kept endpoint's interval [a, a + 1/N_l] is at distance
// >= 1/N_l from every other interval of A_l, i.e. adjacent keys differ by
// at least 2. Holds for every built stage (the excluded even digits leave a
// one-interval buffer on each side); arbitrary input sets may fail.
bool check_isolation(const EndpointSet& A, const EndpointSet& P,
                     const ParamSequences& seq);

// Text round-trip: '#'-prefixed header (kind, stage, N, count, seed,
// config_hash), then one key per line. Reruns are byte-identical.
void write_endpoints(std::ostream& os, const EndpointSet& set,
                     const ParamSequences& seq, std::uint64_t seed,
                     const std::string& config_hash);
void write_endpoints_file(const std::string& path, const EndpointSet& set,
                          const ParamSequences& seq, std::uint64_t seed,
                          const std::string& config_hash);
EndpointSet read_endpoints_file(const std::string& path);

}  // namespace cantorlab
