#include "cantorlab/cantor.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cantorlab/errors.hpp"
#include "cantorlab/rng.hpp"

namespace cantorlab {

namespace {

// Largest stage scale the 64-bit key encoding (and exact double endpoint
// values) will be asked to carry.
const BigInt kMaxScale = BigInt(1) << 53;

void require_scale(const ParamSequences& seq, int stage) {
  if (seq.N_at(stage) > kMaxScale) {
    std::ostringstream os;
    os << "stage " << stage << ": N exceeds the exact key range (2^53)";
    throw resource_error(os.str());
  }
}

}  // namespace

bool EndpointSet::contains(Key k) const {
  return std::binary_search(keys.begin(), keys.end(), k);
}

std::vector<int> decode_digits(Key key, const ParamSequences& seq, int stage) {
  std::vector<int> digits(static_cast<std::size_t>(stage));
  for (int j = stage; j >= 1; --j) {
    const int n = seq.n_at(j);
    digits[static_cast<std::size_t>(j - 1)] = static_cast<int>(key % n);
    key /= n;
  }
  return digits;
}

double endpoint_value(Key key, const ParamSequences& seq, int stage) {
  return 1.0 + static_cast<double>(key) / to_double(seq.N_at(stage));
}

EndpointSet build_progression(const ParamSequences& seq, int stage) {
  if (stage < 0 || stage > seq.stages())
    throw config_error("progression stage out of range");
  require_scale(seq, stage);
  std::vector<Key> keys{0};
  for (int j = 1; j <= stage; ++j) {
    const int n = seq.n_at(j);
    const int s = seq.s_at(j);
    std::vector<Key> next;
    next.reserve(keys.size() * static_cast<std::size_t>(s));
    for (Key parent : keys)
      for (int digit = 1; digit <= 2 * s - 1; digit += 2)
        next.push_back(parent * n + digit);
    keys = std::move(next);
  }
  EndpointSet out;
  out.stage = stage;
  out.kind = 'P';
  out.keys = std::move(keys);
  return out;
}

EndpointSet extend_endpoints(const EndpointSet& A_prev, const EndpointSet& P_prev,
                             const ParamSequences& seq, std::uint64_t seed) {
  const int j = A_prev.stage;
  const int next = j + 1;
  if (next > seq.stages())
    throw config_error("cannot extend past the configured stage count");
  require_scale(seq, next);
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
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < parents; ++i) {
    const Key parent = A_prev.keys[static_cast<std::size_t>(i)];
    Rng rng(seed, static_cast<std::uint64_t>(next),
            static_cast<std::uint64_t>(parent));
    std::vector<std::int64_t> digits;
    if (P_prev.contains(parent)) {
      // Keep the odd progression, fill the rest from beyond the excluded
      // even block {0, 2, ..., 2s}.
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

StageMeasure::StageMeasure(std::shared_ptr<const EndpointSet> endpoints,
                           const ParamSequences& seq)
    : endpoints_(std::move(endpoints)) {
  const int j = endpoints_->stage;
  N_big_ = seq.N_at(j);
  T_big_ = seq.T_at(j);
  if (BigInt(static_cast<std::int64_t>(endpoints_->keys.size())) != T_big_)
    throw invariant_error("endpoint count does not match the stage product");
  scale_ = to_double(N_big_);
  inv_scale_ = 1.0 / scale_;
  interval_length_ = inv_scale_;
  density_ = scale_ / to_double(T_big_);
}

BigRat StageMeasure::total_mass() const {
  return BigRat(BigInt(static_cast<std::int64_t>(endpoints_->keys.size())), T_big_);
}

BigRat StageMeasure::interval_mass() const { return BigRat(1, T_big_); }

std::vector<Stage> build_all(const ParamSequences& seq, std::uint64_t seed) {
  validate_sequences(seq);  // fail fast on malformed stage data
  std::vector<Stage> stages;
  stages.reserve(static_cast<std::size_t>(seq.stages()) + 1);

  EndpointSet A0;
  A0.stage = 0;
  A0.kind = 'A';
  A0.keys = {0};

  for (int j = 0; j <= seq.stages(); ++j) {
    Stage st;
    st.P = build_progression(seq, j);
    st.A = (j == 0) ? A0
                    : extend_endpoints(stages.back().A, stages.back().P, seq, seed);
    if (BigInt(static_cast<std::int64_t>(st.P.keys.size())) != seq.S_at(j))
      throw invariant_error("progression cardinality mismatch");
    if (BigInt(static_cast<std::int64_t>(st.A.keys.size())) != seq.T_at(j))
      throw invariant_error("endpoint cardinality mismatch");
    for (Key k : st.P.keys)
      if (!st.A.contains(k))
        throw invariant_error("progression endpoint missing from endpoint set");
    st.mu = StageMeasure(std::make_shared<EndpointSet>(st.A), seq);
    stages.push_back(std::move(st));
  }
  return stages;
}

bool check_isolation(const EndpointSet& A, const EndpointSet& P,
                     const ParamSequences& seq) {
  (void)seq;
  if (A.stage != P.stage)
    throw invariant_error("isolation check needs sets from the same stage");
  for (Key p : P.keys) {
    const auto it = std::lower_bound(A.keys.begin(), A.keys.end(), p);
    if (it == A.keys.end() || *it != p)
      throw invariant_error("progression endpoint missing from endpoint set");
    if (it != A.keys.begin() && p - *(it - 1) < 2) return false;
    if (it + 1 != A.keys.end() && *(it + 1) - p < 2) return false;
  }
  return true;
}

void write_endpoints(std::ostream& os, const EndpointSet& set,
                     const ParamSequences& seq, std::uint64_t seed,
                     const std::string& config_hash) {
  os << "# cantorlab endpoint set\n";
  os << "# kind = " << set.kind << "\n";
  os << "# stage = " << set.stage << "\n";
  os << "# N = " << seq.N_at(set.stage) << "\n";
  os << "# count = " << set.keys.size() << "\n";
  os << "# seed = " << seed << "\n";
  os << "# config_hash = " << config_hash << "\n";
  for (Key k : set.keys) os << k << "\n";
}

void write_endpoints_file(const std::string& path, const EndpointSet& set,
                          const ParamSequences& seq, std::uint64_t seed,
                          const std::string& config_hash) {
  std::ofstream f(path, std::ios::binary);  // binary: byte-identical reruns
  if (!f) throw config_error("cannot open for writing: " + path);
  write_endpoints(f, set, seq, seed, config_hash);
  if (!f.good()) throw config_error("write failed: " + path);
}

EndpointSet read_endpoints_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw config_error("cannot open endpoint file: " + path);
  EndpointSet set;
  std::size_t declared = 0;
  bool have_count = false;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key, eq;
      hs >> key >> eq;
      if (eq != "=") continue;
      if (key == "kind") hs >> set.kind;
      else if (key == "stage") hs >> set.stage;
      else if (key == "count") { hs >> declared; have_count = true; }
      continue;
    }
    std::istringstream vs(line);
    Key k = 0;
    if (!(vs >> k)) throw config_error("malformed key line in " + path);
    set.keys.push_back(k);
  }
  if (have_count && declared != set.keys.size())
    throw config_error("endpoint count mismatch in " + path);
  if (!std::is_sorted(set.keys.begin(), set.keys.end()))
    throw config_error("endpoint keys not sorted in " + path);
  return set;
}

}  // namespace cantorlab
