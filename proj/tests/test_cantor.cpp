#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cantorlab/cantor.hpp"
#include "cantorlab/errors.hpp"
#include "cantorlab/params.hpp"

using namespace cantorlab;

namespace {

ParamSequences tiny() {
  return ParamSequences(derive_exponents(2, 1.5, 1.5), {2, 1}, {3, 4}, {8, 12});
}

// Isolation straight from the definition: every KEPT interval [v, v + 1/N]
// at distance >= 1/N from every other interval of A, checked pairwise in
// value space. Non-kept intervals may touch each other (free parents draw
// from the full digit range), so only the kept ones carry a buffer.
bool isolated_by_definition(const EndpointSet& A, const EndpointSet& P,
                            const ParamSequences& seq) {
  const double len = 1.0 / to_double(seq.N_at(A.stage));
  for (Key kp : P.keys)
    for (Key ka : A.keys) {
      if (ka == kp) continue;
      const double vp = endpoint_value(kp, seq, A.stage);
      const double va = endpoint_value(ka, seq, A.stage);
      const double gap = std::abs(vp - va) - len;
      if (gap < len - 1e-12) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("first-stage progression is the odd block") {
  const ParamSequences seq = tiny();
  const EndpointSet P1 = build_progression(seq, 1);
  CHECK(P1.keys == std::vector<Key>{1, 3});
  CHECK(endpoint_value(1, seq, 1) == doctest::Approx(9.0 / 8.0).epsilon(1e-15));
  CHECK(endpoint_value(3, seq, 1) == doctest::Approx(11.0 / 8.0).epsilon(1e-15));

  const EndpointSet P2 = build_progression(seq, 2);
  // s_2 = 1 keeps only digit 1 under each stage-1 parent.
  CHECK(P2.keys == std::vector<Key>{13, 37});
}

TEST_CASE("stage cardinalities and containment") {
  const ParamSequences seq = tiny();
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const std::vector<Stage> stages = build_all(seq, seed);
    REQUIRE(stages.size() == 3);
    for (int j = 0; j <= 2; ++j) {
      const Stage& st = stages[static_cast<std::size_t>(j)];
      CHECK(BigInt(static_cast<long long>(st.P.size())) == seq.S_at(j));
      CHECK(BigInt(static_cast<long long>(st.A.size())) == seq.T_at(j));
      for (Key k : st.P.keys) CHECK(st.A.contains(k));
    }
  }
}

TEST_CASE("children of kept parents avoid the even block") {
  const ParamSequences seq = tiny();
  for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
    const std::vector<Stage> stages = build_all(seq, seed);
    const Stage& prev = stages[1];
    const Stage& cur = stages[2];
    const int n = seq.n_at(2), s = seq.s_at(2);
    for (Key k : cur.A.keys) {
      const Key parent = k / n;
      const int digit = static_cast<int>(k % n);
      CHECK(prev.A.contains(parent));
      if (prev.P.contains(parent)) {
        // Digits 0, 2, ..., 2s are reserved as the isolation buffer.
        const bool in_even_block = digit <= 2 * s && digit % 2 == 0;
        CHECK_FALSE(in_even_block);
      }
    }
  }
}

TEST_CASE("isolation matches the pairwise definition") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 7);
  for (const Stage& st : stages) {
    CHECK(check_isolation(st.A, st.P, seq));
    CHECK(isolated_by_definition(st.A, st.P, seq));
  }

  // Adjacent keys at distance 1 violate isolation when one is kept.
  EndpointSet bad;
  bad.stage = 1;
  bad.kind = 'A';
  bad.keys = {1, 2, 4};
  EndpointSet P;
  P.stage = 1;
  P.kind = 'P';
  P.keys = {1};
  CHECK_FALSE(check_isolation(bad, P, seq));
  CHECK_FALSE(isolated_by_definition(bad, P, seq));

  // Touching intervals are tolerated away from the kept set.
  EndpointSet loose;
  loose.stage = 1;
  loose.kind = 'A';
  loose.keys = {1, 3, 4};
  CHECK(check_isolation(loose, P, seq));
  CHECK(isolated_by_definition(loose, P, seq));
}

TEST_CASE("same seed reruns are identical, seeds matter") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> a = build_all(seq, 99);
  const std::vector<Stage> b = build_all(seq, 99);
  CHECK(a[2].A.keys == b[2].A.keys);

  bool any_differ = false;
  for (std::uint64_t seed = 100; seed < 105; ++seed)
    if (build_all(seq, seed)[2].A.keys != a[2].A.keys) any_differ = true;
  CHECK(any_differ);
}

TEST_CASE("measure masses are exact rationals") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 3);
  for (int j = 0; j <= 2; ++j) {
    const StageMeasure& mu = stages[static_cast<std::size_t>(j)].mu;
    CHECK(mu.total_mass() == BigRat(1));
    CHECK(mu.interval_mass() == BigRat(BigInt(1), seq.T_at(j)));
    CHECK(mu.interval_count() == static_cast<std::int64_t>(
                                     stages[static_cast<std::size_t>(j)].A.size()));
  }
  CHECK(stages[2].mu.value_of(13) == doctest::Approx(1.0 + 13.0 / 96.0).epsilon(1e-15));
}

TEST_CASE("digit round trip") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 5);
  for (Key k : stages[2].A.keys) {
    const std::vector<int> digits = decode_digits(k, seq, 2);
    REQUIRE(digits.size() == 2);
    Key back = 0;
    for (int j = 1; j <= 2; ++j)
      back = back * seq.n_at(j) + digits[static_cast<std::size_t>(j - 1)];
    CHECK(back == k);
  }
}

TEST_CASE("endpoint files round trip byte for byte") {
  const ParamSequences seq = tiny();
  const std::vector<Stage> stages = build_all(seq, 21);

  std::ostringstream first, second;
  write_endpoints(first, stages[2].A, seq, 21, "deadbeefdeadbeef");
  write_endpoints(second, stages[2].A, seq, 21, "deadbeefdeadbeef");
  CHECK(first.str() == second.str());
  CHECK(first.str().find("deadbeefdeadbeef") != std::string::npos);

  const std::string path = "endpoints_roundtrip_test.txt";
  write_endpoints_file(path, stages[2].A, seq, 21, "deadbeefdeadbeef");
  const EndpointSet back = read_endpoints_file(path);
  CHECK(back.stage == stages[2].A.stage);
  CHECK(back.kind == stages[2].A.kind);
  CHECK(back.keys == stages[2].A.keys);
  std::remove(path.c_str());
}

TEST_CASE("key range guard refuses oversized scales") {
  // Single-branch tree keeps the stage cheap while N_J = 14^15 > 2^53.
  const Exponents e = derive_exponents(2, 1.5, 1.5);
  const ParamSequences seq(e, std::vector<int>(15, 1), std::vector<int>(15, 1),
                           std::vector<int>(15, 14));
  CHECK_THROWS_AS(build_all(seq, 1), resource_error);
}
