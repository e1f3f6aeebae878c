#pragma once

#include <string>
#include <vector>

#include "cantorlab/bigint.hpp"

namespace cantorlab {

// Ambient dimension plus the two target exponents. alpha plays the role of a
// mass-dimension target for the lifted measure, beta the Fourier-decay
// target; alpha0/beta0 are the radial leftovers after removing the sphere's
// d-1 directions.
struct Exponents {
  int d;
  double alpha;
  double beta;
  double alpha0;  // alpha - (d - 1)
  double beta0;   // beta - (d - 1)
};

// Requires 1 <= d and d - 1 < beta <= alpha < d.
Exponents derive_exponents(int d, double alpha, double beta);

// Per-stage construction data. s_j counts the odd-digit progression kept at
// stage j, t_j the total children per endpoint, n_j the subdivision factor.
// Stage indices are 1-based; products carry the empty stage, so S_at(0) == 1.
class ParamSequences {
 public:
  ParamSequences() = default;
  // Structural checks only (equal lengths, positive entries); the stage
  // inequalities live in validate_sequences. Products are computed exactly.
  ParamSequences(Exponents exp, std::vector<int> s, std::vector<int> t,
                 std::vector<int> n);

  const Exponents& exponents() const { return exp_; }
  int stages() const { return J_; }

  int s_at(int j) const { return s_[static_cast<std::size_t>(j - 1)]; }
  int t_at(int j) const { return t_[static_cast<std::size_t>(j - 1)]; }
  int n_at(int j) const { return n_[static_cast<std::size_t>(j - 1)]; }

  const BigInt& S_at(int j) const { return S_[static_cast<std::size_t>(j)]; }
  const BigInt& T_at(int j) const { return T_[static_cast<std::size_t>(j)]; }
  const BigInt& N_at(int j) const { return N_[static_cast<std::size_t>(j)]; }

  const std::vector<int>& s() const { return s_; }
  const std::vector<int>& t() const { return t_; }
  const std::vector<int>& n() const { return n_; }

 private:
  Exponents exp_{};
  int J_ = 0;
  std::vector<int> s_, t_, n_;
  std::vector<BigInt> S_, T_, N_;
};

// Greedy realization of the two growth targets: t_j tracks
// T_j ~ N_{j+1}^{alpha0} ln(400 (j+1) N_{j+1}) and s_j then tracks
// S_j ~ T_j N_j^{-beta0/2}, both rounded and clamped into the feasible
// window. The last stage reuses N_J where N_{J+1} would be needed.
// Throws config_error if some n_j admits no child count (n_j < 3).
ParamSequences generate_sequences(const Exponents& exp,
                                  const std::vector<int>& n_schedule);

struct ValidationReport {
  // Worst two-sided ratio of T_j against its branch-growth target, and of
  // S_j/T_j against the density target N_j^{-beta0/2}; both taken over
  // j >= j0 and compared against the tolerance factor C_ratio.
  double branch_ratio_worst = 0.0;
  double density_ratio_worst = 0.0;
  bool branch_ratio_ok = false;
  bool density_ratio_ok = false;

  // Trend diagnostics on the subdivision schedule. Reported, never fatal:
  // finite prefixes of a sequence routinely violate asymptotic conditions.
  bool subdiv_nondecreasing = false;  // n_j nondecreasing
  bool subdiv_sublinear = false;      // n_j / j nonincreasing
  bool subdiv_log_negligible = false; // n_j^{d-1} / ln(400 j N_j) nonincreasing

  double c_ratio = 0.0;
  int j0 = 1;
};

// Hard-checks s_j <= t_j < n_j/2 and the selection-pool count
// n_j - 2 s_j - 1 >= t_j - s_j (throws invariant_error naming the stage and
// inequality), then reports the ratio and trend diagnostics above.
ValidationReport validate_sequences(const ParamSequences& seq,
                                    double c_ratio = 4.0, int j0 = 1);

}  // namespace cantorlab
