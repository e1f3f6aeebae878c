#include "cantorlab/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cantorlab/errors.hpp"

namespace cantorlab {

namespace {

std::string stage_msg(int j, const std::string& what) {
  std::ostringstream os;
  os << "stage " << j << ": " << what;
  return os.str();
}

// ln(400 (j+1) N), the slowly growing factor in the branch-growth target.
double log_target_factor(int jp1, const BigInt& N) {
  return std::log(400.0) + std::log(static_cast<double>(jp1)) + log_big(N);
}

}  // namespace

Exponents derive_exponents(int d, double alpha, double beta) {
  if (d < 1) throw config_error("dimension must satisfy 1 <= d");
  const double dm1 = static_cast<double>(d - 1);
  if (!(dm1 < beta)) throw config_error("exponents must satisfy d - 1 < beta");
  if (!(beta <= alpha)) throw config_error("exponents must satisfy beta <= alpha");
  if (!(alpha < d)) throw config_error("exponents must satisfy alpha < d");
  return Exponents{d, alpha, beta, alpha - dm1, beta - dm1};
}

ParamSequences::ParamSequences(Exponents exp, std::vector<int> s,
                               std::vector<int> t, std::vector<int> n)
    : exp_(exp),
      J_(static_cast<int>(s.size())),
      s_(std::move(s)),
      t_(std::move(t)),
      n_(std::move(n)) {
  if (t_.size() != s_.size() || n_.size() != s_.size())
    throw config_error("s, t, n must have one entry per stage");
  S_.assign(static_cast<std::size_t>(J_) + 1, 1);
  T_.assign(static_cast<std::size_t>(J_) + 1, 1);
  N_.assign(static_cast<std::size_t>(J_) + 1, 1);
  for (int j = 1; j <= J_; ++j) {
    if (s_at(j) < 1 || t_at(j) < 1 || n_at(j) < 1)
      throw config_error(stage_msg(j, "sequence entries must be positive"));
    S_[static_cast<std::size_t>(j)] = S_[static_cast<std::size_t>(j) - 1] * s_at(j);
    T_[static_cast<std::size_t>(j)] = T_[static_cast<std::size_t>(j) - 1] * t_at(j);
    N_[static_cast<std::size_t>(j)] = N_[static_cast<std::size_t>(j) - 1] * n_at(j);
  }
}

ParamSequences generate_sequences(const Exponents& exp,
                                  const std::vector<int>& n_schedule) {
  const int J = static_cast<int>(n_schedule.size());
  std::vector<int> s, t;
  s.reserve(n_schedule.size());
  t.reserve(n_schedule.size());

  BigInt Nj = 1, Tprev = 1, Sprev = 1;
  for (int j = 1; j <= J; ++j) {
    const int nj = n_schedule[static_cast<std::size_t>(j - 1)];
    // t_j < n_j/2 needs room for at least one child.
    const int t_cap = (nj - 1) / 2;
    if (t_cap < 1)
      throw config_error(stage_msg(j, "subdivision factor too small (need n_j >= 3)"));
    Nj *= nj;

    // Branch-growth target for T_j, using the next stage's scale when the
    // schedule still provides it and the current one on the final stage.
    const BigInt N_next = (j < J) ? BigInt(Nj * n_schedule[static_cast<std::size_t>(j)]) : Nj;
    const double log_T_prev = log_big(Tprev);
    const double log_target = exp.alpha0 * log_big(N_next) +
                              std::log(log_target_factor(j + 1, N_next));
    const double t_star = std::exp(log_target - log_T_prev);
    const long long t_round = std::llround(std::min(t_star, 1e18));
    const int tj = static_cast<int>(std::clamp<long long>(t_round, 1, t_cap));
    Tprev *= tj;

    // Density target: S_j tracks T_j N_j^{-beta0/2}.
    const double log_s_star = std::log(static_cast<double>(tj)) + log_T_prev -
                              log_big(Sprev) -
                              0.5 * exp.beta0 * log_big(Nj);
    const long long s_round = std::llround(std::min(std::exp(log_s_star), 1e18));
    const int sj = static_cast<int>(std::clamp<long long>(s_round, 1, tj));
    Sprev *= sj;

    t.push_back(tj);
    s.push_back(sj);
  }
  return ParamSequences(exp, std::move(s), std::move(t),
                        std::vector<int>(n_schedule));
}

ValidationReport validate_sequences(const ParamSequences& seq, double c_ratio,
                                    int j0) {
  const int J = seq.stages();
  if (j0 < 1) throw config_error("j0 must be >= 1");

  for (int j = 1; j <= J; ++j) {
    const int s = seq.s_at(j), t = seq.t_at(j), n = seq.n_at(j);
    if (!(1 <= s))
      throw invariant_error(stage_msg(j, "1 <= s_j violated"));
    if (!(s <= t))
      throw invariant_error(stage_msg(j, "s_j <= t_j violated"));
    if (!(2 * t < n))
      throw invariant_error(stage_msg(j, "t_j < n_j/2 violated"));
    // Children outside the kept progression must fit in the selection pool
    // {2 s_j + 1, ..., n_j - 1}. Implied by the inequalities above.
    if (!(n - 2 * s - 1 >= t - s))
      throw invariant_error(stage_msg(j, "selection pool too small"));
  }

  ValidationReport rep;
  rep.c_ratio = c_ratio;
  rep.j0 = j0;

  const Exponents& e = seq.exponents();
  double worst_branch = 0.0, worst_density = 0.0;  // max |log ratio|
  for (int j = j0; j <= J; ++j) {
    const BigInt& N_next = (j < J) ? seq.N_at(j + 1) : seq.N_at(J);
    const double log_target = e.alpha0 * log_big(N_next) +
                              std::log(log_target_factor(j + 1, N_next));
    worst_branch =
        std::max(worst_branch, std::abs(log_big(seq.T_at(j)) - log_target));

    const double log_density =
        log_big(seq.S_at(j)) - log_big(seq.T_at(j));
    worst_density = std::max(
        worst_density,
        std::abs(log_density + 0.5 * e.beta0 * log_big(seq.N_at(j))));
  }
  rep.branch_ratio_worst = std::exp(worst_branch);
  rep.density_ratio_worst = std::exp(worst_density);
  rep.branch_ratio_ok = rep.branch_ratio_worst <= c_ratio;
  rep.density_ratio_ok = rep.density_ratio_worst <= c_ratio;

  rep.subdiv_nondecreasing = true;
  rep.subdiv_sublinear = true;
  rep.subdiv_log_negligible = true;
  for (int j = j0; j < J; ++j) {
    if (seq.n_at(j + 1) < seq.n_at(j)) rep.subdiv_nondecreasing = false;
    if (static_cast<double>(seq.n_at(j + 1)) / (j + 1) >
        static_cast<double>(seq.n_at(j)) / j + 1e-12)
      rep.subdiv_sublinear = false;
    const auto log_small = [&](int m) {
      return (e.d - 1) * std::log(static_cast<double>(seq.n_at(m))) -
             std::log(log_target_factor(m, seq.N_at(m)));
    };
    if (log_small(j + 1) > log_small(j) + 1e-12)
      rep.subdiv_log_negligible = false;
  }
  return rep;
}

}  // namespace cantorlab
