#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace cantorlab {

// Gauss-Legendre rule on [-1, 1]. Tables are computed once per node count
// and cached (thread-safe).
struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

const QuadRule& gauss_legendre(int n);

template <class F>
auto integrate_gl(F&& f, double a, double b, int n) -> decltype(f(0.0)) {
  const QuadRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  decltype(f(0.0)) acc{};
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    acc += rule.w[i] * f(mid + half * rule.x[i]);
  return acc * half;
}

// Plain adaptive Simpson; used as the independent oracle against the
// Gauss-Legendre production paths.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

}  // namespace cantorlab
