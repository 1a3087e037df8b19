#include "volwealth/gauss_rules.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "volwealth/errors.hpp"

namespace volwealth {

namespace {

// Three-term recurrence of the orthonormal family:
//   b[k+1] p_{k+1}(x) = (x - a[k]) p_k(x) - b[k] p_{k-1}(x),  p_0 = 1.
// (Weights normalized to total mass 1.)
struct Jacobi {
  std::vector<double> a;  // size n
  std::vector<double> b;  // size n + 1, b[0] unused
};

Jacobi hermite_jacobi(int n) {
  Jacobi j{std::vector<double>(n, 0.0), std::vector<double>(n + 1, 0.0)};
  for (int k = 1; k <= n; ++k) j.b[k] = std::sqrt(static_cast<double>(k));
  return j;
}

Jacobi laguerre_jacobi(int n) {
  Jacobi j{std::vector<double>(n), std::vector<double>(n + 1, 0.0)};
  for (int k = 0; k < n; ++k) j.a[k] = 2.0 * k + 1.0;
  for (int k = 1; k <= n; ++k) j.b[k] = static_cast<double>(k);
  return j;
}

struct Eval {
  long double pn;      // p_n(x)
  long double dpn;     // p_n'(x)
  long double sumsq;   // sum_{k<n} p_k(x)^2
};

Eval evaluate(const Jacobi& j, long double x) {
  const int n = static_cast<int>(j.a.size());
  long double p_prev = 0.0L, p = 1.0L;
  long double d_prev = 0.0L, d = 0.0L;
  long double sumsq = 0.0L;
  for (int k = 0; k < n; ++k) {
    sumsq += p * p;
    const long double bk = (k == 0) ? 0.0L : j.b[k];
    const long double p_next = ((x - j.a[k]) * p - bk * p_prev) / j.b[k + 1];
    const long double d_next = ((x - j.a[k]) * d + p - bk * d_prev) / j.b[k + 1];
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d, sumsq};
}

// Golub-Welsch eigenvalues, Newton-polished on p_n, weights from the
// Christoffel function 1 / sum p_k^2.
std::shared_ptr<const GaussRule> build(const Jacobi& j) {
  const int n = static_cast<int>(j.a.size());
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag[k] = j.a[k];
  for (int k = 0; k + 1 < n; ++k) sub[k] = j.b[k + 1];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NonConvergence("Gauss rule eigenvalue solve failed");

  auto rule = std::make_shared<GaussRule>();
  rule->nodes.resize(n);
  rule->weights.resize(n);
  rule->log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    long double x = solver.eigenvalues()[i];
    for (int it = 0; it < 3; ++it) {
      const Eval e = evaluate(j, x);
      if (e.dpn == 0.0L) break;
      x -= e.pn / e.dpn;
    }
    const Eval e = evaluate(j, x);
    rule->nodes[i] = static_cast<double>(x);
    rule->log_weights[i] = -static_cast<double>(std::log(e.sumsq));
    rule->weights[i] = std::exp(rule->log_weights[i]);
  }
  return rule;
}

template <class Make>
std::shared_ptr<const GaussRule> cached(std::map<int, std::shared_ptr<const GaussRule>>& cache,
                                        std::mutex& m, int n, Make make) {
  if (n < 1 || n > 1024) throw DomainError("Gauss rule size must be in [1, 1024]");
  std::lock_guard lock(m);
  auto& slot = cache[n];
  if (!slot) slot = build(make(n));
  return slot;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_hermite(int n) {
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  static std::mutex m;
  return cached(cache, m, n, hermite_jacobi);
}

std::shared_ptr<const GaussRule> gauss_laguerre(int n) {
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  static std::mutex m;
  return cached(cache, m, n, laguerre_jacobi);
}

}  // namespace volwealth
