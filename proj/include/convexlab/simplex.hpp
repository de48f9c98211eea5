#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "convexlab/errors.hpp"

namespace convexlab {

// Dense primal simplex for  max c'x  s.t.  Ax <= b, x >= 0  with b >= 0,
// so the slack basis is feasible and no phase-1 is needed. Dantzig pricing
// with a Bland fallback against cycling. Desk-scale sizes only.
class DenseSimplex {
 public:
  explicit DenseSimplex(int num_vars) : n_(num_vars) {
    if (num_vars <= 0) throw ContractViolation("DenseSimplex: need at least one variable");
  }

  // sum_i coef_i * x_i <= rhs, rhs >= 0
  void add_constraint(std::vector<std::pair<int, double>> terms, double rhs) {
    if (rhs < 0.0)
      throw InternalError("DenseSimplex: negative right-hand side breaks slack-basis feasibility");
    for (const auto& [idx, coef] : terms) {
      (void)coef;
      if (idx < 0 || idx >= n_) throw ContractViolation("DenseSimplex: bad variable index");
    }
    rows_.push_back({std::move(terms), rhs});
  }

  int num_vars() const { return n_; }
  long long num_rows() const { return static_cast<long long>(rows_.size()); }

  struct Solution {
    double objective = 0.0;
    std::vector<double> x;
    long long iterations = 0;
  };

  Solution maximize(const std::vector<double>& c) const {
    if (static_cast<int>(c.size()) != n_) throw ContractViolation("DenseSimplex: objective size mismatch");
    const int m = static_cast<int>(rows_.size());
    const int W = n_ + 1;
    std::vector<double> D(static_cast<size_t>(m + 1) * W, 0.0);
    auto row = [&](int i) { return D.data() + static_cast<size_t>(i) * W; };
    for (int i = 0; i < m; ++i) {
      double* r = row(i);
      for (const auto& [idx, coef] : rows_[i].terms) r[idx] += coef;
      r[n_] = rows_[i].rhs;
    }
    for (int j = 0; j < n_; ++j) row(m)[j] = -c[j];

    std::vector<int> basis(m), nonbasic(n_);
    for (int i = 0; i < m; ++i) basis[i] = n_ + i;
    for (int j = 0; j < n_; ++j) nonbasic[j] = j;

    constexpr double kEps = 1e-9;
    const long long bland_after = 16LL * (m + n_) + 256;
    const long long cap = 64LL * (m + n_) + 100000;
    Solution sol;
    for (;;) {
      if (sol.iterations > cap)
        throw InternalError("DenseSimplex: iteration cap hit; problem likely degenerate beyond scale");
      const bool bland = sol.iterations > bland_after;
      const double* obj = row(m);
      int s = -1;
      for (int j = 0; j < n_; ++j) {
        if (obj[j] < -kEps) {
          if (bland) {
            if (s == -1 || nonbasic[j] < nonbasic[s]) s = j;
          } else if (s == -1 || obj[j] < obj[s]) {
            s = j;
          }
        }
      }
      if (s == -1) break;  // optimal
      int r = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        double a = row(i)[s];
        if (a <= kEps) continue;
        double ratio = row(i)[n_] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (r == -1 || basis[i] < basis[r]))) {
          best_ratio = ratio;
          r = i;
        }
      }
      if (r == -1) throw InternalError("DenseSimplex: unbounded objective");
      pivot(D, W, m, r, s);
      std::swap(basis[r], nonbasic[s]);
      ++sol.iterations;
    }

    sol.x.assign(n_, 0.0);
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n_) sol.x[basis[i]] = row(i)[n_];
    }
    sol.objective = row(m)[n_];
    return sol;
  }

 private:
  struct Row {
    std::vector<std::pair<int, double>> terms;
    double rhs;
  };

  static void pivot(std::vector<double>& D, int W, int m, int r, int s) {
    double* pr = D.data() + static_cast<size_t>(r) * W;
    const double inv = 1.0 / pr[s];
    for (int i = 0; i <= m; ++i) {
      if (i == r) continue;
      double* pi = D.data() + static_cast<size_t>(i) * W;
      const double f = pi[s] * inv;
      if (f != 0.0) {
        for (int j = 0; j < W; ++j) pi[j] -= f * pr[j];
      }
      pi[s] = -f;
    }
    for (int j = 0; j < W; ++j) pr[j] *= inv;
    pr[s] = inv;
  }

  int n_;
  std::vector<Row> rows_;
};

}  // namespace convexlab
