#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "convexlab/errors.hpp"
#include "convexlab/simplex.hpp"

namespace convexlab {

// Finite-grid relaxation of the extremal problem: maximize f at a node over
// grid functions on [-1,1]^n that vanish on the boundary, are 1-Lipschitz in
// the sup norm (first differences over king moves) and have second symmetric
// differences bounded by the squared step. Grid constraints are a subset of
// the continuum constraints, so optima are upper estimates of the continuum
// value even before pruning.
enum class PrunePolicy {
  None,
  CenterHalfAxis,  // second-order rows centered at ||x||_inf <= 1/2, plus all axis-aligned steps
};

enum class ExtremalVariant { Full, LipschitzOnly };

struct ExtremalInstance {
  int n = 1;        // dimension, 1..3
  int m = 1;        // half-resolution; grid step 1/m
  int side = 3;     // 2m+1 nodes per axis
  long long node_count = 0;
  int variable_count = 0;        // interior nodes
  long long boundary_count = 0;  // nodes fixed to zero
  long long box_count = 0;       // upper-bound rows f <= 1
  long long first_order_count = 0;   // two-sided neighbor constraints
  long long second_order_count = 0;  // two-sided second-difference constraints
  PrunePolicy policy = PrunePolicy::None;
  bool pruned = false;

  struct TwoSided {
    std::vector<std::pair<int, double>> terms;  // |terms . f| <= rhs
    double rhs = 0.0;
    int family = 0;  // 0 box (one-sided), 1 first-order, 2 second-order
  };
  std::vector<TwoSided> rows;
  std::vector<int> var_of_node;  // -1 on the boundary

  int node_index(const std::vector<int>& k) const {
    int idx = 0;
    for (int i = n - 1; i >= 0; --i) idx = idx * side + (k[i] + m);
    return idx;
  }
};

namespace detail {

inline bool advance_lattice(std::vector<int>& k, int lo, int hi) {
  for (size_t i = 0; i < k.size(); ++i) {
    if (++k[i] <= hi) return true;
    k[i] = lo;
  }
  return false;
}

inline bool canonical_offset(const std::vector<int>& o) {
  for (int v : o) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return false;  // all zero
}

}  // namespace detail

inline ExtremalInstance build_extremal_lp(int n, int m, PrunePolicy policy = PrunePolicy::None,
                                          long long max_rows = 400000) {
  if (n < 1 || n > 3) throw ContractViolation("build_extremal_lp: n must be 1, 2 or 3");
  if (m < 1) throw ContractViolation("build_extremal_lp: m must be at least 1");
  ExtremalInstance inst;
  inst.n = n;
  inst.m = m;
  inst.side = 2 * m + 1;
  inst.policy = policy;
  inst.pruned = policy != PrunePolicy::None;
  inst.node_count = 1;
  for (int i = 0; i < n; ++i) inst.node_count *= inst.side;

  inst.var_of_node.assign(static_cast<size_t>(inst.node_count), -1);
  std::vector<int> k(n, -m);
  do {
    bool boundary = false;
    for (int v : k)
      if (std::abs(v) == m) boundary = true;
    int idx = inst.node_index(k);
    if (boundary) {
      ++inst.boundary_count;
    } else {
      inst.var_of_node[idx] = inst.variable_count++;
    }
  } while (detail::advance_lattice(k, -m, m));
  if (inst.variable_count == 0)
    throw ContractViolation("build_extremal_lp: no interior nodes (m too small?)");

  const double h = 1.0 / m;
  auto over_budget = [&]() {
    return static_cast<long long>(inst.rows.size()) > max_rows;
  };

  // box: f(node) <= 1 on interior nodes
  for (long long idx = 0; idx < inst.node_count; ++idx) {
    int v = inst.var_of_node[idx];
    if (v < 0) continue;
    inst.rows.push_back({{{v, 1.0}}, 1.0, 0});
    ++inst.box_count;
  }

  // first order: |f(x) - f(y)| <= h over king-move neighbors; king paths make
  // this sufficient for the global sup-norm Lipschitz bound
  std::vector<int> o(n, -1), kk(n, -m);
  o.assign(n, -1);
  do {
    if (!detail::canonical_offset(o)) continue;
    bool king = true;
    for (int v : o)
      if (std::abs(v) > 1) king = false;
    if (!king) continue;
    kk.assign(n, -m);
    do {
      bool ok = true;
      for (int i = 0; i < n; ++i)
        if (kk[i] + o[i] < -m || kk[i] + o[i] > m) ok = false;
      if (!ok) continue;
      int ia = inst.node_index(kk);
      std::vector<int> k2 = kk;
      for (int i = 0; i < n; ++i) k2[i] += o[i];
      int ib = inst.node_index(k2);
      int va = inst.var_of_node[ia], vb = inst.var_of_node[ib];
      if (va < 0 && vb < 0) continue;
      ExtremalInstance::TwoSided row;
      if (va >= 0) row.terms.push_back({va, 1.0});
      if (vb >= 0) row.terms.push_back({vb, -1.0});
      row.rhs = h;
      row.family = 1;
      inst.rows.push_back(std::move(row));
      ++inst.first_order_count;
    } while (detail::advance_lattice(kk, -m, m));
  } while (detail::advance_lattice(o, -1, 1));
  if (over_budget())
    throw BudgetError("build_extremal_lp: first-order family exceeds the row budget");

  // second order: |f(x+o) - 2 f(x) + f(x-o)| <= (||o||_inf h)^2 whenever both
  // endpoints stay on the grid
  o.assign(n, -2 * m);
  do {
    if (!detail::canonical_offset(o)) continue;
    int onorm = 0;
    bool axis = true;
    int nonzero = 0;
    for (int v : o) {
      onorm = std::max(onorm, std::abs(v));
      if (v != 0) ++nonzero;
    }
    axis = nonzero == 1;
    const double rhs = (onorm * h) * (onorm * h);
    kk.assign(n, -m);
    do {
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        if (kk[i] + o[i] < -m || kk[i] + o[i] > m) ok = false;
        if (kk[i] - o[i] < -m || kk[i] - o[i] > m) ok = false;
      }
      if (!ok) continue;
      if (policy == PrunePolicy::CenterHalfAxis && !axis) {
        bool central = true;
        for (int i = 0; i < n; ++i)
          if (2 * std::abs(kk[i]) > m) central = false;
        if (!central) continue;
      }
      std::vector<int> kp = kk, km = kk;
      for (int i = 0; i < n; ++i) {
        kp[i] += o[i];
        km[i] -= o[i];
      }
      int vc = inst.var_of_node[inst.node_index(kk)];
      int vp = inst.var_of_node[inst.node_index(kp)];
      int vm = inst.var_of_node[inst.node_index(km)];
      if (vc < 0 && vp < 0 && vm < 0) continue;
      ExtremalInstance::TwoSided row;
      if (vp >= 0) row.terms.push_back({vp, 1.0});
      if (vm >= 0) row.terms.push_back({vm, 1.0});
      if (vc >= 0) row.terms.push_back({vc, -2.0});
      row.rhs = rhs;
      row.family = 2;
      inst.rows.push_back(std::move(row));
      ++inst.second_order_count;
      if (over_budget()) {
        if (policy == PrunePolicy::None)
          throw BudgetError(
              "build_extremal_lp: second-order family exceeds the row budget; "
              "retry with pruning");
        throw BudgetError("build_extremal_lp: row budget exceeded even with pruning");
      }
    } while (detail::advance_lattice(kk, -m, m));
  } while (detail::advance_lattice(o, -2 * m, 2 * m));

  return inst;
}

struct ExtremalResult {
  int n = 0, m = 0;
  std::string variant;
  std::vector<int> objective_node;  // lattice coordinates in [-m, m]
  double epsilon_hat = 0.0;
  double growth = 0.0;  // (1 + epsilon_hat)^n
  long long lp_iterations = 0;
  bool pruned = false;
};

inline ExtremalResult solve_extremal(const ExtremalInstance& inst, const std::vector<int>& objective_node,
                                     ExtremalVariant variant = ExtremalVariant::Full) {
  if (static_cast<int>(objective_node.size()) != inst.n)
    throw ContractViolation("solve_extremal: objective node has wrong dimension");
  for (int v : objective_node)
    if (std::abs(v) >= inst.m) throw ContractViolation("solve_extremal: objective node must be interior");
  const int var = inst.var_of_node[inst.node_index(objective_node)];
  if (var < 0) throw InternalError("solve_extremal: interior node without variable");

  DenseSimplex lp(inst.variable_count);
  for (const auto& row : inst.rows) {
    if (variant == ExtremalVariant::LipschitzOnly && row.family == 2) continue;
    lp.add_constraint(row.terms, row.rhs);
    if (row.family != 0) {
      auto neg = row.terms;
      for (auto& [idx, coef] : neg) coef = -coef;
      lp.add_constraint(std::move(neg), row.rhs);
    }
  }
  std::vector<double> c(inst.variable_count, 0.0);
  c[var] = 1.0;
  DenseSimplex::Solution sol = lp.maximize(c);

  ExtremalResult res;
  res.n = inst.n;
  res.m = inst.m;
  res.variant = variant == ExtremalVariant::Full ? "full" : "lipschitz_only";
  res.objective_node = objective_node;
  res.epsilon_hat = sol.objective;
  res.growth = std::pow(1.0 + res.epsilon_hat, inst.n);
  res.lp_iterations = sol.iterations;
  res.pruned = inst.pruned;
  return res;
}

inline ExtremalResult solve_extremal_origin(const ExtremalInstance& inst,
                                            ExtremalVariant variant = ExtremalVariant::Full) {
  return solve_extremal(inst, std::vector<int>(inst.n, 0), variant);
}

// Solves at every interior node and keeps the best (the symmetry of the
// constraint set suggests the origin, but does not prove it at grid scale).
inline ExtremalResult solve_extremal_sweep(const ExtremalInstance& inst,
                                           ExtremalVariant variant = ExtremalVariant::Full) {
  ExtremalResult best;
  bool first = true;
  long long total_iters = 0;
  std::vector<int> k(inst.n, -(inst.m - 1));
  do {
    ExtremalResult r = solve_extremal(inst, k, variant);
    total_iters += r.lp_iterations;
    if (first || r.epsilon_hat > best.epsilon_hat) {
      best = r;
      first = false;
    }
  } while (detail::advance_lattice(k, -(inst.m - 1), inst.m - 1));
  best.lp_iterations = total_iters;
  return best;
}

// Rows (n, m, eps_n, (1+eps_n)^n) for n = 1..n_max. Finite-resolution
// evidence only; the growth column is not an answer to the limit question.
inline std::vector<ExtremalResult> sequence_report(int n_max, int m,
                                                   ExtremalVariant variant = ExtremalVariant::Full,
                                                   long long max_rows = 400000) {
  if (n_max < 1 || n_max > 3) throw ContractViolation("sequence_report: n_max must be 1..3");
  std::vector<ExtremalResult> out;
  for (int n = 1; n <= n_max; ++n) {
    ExtremalInstance inst;
    try {
      inst = build_extremal_lp(n, m, PrunePolicy::None, max_rows);
    } catch (const BudgetError&) {
      inst = build_extremal_lp(n, m, PrunePolicy::CenterHalfAxis, max_rows);
    }
    out.push_back(solve_extremal_origin(inst, variant));
  }
  return out;
}

inline std::string extremal_csv_header() {
  return "n,m,variant,objective_node,epsilon_hat,growth,pruned\n";
}

inline std::string extremal_csv_row(const ExtremalResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.n << ',' << r.m << ',' << r.variant << ',';
  for (size_t i = 0; i < r.objective_node.size(); ++i) {
    if (i) os << ';';
    os << r.objective_node[i];
  }
  os << ',' << r.epsilon_hat << ',' << r.growth << ',' << (r.pruned ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace convexlab
