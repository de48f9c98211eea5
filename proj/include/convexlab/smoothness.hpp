#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "convexlab/errors.hpp"
#include "convexlab/maps.hpp"
#include "convexlab/norm_geometry.hpp"
#include "convexlab/norms.hpp"
#include "convexlab/region.hpp"
#include "convexlab/rng.hpp"

namespace convexlab {

struct SmoothnessBudget {
  int samples = 512;
  std::uint64_t seed = kDefaultSeed;
  std::optional<NormSpec> value_norm;  // norm on f-values; Euclidean when absent
};

// Sampled modulus-of-smoothness curve. Sampled sups are lower estimates of
// the true sup; the sample for t is a superset of the sample for t' < t
// (same base points, scaled steps), so the curve is non-decreasing by
// construction rather than by luck.
struct SmoothnessProfile {
  int order = 1;  // 1 or 2
  std::vector<double> t_grid;
  std::vector<double> omega_hat;
  std::vector<char> missing;     // per-t: nothing feasible at or below this scale
  double fitted_constant = 0.0;  // least L with omega_hat(t) <= L t^order
};

struct PairBudget {
  int pairs = 4096;
  std::uint64_t seed = kDefaultSeed;
  double beta = 0.05;  // inflation factor recorded for certificate use
  std::optional<NormSpec> value_norm;
};

// Sampled Lipschitz-type constant: a lower estimate of the true sup, plus the
// inflated value value*(1+beta) that certificate consumers must use.
struct LipschitzEstimate {
  double value = 0.0;
  double beta = 0.05;
  double inflated = 0.0;
  WitnessPair witness;
};

namespace detail {

inline double value_norm_eval(const std::optional<NormSpec>& norm, const Eigen::VectorXd& v) {
  if (!norm) return v.norm();
  return norm_eval(*norm, v);
}

inline Eigen::VectorXd symmetric_difference(const SmoothMap& m, int order,
                                            const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
  if (order == 1) return m.eval(x + 0.5 * h) - m.eval(x - 0.5 * h);
  return m.eval(x + h) - 2.0 * m.eval(x) + m.eval(x - h);
}

inline bool segment_feasible(const Region& region, int order, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& h) {
  const double half = order * 0.5;
  return region.contains(x + half * h, 1e-12) && region.contains(x - half * h, 1e-12);
}

// Boundary anchors: extreme points of the region, where Lipschitz-type sups
// typically sit for the polynomial corpus.
inline std::vector<Eigen::VectorXd> boundary_anchors(const Region& region, Rng& rng) {
  const int n = region.dim();
  std::vector<Eigen::VectorXd> out;
  if (region.is_ball()) {
    const Ball& b = region.as_ball();
    for (int j = 0; j < n; ++j) {
      out.push_back(b.center + b.radius * Eigen::VectorXd::Unit(n, j));
      out.push_back(b.center - b.radius * Eigen::VectorXd::Unit(n, j));
    }
    for (int k = 0; k < 32; ++k) out.push_back(b.center + b.radius * rng.unit_vector(n));
    return out;
  }
  const Box& b = region.as_box();
  if (n <= 6) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      Eigen::VectorXd corner(n);
      for (int j = 0; j < n; ++j) corner[j] = (mask >> j & 1) ? b.hi[j] : b.lo[j];
      out.push_back(std::move(corner));
    }
  } else {
    for (int k = 0; k < 64; ++k) {
      Eigen::VectorXd corner(n);
      for (int j = 0; j < n; ++j) corner[j] = rng.uniform() < 0.5 ? b.lo[j] : b.hi[j];
      out.push_back(std::move(corner));
    }
  }
  Eigen::VectorXd c = 0.5 * (b.lo + b.hi);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd f = c;
    f[j] = b.lo[j];
    out.push_back(f);
    f[j] = b.hi[j];
    out.push_back(f);
  }
  return out;
}

// Pair stream shared by the Lipschitz-type estimators: random pairs, random
// short offsets at 1e-3 * diam, and short offsets around boundary anchors.
template <typename Visit>
inline void for_each_sample_pair(const Region& region, const PairBudget& budget, Visit visit) {
  const int n = region.dim();
  const double s = std::max(1e-3 * region.diameter(), 1e-12);
  Rng rng(budget.seed);

  const int n_random = budget.pairs / 2;
  for (int i = 0; i < n_random; ++i) {
    Eigen::VectorXd x = region.sample(rng);
    Eigen::VectorXd y = region.sample(rng);
    visit(x, y);
  }
  const int n_short = budget.pairs / 4;
  for (int i = 0; i < n_short; ++i) {
    Eigen::VectorXd x = region.sample(rng);
    Eigen::VectorXd u = rng.unit_vector(n);
    Eigen::VectorXd y = x + s * u;
    if (!region.contains(y)) y = x - s * u;
    if (!region.contains(y)) continue;
    visit(x, y);
  }
  for (const auto& b : boundary_anchors(region, rng)) {
    for (int j = 0; j < n; ++j) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd y = b + sign * s * Eigen::VectorXd::Unit(n, j);
        if (region.contains(y)) visit(b, y);
      }
    }
    Eigen::VectorXd inward = region.center() - b;
    double d = inward.norm();
    if (d > 1e-12) {
      Eigen::VectorXd y = b + (s / d) * inward;
      if (region.contains(y)) visit(b, y);
    }
  }
}

// Short pairs along a singular direction of J at anchors and random points:
// the Lipschitz sup of f (resp. f^-1) is approached along the top (resp.
// bottom) singular direction at the right base point, which random pairs
// alone rarely align with.
template <typename Visit>
inline void for_each_guided_pair(const SmoothMap& m, const Region& region, const PairBudget& budget,
                                 bool bottom_direction, Visit visit) {
  const int n = region.dim();
  const double s = std::max(1e-3 * region.diameter(), 1e-12);
  Rng rng(budget.seed ^ 0x5ca1ab1ef00dULL);
  std::vector<Eigen::VectorXd> points = boundary_anchors(region, rng);
  const int extra = std::max(budget.pairs / 8, 16);
  for (int i = 0; i < extra; ++i) points.push_back(region.sample(rng));
  for (const auto& x : points) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.jacobian(x), Eigen::ComputeFullV);
    Eigen::Index col = bottom_direction ? svd.matrixV().cols() - 1 : 0;
    Eigen::VectorXd v = svd.matrixV().col(col);
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd y = x + sign * s * v;
      if (region.contains(y)) visit(x, y);
    }
  }
}

}  // namespace detail

// omega_n(f;t): sup over ||h|| <= t with the full segment inside the region
// of the n-th symmetric difference, n in {1,2}.
inline SmoothnessProfile modulus_smoothness(const SmoothMap& m, int order,
                                            const std::vector<double>& t_grid, const Region& region,
                                            const SmoothnessBudget& budget = {}) {
  if (order != 1 && order != 2) throw ContractViolation("modulus_smoothness: order must be 1 or 2");
  if (region.dim() != m.dim_in()) throw ContractViolation("modulus_smoothness: region dimension mismatch");
  if (!region_contains(m.domain(), region))
    throw ContractViolation("modulus_smoothness: region must lie inside the map domain");
  if (t_grid.empty()) throw ContractViolation("modulus_smoothness: empty t grid");
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw ContractViolation("modulus_smoothness: grid values must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw ContractViolation("modulus_smoothness: grid must be ascending");
  }
  if (budget.value_norm && budget.value_norm->dim != m.dim_out())
    throw ContractViolation("modulus_smoothness: value norm dimension mismatch");

  const int n = m.dim_in();
  Rng rng(budget.seed);
  struct Sample {
    Eigen::VectorXd x, u;
    double r;
  };
  std::vector<Sample> samples;
  samples.reserve(budget.samples);
  for (int k = 0; k < budget.samples; ++k) {
    Sample smp;
    smp.x = region.sample(rng);
    smp.u = rng.unit_vector(n);
    smp.r = (k % 2 == 0) ? 1.0 : rng.uniform(0.05, 1.0);
    samples.push_back(std::move(smp));
  }

  SmoothnessProfile prof;
  prof.order = order;
  prof.t_grid = t_grid;
  prof.omega_hat.assign(t_grid.size(), std::numeric_limits<double>::quiet_NaN());
  prof.missing.assign(t_grid.size(), 1);

  const Eigen::VectorXd c = region.center();
  const double half = order * 0.5;
  double running = -1.0;
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    double cur = -1.0;
    for (const auto& smp : samples) {
      Eigen::VectorXd h = (t * smp.r) * smp.u;
      if (!detail::segment_feasible(region, order, smp.x, h)) continue;
      double v = detail::value_norm_eval(budget.value_norm,
                                         detail::symmetric_difference(m, order, smp.x, h));
      cur = std::max(cur, v);
    }
    // full-length step along each axis, anchored at the feasibility edge
    for (int j = 0; j < n; ++j) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd u = sign * Eigen::VectorXd::Unit(n, j);
        double ext = region.extent_along(u);
        Eigen::VectorXd h = t * u;
        for (double shift : {ext - half * t, 0.0}) {
          if (shift < 0.0) continue;
          Eigen::VectorXd x = c + shift * u;
          if (!detail::segment_feasible(region, order, x, h)) continue;
          double v = detail::value_norm_eval(budget.value_norm,
                                             detail::symmetric_difference(m, order, x, h));
          cur = std::max(cur, v);
        }
      }
    }
    if (cur >= 0.0) running = std::max(running, cur);
    if (running >= 0.0) {
      prof.omega_hat[ti] = running;
      prof.missing[ti] = 0;
    }
  }

  prof.fitted_constant = 0.0;
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    if (prof.missing[ti]) continue;
    prof.fitted_constant =
        std::max(prof.fitted_constant, prof.omega_hat[ti] / std::pow(t_grid[ti], order));
  }
  return prof;
}

// sup ||f(x)-f(y)|| / ||x-y|| over sampled pairs.
inline LipschitzEstimate lipschitz_estimate(const SmoothMap& m, const Region& region,
                                            const PairBudget& budget = {}) {
  if (region.dim() != m.dim_in()) throw ContractViolation("lipschitz_estimate: region dimension mismatch");
  LipschitzEstimate est;
  est.beta = budget.beta;
  auto consider = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double d = (x - y).norm();
    if (d < 1e-15) return;
    double r = detail::value_norm_eval(budget.value_norm, m.eval(x) - m.eval(y)) / d;
    if (r > est.value) {
      est.value = r;
      est.witness = {x, y};
    }
  };
  detail::for_each_sample_pair(region, budget, consider);
  detail::for_each_guided_pair(m, region, budget, /*bottom_direction=*/false, consider);
  est.inflated = est.value * (1.0 + est.beta);
  return est;
}

// sup ||J(x)-J(y)||_op / ||x-y|| over sampled pairs (operator norm by SVD).
inline LipschitzEstimate derivative_lipschitz_estimate(const SmoothMap& m, const Region& region,
                                                       const PairBudget& budget = {}) {
  if (region.dim() != m.dim_in())
    throw ContractViolation("derivative_lipschitz_estimate: region dimension mismatch");
  LipschitzEstimate est;
  est.beta = budget.beta;
  detail::for_each_sample_pair(region, budget, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double d = (x - y).norm();
    if (d < 1e-15) return;
    Eigen::MatrixXd diff = m.jacobian(x) - m.jacobian(y);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
    double r = svd.singularValues().maxCoeff() / d;
    if (r > est.value) {
      est.value = r;
      est.witness = {x, y};
    }
  });
  est.inflated = est.value * (1.0 + est.beta);
  return est;
}

// sup ||x-y|| / ||f(x)-f(y)|| over sampled pairs; a lower estimate of the
// Lipschitz constant of f^-1 on f(region). The witness is the image pair.
inline LipschitzEstimate inverse_lipschitz_estimate(const SmoothMap& m, const Region& region,
                                                    const PairBudget& budget = {}) {
  if (region.dim() != m.dim_in())
    throw ContractViolation("inverse_lipschitz_estimate: region dimension mismatch");
  LipschitzEstimate est;
  est.beta = budget.beta;
  auto consider = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    double d = (x - y).norm();
    if (d < 1e-15) return;
    Eigen::VectorXd fx = m.eval(x), fy = m.eval(y);
    double df = detail::value_norm_eval(budget.value_norm, fx - fy);
    if (df < 1e-15) return;  // indistinguishable images carry no ratio information
    double r = d / df;
    if (r > est.value) {
      est.value = r;
      est.witness = {fx, fy};
    }
  };
  detail::for_each_sample_pair(region, budget, consider);
  detail::for_each_guided_pair(m, region, budget, /*bottom_direction=*/true, consider);
  est.inflated = est.value * (1.0 + est.beta);
  return est;
}

// Smallest singular value of J(a): the coercivity constant of the adjoint
// derivative. Zero signals a failed surjectivity/coercivity hypothesis.
inline double sigma_min(const SmoothMap& m, const Eigen::VectorXd& a) {
  if (m.dim_out() > m.dim_in())
    throw HypothesisError(HypothesisError::Kind::UnsupportedDimension,
                          "sigma_min: surjective derivative needs dim_out <= dim_in");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.jacobian(a));
  return svd.singularValues().minCoeff();
}

struct SecondOrderReport {
  double omega2_constant = 0.0;
  double deriv_lipschitz = 0.0;
  double deriv_lipschitz_inflated = 0.0;
  bool pass = false;
};

// Checks the fitted second-difference constant against the (inflated)
// derivative-Lipschitz estimate on the same region. A failure falsifies the
// estimates, so it is reported, not thrown.
inline SecondOrderReport verify_second_order_bound(const SmoothMap& m, const Region& region,
                                                   const SmoothnessBudget& sbudget = {},
                                                   const PairBudget& pbudget = {}) {
  const double scale = 0.5 * region.diameter();
  std::vector<double> grid;
  for (double f : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) grid.push_back(f * scale);
  SmoothnessProfile w2 = modulus_smoothness(m, 2, grid, region, sbudget);
  LipschitzEstimate dl = derivative_lipschitz_estimate(m, region, pbudget);
  SecondOrderReport rep;
  rep.omega2_constant = w2.fitted_constant;
  rep.deriv_lipschitz = dl.value;
  rep.deriv_lipschitz_inflated = dl.inflated;
  rep.pass = rep.omega2_constant <= rep.deriv_lipschitz_inflated + 1e-12;
  return rep;
}

}  // namespace convexlab
