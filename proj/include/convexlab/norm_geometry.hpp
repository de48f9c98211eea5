#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "convexlab/errors.hpp"
#include "convexlab/norms.hpp"
#include "convexlab/rng.hpp"

namespace convexlab {

// Sampler configuration for modulus-of-convexity estimation. The estimator
// works on two-dimensional sections: all coordinate planes plus
// `random_sections` random 2-frames, with the section sphere parametrized by
// angle on a grid of `angle_grid` points.
struct SectionBudget {
  int random_sections = 64;
  int angle_grid = 1024;
  int partner_window = 0;  // 0 = angle_grid / 2
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

struct WitnessPair {
  Eigen::VectorXd x, y;
};

// Sampled modulus-of-convexity curve. Values are upper estimates of the true
// infimum (a sampled inf can only overshoot); delta_hat is additionally made
// non-decreasing by a running minimum from the right, which preserves the
// upper-estimate property since the true curve is non-decreasing.
struct ModulusEstimate {
  std::vector<double> t_grid;
  std::vector<double> delta_hat;   // regularized curve, in [0,1]
  std::vector<double> delta_raw;   // per-t sampled minima before regularization
  std::vector<WitnessPair> witness;  // pair attaining delta_raw at each t
  bool upper_estimate = true;
  bool monotone_regularized = false;
  long long pair_budget = 0;  // candidate pairs examined
  std::string form = "sphere";
};

// delta(t) = 1 - sqrt(1 - t^2/4), the Hilbert-space modulus of convexity.
inline double modulus_convexity_hilbert(double t) {
  if (!(t >= 0.0 && t <= 2.0)) throw DomainError("modulus_convexity_hilbert: t must lie in [0,2]");
  return 1.0 - std::sqrt(std::max(0.0, 1.0 - 0.25 * t * t));
}

inline std::vector<double> default_t_grid() {
  std::vector<double> g;
  g.reserve(39);
  for (int k = 1; k <= 39; ++k) g.push_back(0.05 * k);
  return g;
}

namespace detail {

struct SectionFrame {
  Eigen::VectorXd u, v;  // Euclid-orthonormal basis of the 2-plane
};

inline std::vector<SectionFrame> make_section_frames(int dim, const SectionBudget& budget) {
  std::vector<SectionFrame> frames;
  if (dim == 2) {
    SectionFrame f;
    f.u = Eigen::VectorXd::Unit(2, 0);
    f.v = Eigen::VectorXd::Unit(2, 1);
    frames.push_back(std::move(f));
    return frames;  // the whole space is one section
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      SectionFrame f;
      f.u = Eigen::VectorXd::Unit(dim, i);
      f.v = Eigen::VectorXd::Unit(dim, j);
      frames.push_back(std::move(f));
    }
  }
  Rng rng(budget.seed);
  for (int k = 0; k < budget.random_sections; ++k) {
    for (;;) {
      Eigen::VectorXd a = rng.unit_vector(dim);
      Eigen::VectorXd b = rng.gaussian_vector(dim);
      b -= a.dot(b) * a;
      double nb = b.norm();
      if (nb < 1e-8) continue;
      SectionFrame f;
      f.u = std::move(a);
      f.v = b / nb;
      frames.push_back(std::move(f));
      break;
    }
  }
  return frames;
}

// Evaluates the section's unit-sphere point s(phi) = z(phi)/||z(phi)||.
class SectionSphere {
 public:
  SectionSphere(const NormSpec& spec, const SectionFrame& f, int angle_grid)
      : spec_(spec), frame_(f), n_(spec.dim), grid_(angle_grid), pts_(static_cast<size_t>(angle_grid) * n_) {
    std::vector<double> tmp(n_);
    for (int k = 0; k < angle_grid; ++k) point_at(angle(k), &pts_[static_cast<size_t>(k) * n_]);
  }

  int grid_size() const { return grid_; }
  double angle(int k) const { return 6.283185307179586476925286766559 * k / grid_; }
  const double* point(int k) const { return &pts_[static_cast<size_t>(k % grid_) * n_]; }

  void point_at(double phi, double* out) const {
    const double c = std::cos(phi), s = std::sin(phi);
    for (int i = 0; i < n_; ++i) out[i] = c * frame_.u[i] + s * frame_.v[i];
    double nrm = norm_eval_impl(spec_, out, n_);
    for (int i = 0; i < n_; ++i) out[i] /= nrm;
  }

  double dist(const double* a, const double* b, double* scratch) const {
    for (int i = 0; i < n_; ++i) scratch[i] = a[i] - b[i];
    return norm_eval_impl(spec_, scratch, n_);
  }

  double midpoint_depth(const double* a, const double* b, double* scratch) const {
    for (int i = 0; i < n_; ++i) scratch[i] = 0.5 * (a[i] + b[i]);
    return 1.0 - norm_eval_impl(spec_, scratch, n_);
  }

  const NormSpec& spec() const { return spec_; }
  int dim() const { return n_; }

 private:
  const NormSpec& spec_;
  const SectionFrame& frame_;
  int n_;
  int grid_;
  std::vector<double> pts_;
};

struct PerTBest {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x, y;
  bool found = false;
};

struct SectionScan {
  std::vector<PerTBest> best;
  long long pairs = 0;
};

inline constexpr double kPairDistanceTol = 1e-10;

// For each grid angle, locates the partner on the section sphere at norm
// distance exactly t by scan + bisection, and records the shallowest midpoint.
inline SectionScan scan_section_sphere(const NormSpec& spec, const SectionFrame& frame,
                                       const std::vector<double>& t_grid, int angle_grid,
                                       int window) {
  SectionSphere sphere(spec, frame, angle_grid);
  const int n = spec.dim;
  const int P = angle_grid;
  SectionScan out;
  out.best.resize(t_grid.size());

  std::vector<double> scratch(n), cand(n);
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    PerTBest& best = out.best[ti];
    int prev_j = 1;
    for (int i = 0; i < P; ++i) {
      const double* x = sphere.point(i);
      int j = std::max(prev_j, i + 1);
      while (j - i <= window && sphere.dist(x, sphere.point(j), scratch.data()) < t) ++j;
      if (j - i > window) continue;  // no crossing within the half-turn
      prev_j = j;
      double lo = sphere.angle(j - 1), hi = sphere.angle(j);
      ++out.pairs;
      bool ok = false;
      double d = 0.0;
      for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        sphere.point_at(mid, cand.data());
        d = sphere.dist(x, cand.data(), scratch.data());
        if (std::abs(d - t) <= kPairDistanceTol) {
          ok = true;
          break;
        }
        (d < t ? lo : hi) = mid;
      }
      if (!ok) continue;  // equality constraint not met; discard the pair
      double val = sphere.midpoint_depth(x, cand.data(), scratch.data());
      if (val < best.value) {
        best.value = val;
        best.x = Eigen::Map<const Eigen::VectorXd>(x, n);
        best.y = Eigen::Map<const Eigen::VectorXd>(cand.data(), n);
        best.found = true;
      }
    }
  }
  return out;
}

// Ball-form sampler: pairs x = ra*s_i, y = rb*s_j inside the unit ball with
// ||x-y|| >= t. A pair at distance d is feasible for every t <= d, so pairs
// are binned by d and the curve recovered with a suffix minimum.
inline SectionScan scan_section_ball(const NormSpec& spec, const SectionFrame& frame,
                                     const std::vector<double>& t_grid, int angle_grid,
                                     int window) {
  static constexpr double kLevels[] = {0.4, 0.7, 0.9, 1.0};
  SectionSphere sphere(spec, frame, angle_grid);
  const int n = spec.dim;
  const int P = angle_grid;
  SectionScan out;
  out.best.resize(t_grid.size());

  std::vector<double> xa(n), yb(n), scratch(n);
  for (int i = 0; i < P; ++i) {
    const double* si = sphere.point(i);
    for (int g = 1; g <= window; ++g) {
      const double* sj = sphere.point(i + g);
      for (double ra : kLevels) {
        for (double rb : kLevels) {
          for (int k = 0; k < n; ++k) {
            xa[k] = ra * si[k];
            yb[k] = rb * sj[k];
            scratch[k] = xa[k] - yb[k];
          }
          double d = norm_eval_impl(spec, scratch.data(), n);
          if (d < t_grid.front()) continue;
          ++out.pairs;
          for (int k = 0; k < n; ++k) scratch[k] = 0.5 * (xa[k] + yb[k]);
          double val = 1.0 - norm_eval_impl(spec, scratch.data(), n);
          auto it = std::upper_bound(t_grid.begin(), t_grid.end(), d);
          size_t bin = static_cast<size_t>(it - t_grid.begin()) - 1;
          PerTBest& best = out.best[bin];
          if (val < best.value) {
            best.value = val;
            best.x = Eigen::Map<const Eigen::VectorXd>(xa.data(), n);
            best.y = Eigen::Map<const Eigen::VectorXd>(yb.data(), n);
            best.found = true;
          }
        }
      }
    }
  }
  // suffix minimum turns the bins into min over {pairs with d >= t}
  for (size_t k = out.best.size(); k-- > 1;) {
    if (out.best[k].found &&
        (!out.best[k - 1].found || out.best[k].value < out.best[k - 1].value)) {
      out.best[k - 1] = out.best[k];
    }
  }
  return out;
}

inline void validate_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ContractViolation("modulus estimate: empty t grid");
  for (size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0 && t_grid[i] <= 2.0))
      throw ContractViolation("modulus estimate: grid values must lie in (0,2]");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw ContractViolation("modulus estimate: grid must be strictly ascending");
  }
}

template <typename ScanFn>
inline ModulusEstimate run_section_estimate(const NormSpec& spec, const std::vector<double>& t_grid,
                                            const SectionBudget& budget, const char* form,
                                            ScanFn scan) {
  if (spec.dim < 2) throw DomainError("modulus estimate: norm dimension must be at least 2");
  validate_grid(t_grid);
  if (budget.angle_grid < 8 || budget.random_sections < 0)
    throw ContractViolation("modulus estimate: bad sampler budget");
  const int window = budget.partner_window > 0 ? budget.partner_window : budget.angle_grid / 2;

  auto frames = make_section_frames(spec.dim, budget);
  std::vector<SectionScan> scans(frames.size());
  parallel_for(frames.size(), budget.threads, [&](size_t f) {
    scans[f] = scan(spec, frames[f], t_grid, budget.angle_grid, window);
  });

  ModulusEstimate est;
  est.form = form;
  est.t_grid = t_grid;
  est.delta_raw.assign(t_grid.size(), std::numeric_limits<double>::quiet_NaN());
  est.witness.resize(t_grid.size());
  for (size_t ti = 0; ti < t_grid.size(); ++ti) {
    PerTBest merged;
    for (const auto& s : scans) {
      if (s.best[ti].found && s.best[ti].value < merged.value) merged = s.best[ti];
    }
    if (merged.found) {
      est.delta_raw[ti] = std::max(0.0, merged.value);
      est.witness[ti] = {merged.x, merged.y};
    }
  }
  for (const auto& s : scans) est.pair_budget += s.pairs;

  // running min from the right: a valid upper bound at t is any upper bound
  // seen at a larger t, and the result is non-decreasing
  est.delta_hat = est.delta_raw;
  double running = std::numeric_limits<double>::infinity();
  for (size_t k = est.delta_hat.size(); k-- > 0;) {
    if (!std::isnan(est.delta_hat[k])) running = std::min(running, est.delta_hat[k]);
    if (!std::isinf(running)) {
      if (std::isnan(est.delta_hat[k]) || est.delta_hat[k] > running) {
        est.delta_hat[k] = running;
        est.monotone_regularized = true;
      }
    }
  }
  return est;
}

}  // namespace detail

// Sphere form: inf of 1 - ||(x+y)/2|| over unit vectors with ||x-y|| = t,
// sampled over 2-D sections with the equality met by bisection.
inline ModulusEstimate modulus_convexity_estimate(const NormSpec& spec,
                                                  const std::vector<double>& t_grid,
                                                  const SectionBudget& budget = {}) {
  return detail::run_section_estimate(spec, t_grid, budget, "sphere", detail::scan_section_sphere);
}

// Ball form: inf over the unit ball with the inequality ||x-y|| >= t. The
// sample includes interior pairs on radial levels plus the sphere equality
// pairs (feasible here as well), so the two estimators can be compared.
inline ModulusEstimate modulus_convexity_estimate_ball(const NormSpec& spec,
                                                       const std::vector<double>& t_grid,
                                                       const SectionBudget& budget = {}) {
  ModulusEstimate ball =
      detail::run_section_estimate(spec, t_grid, budget, "ball", detail::scan_section_ball);
  ModulusEstimate sphere = modulus_convexity_estimate(spec, t_grid, budget);
  for (size_t k = 0; k < ball.t_grid.size(); ++k) {
    double b = ball.delta_raw[k], s = sphere.delta_raw[k];
    if (std::isnan(b) || (!std::isnan(s) && s < b)) {
      ball.delta_raw[k] = s;
      ball.witness[k] = sphere.witness[k];
    }
  }
  ball.pair_budget += sphere.pair_budget;
  ball.delta_hat = ball.delta_raw;
  double running = std::numeric_limits<double>::infinity();
  ball.monotone_regularized = false;
  for (size_t k = ball.delta_hat.size(); k-- > 0;) {
    if (!std::isnan(ball.delta_hat[k])) running = std::min(running, ball.delta_hat[k]);
    if (!std::isinf(running) && (std::isnan(ball.delta_hat[k]) || ball.delta_hat[k] > running)) {
      ball.delta_hat[k] = running;
      ball.monotone_regularized = true;
    }
  }
  return ball;
}

struct PowerTypeFit {
  double C = 0.0;
  bool power_type = true;  // false when some delta_hat vanishes at sampled resolution
  double argmin_t = 0.0;
};

// Largest constant with delta_hat(t) >= C t^p across the grid.
inline PowerTypeFit power_type_constant(const ModulusEstimate& est, double p) {
  if (est.t_grid.empty()) throw ContractViolation("power_type_constant: empty estimate");
  if (!(p >= 2.0)) throw ContractViolation("power_type_constant: exponent must satisfy p >= 2");
  PowerTypeFit fit;
  fit.C = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < est.t_grid.size(); ++k) {
    double d = est.delta_hat[k];
    if (std::isnan(d)) continue;
    if (d <= 1e-12) return {0.0, false, est.t_grid[k]};
    double ratio = d / std::pow(est.t_grid[k], p);
    if (ratio < fit.C) {
      fit.C = ratio;
      fit.argmin_t = est.t_grid[k];
    }
  }
  if (std::isinf(fit.C)) throw ContractViolation("power_type_constant: estimate has no values");
  return fit;
}

inline std::string vector_to_field(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    os << v[i];
  }
  return os.str();
}

inline std::string modulus_to_csv(const ModulusEstimate& est) {
  std::ostringstream os;
  os.precision(17);
  os << "t,delta_hat,witness_x,witness_y\n";
  for (size_t k = 0; k < est.t_grid.size(); ++k) {
    os << est.t_grid[k] << ',' << est.delta_hat[k] << ',';
    if (est.witness[k].x.size()) os << vector_to_field(est.witness[k].x);
    os << ',';
    if (est.witness[k].y.size()) os << vector_to_field(est.witness[k].y);
    os << '\n';
  }
  return os.str();
}

}  // namespace convexlab
