#pragma once

#include <cmath>
#include <variant>

#include <Eigen/Core>

#include "convexlab/errors.hpp"
#include "convexlab/rng.hpp"

namespace convexlab {

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;
};

struct Box {
  Eigen::VectorXd lo, hi;
};

// Convex sampling region (Euclidean ball or axis-aligned box).
class Region {
 public:
  Region() = default;
  Region(Ball b) : rep_(std::move(b)) { check(); }
  Region(Box b) : rep_(std::move(b)) { check(); }

  static Region ball(Eigen::VectorXd center, double radius) {
    return Region(Ball{std::move(center), radius});
  }
  static Region box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    return Region(Box{std::move(lo), std::move(hi)});
  }
  static Region box1d(double lo, double hi) {
    Eigen::VectorXd l(1), h(1);
    l[0] = lo;
    h[0] = hi;
    return box(l, h);
  }

  int dim() const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) return static_cast<int>(b->center.size());
    return static_cast<int>(std::get<Box>(rep_).lo.size());
  }

  bool is_ball() const { return std::holds_alternative<Ball>(rep_); }
  const Ball& as_ball() const { return std::get<Ball>(rep_); }
  const Box& as_box() const { return std::get<Box>(rep_); }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) {
      return (x - b->center).norm() <= b->radius + tol;
    }
    const Box& b = std::get<Box>(rep_);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] < b.lo[i] - tol || x[i] > b.hi[i] + tol) return false;
    }
    return true;
  }

  Eigen::VectorXd sample(Rng& rng) const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) {
      int n = static_cast<int>(b->center.size());
      Eigen::VectorXd u = rng.unit_vector(n);
      double r = b->radius * std::pow(rng.uniform(), 1.0 / n);
      return b->center + r * u;
    }
    const Box& b = std::get<Box>(rep_);
    Eigen::VectorXd x(b.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
    return x;
  }

  double diameter() const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) return 2.0 * b->radius;
    return (std::get<Box>(rep_).hi - std::get<Box>(rep_).lo).norm();
  }

  Eigen::VectorXd center() const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) return b->center;
    const Box& b = std::get<Box>(rep_);
    return 0.5 * (b.lo + b.hi);
  }

  // Half-extent of the region along unit direction u, measured from center().
  double extent_along(const Eigen::VectorXd& u) const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) {
      (void)b;
      return as_ball().radius;
    }
    const Box& b = std::get<Box>(rep_);
    // largest s with center + s*u still inside
    double s = std::numeric_limits<double>::infinity();
    Eigen::VectorXd c = center();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      if (std::abs(u[i]) < 1e-15) continue;
      double room = u[i] > 0 ? (b.hi[i] - c[i]) : (c[i] - b.lo[i]);
      s = std::min(s, room / std::abs(u[i]));
    }
    return std::isinf(s) ? 0.0 : s;
  }

 private:
  void check() const {
    if (const Ball* b = std::get_if<Ball>(&rep_)) {
      if (!(b->radius > 0.0)) throw ContractViolation("Region: ball radius must be positive");
      return;
    }
    const Box& b = std::get<Box>(rep_);
    if (b.lo.size() != b.hi.size()) throw ContractViolation("Region: box bounds size mismatch");
    for (Eigen::Index i = 0; i < b.lo.size(); ++i)
      if (!(b.lo[i] < b.hi[i])) throw ContractViolation("Region: box must have positive extent");
  }

  std::variant<Ball, Box> rep_;
};

// Conservative test that `inner` is contained in `outer`.
inline bool region_contains(const Region& outer, const Region& inner, double tol = 1e-9) {
  if (outer.dim() != inner.dim()) return false;
  if (inner.is_ball()) {
    const Ball& b = inner.as_ball();
    if (outer.is_ball()) {
      const Ball& o = outer.as_ball();
      return (b.center - o.center).norm() + b.radius <= o.radius + tol;
    }
    const Box& o = outer.as_box();
    for (Eigen::Index i = 0; i < b.center.size(); ++i) {
      if (b.center[i] - b.radius < o.lo[i] - tol || b.center[i] + b.radius > o.hi[i] + tol)
        return false;
    }
    return true;
  }
  const Box& b = inner.as_box();
  if (!outer.is_ball()) {
    const Box& o = outer.as_box();
    for (Eigen::Index i = 0; i < b.lo.size(); ++i)
      if (b.lo[i] < o.lo[i] - tol || b.hi[i] > o.hi[i] + tol) return false;
    return true;
  }
  const Ball& o = outer.as_ball();
  double sum = 0.0;  // farthest box corner from the ball center
  for (Eigen::Index i = 0; i < b.lo.size(); ++i) {
    double d = std::max(std::abs(b.lo[i] - o.center[i]), std::abs(b.hi[i] - o.center[i]));
    sum += d * d;
  }
  return std::sqrt(sum) <= o.radius + tol;
}

}  // namespace convexlab
