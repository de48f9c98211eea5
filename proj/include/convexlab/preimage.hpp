#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "convexlab/errors.hpp"
#include "convexlab/maps.hpp"

namespace convexlab {

struct BallConstraint {
  Eigen::VectorXd center;
  double radius = 0.0;
};

struct PreimageOptions {
  int max_iterations = 200;   // per continuation step
  int continuation_steps = 8;  // 1 = direct solve
  double tol_abs = 1e-12;      // residual target, scaled by (1 + ||y0||)
};

enum class SolveStatus {
  Solved,        // residual below tolerance
  Stationary,    // no further progress; positive residual is meaningful
  IterationCap,  // ran out of iterations without stalling: unresolved
};

struct PreimageResult {
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::IterationCap;
  int iterations = 0;
};

namespace detail {

inline Eigen::VectorXd project_to_ball(const Eigen::VectorXd& x, const BallConstraint& ball) {
  Eigen::VectorXd d = x - ball.center;
  double n = d.norm();
  if (n <= ball.radius) return x;
  return ball.center + (ball.radius / n) * d;
}

// One damped Gauss-Newton descent of ||f(x) - y||^2 with radial projection of
// every iterate onto the closed ball.
inline PreimageResult gauss_newton_ball(const SmoothMap& m, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& x_init, const BallConstraint& ball,
                                        int max_iterations, double tol) {
  const int n = m.dim_in();
  PreimageResult out;
  Eigen::VectorXd x = project_to_ball(x_init, ball);
  Eigen::VectorXd r = m.eval(x) - y;
  double res = r.norm();
  out.x = x;
  out.residual = res;
  double lambda = 1e-4;
  int stall = 0;
  for (int iter = 0; iter < max_iterations; ++iter) {
    ++out.iterations;
    if (res <= tol) {
      out.status = SolveStatus::Solved;
      return out;
    }
    Eigen::MatrixXd J = m.jacobian(x);
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    double scale = std::max(JtJ.diagonal().maxCoeff(), 1e-300);
    bool accepted = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::MatrixXd A = JtJ + (lambda * scale) * Eigen::MatrixXd::Identity(n, n);
      Eigen::VectorXd step = A.ldlt().solve(-g);
      Eigen::VectorXd x_new = project_to_ball(x + step, ball);
      double res_new = (m.eval(x_new) - y).norm();
      if (res_new < res) {
        x = x_new;
        r = m.eval(x) - y;
        res = res_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (res < out.residual) {
      out.residual = res;
      out.x = x;
    }
    if (!accepted) {
      // no damping level makes progress: a (projected) stationary point
      out.status = res <= tol ? SolveStatus::Solved : SolveStatus::Stationary;
      return out;
    }
    // track tiny relative progress; several stalled steps count as stationary
    stall = (out.residual > 0 && std::abs(res - out.residual) < 1e-16 * (1.0 + res)) ? stall + 1 : 0;
    if (stall > 8) {
      out.status = SolveStatus::Stationary;
      return out;
    }
  }
  out.status = out.residual <= tol ? SolveStatus::Solved : SolveStatus::IterationCap;
  return out;
}

}  // namespace detail

// Solves f(x) = y0 inside the closed ball, optionally by continuation along
// y_t = f(x_init) + t (y0 - f(x_init)) on a uniform grid, warm-starting each
// stage. Never throws on non-convergence: the caller interprets the status.
inline PreimageResult solve_preimage(const SmoothMap& m, const Eigen::VectorXd& y0,
                                     const Eigen::VectorXd& x_init, const BallConstraint& ball,
                                     const PreimageOptions& opt = {}) {
  if (y0.size() != m.dim_out()) throw ContractViolation("solve_preimage: target size mismatch");
  if (x_init.size() != m.dim_in()) throw ContractViolation("solve_preimage: start size mismatch");
  if (!(ball.radius > 0.0)) throw ContractViolation("solve_preimage: ball radius must be positive");
  if ((x_init - ball.center).norm() > ball.radius + 1e-9)
    throw ContractViolation("solve_preimage: start point must lie in the ball");

  const double tol = opt.tol_abs * (1.0 + y0.norm());
  const int steps = std::max(1, opt.continuation_steps);
  Eigen::VectorXd x = detail::project_to_ball(x_init, ball);
  if (steps == 1) return detail::gauss_newton_ball(m, y0, x, ball, opt.max_iterations, tol);

  Eigen::VectorXd y_start = m.eval(x);
  PreimageResult last;
  int total_iterations = 0;
  for (int k = 1; k <= steps; ++k) {
    double t = static_cast<double>(k) / steps;
    Eigen::VectorXd y_t = y_start + t * (y0 - y_start);
    last = detail::gauss_newton_ball(m, y_t, x, ball, opt.max_iterations, opt.tol_abs * (1.0 + y_t.norm()));
    total_iterations += last.iterations;
    x = last.x;
  }
  // report the residual against the real target
  last.iterations = total_iterations;
  last.residual = (m.eval(last.x) - y0).norm();
  if (last.residual <= tol) last.status = SolveStatus::Solved;
  return last;
}

// f^-1(y): analytic inverse when present, otherwise a ball-constrained solve
// around the start point. Must reach residual 1e-10 (1 + ||y||).
inline Eigen::VectorXd inverse_eval(const SmoothMap& m, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& x_init) {
  const double need = 1e-10 * (1.0 + y.norm());
  if (m.has_inverse()) {
    Eigen::VectorXd x = m.analytic_inverse(y);
    double res = (m.eval(x) - y).norm();
    if (res > need)
      throw NoPreimageFound(res, "inverse_eval: analytic inverse failed the round-trip check");
    return x;
  }
  if (m.dim_in() != m.dim_out())
    throw ContractViolation("inverse_eval: non-square map needs an explicit ball via solve_preimage");
  BallConstraint ball{x_init, std::max(1.0, 10.0 * (1.0 + x_init.norm()))};
  PreimageOptions opt;
  PreimageResult res = solve_preimage(m, y, x_init, ball, opt);
  if (res.residual > need)
    throw NoPreimageFound(res.residual, "inverse_eval: solver did not reach the requested residual");
  return res.x;
}

}  // namespace convexlab
