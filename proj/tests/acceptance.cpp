// Acceptance suite: one pass/fail line per criterion, with the measured
// values and pinned tolerances printed next to each verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "convexlab/convexlab.hpp"

using namespace convexlab;

namespace {

struct Gate {
  int failed = 0;
  void line(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %2d [%s] %s -- %s\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failed;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

std::vector<double> coarse_grid() {  // t in {0.1, ..., 1.9}
  std::vector<double> g;
  for (int k = 1; k <= 19; ++k) g.push_back(0.1 * k);
  return g;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

int main() {
  Gate gate;
  const double kInf = std::numeric_limits<double>::infinity();

  // 1. Euclidean modulus accuracy in dims 2 and 4, under 10 s per dim
  {
    bool pass = true;
    std::string detail;
    for (int dim : {2, 4}) {
      auto t0 = std::chrono::steady_clock::now();
      SectionBudget budget;
      budget.threads = 4;
      ModulusEstimate est = modulus_convexity_estimate(NormSpec::euclidean(dim), coarse_grid(), budget);
      double elapsed = seconds_since(t0);
      double worst = 0.0;
      for (size_t k = 0; k < est.t_grid.size(); ++k)
        worst = std::max(worst, std::abs(est.delta_hat[k] - modulus_convexity_hilbert(est.t_grid[k])));
      pass = pass && worst <= 1e-3 && elapsed < 10.0;
      detail += "dim " + std::to_string(dim) + ": err " + fmt(worst) + ", " + fmt(elapsed) + " s; ";
    }
    gate.line(1, "euclidean modulus vs closed form", pass, detail + "tol 1e-3, 10 s per dim");
  }

  // 2. Universal bound delta_hat(t) <= t/2 + 1e-9 across the norm corpus
  {
    std::vector<NormSpec> corpus = {
        NormSpec::lp(1.0, 2),  NormSpec::lp(1.5, 2),  NormSpec::lp(2.0, 2), NormSpec::lp(3.0, 2),
        NormSpec::lp(kInf, 2), NormSpec::lp(1.0, 3),  NormSpec::lp(2.0, 3), NormSpec::lp(kInf, 3),
        NormSpec::weighted_lp(2.0, {1.0, 3.0}),
        NormSpec::weighted_lp(3.0, {0.5, 1.0, 2.0}),
        NormSpec::direct_sum(2.0, {NormSpec::lp(4.0, 2), NormSpec::lp(1.0, 2)}),
        NormSpec::direct_sum(2.0, {NormSpec::lp(4.0, 4)})};
    bool pass = true;
    double worst_excess = -1.0;
    for (const auto& spec : corpus) {
      SectionBudget budget;
      budget.random_sections = 8;
      budget.angle_grid = 512;
      budget.threads = 4;
      ModulusEstimate est = modulus_convexity_estimate(spec, default_t_grid(), budget);
      for (size_t k = 0; k < est.t_grid.size(); ++k) {
        double excess = est.delta_hat[k] - est.t_grid[k] / 2.0;
        worst_excess = std::max(worst_excess, excess);
        pass = pass && excess <= 1e-9;
      }
    }
    gate.line(2, "universal bound delta <= t/2", pass,
              "12 norms x 39 grid points, worst excess " + fmt(worst_excess) + ", tol 1e-9");
  }

  // 3. Flat moduli for l1 and linf in dim 2, with witnesses
  {
    bool pass = true;
    double worst = 0.0;
    for (double p : {1.0, kInf}) {
      ModulusEstimate est = modulus_convexity_estimate(NormSpec::lp(p, 2), coarse_grid());
      for (size_t k = 0; k < est.t_grid.size(); ++k) {
        worst = std::max(worst, est.delta_hat[k]);
        pass = pass && est.delta_hat[k] <= 1e-6 && est.witness[k].x.size() == 2;
      }
    }
    gate.line(3, "l1/linf flat moduli with witnesses", pass,
              "worst delta_hat " + fmt(worst) + ", tol 1e-6 up to t = 1.9");
  }

  // 4. Power-type fit on the default grid
  {
    ModulusEstimate est = modulus_convexity_estimate(NormSpec::euclidean(2), default_t_grid());
    PowerTypeFit p2 = power_type_constant(est, 2.0);
    PowerTypeFit p4 = power_type_constant(est, 4.0);
    bool pass2 = p2.C >= 0.120 && p2.C <= 0.1251;
    bool pass4 = std::abs(p4.C - 0.0625) <= 1e-4;
    gate.line(4, "power-type constants (euclidean)", pass2 && pass4,
              "p=2: C " + fmt(p2.C) + " in [0.120, 0.1251]; p=4: C " + fmt(p4.C) +
                  " required 0.0625 +- 1e-4 (grid minimum sits at t " + fmt(p4.argmin_t) + ")");
  }

  // 5. Moduli of smoothness and the scaling law
  {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 2.0, -0.5, 3.0;
    Region ball2 = Region::ball(Eigen::VectorXd::Zero(2), 1.0);
    SmoothnessProfile aff = modulus_smoothness(affine_map(A, vec2(0.1, -0.2)), 2, {0.1, 0.3, 0.5}, ball2);
    bool pass_affine = true;
    for (double v : aff.omega_hat) pass_affine = pass_affine && v <= 1e-12;

    bool pass_quad = true;
    SmoothnessProfile quad =
        modulus_smoothness(quad1d_map(), 2, {0.1, 0.25, 0.5}, Region::box1d(-1, 1));
    for (size_t k = 0; k < quad.t_grid.size(); ++k) {
      double expected = 2.0 * quad.t_grid[k] * quad.t_grid[k];
      pass_quad = pass_quad && std::abs(quad.omega_hat[k] - expected) <= 0.01 * expected;
    }

    bool pass_scaling = true;
    struct Case {
      SmoothMap map;
      Region region;
      int order;
    };
    std::vector<Case> cases;
    cases.push_back({quad1d_map(), Region::box1d(-1, 1), 2});
    cases.push_back({cubic1d_map(), Region::box1d(-1, 1), 2});
    cases.push_back({shear_map(1.0), ball2, 2});
    cases.push_back({identity_map(2), ball2, 1});
    cases.push_back({cubic1d_map(), Region::box1d(-1, 1), 1});
    const double t = 0.4;
    std::vector<double> grid = {t / 4.0, t / 3.0, t / 2.0, t};
    for (auto& c : cases) {
      SmoothnessProfile prof = modulus_smoothness(c.map, c.order, grid, c.region);
      for (int m : {2, 3, 4}) {
        double lhs = prof.omega_hat[3 - (m - 1)];
        double rhs = prof.omega_hat[3] / std::pow(m, c.order);
        pass_scaling = pass_scaling && lhs >= rhs - 1e-9;
      }
    }
    gate.line(5, "moduli of smoothness", pass_affine && pass_quad && pass_scaling,
              std::string("affine w2 <= 1e-12: ") + (pass_affine ? "yes" : "no") +
                  "; quad w2 within 1%: " + (pass_quad ? "yes" : "no") +
                  "; scaling law m in {2,3,4} slack 1e-9: " + (pass_scaling ? "yes" : "no"));
  }

  // 6. Constant estimators vs closed forms (shear k=1, cubic1d)
  {
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    Region ball2 = Region::ball(Eigen::VectorXd::Zero(2), 1.0);
    double L = derivative_lipschitz_estimate(shear_map(1.0), ball2).value;
    std::vector<double> w2grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.4};
    double L2 = modulus_smoothness(shear_map(1.0), 2, w2grid, ball2).fitted_constant;
    Region half_box = Region::box(vec2(-0.5, -0.5), vec2(0.5, 0.5));
    double Lambda = inverse_lipschitz_estimate(shear_map(1.0), half_box).value;
    double smin = sigma_min(shear_map(1.0), Eigen::VectorXd::Zero(2));
    double Lc = derivative_lipschitz_estimate(cubic1d_map(), Region::box1d(-1, 1)).value;
    double L2c = modulus_smoothness(cubic1d_map(), 2, w2grid, Region::box1d(-1, 1)).fitted_constant;
    auto within = [](double got, double want) { return std::abs(got - want) <= 0.02 * want; };
    bool pass = within(L, 2.0) && within(L2, 2.0) && within(Lambda, golden) && within(smin, 1.0) &&
                within(Lc, 6.0) && within(L2c, 6.0);
    gate.line(6, "constant estimators vs closed forms", pass,
              "shear: L " + fmt(L) + "/2, L2 " + fmt(L2) + "/2, Lambda " + fmt(Lambda) + "/" +
                  fmt(golden) + ", sigma_min " + fmt(smin) + "/1; cubic: L " + fmt(Lc) + "/6, L2 " +
                  fmt(L2c) + "/6; tol 2%");
  }

  // 7. Certificate soundness for the shear, cross-checked by both oracles
  {
    auto t0 = std::chrono::steady_clock::now();
    CertifyOptions copt;
    Certificate cert = certify_map(shear_map(1.0), vec2(0, 0), 1.0, CertifyMode::Hilbert,
                                   NormSpec::euclidean(2), copt);
    bool pass_radius = std::abs(cert.epsilon_star - 0.125 * (1.0 - copt.eta)) <= 1e-9;

    MidpointOptions mopt;
    mopt.threads = 4;
    MidpointReport below = midpoint_convexity_check(shear_map(1.0), vec2(0, 0), 0.12, 10000, 7, mopt);
    bool pass_below = below.violations.empty();
    MidpointReport above = midpoint_convexity_check(shear_map(1.0), vec2(0, 0), 0.6, 10000, 7, mopt);
    bool pass_above = !above.violations.empty() && above.worst_defect >= 1e-3;

    HullCompareResult hull_below = hull_compare_2d(shear_map(1.0), vec2(0, 0), 0.12);
    HullCompareResult hull_above = hull_compare_2d(shear_map(1.0), vec2(0, 0), 0.6);
    bool pass_hull_below = hull_below.relative_gap < 0.005;
    bool pass_hull_above = hull_above.relative_gap > 0.01;
    double elapsed = seconds_since(t0);
    bool pass = pass_radius && pass_below && pass_above && pass_hull_below && pass_hull_above &&
                elapsed < 60.0;
    gate.line(7, "certificate soundness (shear)", pass,
              "eps* " + fmt(cert.epsilon_star) + "; eps 0.12: " +
                  std::to_string(below.violations.size()) + " violations; eps 0.6: " +
                  std::to_string(above.violations.size()) + " violations, worst defect " +
                  fmt(above.worst_defect) + "; hull gaps " + fmt(hull_below.relative_gap) + " (< 0.005) / " +
                  fmt(hull_above.relative_gap) + " (required > 0.01); " + fmt(elapsed) + " s of 60");
  }

  // 8. Preimage solution bound on converged solves with mu > 0
  {
    SmoothMap m = shear_map(1.0);
    const double eps = 0.1;
    HilbertConstants consts = hilbert_constants(1.0, 2.0, eps, 2.0 * eps);
    Rng rng(2024);
    int converged = 0, checked = 0;
    bool pass = consts.mu > 0.0;
    double worst_margin = -kInf;
    while (converged < 1000 && checked < 1500) {
      ++checked;
      Eigen::VectorXd x1 = eps * std::sqrt(rng.uniform()) * rng.unit_vector(2);
      Eigen::VectorXd x2 = eps * std::sqrt(rng.uniform()) * rng.unit_vector(2);
      Eigen::VectorXd x0 = 0.5 * (x1 + x2);
      Eigen::VectorXd y0 = 0.5 * (m.eval(x1) + m.eval(x2));
      PreimageResult res = solve_preimage(m, y0, x0, {vec2(0, 0), eps});
      if (res.status != SolveStatus::Solved) continue;
      ++converged;
      double margin = (res.x - x0).norm() - ((m.eval(x0) - y0).norm() / consts.mu + 1e-8);
      worst_margin = std::max(worst_margin, margin);
      pass = pass && margin <= 0.0;
    }
    pass = pass && converged >= 1000;
    gate.line(8, "preimage solution bound", pass,
              std::to_string(converged) + " converged solves, worst slack " + fmt(worst_margin) +
                  " (must be <= 0 with 1e-8 allowance)");
  }

  // 9. Extremal LP values, relaxation ordering, symmetry, under 30 s
  {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (int m : {1, 4, 10}) {
      ExtremalInstance inst = build_extremal_lp(1, m);
      double full = solve_extremal_origin(inst, ExtremalVariant::Full).epsilon_hat;
      double lip = solve_extremal_origin(inst, ExtremalVariant::LipschitzOnly).epsilon_hat;
      pass = pass && std::abs(full - 0.5) <= 1e-6 && std::abs(lip - 1.0) <= 1e-6;
      detail += "m=" + std::to_string(m) + ": " + fmt(full) + "/" + fmt(lip) + "; ";
    }
    ExtremalInstance inst2 = build_extremal_lp(2, 4);
    double full2 = solve_extremal_origin(inst2, ExtremalVariant::Full).epsilon_hat;
    double lip2 = solve_extremal_origin(inst2, ExtremalVariant::LipschitzOnly).epsilon_hat;
    pass = pass && lip2 >= full2 - 1e-9;
    double base = solve_extremal(inst2, {1, 2}).epsilon_hat;
    for (std::vector<int> node : {std::vector<int>{2, 1}, {-1, 2}, {1, -2}, {-2, -1}}) {
      pass = pass && std::abs(solve_extremal(inst2, node).epsilon_hat - base) <= 1e-9;
    }
    double elapsed = seconds_since(t0);
    pass = pass && elapsed < 30.0;
    gate.line(9, "extremal grid LP", pass,
              detail + "n=2 ordering " + fmt(lip2) + " >= " + fmt(full2) + "; symmetry tol 1e-9; " +
                  fmt(elapsed) + " s of 30");
  }

  // 10. Reports byte-identical across thread counts
  {
    MidpointOptions one, four;
    one.threads = 1;
    four.threads = 4;
    MidpointReport a = midpoint_convexity_check(shear_map(1.0), vec2(0, 0), 0.6, 2000, 7, one);
    MidpointReport b = midpoint_convexity_check(shear_map(1.0), vec2(0, 0), 0.6, 2000, 7, four);
    bool pass_mid = midpoint_report_to_json(a).dump(2) == midpoint_report_to_json(b).dump(2);

    SectionBudget s1, s4;
    s1.random_sections = s4.random_sections = 16;
    s1.angle_grid = s4.angle_grid = 512;
    s1.seed = s4.seed = 7;
    s1.threads = 1;
    s4.threads = 4;
    ModulusEstimate ma = modulus_convexity_estimate(NormSpec::lp(3.0, 3), {0.5, 1.0, 1.5}, s1);
    ModulusEstimate mb = modulus_convexity_estimate(NormSpec::lp(3.0, 3), {0.5, 1.0, 1.5}, s4);
    bool pass_mod = modulus_to_csv(ma) == modulus_to_csv(mb);
    gate.line(10, "thread-count determinism", pass_mid && pass_mod,
              std::string("midpoint JSON identical: ") + (pass_mid ? "yes" : "no") +
                  "; modulus CSV identical: " + (pass_mod ? "yes" : "no"));
  }

  std::printf("%d of 10 criteria passed\n", 10 - gate.failed);
  return gate.failed == 0 ? 0 : 1;
}
