#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "convexlab/errors.hpp"
#include "convexlab/hull2d.hpp"
#include "convexlab/maps.hpp"
#include "convexlab/norm_geometry.hpp"
#include "convexlab/preimage.hpp"
#include "convexlab/rng.hpp"

namespace convexlab {

struct MidpointOptions {
  double defect_tolerance = 1e-6;   // defects above this are recorded as violations
  double witness_threshold = 1e-4;  // verdict flips to nonconvex-witnessed above this
  int restarts = 4;
  int threads = 1;
  PreimageOptions solver;  // continuation over 8 steps, 200 iterations each
};

struct Violation {
  long long pair_index = 0;
  Eigen::VectorXd x1, x2, y0, best_point;
  double defect = 0.0;
};

struct SolverStats {
  long long solved = 0;      // midpoint image reached within defect tolerance
  long long unresolved = 0;  // iteration cap even after restarts; never a violation
  long long total_iterations = 0;
};

// Outcome of the literal convexity test: for sampled pairs in B_eps(a), does
// (f(x1)+f(x2))/2 have a preimage in the ball? A positive defect after
// multi-start is nonconvexity evidence; it is not a proof of convexity when 0.
struct MidpointReport {
  std::string map_name;
  Eigen::VectorXd center;
  double eps = 0.0;
  long long pairs_tested = 0;
  std::vector<Violation> violations;
  double worst_defect = 0.0;
  std::string verdict;  // convex-consistent | nonconvex-witnessed
  SolverStats stats;
  std::uint64_t seed = 0;
  double defect_tolerance = 0.0;
  double witness_threshold = 0.0;
};

namespace detail {

// 70% uniform interior pairs; 30% structured boundary pairs (antipodal with a
// perturbation, near-tangent short arcs, and coordinate-mirrored pairs).
// Uniform sampling alone misses thin nonconvexity near the image boundary.
inline void midpoint_pair(const Eigen::VectorXd& a, double eps, int dim, long long index,
                          std::uint64_t seed, Eigen::VectorXd& x1, Eigen::VectorXd& x2) {
  Rng rng = Rng::for_item(seed, static_cast<std::uint64_t>(index));
  const int cat = static_cast<int>(index % 10);
  auto interior = [&]() {
    Eigen::VectorXd u = rng.unit_vector(dim);
    double r = eps * std::pow(rng.uniform(), 1.0 / dim);
    return (a + r * u).eval();
  };
  if (cat < 7 || dim < 2) {
    if (cat < 7) {
      x1 = interior();
      x2 = interior();
    } else {
      Eigen::VectorXd u = rng.unit_vector(dim);
      x1 = a + eps * u;
      x2 = a - eps * rng.uniform(0.2, 1.0) * u;
    }
    return;
  }
  Eigen::VectorXd u = rng.unit_vector(dim);
  if (cat == 7) {  // antipodal, perturbed
    Eigen::VectorXd v = -u + 0.05 * rng.gaussian_vector(dim);
    v.normalize();
    x1 = a + eps * u;
    x2 = a + eps * v;
  } else if (cat == 8) {  // near-tangent short arc
    Eigen::VectorXd w = rng.gaussian_vector(dim);
    w -= u.dot(w) * u;
    double nw = w.norm();
    if (nw < 1e-12) {
      x1 = a + eps * u;
      x2 = a - eps * u;
      return;
    }
    w /= nw;
    double arc = std::exp(rng.uniform(std::log(0.02), std::log(1.0)));
    x1 = a + eps * u;
    x2 = a + eps * (std::cos(arc) * u + std::sin(arc) * w);
  } else {  // mirrored across a coordinate hyperplane
    int j = rng.uniform_int(dim);
    Eigen::VectorXd v = u;
    v[j] = -v[j];
    x1 = a + eps * u;
    x2 = a + eps * v;
  }
}

}  // namespace detail

inline MidpointReport midpoint_convexity_check(const SmoothMap& m, const Eigen::VectorXd& a,
                                               double eps, long long n_pairs, std::uint64_t seed,
                                               const MidpointOptions& opt = {}) {
  if (!(eps > 0.0)) throw ContractViolation("midpoint_convexity_check: eps must be positive");
  if (a.size() != m.dim_in()) throw ContractViolation("midpoint_convexity_check: center size mismatch");
  if (!region_contains(m.domain(), Region::ball(a, eps)))
    throw ContractViolation("midpoint_convexity_check: ball must lie inside the map domain");
  if (n_pairs <= 0) throw ContractViolation("midpoint_convexity_check: need a positive pair count");

  const int dim = m.dim_in();
  const BallConstraint ball{a, eps};

  enum class Outcome : std::uint8_t { Ok, Violation, Unresolved };
  struct PairResult {
    Outcome outcome = Outcome::Ok;
    double defect = 0.0;
    int iterations = 0;
    Eigen::VectorXd x1, x2, y0, best_point;
  };
  std::vector<PairResult> results(static_cast<size_t>(n_pairs));

  parallel_for(static_cast<size_t>(n_pairs), opt.threads, [&](size_t i) {
    PairResult& pr = results[i];
    detail::midpoint_pair(a, eps, dim, static_cast<long long>(i), seed, pr.x1, pr.x2);
    pr.y0 = 0.5 * (m.eval(pr.x1) + m.eval(pr.x2));
    Eigen::VectorXd mid = 0.5 * (pr.x1 + pr.x2);

    PreimageResult best = solve_preimage(m, pr.y0, mid, ball, opt.solver);
    pr.iterations += best.iterations;
    if (best.residual > opt.defect_tolerance) {
      Rng rng = Rng::for_item(seed ^ 0xABCDEF1234567890ULL, static_cast<std::uint64_t>(i));
      for (int rstart = 0; rstart < opt.restarts && best.residual > opt.defect_tolerance; ++rstart) {
        Eigen::VectorXd start;
        if (rstart == 0) start = pr.x1;
        else if (rstart == 1) start = pr.x2;
        else start = mid + (eps * 0.25) * rng.gaussian_vector(dim);
        start = detail::project_to_ball(start, ball);
        PreimageResult alt = solve_preimage(m, pr.y0, start, ball, opt.solver);
        pr.iterations += alt.iterations;
        if (alt.residual < best.residual) best = alt;
      }
    }
    pr.defect = best.residual;
    pr.best_point = best.x;
    if (best.residual <= opt.defect_tolerance) pr.outcome = Outcome::Ok;
    else if (best.status == SolveStatus::IterationCap) pr.outcome = Outcome::Unresolved;
    else pr.outcome = Outcome::Violation;
  });

  MidpointReport rep;
  rep.map_name = m.name();
  rep.center = a;
  rep.eps = eps;
  rep.pairs_tested = n_pairs;
  rep.seed = seed;
  rep.defect_tolerance = opt.defect_tolerance;
  rep.witness_threshold = opt.witness_threshold;
  for (size_t i = 0; i < results.size(); ++i) {
    const PairResult& pr = results[i];
    rep.stats.total_iterations += pr.iterations;
    switch (pr.outcome) {
      case Outcome::Ok:
        ++rep.stats.solved;
        break;
      case Outcome::Unresolved:
        ++rep.stats.unresolved;
        break;
      case Outcome::Violation: {
        Violation v;
        v.pair_index = static_cast<long long>(i);
        v.x1 = pr.x1;
        v.x2 = pr.x2;
        v.y0 = pr.y0;
        v.best_point = pr.best_point;
        v.defect = pr.defect;
        rep.worst_defect = std::max(rep.worst_defect, v.defect);
        rep.violations.push_back(std::move(v));
        break;
      }
    }
  }
  rep.verdict = rep.worst_defect > opt.witness_threshold ? "nonconvex-witnessed" : "convex-consistent";
  return rep;
}

struct HullCompareResult {
  double hull_area = 0.0;      // convex hull of the sampled image, by shoelace
  double image_area = 0.0;     // rasterized image area
  double relative_gap = 0.0;   // matched-pixel gap, nonnegative by construction
};

// Independent 2-D oracle: compares the rasterized image of B_eps(a) with the
// area of its convex hull. The gap is computed from pixel counts against the
// same hull polygon so that discretization bias cancels instead of producing
// spurious negative gaps.
inline HullCompareResult hull_compare_2d(const SmoothMap& m, const Eigen::VectorXd& a, double eps,
                                         int grid_density = 512) {
  if (m.dim_out() != 2 || m.dim_in() != 2)
    throw HypothesisError(HypothesisError::Kind::UnsupportedDimension,
                          "hull_compare_2d: needs a map of the plane to the plane");
  if (!(eps > 0.0)) throw ContractViolation("hull_compare_2d: eps must be positive");
  if (grid_density < 16) throw ContractViolation("hull_compare_2d: raster grid too coarse");

  const int n_boundary = 4096;
  const int n_radii = 384, n_angles = 3072;
  std::vector<Point2> pts;
  pts.reserve(n_boundary + static_cast<size_t>(n_radii) * n_angles);
  Eigen::VectorXd x(2);
  auto push_image = [&](double px, double py) {
    x[0] = px;
    x[1] = py;
    Eigen::VectorXd y = m.eval(x);
    pts.push_back({y[0], y[1]});
  };
  for (int k = 0; k < n_boundary; ++k) {
    double th = 6.283185307179586 * k / n_boundary;
    push_image(a[0] + eps * std::cos(th), a[1] + eps * std::sin(th));
  }
  for (int i = 0; i < n_radii; ++i) {
    double r = eps * std::sqrt((i + 1.0) / n_radii);
    for (int k = 0; k < n_angles; ++k) {
      double th = 6.283185307179586 * (k + 0.5 * (i % 2)) / n_angles;
      push_image(a[0] + r * std::cos(th), a[1] + r * std::sin(th));
    }
  }

  std::vector<Point2> hull = convex_hull(pts);
  HullCompareResult out;
  out.hull_area = polygon_area(hull);
  if (hull.size() < 3 || out.hull_area <= 0.0) return out;

  double x0 = pts[0][0], x1max = pts[0][0], y0 = pts[0][1], y1max = pts[0][1];
  for (const auto& p : pts) {
    x0 = std::min(x0, p[0]);
    x1max = std::max(x1max, p[0]);
    y0 = std::min(y0, p[1]);
    y1max = std::max(y1max, p[1]);
  }
  const int N = grid_density;
  const double pw = (x1max - x0) / N * (1.0 + 1e-12) + 1e-300;
  const double ph = (y1max - y0) / N * (1.0 + 1e-12) + 1e-300;
  std::vector<std::uint8_t> marked(static_cast<size_t>(N) * N, 0);
  for (const auto& p : pts) {
    int ix = std::min(N - 1, std::max(0, static_cast<int>((p[0] - x0) / pw)));
    int iy = std::min(N - 1, std::max(0, static_cast<int>((p[1] - y0) / ph)));
    marked[static_cast<size_t>(iy) * N + ix] = 1;
  }

  // scanline over the hull: count pixels whose centers fall inside, and how
  // many of those were hit by an image sample
  long long hull_px = 0, image_px = 0;
  for (int iy = 0; iy < N; ++iy) {
    double yc = y0 + (iy + 0.5) * ph;
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    const size_t H = hull.size();
    for (size_t e = 0; e < H; ++e) {
      const Point2& p = hull[e];
      const Point2& q = hull[(e + 1) % H];
      if ((p[1] <= yc && yc < q[1]) || (q[1] <= yc && yc < p[1])) {
        double xc = p[0] + (yc - p[1]) * (q[0] - p[0]) / (q[1] - p[1]);
        xlo = std::min(xlo, xc);
        xhi = std::max(xhi, xc);
      }
    }
    if (!(xlo <= xhi)) continue;
    int lo = static_cast<int>(std::ceil((xlo - x0) / pw - 0.5));
    int hi = static_cast<int>(std::floor((xhi - x0) / pw - 0.5));
    lo = std::max(lo, 0);
    hi = std::min(hi, N - 1);
    for (int ix = lo; ix <= hi; ++ix) {
      ++hull_px;
      if (marked[static_cast<size_t>(iy) * N + ix]) ++image_px;
    }
  }
  out.image_area = static_cast<double>(image_px) * pw * ph;
  out.relative_gap = hull_px > 0 ? static_cast<double>(hull_px - image_px) / hull_px : 0.0;
  return out;
}

// --- report serialization ----------------------------------------------------

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline nlohmann::json midpoint_report_to_json(const MidpointReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["map"] = r.map_name;
  j["center"] = vector_to_json(r.center);
  j["eps"] = r.eps;
  j["pairs_tested"] = r.pairs_tested;
  j["seed"] = r.seed;
  j["defect_tolerance"] = r.defect_tolerance;
  j["witness_threshold"] = r.witness_threshold;
  j["worst_defect"] = r.worst_defect;
  j["verdict"] = r.verdict;
  j["stats"] = {{"solved", r.stats.solved},
                {"unresolved", r.stats.unresolved},
                {"violations", r.violations.size()},
                {"total_iterations", r.stats.total_iterations}};
  j["violations"] = nlohmann::json::array();
  for (const auto& v : r.violations) {
    j["violations"].push_back({{"pair_index", v.pair_index},
                               {"x1", vector_to_json(v.x1)},
                               {"x2", vector_to_json(v.x2)},
                               {"y0", vector_to_json(v.y0)},
                               {"best_feasible_point", vector_to_json(v.best_point)},
                               {"defect", v.defect}});
  }
  return j;
}

inline std::string violations_to_csv(const MidpointReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "x1,x2,y0,defect\n";
  for (const auto& v : r.violations) {
    os << vector_to_field(v.x1) << ',' << vector_to_field(v.x2) << ',' << vector_to_field(v.y0)
       << ',' << v.defect << '\n';
  }
  return os.str();
}

}  // namespace convexlab
