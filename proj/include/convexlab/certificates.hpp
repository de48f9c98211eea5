#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "convexlab/errors.hpp"
#include "convexlab/maps.hpp"
#include "convexlab/norm_geometry.hpp"
#include "convexlab/norms.hpp"
#include "convexlab/smoothness.hpp"

namespace convexlab {

// (1-eta) * min{r, nu/(4L)}: radius below which the image of a ball around a
// point with coercive, Lipschitz-derivative data is convex. eta keeps the
// inequality strict; L = 0 leaves only the r branch.
inline double hilbert_certified_radius(double L, double nu, double r, double eta) {
  if (!(nu > 0.0))
    throw HypothesisError(HypothesisError::Kind::NotCoercive,
                          "hilbert_certified_radius: coercivity constant must be positive");
  if (!(L >= 0.0)) throw ContractViolation("hilbert_certified_radius: L must be nonnegative");
  if (!(r > 0.0)) throw ContractViolation("hilbert_certified_radius: r must be positive");
  if (!(eta >= 0.0 && eta < 1.0)) throw ContractViolation("hilbert_certified_radius: eta must lie in [0,1)");
  double bound = (L == 0.0) ? r : std::min(r, nu / (4.0 * L));
  return (1.0 - eta) * bound;
}

struct HilbertConstants {
  double mu0 = 0.0;  // nu - L*eps
  double mu = 0.0;   // nu - 2*L*eps
  double rho = 0.0;  // mu0 * d^2 / (8 eps mu)
};

inline HilbertConstants hilbert_constants(double nu, double L, double eps, double pair_distance) {
  if (!(eps > 0.0)) throw ContractViolation("hilbert_constants: eps must be positive");
  if (!(pair_distance >= 0.0 && pair_distance <= 2.0 * eps + 1e-12))
    throw ContractViolation("hilbert_constants: pair distance must lie in [0, 2 eps]");
  double mu = nu - 2.0 * L * eps;
  if (!(mu > 0.0))
    throw HypothesisError(HypothesisError::Kind::MuNonpositive,
                          "hilbert_constants: eps >= nu/(2L), the constants chain collapses");
  HilbertConstants c;
  c.mu0 = nu - L * eps;
  c.mu = mu;
  c.rho = c.mu0 * pair_distance * pair_distance / (8.0 * eps * mu);
  return c;
}

// (1-eta) * min{4C/(L2 Lambda^2), r_max, 1}: the radius selection rule
// (1/4) L2 Lambda^2 <= C / eps for a target norm with power-type-2 constant C.
inline double banach_certified_radius(double L2, double Lambda, double C, double r_max, double eta) {
  if (!(C > 0.0))
    throw HypothesisError(HypothesisError::Kind::NormNotPowerType,
                          "banach_certified_radius: power-type constant must be positive");
  if (!(C < 1.0)) throw ContractViolation("banach_certified_radius: power-type constant must be < 1");
  if (!(L2 >= 0.0)) throw ContractViolation("banach_certified_radius: L2 must be nonnegative");
  if (!(Lambda > 0.0)) throw ContractViolation("banach_certified_radius: Lambda must be positive");
  if (!(eta >= 0.0 && eta < 1.0)) throw ContractViolation("banach_certified_radius: eta must lie in [0,1)");
  double bound = std::min(r_max, 1.0);
  if (L2 > 0.0) bound = std::min(bound, 4.0 * C / (L2 * Lambda * Lambda));
  return (1.0 - eta) * bound;
}

struct ConstantRecord {
  std::string name;
  double value = 0.0;
  std::string provenance;  // closed_form | estimated | computed
};

enum class CertifyMode { Hilbert, Banach };

struct Certificate {
  std::string mode;
  std::string map_name;
  Eigen::VectorXd center;
  double r = 0.0;
  double eta = 0.0;
  double beta = 0.0;
  double epsilon_star = 0.0;
  std::vector<ConstantRecord> constants;
  // Hilbert mode: constants at eps*
  double mu0 = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  // Banach mode: scale of the image-side rescaling that makes the unit-ball
  // power-type inequality applicable
  double normalization_scale = std::numeric_limits<double>::quiet_NaN();
};

struct CertifyOptions {
  double eta = 1e-6;
  double beta = 0.05;
  bool prefer_closed_forms = true;
  std::uint64_t seed = kDefaultSeed;
  int estimate_pairs = 4096;
  int estimate_samples = 512;
};

inline nlohmann::json certificate_to_json(const Certificate& c) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["mode"] = c.mode;
  j["map"] = c.map_name;
  j["center"] = std::vector<double>(c.center.data(), c.center.data() + c.center.size());
  j["r"] = c.r;
  j["eta"] = c.eta;
  j["beta"] = c.beta;
  j["epsilon_star"] = c.epsilon_star;
  for (const auto& rec : c.constants) {
    j["constants"][rec.name] = {{"value", rec.value}, {"provenance", rec.provenance}};
  }
  if (!std::isnan(c.mu0)) j["derived"]["mu0"] = c.mu0;
  if (!std::isnan(c.mu)) j["derived"]["mu"] = c.mu;
  if (!std::isnan(c.normalization_scale)) j["derived"]["normalization_scale"] = c.normalization_scale;
  return j;
}

// Assembles a certificate for f on the ball B_r(a): gathers the constants
// (closed forms when registered and preferred, sampled estimates inflated by
// 1+beta otherwise) and applies the radius rule for the requested mode.
inline Certificate certify_map(const SmoothMap& m, const Eigen::VectorXd& a, double r,
                               CertifyMode mode, const NormSpec& norm,
                               const CertifyOptions& opt = {}) {
  if (a.size() != m.dim_in()) throw ContractViolation("certify_map: center dimension mismatch");
  if (!(r > 0.0)) throw ContractViolation("certify_map: r must be positive");
  Region region = Region::ball(a, r);
  if (!region_contains(m.domain(), region))
    throw ContractViolation("certify_map: ball B_r(a) must lie inside the map domain");
  if (norm.dim != m.dim_out()) throw ContractViolation("certify_map: norm dimension mismatch");

  const auto cf = m.closed_forms();
  PairBudget pairs;
  pairs.pairs = opt.estimate_pairs;
  pairs.seed = opt.seed;
  pairs.beta = opt.beta;

  Certificate cert;
  cert.map_name = m.name();
  cert.center = a;
  cert.r = r;
  cert.eta = opt.eta;
  cert.beta = opt.beta;

  if (mode == CertifyMode::Hilbert) {
    if (!norm.is_euclidean())
      throw ContractViolation("certify_map: hilbert mode requires the Euclidean norm");
    cert.mode = "hilbert";
    double L;
    if (opt.prefer_closed_forms && cf && cf->deriv_lipschitz) {
      L = cf->deriv_lipschitz(region);
      cert.constants.push_back({"L", L, "closed_form"});
    } else {
      L = derivative_lipschitz_estimate(m, region, pairs).inflated;
      cert.constants.push_back({"L", L, "estimated"});
    }
    double nu;
    if (opt.prefer_closed_forms && cf && cf->sigma_min) {
      nu = cf->sigma_min(a);
      cert.constants.push_back({"nu", nu, "closed_form"});
    } else {
      nu = sigma_min(m, a);
      cert.constants.push_back({"nu", nu, "computed"});
    }
    if (!(nu > 0.0))
      throw HypothesisError(HypothesisError::Kind::NotCoercive,
                            "certify_map: derivative at the center is not coercive (sigma_min = " +
                                std::to_string(nu) + ")");
    cert.epsilon_star = hilbert_certified_radius(L, nu, r, opt.eta);
    cert.mu0 = nu - L * cert.epsilon_star;
    cert.mu = nu - 2.0 * L * cert.epsilon_star;
    return cert;
  }

  cert.mode = "banach";
  if (!m.has_inverse())
    throw HypothesisError(HypothesisError::Kind::HypothesisMissing,
                          "certify_map: banach mode needs a homeomorphism (no inverse registered)");
  double L2;
  if (opt.prefer_closed_forms && cf && cf->second_order) {
    L2 = cf->second_order(region);
    cert.constants.push_back({"L2", L2, "closed_form"});
  } else {
    SmoothnessBudget sb;
    sb.samples = opt.estimate_samples;
    sb.seed = opt.seed;
    sb.value_norm = norm;
    std::vector<double> grid;
    for (double f : {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}) grid.push_back(f * r);
    L2 = modulus_smoothness(m, 2, grid, region, sb).fitted_constant * (1.0 + opt.beta);
    cert.constants.push_back({"L2", L2, "estimated"});
  }
  double Lambda;
  if (opt.prefer_closed_forms && cf && cf->inverse_lipschitz) {
    Lambda = cf->inverse_lipschitz(region);
    cert.constants.push_back({"Lambda", Lambda, "closed_form"});
  } else {
    PairBudget pb = pairs;
    pb.value_norm = norm;
    Lambda = inverse_lipschitz_estimate(m, region, pb).inflated;
    cert.constants.push_back({"Lambda", Lambda, "estimated"});
  }
  double C;
  if (norm.is_euclidean()) {
    C = 0.125;  // delta(t) >= t^2/8 for the Euclidean norm
    cert.constants.push_back({"C", C, "closed_form"});
  } else {
    SectionBudget sb;
    sb.seed = opt.seed;
    ModulusEstimate est = modulus_convexity_estimate(norm, default_t_grid(), sb);
    PowerTypeFit fit = power_type_constant(est, 2.0);
    if (!fit.power_type || !(fit.C > 0.0))
      throw HypothesisError(HypothesisError::Kind::NormNotPowerType,
                            "certify_map: target norm shows no power-type-2 modulus at sampled resolution");
    C = fit.C * (1.0 - opt.beta);  // deflate: the fit is an upper estimate
    cert.constants.push_back({"C", C, "estimated"});
  }
  if (!(C > 0.0 && C < 1.0))
    throw HypothesisError(HypothesisError::Kind::NormNotPowerType,
                          "certify_map: power-type constant outside (0,1)");
  cert.epsilon_star = banach_certified_radius(L2, Lambda, C, r, opt.eta);
  cert.normalization_scale = cert.epsilon_star;
  return cert;
}

}  // namespace convexlab
