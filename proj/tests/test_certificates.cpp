#include <catch_amalgamated.hpp>

#include <cmath>

#include "convexlab/certificates.hpp"
#include "convexlab/rng.hpp"

using namespace convexlab;
using Catch::Approx;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("hilbert radius formula") {
  CHECK(hilbert_certified_radius(2.0, 1.0, kInf, 0.0) == Approx(0.125));
  CHECK(hilbert_certified_radius(0.0, 1.0, 5.0, 0.0) == Approx(5.0));
  CHECK(hilbert_certified_radius(1.0, 1.0, 0.1, 0.0) == Approx(0.1));
  CHECK_THROWS_AS(hilbert_certified_radius(1.0, 0.0, 1.0, 0.0), HypothesisError);
  CHECK_THROWS_AS(hilbert_certified_radius(1.0, -1.0, 1.0, 0.0), HypothesisError);
  CHECK_THROWS_AS(hilbert_certified_radius(1.0, 1.0, 1.0, 1.0), ContractViolation);
}

TEST_CASE("hilbert radius monotonicity") {
  Rng rng(5);
  for (int it = 0; it < 200; ++it) {
    double L = rng.uniform(0.1, 5.0), nu = rng.uniform(0.1, 5.0), r = rng.uniform(0.01, 3.0);
    double base = hilbert_certified_radius(L, nu, r, 1e-6);
    CHECK(hilbert_certified_radius(L, nu * 1.1, r, 1e-6) >= base - 1e-15);
    CHECK(hilbert_certified_radius(L, nu, r * 1.1, 1e-6) >= base - 1e-15);
    CHECK(hilbert_certified_radius(L * 1.1, nu, r, 1e-6) <= base + 1e-15);
  }
}

TEST_CASE("hilbert constants chain") {
  HilbertConstants c = hilbert_constants(1.0, 2.0, 0.1, 0.2);
  CHECK(c.mu0 == Approx(0.8));
  CHECK(c.mu == Approx(0.6));
  CHECK(c.rho == Approx(0.8 * 0.04 / (0.8 * 0.6)));
  CHECK(hilbert_constants(1.0, 2.0, 0.1, 0.0).rho == 0.0);
  CHECK_THROWS_AS(hilbert_constants(1.0, 2.0, 0.25, 0.1), HypothesisError);
}

TEST_CASE("rho stays below eps when eps <= nu/(3L)") {
  Rng rng(8);
  for (int it = 0; it < 300; ++it) {
    double nu = rng.uniform(0.2, 4.0), L = rng.uniform(0.1, 4.0);
    double eps = rng.uniform(1e-4, nu / (3.0 * L));
    double d = rng.uniform(0.0, 2.0 * eps);
    HilbertConstants c = hilbert_constants(nu, L, eps, d);
    CHECK(c.rho <= eps + 1e-12);
  }
}

TEST_CASE("banach radius formula") {
  CHECK(banach_certified_radius(2.0, 1.618, 0.125, kInf, 0.0) == Approx(0.0955).margin(5e-5));
  CHECK(banach_certified_radius(1.0, 1.0, 0.125, kInf, 0.0) == Approx(0.5));
  CHECK(banach_certified_radius(0.0, 1.0, 0.125, 3.0, 0.0) == Approx(1.0));  // capped at 1
  CHECK(banach_certified_radius(0.0, 1.0, 0.125, 0.4, 0.0) == Approx(0.4));
  CHECK_THROWS_AS(banach_certified_radius(1.0, 1.0, 0.0, 1.0, 0.0), HypothesisError);
  CHECK_THROWS_AS(banach_certified_radius(1.0, 1.0, 1.5, 1.0, 0.0), ContractViolation);
}

TEST_CASE("banach radius monotonicity") {
  Rng rng(6);
  for (int it = 0; it < 200; ++it) {
    double L2 = rng.uniform(0.1, 5.0), lam = rng.uniform(0.1, 5.0), C = rng.uniform(0.01, 0.9);
    double base = banach_certified_radius(L2, lam, C, kInf, 1e-6);
    CHECK(banach_certified_radius(L2, lam, std::min(C * 1.1, 0.99), kInf, 1e-6) >= base - 1e-15);
    CHECK(banach_certified_radius(L2 * 1.1, lam, C, kInf, 1e-6) <= base + 1e-15);
    CHECK(banach_certified_radius(L2, lam * 1.1, C, kInf, 1e-6) <= base + 1e-15);
  }
}

TEST_CASE("certify shear in hilbert mode with closed forms") {
  SmoothMap m = shear_map(1.0);
  CertifyOptions opt;
  Certificate cert = certify_map(m, Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Hilbert,
                                 NormSpec::euclidean(2), opt);
  CHECK(cert.epsilon_star == Approx(0.125 * (1.0 - opt.eta)).margin(1e-12));
  CHECK(cert.mu0 > 0.0);
  CHECK(cert.mu > 0.0);
  CHECK(cert.mu0 > cert.mu);
  bool found_closed = false;
  for (const auto& rec : cert.constants)
    if (rec.name == "L" && rec.provenance == "closed_form") found_closed = true;
  CHECK(found_closed);
}

TEST_CASE("certify identity: the r branch") {
  Certificate cert = certify_map(identity_map(2), Eigen::VectorXd::Zero(2), 0.7,
                                 CertifyMode::Hilbert, NormSpec::euclidean(2));
  CHECK(cert.epsilon_star == Approx(0.7 * (1.0 - 1e-6)));
}

TEST_CASE("certify quad1d at the origin fails coercivity") {
  CHECK_THROWS_AS(certify_map(quad1d_map(), Eigen::VectorXd::Zero(1), 0.5, CertifyMode::Hilbert,
                              NormSpec::euclidean(1)),
                  HypothesisError);
}

TEST_CASE("certify with estimated constants stays conservative") {
  SmoothMap m = shear_map(1.0);
  CertifyOptions opt;
  opt.prefer_closed_forms = false;
  Certificate est = certify_map(m, Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Hilbert,
                                NormSpec::euclidean(2), opt);
  Certificate closed = certify_map(m, Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Hilbert,
                                   NormSpec::euclidean(2));
  // inflated-L estimate certifies no more than the closed-form constant does
  CHECK(est.epsilon_star <= closed.epsilon_star + 1e-12);
  CHECK(est.epsilon_star >= 0.9 * closed.epsilon_star);
}

TEST_CASE("certify banach mode for the shear") {
  SmoothMap m = shear_map(1.0);
  CertifyOptions opt;
  Certificate cert = certify_map(m, Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Banach,
                                 NormSpec::euclidean(2), opt);
  // L2 = 2, Lambda = 1 + sqrt(2) on the unit ball, C = 1/8
  double lambda = 1.0 + std::sqrt(2.0);
  double expected = (1.0 - opt.eta) * std::min(1.0, 4.0 * 0.125 / (2.0 * lambda * lambda));
  CHECK(cert.epsilon_star == Approx(expected).margin(1e-12));
  CHECK(cert.normalization_scale == Approx(cert.epsilon_star));
  // the selection inequality holds at eps*
  double L2 = 0, lam = 0, C = 0;
  for (const auto& rec : cert.constants) {
    if (rec.name == "L2") L2 = rec.value;
    if (rec.name == "Lambda") lam = rec.value;
    if (rec.name == "C") C = rec.value;
  }
  CHECK(0.25 * L2 * lam * lam <= C / cert.epsilon_star + 1e-12);
  CHECK(cert.epsilon_star <= 1.0);
  CHECK(C < 1.0);
}

TEST_CASE("banach mode requires an inverse") {
  CHECK_THROWS_AS(certify_map(quad1d_map(), Eigen::VectorXd::Ones(1), 0.2, CertifyMode::Banach,
                              NormSpec::euclidean(1)),
                  HypothesisError);
}

TEST_CASE("hilbert mode requires the euclidean norm") {
  CHECK_THROWS_AS(certify_map(shear_map(1.0), Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Hilbert,
                              NormSpec::lp(1.0, 2)),
                  ContractViolation);
}

TEST_CASE("banach mode rejects a norm without power-type evidence") {
  CHECK_THROWS_AS(certify_map(shear_map(1.0), Eigen::VectorXd::Zero(2), 1.0, CertifyMode::Banach,
                              NormSpec::lp(1.0, 2)),
                  HypothesisError);
}

TEST_CASE("certificate json shape") {
  Certificate cert = certify_map(shear_map(1.0), Eigen::VectorXd::Zero(2), 1.0,
                                 CertifyMode::Hilbert, NormSpec::euclidean(2));
  nlohmann::json j = certificate_to_json(cert);
  CHECK(j["mode"] == "hilbert");
  CHECK(j["constants"].contains("L"));
  CHECK(j["constants"].contains("nu"));
  CHECK(j.contains("epsilon_star"));
  CHECK(j["schema_version"] == 1);
}

TEST_CASE("banach certify of a nested norm target") {
  // nested l4-over-l2 target norm: power-type-2 fit comes from sampling
  SmoothMap m = identity_map(2);
  NormSpec nested = NormSpec::direct_sum(2.0, {NormSpec::lp(4.0, 1), NormSpec::lp(4.0, 1)});
  CertifyOptions opt;
  Certificate cert = certify_map(m, Eigen::VectorXd::Zero(2), 0.8, CertifyMode::Banach, nested, opt);
  CHECK(cert.epsilon_star > 0.0);
  bool estimated_C = false;
  for (const auto& rec : cert.constants)
    if (rec.name == "C" && rec.provenance == "estimated") estimated_C = true;
  CHECK(estimated_C);
}
