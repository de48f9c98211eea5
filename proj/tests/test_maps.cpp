#include <catch_amalgamated.hpp>

#include <cmath>

#include "convexlab/maps.hpp"
#include "convexlab/preimage.hpp"
#include "convexlab/rng.hpp"

using namespace convexlab;
using Catch::Approx;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

nlohmann::json sample_poly_config() {
  return nlohmann::json::parse(R"({
    "name": "warp",
    "dim_in": 2, "dim_out": 2,
    "outputs": [
      {"monomials": [{"exponents":[1,0],"coeff":1.0},{"exponents":[0,2],"coeff":0.1}]},
      {"monomials": [{"exponents":[0,1],"coeff":1.0},{"exponents":[1,1],"coeff":0.1}]}
    ],
    "domain": {"ball": {"center": [0.0, 0.0], "radius": 2.0}}
  })");
}

std::vector<SmoothMap> corpus() {
  std::vector<SmoothMap> maps;
  maps.push_back(identity_map(2));
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.0, 0.0, 0.5;
  maps.push_back(affine_map(A, vec2(0.1, -0.2)));
  maps.push_back(shear_map(1.0));
  maps.push_back(cubic1d_map());
  maps.push_back(quad1d_map());
  maps.push_back(polynomial_map(sample_poly_config()));
  return maps;
}

}  // namespace

TEST_CASE("map evaluation examples") {
  CHECK(identity_map(2).eval(vec2(0.3, -0.1)).isApprox(vec2(0.3, -0.1)));
  Eigen::VectorXd y = shear_map(1.0).eval(vec2(0.1, 0.5916));
  CHECK(y[0] == Approx(0.1));
  CHECK(y[1] == Approx(0.6016));
  CHECK(cubic1d_map().eval(vec1(2.0))[0] == Approx(8.0));
  CHECK_THROWS_AS(shear_map(1.0).eval(vec1(1.0)), ContractViolation);
}

TEST_CASE("directional derivative") {
  SmoothMap id2 = identity_map(2);
  CHECK(directional_derivative(id2, vec2(0.4, 0.2), vec2(1.0, 2.0)).isApprox(vec2(1.0, 2.0)));
  Eigen::VectorXd d = directional_derivative(shear_map(1.0), vec2(0.5, 0.0), vec2(1.0, 0.0));
  CHECK(d[0] == Approx(1.0));
  CHECK(d[1] == Approx(1.0));
  CHECK_THROWS_AS(directional_derivative(id2, vec2(0, 0), vec2(0, 0)), ContractViolation);
}

TEST_CASE("directional derivative is linear in h for analytic jacobians") {
  Rng rng(3);
  for (const auto& m : corpus()) {
    Eigen::VectorXd x = 0.3 * rng.gaussian_vector(m.dim_in());
    Eigen::VectorXd h1 = rng.gaussian_vector(m.dim_in());
    Eigen::VectorXd h2 = rng.gaussian_vector(m.dim_in());
    double alpha = rng.uniform(-2.0, 2.0);
    Eigen::VectorXd lhs = directional_derivative(m, x, (alpha * h1 + h2).eval());
    Eigen::VectorXd rhs = alpha * directional_derivative(m, x, h1) + directional_derivative(m, x, h2);
    CHECK((lhs - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("analytic jacobians match central differences") {
  Rng rng(5);
  for (const auto& m : corpus()) {
    REQUIRE(m.has_jacobian());
    for (int it = 0; it < 20; ++it) {
      Eigen::VectorXd x = 0.5 * rng.gaussian_vector(m.dim_in());
      Eigen::MatrixXd J = m.jacobian(x);
      // rebuild via the finite-difference fallback
      SmoothMap plain(m.name() + "_fd", m.dim_in(), m.dim_out(),
                      [&m](const Eigen::VectorXd& z) { return m.eval(z); }, all_space(m.dim_in()));
      Eigen::MatrixXd Jfd = plain.jacobian(x);
      CHECK((J - Jfd).cwiseAbs().maxCoeff() <= 1e-6);
    }
  }
}

TEST_CASE("finite-difference directional derivative agrees with analytic") {
  Rng rng(9);
  for (const auto& m : corpus()) {
    SmoothMap plain(m.name() + "_fd", m.dim_in(), m.dim_out(),
                    [&m](const Eigen::VectorXd& z) { return m.eval(z); }, all_space(m.dim_in()));
    for (int it = 0; it < 10; ++it) {
      Eigen::VectorXd x = 0.4 * rng.gaussian_vector(m.dim_in());
      Eigen::VectorXd h = rng.unit_vector(m.dim_in());
      Eigen::VectorXd a = directional_derivative(m, x, h);
      Eigen::VectorXd b = directional_derivative(plain, x, h);
      CHECK((a - b).norm() <= 1e-6 * (1.0 + a.norm()));
    }
  }
}

TEST_CASE("finite differences refuse to step out of the domain") {
  SmoothMap boxed("boxed", 1, 1, [](const Eigen::VectorXd& x) { return x; },
                  Region::box1d(-1.0, 1.0));
  CHECK_THROWS_AS(directional_derivative(boxed, vec1(1.0), vec1(1.0)), DomainError);
}

TEST_CASE("analytic inverses round-trip") {
  Rng rng(21);
  for (const auto& m : corpus()) {
    if (!m.has_inverse()) continue;
    for (int it = 0; it < 20; ++it) {
      Eigen::VectorXd x = 0.5 * rng.gaussian_vector(m.dim_in());
      Eigen::VectorXd y = m.eval(x);
      Eigen::VectorXd back = m.eval(m.analytic_inverse(y));
      CHECK((back - y).norm() <= 1e-10 * (1.0 + y.norm()));
    }
  }
}

TEST_CASE("inverse_eval") {
  SmoothMap sh = shear_map(1.0);
  Eigen::VectorXd x = inverse_eval(sh, vec2(0.5, 1.0), vec2(0, 0));
  CHECK(x[0] == Approx(0.5));
  CHECK(x[1] == Approx(0.75));

  SmoothMap id2 = identity_map(2);
  CHECK(inverse_eval(id2, vec2(0.2, -0.7), vec2(0, 0)).isApprox(vec2(0.2, -0.7)));

  // polynomial map without an analytic inverse: solver path
  SmoothMap poly = polynomial_map(sample_poly_config());
  REQUIRE_FALSE(poly.has_inverse());
  Eigen::VectorXd target = poly.eval(vec2(0.3, -0.2));
  Eigen::VectorXd found = inverse_eval(poly, target, vec2(0, 0));
  CHECK((poly.eval(found) - target).norm() <= 1e-10 * (1.0 + target.norm()));
}

TEST_CASE("polynomial config validation") {
  nlohmann::json bad = sample_poly_config();
  bad["outputs"][0]["monomials"][0]["exponents"] = {3, 2};  // degree 5
  CHECK_THROWS_AS(polynomial_map(bad), ContractViolation);
  nlohmann::json wrong = sample_poly_config();
  wrong["outputs"][0]["monomials"][0]["exponents"] = {1};
  CHECK_THROWS_AS(polynomial_map(wrong), ContractViolation);
}

TEST_CASE("polynomial domain kinds") {
  nlohmann::json cfg = sample_poly_config();
  cfg["domain"] = {{"box", {{"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}}}};
  SmoothMap m = polynomial_map(cfg);
  CHECK(m.domain().contains(vec2(0.5, 0.5)));
  CHECK_FALSE(m.domain().contains(vec2(1.5, 0.0)));
}

TEST_CASE("inverse_map exposes the inverse with its jacobian") {
  SmoothMap sh = shear_map(1.0);
  SmoothMap inv = inverse_map(sh, Region::box(vec2(-0.5, -0.5), vec2(0.5, 0.5)));
  Eigen::VectorXd y = vec2(0.25, 0.1);
  CHECK(inv.eval(y).isApprox(sh.analytic_inverse(y)));
  Eigen::MatrixXd J = inv.jacobian(y);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, 0.0, -2.0 * y[0], 1.0;  // inverse of the base jacobian at the preimage
  CHECK((J - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(inverse_map(quad1d_map(), Region::box1d(0.1, 1.0)), HypothesisError);
}
