#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "convexlab/errors.hpp"
#include "convexlab/region.hpp"

namespace convexlab {

class SmoothMap;

// Analytic constants registered for built-in maps; estimators fall back to
// sampling when a slot is empty.
struct ClosedForms {
  std::function<double(const Region&)> deriv_lipschitz;    // Lipschitz constant of x -> J(x)
  std::function<double(const Region&)> second_order;       // least L with w2(f;t) <= L t^2
  std::function<double(const Region&)> inverse_lipschitz;  // Lipschitz constant of f^-1 on f(region)
  std::function<double(const Eigen::VectorXd&)> sigma_min;  // smallest singular value of J(a)
};

// Evaluable smooth map with optional analytic Jacobian and inverse. Values
// are immutable after construction and safe to share across workers.
class SmoothMap {
 public:
  using EvalFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using JacFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  SmoothMap(std::string name, int dim_in, int dim_out, EvalFn eval, Region domain)
      : name_(std::move(name)), dim_in_(dim_in), dim_out_(dim_out), eval_(std::move(eval)),
        domain_(std::move(domain)) {
    if (dim_in_ <= 0 || dim_out_ <= 0) throw ContractViolation("SmoothMap: dimensions must be positive");
    if (domain_.dim() != dim_in_) throw ContractViolation("SmoothMap: domain dimension mismatch");
  }

  const std::string& name() const { return name_; }
  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const Region& domain() const { return domain_; }
  bool has_jacobian() const { return static_cast<bool>(jacobian_); }
  bool has_inverse() const { return static_cast<bool>(inverse_); }
  const std::shared_ptr<const ClosedForms>& closed_forms() const { return closed_forms_; }

  Eigen::VectorXd eval(const Eigen::VectorXd& x) const {
    check_input(x);
    Eigen::VectorXd y = eval_(x);
    if (y.size() != dim_out_) throw InternalError("SmoothMap: eval produced wrong output size");
    return y;
  }

  // Analytic Jacobian when registered, otherwise central differences with
  // step 1e-5 * (1 + ||x||) per coordinate.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    check_input(x);
    if (jacobian_) {
      Eigen::MatrixXd J = jacobian_(x);
      if (J.rows() != dim_out_ || J.cols() != dim_in_)
        throw InternalError("SmoothMap: jacobian has wrong shape");
      return J;
    }
    const double step = 1e-5 * (1.0 + x.norm());
    Eigen::MatrixXd J(dim_out_, dim_in_);
    Eigen::VectorXd xp = x, xm = x;
    for (int j = 0; j < dim_in_; ++j) {
      xp[j] = x[j] + step;
      xm[j] = x[j] - step;
      J.col(j) = (eval_(xp) - eval_(xm)) / (2.0 * step);
      xp[j] = x[j];
      xm[j] = x[j];
    }
    return J;
  }

  Eigen::VectorXd analytic_inverse(const Eigen::VectorXd& y) const {
    if (!inverse_) throw HypothesisError(HypothesisError::Kind::HypothesisMissing,
                                         "SmoothMap: no analytic inverse registered");
    if (y.size() != dim_out_) throw ContractViolation("SmoothMap: inverse input size mismatch");
    return inverse_(y);
  }

  SmoothMap& with_jacobian(JacFn jac) {
    jacobian_ = std::move(jac);
    return *this;
  }
  SmoothMap& with_inverse(EvalFn inv) {
    inverse_ = std::move(inv);
    return *this;
  }
  SmoothMap& with_closed_forms(ClosedForms forms) {
    closed_forms_ = std::make_shared<const ClosedForms>(std::move(forms));
    return *this;
  }

 private:
  void check_input(const Eigen::VectorXd& x) const {
    if (x.size() != dim_in_)
      throw ContractViolation("SmoothMap '" + name_ + "': input length " +
                              std::to_string(x.size()) + " != dim_in " + std::to_string(dim_in_));
  }

  std::string name_;
  int dim_in_, dim_out_;
  EvalFn eval_;
  JacFn jacobian_;
  EvalFn inverse_;
  Region domain_;
  std::shared_ptr<const ClosedForms> closed_forms_;
};

// f(x) with a soft domain check (warns at most a few times per process).
inline Eigen::VectorXd map_eval(const SmoothMap& m, const Eigen::VectorXd& x) {
  if (!m.domain().contains(x, 1e-9)) {
    static std::atomic<int> warnings{0};
    if (warnings.fetch_add(1) < 5)
      std::cerr << "warning: evaluating map '" << m.name() << "' outside its domain\n";
  }
  return m.eval(x);
}

// J(x) h, by the analytic Jacobian when present, otherwise a central
// difference of t -> f(x + t h) with step 1e-5 (1 + ||x||)/||h||.
inline Eigen::VectorXd directional_derivative(const SmoothMap& m, const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& h) {
  if (h.size() != m.dim_in()) throw ContractViolation("directional_derivative: direction size mismatch");
  double hn = h.norm();
  if (hn == 0.0) throw ContractViolation("directional_derivative: direction must be nonzero");
  if (m.has_jacobian()) return m.jacobian(x) * h;
  const double s = 1e-5 * (1.0 + x.norm()) / hn;
  Eigen::VectorXd xp = x + s * h, xm = x - s * h;
  if (!m.domain().contains(xp, 1e-12) || !m.domain().contains(xm, 1e-12))
    throw DomainError("directional_derivative: finite-difference probe leaves the domain");
  return (m.eval(xp) - m.eval(xm)) / (2.0 * s);
}

// --- built-in corpus ---------------------------------------------------------

inline Region all_space(int n) {
  return Region::ball(Eigen::VectorXd::Zero(n), 1e9);
}

inline SmoothMap identity_map(int n) {
  SmoothMap m("identity", n, n, [](const Eigen::VectorXd& x) { return x; }, all_space(n));
  m.with_jacobian([n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); })
      .with_inverse([](const Eigen::VectorXd& y) { return y; });
  ClosedForms cf;
  cf.deriv_lipschitz = [](const Region&) { return 0.0; };
  cf.second_order = [](const Region&) { return 0.0; };
  cf.inverse_lipschitz = [](const Region&) { return 1.0; };
  cf.sigma_min = [](const Eigen::VectorXd&) { return 1.0; };
  m.with_closed_forms(std::move(cf));
  return m;
}

inline SmoothMap affine_map(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  const int mo = static_cast<int>(A.rows());
  if (b.size() != mo) throw ContractViolation("affine_map: offset size mismatch");
  SmoothMap m("affine", n, mo,
              [A, b](const Eigen::VectorXd& x) -> Eigen::VectorXd { return A * x + b; },
              all_space(n));
  m.with_jacobian([A](const Eigen::VectorXd&) { return A; });
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const double smin = svd.singularValues().minCoeff();
  if (mo == n && smin > 1e-14) {
    Eigen::MatrixXd Ainv = A.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    m.with_inverse([Ainv, b](const Eigen::VectorXd& y) -> Eigen::VectorXd { return Ainv * (y - b); });
  }
  ClosedForms cf;
  cf.deriv_lipschitz = [](const Region&) { return 0.0; };
  cf.second_order = [](const Region&) { return 0.0; };
  cf.sigma_min = [smin](const Eigen::VectorXd&) { return smin; };
  if (mo == n && smin > 1e-14) cf.inverse_lipschitz = [smin](const Region&) { return 1.0 / smin; };
  m.with_closed_forms(std::move(cf));
  return m;
}

// (x1, x2) -> (x1, x2 + k x1^2)
inline SmoothMap shear_map(double kappa) {
  SmoothMap m("shear", 2, 2,
              [kappa](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(2);
                y[0] = x[0];
                y[1] = x[1] + kappa * x[0] * x[0];
                return y;
              },
              all_space(2));
  m.with_jacobian([kappa](const Eigen::VectorXd& x) {
     Eigen::MatrixXd J(2, 2);
     J << 1.0, 0.0, 2.0 * kappa * x[0], 1.0;
     return J;
   })
      .with_inverse([kappa](const Eigen::VectorXd& y) {
        Eigen::VectorXd x(2);
        x[0] = y[0];
        x[1] = y[1] - kappa * y[0] * y[0];
        return x;
      });
  auto max_abs_x1 = [](const Region& r) {
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(2, 0);
    double c = r.center()[0];
    return std::max(std::abs(c + r.extent_along(e1)), std::abs(c - r.extent_along(-e1)));
  };
  ClosedForms cf;
  cf.deriv_lipschitz = [kappa](const Region&) { return 2.0 * std::abs(kappa); };
  cf.second_order = [kappa](const Region&) { return 2.0 * std::abs(kappa); };
  // ||J(x)^-1||_op depends only on s = 2|k x1|; sup over the region
  cf.inverse_lipschitz = [kappa, max_abs_x1](const Region& r) {
    double s = 2.0 * std::abs(kappa) * max_abs_x1(r);
    return 0.5 * (s + std::sqrt(s * s + 4.0));
  };
  cf.sigma_min = [kappa](const Eigen::VectorXd& a) {
    double s = 2.0 * std::abs(kappa) * std::abs(a[0]);
    return 0.5 * (std::sqrt(s * s + 4.0) - s);
  };
  m.with_closed_forms(std::move(cf));
  return m;
}

inline SmoothMap cubic1d_map() {
  SmoothMap m("cubic1d", 1, 1,
              [](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(1);
                y[0] = x[0] * x[0] * x[0];
                return y;
              },
              all_space(1));
  m.with_jacobian([](const Eigen::VectorXd& x) {
     Eigen::MatrixXd J(1, 1);
     J(0, 0) = 3.0 * x[0] * x[0];
     return J;
   })
      .with_inverse([](const Eigen::VectorXd& y) {
        Eigen::VectorXd x(1);
        x[0] = std::cbrt(y[0]);
        return x;
      });
  auto max_abs = [](const Region& r) {
    double c = r.center()[0];
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    return std::max(std::abs(c + r.extent_along(e)), std::abs(c - r.extent_along(e)));
  };
  ClosedForms cf;
  // |3x^2 - 3y^2| <= 6 max|x| |x-y|, attained near the extreme point
  cf.deriv_lipschitz = [max_abs](const Region& r) { return 6.0 * max_abs(r); };
  cf.second_order = [max_abs](const Region& r) { return 6.0 * max_abs(r); };
  cf.sigma_min = [](const Eigen::VectorXd& a) { return 3.0 * a[0] * a[0]; };
  m.with_closed_forms(std::move(cf));
  return m;
}

inline SmoothMap quad1d_map() {
  SmoothMap m("quad1d", 1, 1,
              [](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(1);
                y[0] = x[0] * x[0];
                return y;
              },
              all_space(1));
  m.with_jacobian([](const Eigen::VectorXd& x) {
    Eigen::MatrixXd J(1, 1);
    J(0, 0) = 2.0 * x[0];
    return J;
  });
  ClosedForms cf;
  cf.deriv_lipschitz = [](const Region&) { return 2.0; };
  cf.second_order = [](const Region&) { return 2.0; };
  cf.sigma_min = [](const Eigen::VectorXd& a) { return 2.0 * std::abs(a[0]); };
  m.with_closed_forms(std::move(cf));
  return m;
}

// --- polynomial maps from JSON configs ---------------------------------------
// {"name":..., "dim_in":n, "dim_out":m,
//  "outputs":[{"monomials":[{"exponents":[...],"coeff":...}]}],
//  "domain":{"ball":{"center":[...],"radius":r}} | {"box":{"lo":[...],"hi":[...]}}}

namespace detail {

struct Monomial {
  std::vector<int> exponents;
  double coeff = 0.0;
};

inline double eval_monomial(const Monomial& mono, const Eigen::VectorXd& x) {
  double v = mono.coeff;
  for (size_t i = 0; i < mono.exponents.size(); ++i) {
    for (int e = 0; e < mono.exponents[i]; ++e) v *= x[static_cast<Eigen::Index>(i)];
  }
  return v;
}

}  // namespace detail

inline Region region_from_json(const nlohmann::json& j, int dim) {
  if (j.contains("ball")) {
    auto c = j["ball"].at("center").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != dim) throw ContractViolation("map config: domain center size mismatch");
    return Region::ball(Eigen::Map<Eigen::VectorXd>(c.data(), dim), j["ball"].at("radius").get<double>());
  }
  if (j.contains("box")) {
    auto lo = j["box"].at("lo").get<std::vector<double>>();
    auto hi = j["box"].at("hi").get<std::vector<double>>();
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(hi.size()) != dim)
      throw ContractViolation("map config: domain box size mismatch");
    return Region::box(Eigen::Map<Eigen::VectorXd>(lo.data(), dim),
                       Eigen::Map<Eigen::VectorXd>(hi.data(), dim));
  }
  throw ContractViolation("map config: domain must be a ball or a box");
}

inline nlohmann::json region_to_json(const Region& r) {
  nlohmann::json j;
  if (r.is_ball()) {
    const Ball& b = r.as_ball();
    j["ball"]["center"] = std::vector<double>(b.center.data(), b.center.data() + b.center.size());
    j["ball"]["radius"] = b.radius;
  } else {
    const Box& b = r.as_box();
    j["box"]["lo"] = std::vector<double>(b.lo.data(), b.lo.data() + b.lo.size());
    j["box"]["hi"] = std::vector<double>(b.hi.data(), b.hi.data() + b.hi.size());
  }
  return j;
}

inline SmoothMap polynomial_map(const nlohmann::json& cfg) {
  const int n = cfg.at("dim_in").get<int>();
  const int mo = cfg.at("dim_out").get<int>();
  std::string name = cfg.value("name", std::string("polynomial"));
  auto outputs = std::make_shared<std::vector<std::vector<detail::Monomial>>>();
  for (const auto& out : cfg.at("outputs")) {
    std::vector<detail::Monomial> monos;
    for (const auto& mj : out.at("monomials")) {
      detail::Monomial mono;
      mono.exponents = mj.at("exponents").get<std::vector<int>>();
      mono.coeff = mj.at("coeff").get<double>();
      if (static_cast<int>(mono.exponents.size()) != n)
        throw ContractViolation("map config: exponent list length must equal dim_in");
      int degree = 0;
      for (int e : mono.exponents) {
        if (e < 0) throw ContractViolation("map config: exponents must be nonnegative");
        degree += e;
      }
      if (degree > 4) throw ContractViolation("map config: total degree must be at most 4");
      monos.push_back(std::move(mono));
    }
    outputs->push_back(std::move(monos));
  }
  if (static_cast<int>(outputs->size()) != mo)
    throw ContractViolation("map config: outputs count must equal dim_out");
  Region domain = cfg.contains("domain") ? region_from_json(cfg["domain"], n) : all_space(n);

  SmoothMap m(name, n, mo,
              [outputs, mo](const Eigen::VectorXd& x) {
                Eigen::VectorXd y(mo);
                for (int i = 0; i < mo; ++i) {
                  double s = 0.0;
                  for (const auto& mono : (*outputs)[i]) s += detail::eval_monomial(mono, x);
                  y[i] = s;
                }
                return y;
              },
              std::move(domain));
  m.with_jacobian([outputs, n, mo](const Eigen::VectorXd& x) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(mo, n);
    for (int i = 0; i < mo; ++i) {
      for (const auto& mono : (*outputs)[i]) {
        for (int j = 0; j < n; ++j) {
          if (mono.exponents[j] == 0) continue;
          detail::Monomial d = mono;
          d.coeff *= d.exponents[j];
          d.exponents[j] -= 1;
          J(i, j) += detail::eval_monomial(d, x);
        }
      }
    }
    return J;
  });
  return m;
}

// View of the inverse of a bijective map (analytic inverse required) as a map
// in its own right, with Jacobian J_f(f^-1(y))^-1.
inline SmoothMap inverse_map(const SmoothMap& m, Region image_domain) {
  if (!m.has_inverse())
    throw HypothesisError(HypothesisError::Kind::HypothesisMissing,
                          "inverse_map: base map has no analytic inverse");
  if (m.dim_in() != m.dim_out())
    throw ContractViolation("inverse_map: base map must have dim_in == dim_out");
  auto base = std::make_shared<SmoothMap>(m);
  SmoothMap inv(m.name() + "_inverse", m.dim_out(), m.dim_in(),
                [base](const Eigen::VectorXd& y) { return base->analytic_inverse(y); },
                std::move(image_domain));
  if (m.has_jacobian()) {
    inv.with_jacobian([base](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
      Eigen::VectorXd x = base->analytic_inverse(y);
      Eigen::MatrixXd J = base->jacobian(x);
      return J.partialPivLu().solve(Eigen::MatrixXd::Identity(J.rows(), J.cols()));
    });
  }
  inv.with_inverse([base](const Eigen::VectorXd& x) { return base->eval(x); });
  return inv;
}

}  // namespace convexlab
