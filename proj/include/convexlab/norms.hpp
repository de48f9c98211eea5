#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "convexlab/errors.hpp"

namespace convexlab {

// Description of a finite-dimensional norm: plain p-norm, weighted p-norm, or
// a direct sum of inner norms combined by an outer p-norm.
struct NormSpec {
  enum class Kind { P, WeightedP, Nested };

  Kind kind = Kind::P;
  double p = 2.0;  // exponent; outer exponent for Nested; may be +inf
  int dim = 0;
  std::vector<double> weights;   // WeightedP only, strictly positive
  std::vector<NormSpec> inner;   // Nested only

  static NormSpec lp(double p, int dim) {
    validate_exponent(p);
    if (dim <= 0) throw ContractViolation("NormSpec: dimension must be positive");
    NormSpec s;
    s.kind = Kind::P;
    s.p = p;
    s.dim = dim;
    return s;
  }

  static NormSpec euclidean(int dim) { return lp(2.0, dim); }

  static NormSpec weighted_lp(double p, std::vector<double> w) {
    validate_exponent(p);
    if (w.empty()) throw ContractViolation("NormSpec: weight vector must be nonempty");
    for (double wi : w)
      if (!(wi > 0.0)) throw ContractViolation("NormSpec: weights must be positive");
    NormSpec s;
    s.kind = Kind::WeightedP;
    s.p = p;
    s.dim = static_cast<int>(w.size());
    s.weights = std::move(w);
    return s;
  }

  static NormSpec direct_sum(double outer_p, std::vector<NormSpec> blocks) {
    validate_exponent(outer_p);
    if (blocks.empty()) throw ContractViolation("NormSpec: direct sum needs at least one block");
    NormSpec s;
    s.kind = Kind::Nested;
    s.p = outer_p;
    s.dim = 0;
    for (const auto& b : blocks) s.dim += b.dim;
    s.inner = std::move(blocks);
    return s;
  }

  bool is_euclidean() const { return kind == Kind::P && p == 2.0; }

 private:
  static void validate_exponent(double p) {
    if (!(p >= 1.0))  // rejects NaN and p < 1; +inf passes
      throw ContractViolation("NormSpec: exponent must satisfy p >= 1");
  }
};

namespace detail {

// p-norm of a raw span with max-scaling against overflow
inline double lp_norm(const double* x, int n, double p, const double* w) {
  if (n == 0) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      double a = std::abs(x[i]);
      if (w) a *= w[i];
      m = std::max(m, a);
    }
    return m;
  }
  if (p == 2.0 && !w) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * x[i];
    return std::sqrt(s);
  }
  if (p == 1.0 && !w) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::abs(x[i]);
    return s;
  }
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = std::abs(x[i]) / m;
    double term = std::pow(a, p);
    if (w) term *= w[i];
    s += term;
  }
  return m * std::pow(s, 1.0 / p);
}

inline double norm_eval_impl(const NormSpec& spec, const double* x, int n) {
  switch (spec.kind) {
    case NormSpec::Kind::P:
      return lp_norm(x, n, spec.p, nullptr);
    case NormSpec::Kind::WeightedP:
      return lp_norm(x, n, spec.p, spec.weights.data());
    case NormSpec::Kind::Nested: {
      constexpr int kMaxBlocks = 64;
      if (spec.inner.size() > kMaxBlocks)
        throw ContractViolation("NormSpec: too many direct-sum blocks");
      double block[kMaxBlocks];
      int offset = 0;
      int k = 0;
      for (const auto& b : spec.inner) {
        block[k++] = norm_eval_impl(b, x + offset, b.dim);
        offset += b.dim;
      }
      return lp_norm(block, k, spec.p, nullptr);
    }
  }
  throw InternalError("NormSpec: bad kind");
}

}  // namespace detail

inline double norm_eval(const NormSpec& spec, const double* x, int n) {
  if (n != spec.dim)
    throw ContractViolation("norm_eval: vector length " + std::to_string(n) +
                            " does not match norm dimension " + std::to_string(spec.dim));
  return detail::norm_eval_impl(spec, x, n);
}

inline double norm_eval(const NormSpec& spec, const Eigen::VectorXd& x) {
  return norm_eval(spec, x.data(), static_cast<int>(x.size()));
}

// --- JSON (de)serialization ------------------------------------------------
// {"kind":"p","p":2.0,"dim":4}
// {"kind":"weighted_p","p":2.0,"weights":[...]}
// {"kind":"nested","outer_p":2.0,"inner":[...]}
// An infinite exponent is written as the string "inf".

inline nlohmann::json norm_to_json(const NormSpec& spec) {
  nlohmann::json j;
  auto exp_json = [](double p) -> nlohmann::json {
    if (std::isinf(p)) return "inf";
    return p;
  };
  switch (spec.kind) {
    case NormSpec::Kind::P:
      j["kind"] = "p";
      j["p"] = exp_json(spec.p);
      j["dim"] = spec.dim;
      break;
    case NormSpec::Kind::WeightedP:
      j["kind"] = "weighted_p";
      j["p"] = exp_json(spec.p);
      j["weights"] = spec.weights;
      break;
    case NormSpec::Kind::Nested:
      j["kind"] = "nested";
      j["outer_p"] = exp_json(spec.p);
      j["inner"] = nlohmann::json::array();
      for (const auto& b : spec.inner) j["inner"].push_back(norm_to_json(b));
      break;
  }
  return j;
}

inline NormSpec norm_from_json(const nlohmann::json& j) {
  auto read_exp = [](const nlohmann::json& v) -> double {
    if (v.is_string()) {
      std::string s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
      throw ContractViolation("NormSpec JSON: bad exponent string '" + s + "'");
    }
    return v.get<double>();
  };
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "p") {
    return NormSpec::lp(read_exp(j.at("p")), j.at("dim").get<int>());
  }
  if (kind == "weighted_p") {
    return NormSpec::weighted_lp(read_exp(j.at("p")), j.at("weights").get<std::vector<double>>());
  }
  if (kind == "nested") {
    std::vector<NormSpec> blocks;
    for (const auto& b : j.at("inner")) blocks.push_back(norm_from_json(b));
    return NormSpec::direct_sum(read_exp(j.at("outer_p")), std::move(blocks));
  }
  throw ContractViolation("NormSpec JSON: unknown kind '" + kind + "'");
}

}  // namespace convexlab
