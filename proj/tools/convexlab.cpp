// Command-line front end: norm/map ingestion, seeded reproducible runs, and
// JSON/CSV report emission. Reports keep certified numbers (theorem-backed,
// conservative) separate from estimated numbers (sampled, with a recorded
// bias direction). Timestamps go to a sidecar file, never into the payload.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "convexlab/convexlab.hpp"

using namespace convexlab;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = kDefaultSeed;
  bool seed_set = false;
  int threads = 1;
  std::string out;  // empty = stdout
  std::string csv;
};

std::uint64_t resolve_seed(const GlobalOptions& g) {
  if (g.seed_set) return g.seed;
  if (const char* env = std::getenv("CONVEXLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ContractViolation("CONVEXLAB_SEED must be an unsigned integer");
    }
  }
  return kDefaultSeed;
}

Eigen::VectorXd parse_vector(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    vals.push_back(std::stod(tok));
  }
  if (vals.empty()) throw ContractViolation("empty vector argument");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// "0.1:0.1:1.9" (start:step:end) or a comma list "0.5,1.0,1.5"
std::vector<double> parse_grid(const std::string& s) {
  if (s.find(':') != std::string::npos) {
    double a, h, b;
    char c1, c2;
    std::stringstream ss(s);
    if (!(ss >> a >> c1 >> h >> c2 >> b) || c1 != ':' || c2 != ':')
      throw ContractViolation("grid must look like start:step:end");
    std::vector<double> g;
    for (double t = a; t <= b + 1e-12; t += h) g.push_back(t);
    return g;
  }
  Eigen::VectorXd v = parse_vector(s);
  return std::vector<double>(v.data(), v.data() + v.size());
}

json load_json_arg(const std::string& s) {
  if (!s.empty() && s[0] == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw ContractViolation("cannot open file '" + s.substr(1) + "'");
    return json::parse(in);
  }
  return json::parse(s);
}

NormSpec parse_norm(const std::string& s, int default_dim) {
  if (s.empty()) return NormSpec::euclidean(default_dim);
  return norm_from_json(load_json_arg(s));
}

double parse_param(const std::string& params, const std::string& key, double fallback,
                   bool* found = nullptr) {
  std::stringstream ss(params);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    if (tok.substr(0, eq) == key) {
      if (found) *found = true;
      return std::stod(tok.substr(eq + 1));
    }
  }
  if (found) *found = false;
  return fallback;
}

// "shear:k=1", "identity:n=2", "cubic1d", "quad1d", "affine:d=2,0.5" (diagonal),
// or "@config.json" for a polynomial map
SmoothMap parse_map(const std::string& s) {
  if (!s.empty() && s[0] == '@') return polynomial_map(load_json_arg(s));
  std::string name = s, params;
  if (auto colon = s.find(':'); colon != std::string::npos) {
    name = s.substr(0, colon);
    params = s.substr(colon + 1);
  }
  if (name == "identity") {
    return identity_map(static_cast<int>(parse_param(params, "n", 2)));
  }
  if (name == "shear") {
    return shear_map(parse_param(params, "k", 1.0));
  }
  if (name == "cubic1d") return cubic1d_map();
  if (name == "quad1d") return quad1d_map();
  if (name == "affine") {
    // diagonal affine map: "affine:d=2,0.5"
    auto eq = params.find('=');
    if (eq == std::string::npos || params.substr(0, eq) != "d")
      throw ContractViolation("affine map expects d=<diag entries>");
    Eigen::VectorXd diag = parse_vector(params.substr(eq + 1));
    Eigen::MatrixXd A = diag.asDiagonal();
    return affine_map(A, Eigen::VectorXd::Zero(diag.size()));
  }
  throw ContractViolation("unknown map '" + name + "' (try identity, shear, cubic1d, quad1d, affine, @file)");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ContractViolation("cannot write '" + path + "'");
  out << text;
}

// Payload stays timestamp-free so identical runs are byte-identical; the
// sidecar carries the wall clock.
void emit(const GlobalOptions& g, const json& payload) {
  std::string text = payload.dump(2);
  text += '\n';
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  write_text(g.out, text);
  auto now = std::chrono::system_clock::now().time_since_epoch();
  json sidecar = {{"written_unix_ms",
                   std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
  write_text(g.out + ".meta.json", sidecar.dump(2) + "\n");
}

json lipschitz_to_json(const LipschitzEstimate& e) {
  json j = {{"value", e.value}, {"beta", e.beta}, {"inflated", e.inflated}};
  if (e.witness.x.size()) {
    j["witness"] = {{"x", vector_to_json(e.witness.x)}, {"y", vector_to_json(e.witness.y)}};
  }
  return j;
}

json hull_to_json(const HullCompareResult& h) {
  return {{"hull_area", h.hull_area}, {"image_area", h.image_area}, {"relative_gap", h.relative_gap}};
}

int run_modulus(const GlobalOptions& g, const std::string& norm_arg, const std::string& grid_arg,
                int sections, int angles, bool ball_form, double power) {
  NormSpec norm = parse_norm(norm_arg, 2);
  std::vector<double> grid = grid_arg.empty() ? default_t_grid() : parse_grid(grid_arg);
  SectionBudget budget;
  budget.random_sections = sections;
  budget.angle_grid = angles;
  budget.seed = resolve_seed(g);
  budget.threads = g.threads;
  ModulusEstimate est = ball_form ? modulus_convexity_estimate_ball(norm, grid, budget)
                                  : modulus_convexity_estimate(norm, grid, budget);
  json j;
  j["schema_version"] = 1;
  j["norm"] = norm_to_json(norm);
  j["form"] = est.form;
  j["seed"] = budget.seed;
  j["t"] = est.t_grid;
  j["delta_hat"] = est.delta_hat;
  j["bias_direction"] = "upper";
  j["monotone_regularized"] = est.monotone_regularized;
  j["pair_budget"] = est.pair_budget;
  if (power > 0.0) {
    PowerTypeFit fit = power_type_constant(est, power);
    j["power_type"] = {{"p", power}, {"C", fit.C}, {"power_type", fit.power_type},
                       {"argmin_t", fit.argmin_t}};
  }
  if (!g.csv.empty()) write_text(g.csv, modulus_to_csv(est));
  emit(g, j);
  return 0;
}

Region make_region(const SmoothMap& m, const std::string& center_arg, double radius,
                   const std::string& box_lo, const std::string& box_hi) {
  if (!box_lo.empty() || !box_hi.empty()) {
    if (box_lo.empty() || box_hi.empty())
      throw ContractViolation("both --box-lo and --box-hi are required for a box region");
    return Region::box(parse_vector(box_lo), parse_vector(box_hi));
  }
  Eigen::VectorXd c =
      center_arg.empty() ? Eigen::VectorXd::Zero(m.dim_in()) : parse_vector(center_arg);
  return Region::ball(c, radius);
}

int run_smoothness(const GlobalOptions& g, const std::string& map_arg, int order,
                   const std::string& grid_arg, const std::string& center_arg, double radius,
                   const std::string& box_lo, const std::string& box_hi, int samples) {
  SmoothMap m = parse_map(map_arg);
  Region region = make_region(m, center_arg, radius, box_lo, box_hi);
  std::vector<double> grid = grid_arg.empty()
                                 ? std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.4, 0.5}
                                 : parse_grid(grid_arg);
  SmoothnessBudget budget;
  budget.samples = samples;
  budget.seed = resolve_seed(g);
  SmoothnessProfile prof = modulus_smoothness(m, order, grid, region, budget);
  PairBudget pb;
  pb.seed = budget.seed;
  LipschitzEstimate lip = lipschitz_estimate(m, region, pb);
  LipschitzEstimate dlip = derivative_lipschitz_estimate(m, region, pb);
  json j;
  j["schema_version"] = 1;
  j["map"] = m.name();
  j["order"] = order;
  j["seed"] = budget.seed;
  j["t"] = prof.t_grid;
  json omega = json::array();
  for (size_t k = 0; k < prof.omega_hat.size(); ++k) {
    if (prof.missing[k]) omega.push_back(nullptr);
    else omega.push_back(prof.omega_hat[k]);
  }
  j["omega_hat"] = omega;
  j["bias_direction"] = "lower";
  j["fitted_constant"] = prof.fitted_constant;
  j["lipschitz"] = lipschitz_to_json(lip);
  j["derivative_lipschitz"] = lipschitz_to_json(dlip);
  if (!g.csv.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "t,omega_hat,n\n";
    for (size_t k = 0; k < prof.t_grid.size(); ++k) {
      os << prof.t_grid[k] << ',';
      if (!prof.missing[k]) os << prof.omega_hat[k];
      os << ',' << order << '\n';
    }
    write_text(g.csv, os.str());
  }
  emit(g, j);
  return 0;
}

int run_certify(const GlobalOptions& g, const std::string& map_arg, const std::string& center_arg,
                double r, const std::string& mode_arg, const std::string& norm_arg, double eta,
                double beta, bool estimated) {
  SmoothMap m = parse_map(map_arg);
  Eigen::VectorXd a =
      center_arg.empty() ? Eigen::VectorXd::Zero(m.dim_in()) : parse_vector(center_arg);
  NormSpec norm = parse_norm(norm_arg, m.dim_out());
  CertifyMode mode = mode_arg == "banach" ? CertifyMode::Banach : CertifyMode::Hilbert;
  CertifyOptions opt;
  opt.eta = eta;
  opt.beta = beta;
  opt.prefer_closed_forms = !estimated;
  opt.seed = resolve_seed(g);
  Certificate cert = certify_map(m, a, r, mode, norm, opt);
  emit(g, certificate_to_json(cert));
  return 0;
}

int run_check(const GlobalOptions& g, const std::string& map_arg, const std::string& center_arg,
              double eps, long long pairs, bool hull, int density) {
  SmoothMap m = parse_map(map_arg);
  Eigen::VectorXd a =
      center_arg.empty() ? Eigen::VectorXd::Zero(m.dim_in()) : parse_vector(center_arg);
  MidpointOptions opt;
  opt.threads = g.threads;
  std::uint64_t seed = resolve_seed(g);
  MidpointReport rep = midpoint_convexity_check(m, a, eps, pairs, seed, opt);
  json j = midpoint_report_to_json(rep);
  if (hull) j["hull"] = hull_to_json(hull_compare_2d(m, a, eps, density));
  if (!g.csv.empty()) write_text(g.csv, violations_to_csv(rep));
  emit(g, j);
  return 0;
}

int run_extremal(const GlobalOptions& g, int n, int m, const std::string& variant_arg, bool sweep,
                 const std::string& prune_arg, int n_max) {
  ExtremalVariant variant =
      variant_arg == "lipschitz_only" ? ExtremalVariant::LipschitzOnly : ExtremalVariant::Full;
  PrunePolicy policy = PrunePolicy::None;
  if (prune_arg == "center_half_axis") policy = PrunePolicy::CenterHalfAxis;
  else if (!prune_arg.empty() && prune_arg != "none")
    throw ContractViolation("unknown pruning policy '" + prune_arg + "'");

  std::vector<ExtremalResult> results;
  if (n_max > 0) {
    results = sequence_report(n_max, m, variant);
  } else {
    ExtremalInstance inst = build_extremal_lp(n, m, policy);
    results.push_back(sweep ? solve_extremal_sweep(inst, variant)
                            : solve_extremal_origin(inst, variant));
  }
  std::ostringstream csv;
  csv << extremal_csv_header();
  json rows = json::array();
  for (const auto& r : results) {
    csv << extremal_csv_row(r);
    rows.push_back({{"n", r.n}, {"m", r.m}, {"variant", r.variant},
                    {"objective_node", r.objective_node}, {"epsilon_hat", r.epsilon_hat},
                    {"growth", r.growth}, {"pruned", r.pruned},
                    {"lp_iterations", r.lp_iterations}});
  }
  json j;
  j["schema_version"] = 1;
  j["semantics"] = "upper estimate of the grid optimum; finite-resolution evidence only";
  j["results"] = rows;
  if (!g.csv.empty()) write_text(g.csv, csv.str());
  else std::cout << csv.str();
  emit(g, j);
  return 0;
}

// End-to-end case study: certificates (closed-form and estimated), the
// estimated constants, and the empirical oracles at scales around eps*.
int run_report(const GlobalOptions& g, const std::string& map_arg, const std::string& center_arg,
               double r, long long pairs) {
  SmoothMap m = parse_map(map_arg);
  Eigen::VectorXd a =
      center_arg.empty() ? Eigen::VectorXd::Zero(m.dim_in()) : parse_vector(center_arg);
  NormSpec norm = NormSpec::euclidean(m.dim_out());
  std::uint64_t seed = resolve_seed(g);

  json j;
  j["schema_version"] = 1;
  j["map"] = m.name();
  j["seed"] = seed;

  CertifyOptions closed;
  closed.seed = seed;
  Certificate cert = certify_map(m, a, r, CertifyMode::Hilbert, norm, closed);
  j["certified"]["hilbert_closed_form"] = certificate_to_json(cert);
  CertifyOptions est = closed;
  est.prefer_closed_forms = false;
  Certificate cert_est = certify_map(m, a, r, CertifyMode::Hilbert, norm, est);
  j["certified"]["hilbert_estimated"] = certificate_to_json(cert_est);
  if (m.has_inverse()) {
    j["certified"]["banach_closed_form"] =
        certificate_to_json(certify_map(m, a, r, CertifyMode::Banach, norm, closed));
  }

  Region region = Region::ball(a, r);
  PairBudget pb;
  pb.seed = seed;
  j["estimated"]["lipschitz"] = lipschitz_to_json(lipschitz_estimate(m, region, pb));
  j["estimated"]["derivative_lipschitz"] =
      lipschitz_to_json(derivative_lipschitz_estimate(m, region, pb));
  j["estimated"]["sigma_min"] = sigma_min(m, a);
  if (m.has_inverse())
    j["estimated"]["inverse_lipschitz"] = lipschitz_to_json(inverse_lipschitz_estimate(m, region, pb));

  MidpointOptions mopt;
  mopt.threads = g.threads;
  const double eps_star = cert.epsilon_star;
  for (double factor : {0.5, 1.0, 4.0}) {
    double eps = factor * eps_star;
    if (eps <= 0.0 || eps > r) continue;
    std::string key = "eps_" + std::to_string(factor);
    MidpointReport rep = midpoint_convexity_check(m, a, eps, pairs, seed, mopt);
    json entry;
    entry["eps"] = eps;
    entry["midpoint"] = midpoint_report_to_json(rep);
    if (m.dim_in() == 2 && m.dim_out() == 2)
      entry["hull"] = hull_to_json(hull_compare_2d(m, a, eps));
    j["empirical"][key] = entry;
  }
  emit(g, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convexlab: certified local-convexity radii for smooth maps, with empirical oracles"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "RNG seed (default fixed; CONVEXLAB_SEED overrides)")
      ->each([&g](const std::string&) { g.seed_set = true; });
  app.add_option("--threads", g.threads, "worker threads (results are thread-count independent)");
  app.add_option("--out", g.out, "write the JSON report here instead of stdout");
  app.add_option("--csv", g.csv, "write the CSV artifact here (per subcommand)");

  auto* modulus = app.add_subcommand("modulus", "estimate a norm's modulus of convexity");
  std::string norm_arg, grid_arg;
  int sections = 64, angles = 1024;
  bool ball_form = false;
  double power = 0.0;
  modulus->add_option("--norm", norm_arg, "norm JSON (or @file); default Euclidean dim 2");
  modulus->add_option("--grid", grid_arg, "t grid, start:step:end or comma list");
  modulus->add_option("--sections", sections, "random 2-D sections");
  modulus->add_option("--angles", angles, "angle grid per section");
  modulus->add_flag("--ball-form", ball_form, "inequality-constrained ball form");
  modulus->add_option("--power", power, "also fit the power-type constant for this exponent");

  auto* smoothness = app.add_subcommand("smoothness", "moduli of smoothness and Lipschitz constants");
  std::string map_arg, center_arg, box_lo, box_hi;
  int order = 2, samples = 512;
  double radius = 1.0;
  smoothness->add_option("--map", map_arg)->required();
  smoothness->add_option("--order", order, "difference order, 1 or 2");
  smoothness->add_option("--grid", grid_arg);
  smoothness->add_option("--center", center_arg, "ball region center (comma list)");
  smoothness->add_option("--radius", radius, "ball region radius");
  smoothness->add_option("--box-lo", box_lo, "box region lower corner");
  smoothness->add_option("--box-hi", box_hi, "box region upper corner");
  smoothness->add_option("--samples", samples);

  auto* certify = app.add_subcommand("certify", "compute a certified convexity radius");
  std::string mode_arg = "hilbert", cert_norm;
  double r = 1.0, eta = 1e-6, beta = 0.05;
  bool estimated = false;
  certify->add_option("--map", map_arg)->required();
  certify->add_option("--center", center_arg);
  certify->add_option("--r", r, "input ball radius");
  certify->add_option("--mode", mode_arg)->check(CLI::IsMember({"hilbert", "banach"}));
  certify->add_option("--norm", cert_norm, "target norm JSON (banach mode)");
  certify->add_option("--eta", eta, "strictness margin in (0,1)");
  certify->add_option("--beta", beta, "inflation/deflation factor for sampled constants");
  certify->add_flag("--estimated", estimated, "force sampled constants even when closed forms exist");

  auto* check = app.add_subcommand("check", "midpoint-preimage convexity oracle");
  double eps = 0.1;
  long long pairs = 10000;
  bool hull = false;
  int density = 512;
  check->add_option("--map", map_arg)->required();
  check->add_option("--center", center_arg);
  check->add_option("--eps", eps)->required();
  check->add_option("--pairs", pairs);
  check->add_flag("--hull", hull, "also run the 2-D convex-hull comparison");
  check->add_option("--density", density, "raster grid for the hull comparison");

  auto* extremal = app.add_subcommand("extremal", "grid LP for the sup-norm extremal problem");
  int en = 1, em = 4, n_max = 0;
  std::string variant_arg = "full", prune_arg;
  bool sweep = false;
  extremal->add_option("--n", en)->check(CLI::Range(1, 3));
  extremal->add_option("--m", em, "half-resolution; grid step 1/m");
  extremal->add_option("--variant", variant_arg)->check(CLI::IsMember({"full", "lipschitz_only"}));
  extremal->add_flag("--sweep", sweep, "maximize over every interior objective node");
  extremal->add_option("--prune", prune_arg, "none | center_half_axis");
  extremal->add_option("--n-max", n_max, "emit rows for n = 1..n_max instead of a single n");

  auto* report = app.add_subcommand("report", "bundled end-to-end case study");
  std::string rmap = "shear:k=1";
  double rr = 1.0;
  long long rpairs = 2000;
  report->add_option("--map", rmap);
  report->add_option("--center", center_arg);
  report->add_option("--r", rr);
  report->add_option("--pairs", rpairs);

  CLI11_PARSE(app, argc, argv);

  try {
    if (modulus->parsed())
      return run_modulus(g, norm_arg, grid_arg, sections, angles, ball_form, power);
    if (smoothness->parsed())
      return run_smoothness(g, map_arg, order, grid_arg, center_arg, radius, box_lo, box_hi, samples);
    if (certify->parsed())
      return run_certify(g, map_arg, center_arg, r, mode_arg, cert_norm, eta, beta, estimated);
    if (check->parsed()) return run_check(g, map_arg, center_arg, eps, pairs, hull, density);
    if (extremal->parsed()) return run_extremal(g, en, em, variant_arg, sweep, prune_arg, n_max);
    if (report->parsed()) return run_report(g, rmap, center_arg, rr, rpairs);
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
