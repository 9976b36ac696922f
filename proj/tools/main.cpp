// Command-line front end for the ratesyn shared library. Talks to the C API
// only; all numerics live behind it.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ratesyn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

std::string slurp_if_file(const std::string& arg) {
  if (!arg.empty() && arg[0] == '{') return arg;  // inline JSON
  std::ifstream in(arg);
  if (!in.good()) return arg;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report_error(rs_status status) {
  std::cerr << "error: " << rs_last_error() << "\n";
  if (status == RS_INFEASIBLE) return kExitInfeasible;
  return kExitError;
}

struct OptionsHandle {
  rs_options* ptr = rs_options_new();
  ~OptionsHandle() { rs_options_free(ptr); }
};

// Resolve --alg: a catalog name or (inline / file) algorithm JSON.
rs_status make_algorithm(const std::string& alg, double m, double L, double alpha,
                         double beta, int d, rs_algorithm** out) {
  if (alg == "gradient_descent" || alg == "heavy_ball" || alg == "nesterov" ||
      alg == "triple_momentum")
    return rs_catalog(alg.c_str(), m, L, alpha, beta, d, out);
  const std::string text = slurp_if_file(alg);
  return rs_algorithm_from_json(text.c_str(), out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convergence-rate certification and synthesis for first-order methods"};
  app.require_subcommand(1);

  OptionsHandle options;
  double opt_tol_feas = -1, opt_tol_bisect = -1, opt_max_iter = -1;
  app.add_option("--tol-feas", opt_tol_feas, "feasibility margin threshold");
  app.add_option("--tol-bisect", opt_tol_bisect, "bisection width on rates");
  app.add_option("--max-iterations", opt_max_iter, "interior-point iteration limit");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "certify a convergence rate");
  std::string an_alg;
  double an_m = 1, an_L = 10, an_rho = -1, an_alpha = 0, an_beta = 0;
  int an_ell = 1, an_d = 1;
  std::string an_class = "repeated";
  bool an_bisect = false;
  analyze->add_option("--alg", an_alg, "catalog name or algorithm JSON")->required();
  analyze->add_option("--m", an_m);
  analyze->add_option("--L", an_L);
  analyze->add_option("--rho", an_rho);
  analyze->add_option("--alpha", an_alpha);
  analyze->add_option("--beta", an_beta);
  analyze->add_option("--ell", an_ell);
  analyze->add_option("--d", an_d);
  analyze->add_option("--class", an_class)->check(CLI::IsMember({"repeated", "full"}));
  analyze->add_flag("--bisect", an_bisect, "search for the smallest certified rate");

  // synthesize
  auto* synth = app.add_subcommand("synthesize", "design an algorithm");
  double sy_m = 1, sy_L = 10, sy_rho = -1;
  int sy_ell = 1, sy_d = 1;
  std::string sy_class = "repeated";
  bool sy_optimal = false;
  synth->add_option("--m", sy_m);
  synth->add_option("--L", sy_L);
  synth->add_option("--rho", sy_rho);
  synth->add_flag("--optimal", sy_optimal, "design slightly above the optimal rate");
  synth->add_option("--ell", sy_ell);
  synth->add_option("--d", sy_d);
  synth->add_option("--class", sy_class)->check(CLI::IsMember({"repeated", "full"}));

  // rate
  auto* rate = app.add_subcommand("rate", "closed-form optimal design rate");
  double ra_m = 1, ra_L = 10;
  int ra_ell = 1;
  rate->add_option("--m", ra_m);
  rate->add_option("--L", ra_L);
  rate->add_option("--ell", ra_ell);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "rate sweep over an example family (CSV)");
  std::string sw_example = "delay", sw_params, sw_nu, sw_p, sw_kappa = "10,100",
              sw_ell = "1";
  sweep->add_option("--example", sw_example);
  sweep->add_option("--param", sw_params, "comma-separated family parameters");
  sweep->add_option("--nu", sw_nu, "alias of --param for the delay family");
  sweep->add_option("--p", sw_p, "alias of --param for the pole family");
  sweep->add_option("--kappa", sw_kappa);
  sweep->add_option("--ell", sw_ell);

  // extremum
  auto* extr = app.add_subcommand("extremum", "extremum-control synthesis");
  std::string ex_plant;
  double ex_m = 1, ex_L = 10, ex_rho = -1;
  int ex_ell = 1;
  bool ex_bisect = false;
  extr->add_option("--plant", ex_plant, "named:<family:param> or plant JSON")->required();
  extr->add_option("--m", ex_m);
  extr->add_option("--L", ex_L);
  extr->add_option("--rho", ex_rho);
  extr->add_option("--ell", ex_ell);
  extr->add_flag("--bisect", ex_bisect);

  // simulate
  auto* simc = app.add_subcommand("simulate", "Monte-Carlo rate estimation");
  std::string si_alg, si_objective = "quadratic";
  double si_m = 1, si_L = -1, si_kappa = -1, si_alpha = 0, si_beta = 0;
  int si_d = 1, si_seeds = 100, si_horizon = 500;
  unsigned si_seed = 1234;
  simc->add_option("--alg", si_alg)->required();
  simc->add_option("--objective", si_objective)->check(CLI::IsMember({"quadratic"}));
  simc->add_option("--m", si_m);
  simc->add_option("--L", si_L);
  simc->add_option("--kappa", si_kappa);
  simc->add_option("--alpha", si_alpha);
  simc->add_option("--beta", si_beta);
  simc->add_option("--d", si_d);
  simc->add_option("--seeds", si_seeds);
  simc->add_option("--horizon", si_horizon);
  simc->add_option("--seed", si_seed);

  // dump-lmi
  auto* dump = app.add_subcommand("dump-lmi", "dump the certification LMI as JSON");
  std::string du_alg;
  double du_m = 1, du_L = 10, du_rho = 0.9, du_alpha = 0, du_beta = 0;
  int du_ell = 1, du_d = 1;
  std::string du_class = "repeated";
  dump->add_option("--alg", du_alg)->required();
  dump->add_option("--m", du_m);
  dump->add_option("--L", du_L);
  dump->add_option("--rho", du_rho);
  dump->add_option("--alpha", du_alpha);
  dump->add_option("--beta", du_beta);
  dump->add_option("--ell", du_ell);
  dump->add_option("--d", du_d);
  dump->add_option("--class", du_class)->check(CLI::IsMember({"repeated", "full"}));

  CLI11_PARSE(app, argc, argv);

  if (opt_tol_feas > 0) rs_options_set(options.ptr, "tol_feas", opt_tol_feas);
  if (opt_tol_bisect > 0) rs_options_set(options.ptr, "tol_bisect", opt_tol_bisect);
  if (opt_max_iter > 0) rs_options_set(options.ptr, "max_iterations", opt_max_iter);

  if (analyze->parsed()) {
    rs_algorithm* alg = nullptr;
    rs_status st = make_algorithm(an_alg, an_m, an_L, an_alpha, an_beta, an_d, &alg);
    if (st != RS_OK) return report_error(st);
    const int full = an_class == "full" ? 1 : 0;
    if (an_bisect) {
      double rho_star = 0;
      rs_certificate* cert = nullptr;
      st = rs_bisect_rate(alg, an_m, an_L, an_ell, full, options.ptr, &rho_star, &cert);
      if (st != RS_OK) {
        rs_algorithm_free(alg);
        return report_error(st);
      }
      char* cert_json = nullptr;
      rs_certificate_to_json(cert, &cert_json);
      std::cout << "{\"rho_star\": " << rho_star << ", \"certificate\": " << cert_json
                << "}\n";
      rs_string_free(cert_json);
      rs_certificate_free(cert);
      rs_algorithm_free(alg);
      return kExitOk;
    }
    if (an_rho <= 0) {
      std::cerr << "error: --rho required without --bisect\n";
      rs_algorithm_free(alg);
      return kExitError;
    }
    rs_certificate* cert = nullptr;
    st = rs_certify(alg, an_m, an_L, an_rho, an_ell, full, options.ptr, &cert);
    if (st != RS_OK) {
      rs_algorithm_free(alg);
      return report_error(st);
    }
    char* cert_json = nullptr;
    rs_certificate_to_json(cert, &cert_json);
    std::cout << cert_json << "\n";
    rs_string_free(cert_json);
    rs_certificate_free(cert);
    rs_algorithm_free(alg);
    return kExitOk;
  }

  if (synth->parsed()) {
    const int full = sy_class == "full" ? 1 : 0;
    double rho = sy_rho;
    if (sy_optimal || rho <= 0) {
      double opt = 0;
      rs_status st = rs_optimal_rate(sy_m, sy_L, sy_ell, &opt);
      if (st != RS_OK) return report_error(st);
      rho = opt + 0.01;
    }
    rs_algorithm* alg = nullptr;
    rs_certificate* cert = nullptr;
    rs_status st = rs_synthesize(sy_m, sy_L, rho, sy_ell, full, sy_d, options.ptr, &alg, &cert);
    if (st != RS_OK) return report_error(st);
    char* alg_json = nullptr;
    char* cert_json = nullptr;
    rs_algorithm_to_json(alg, &alg_json);
    rs_certificate_to_json(cert, &cert_json);
    std::cout << "{\"algorithm\": " << alg_json << ", \"certificate\": " << cert_json
              << "}\n";
    rs_string_free(alg_json);
    rs_string_free(cert_json);
    rs_algorithm_free(alg);
    rs_certificate_free(cert);
    return kExitOk;
  }

  if (rate->parsed()) {
    double rho = 0;
    rs_status st = rs_optimal_rate(ra_m, ra_L, ra_ell, &rho);
    if (st != RS_OK) return report_error(st);
    std::cout << rho << "\n";
    return kExitOk;
  }

  if (sweep->parsed()) {
    std::string params = !sw_params.empty() ? sw_params : !sw_nu.empty() ? sw_nu : sw_p;
    if (params.empty()) params = sw_example == "delay" ? "0,1,2" : "0.2,0.8,1.1";
    char* csv = nullptr;
    rs_status st = rs_sweep_csv(sw_example.c_str(), params.c_str(), sw_kappa.c_str(),
                                sw_ell.c_str(), options.ptr, &csv);
    if (st != RS_OK) return report_error(st);
    std::cout << csv;
    rs_string_free(csv);
    return kExitOk;
  }

  if (extr->parsed()) {
    const std::string text = slurp_if_file(ex_plant);
    const double rho = ex_bisect ? -1.0 : ex_rho;
    char* out = nullptr;
    rs_status st = rs_extremum(text.c_str(), ex_m, ex_L, rho, ex_ell, options.ptr, &out);
    if (st != RS_OK) return report_error(st);
    std::string result(out);
    rs_string_free(out);
    std::cout << result << "\n";
    if (!ex_bisect && result.find("\"status\":\"infeasible") != std::string::npos)
      return kExitInfeasible;
    return kExitOk;
  }

  if (simc->parsed()) {
    double L = si_L;
    if (L <= 0) L = si_kappa > 1 ? si_m * si_kappa : 10.0;
    rs_algorithm* alg = nullptr;
    rs_status st = make_algorithm(si_alg, si_m, L, si_alpha, si_beta, si_d, &alg);
    if (st != RS_OK) return report_error(st);
    char* out = nullptr;
    st = rs_simulate(alg, si_m, L, si_seeds, si_horizon, si_seed, options.ptr, &out);
    rs_algorithm_free(alg);
    if (st != RS_OK) return report_error(st);
    std::cout << out << "\n";
    rs_string_free(out);
    return kExitOk;
  }

  if (dump->parsed()) {
    rs_algorithm* alg = nullptr;
    rs_status st = make_algorithm(du_alg, du_m, du_L, du_alpha, du_beta, du_d, &alg);
    if (st != RS_OK) return report_error(st);
    char* out = nullptr;
    st = rs_dump_lmi(alg, du_m, du_L, du_rho, du_ell, du_class == "full" ? 1 : 0,
                     options.ptr, &out);
    rs_algorithm_free(alg);
    if (st != RS_OK) return report_error(st);
    std::cout << out << "\n";
    rs_string_free(out);
    return kExitOk;
  }

  return kExitError;
}
