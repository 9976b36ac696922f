#include "ratesyn.h"
#include <algorithm>

#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ratesyn/analysis.hpp"
#include "ratesyn/extremum.hpp"
#include "ratesyn/json_io.hpp"
#include "ratesyn/simulate.hpp"
#include "ratesyn/synthesis.hpp"

using namespace ratesyn;

struct rs_system {
  StateSpace value;
};
struct rs_algorithm {
  AlgorithmRealization value;
};
struct rs_certificate {
  RateCertificate value;
};
struct rs_options {
  Config value;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rs_status fail(rs_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <typename Fn>
rs_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(RS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(RS_ERR_JSON, e.what());
  } catch (const std::exception& e) {
    return fail(RS_ERR_INTERNAL, e.what());
  }
}

Config options_or_default(const rs_options* opts) {
  return opts ? opts->value : Config{};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

nlohmann::json row_to_json(const extremum::SweepRow& row) {
  nlohmann::json j;
  j["example"] = row.example;
  j["param"] = row.param;
  j["kappa"] = row.kappa;
  j["ell"] = row.ell;
  j["rho_star"] = row.rho_star;
  j["status"] = row.status;
  j["margin"] = row.margin;
  return j;
}

}  // namespace

extern "C" {

const char* rs_version(void) { return "0.1.0"; }

const char* rs_last_error(void) { return g_last_error.c_str(); }

void rs_string_free(char* s) { std::free(s); }

rs_options* rs_options_new(void) { return new rs_options(); }

void rs_options_free(rs_options* opts) { delete opts; }

rs_status rs_options_set(rs_options* opts, const char* key, double value) {
  if (!opts || !key) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  const std::string k(key);
  Config& c = opts->value;
  if (k == "tol_feas") c.tol_feas = value;
  else if (k == "tol_bisect") c.tol_bisect = value;
  else if (k == "tol_schur") c.tol_schur = value;
  else if (k == "rank_rtol") c.rank_rtol = value;
  else if (k == "var_bound") c.var_bound = value;
  else if (k == "margin_cap") c.margin_cap = value;
  else if (k == "max_iterations") c.max_iterations = static_cast<int>(value);
  else if (k == "iqc_horizon") c.iqc_horizon = static_cast<int>(value);
  else if (k == "sim_horizon") c.sim_horizon = static_cast<int>(value);
  else return fail(RS_ERR_INVALID_ARGUMENT, "unknown option key: " + k);
  return RS_OK;
}

rs_status rs_system_from_json(const char* json, rs_system** out) {
  if (!json || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new rs_system{io::statespace_from_json(json)};
    return RS_OK;
  });
}

rs_status rs_system_to_json(const rs_system* sys, char** out) {
  if (!sys || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(io::statespace_to_json(sys->value));
    return RS_OK;
  });
}

void rs_system_free(rs_system* sys) { delete sys; }

rs_status rs_algorithm_from_json(const char* json, rs_algorithm** out) {
  if (!json || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new rs_algorithm{io::algorithm_from_json(json)};
    return RS_OK;
  });
}

rs_status rs_algorithm_to_json(const rs_algorithm* alg, char** out) {
  if (!alg || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(io::algorithm_to_json(alg->value));
    return RS_OK;
  });
}

void rs_algorithm_free(rs_algorithm* alg) { delete alg; }

rs_status rs_algorithm_dims(const rs_algorithm* alg, int* states, int* d) {
  if (!alg) return fail(RS_ERR_INVALID_ARGUMENT, "null algorithm");
  if (states) *states = alg->value.states();
  if (d) *d = alg->value.d;
  return RS_OK;
}

rs_status rs_catalog(const char* name, double m, double L, double alpha, double beta,
                     int d, rs_algorithm** out) {
  if (!name || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string n(name);
    AlgorithmRealization alg;
    if (n == "gradient_descent")
      alg = analysis::gradient_descent(alpha, L, d);
    else if (n == "heavy_ball")
      alg = analysis::heavy_ball(alpha, beta, L, d);
    else if (n == "nesterov")
      alg = analysis::nesterov(alpha, beta, L, d);
    else if (n == "triple_momentum")
      alg = analysis::triple_momentum(m, L, d);
    else
      return fail(RS_ERR_INVALID_ARGUMENT, "unknown catalog algorithm: " + n);
    *out = new rs_algorithm{alg};
    return RS_OK;
  });
}

rs_status rs_structure_check(const rs_system* sys, rs_algorithm** out) {
  if (!sys || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    analysis::StructureReport rep = analysis::structure_check(sys->value);
    if (!rep.ok) return fail(RS_INFEASIBLE, rep.reason);
    *out = new rs_algorithm{rep.value};
    return RS_OK;
  });
}

rs_status rs_certificate_to_json(const rs_certificate* cert, char** out) {
  if (!cert || !out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(io::certificate_to_json(cert->value));
    return RS_OK;
  });
}

double rs_certificate_rho(const rs_certificate* cert) {
  return cert ? cert->value.rho : -1.0;
}

void rs_certificate_free(rs_certificate* cert) { delete cert; }

rs_status rs_optimal_rate(double m, double L, int ell, double* rho_out) {
  if (!rho_out) return fail(RS_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.validate();
    *rho_out = synthesis::optimal_rate(fc, ell);
    return RS_OK;
  });
}

rs_status rs_certify(const rs_algorithm* alg, double m, double L, double rho, int ell,
                     int full_class, const rs_options* opts, rs_certificate** cert_out) {
  if (!alg) return fail(RS_ERR_INVALID_ARGUMENT, "null algorithm");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.d = alg->value.d;
    const MultiplierClass cls = full_class ? MultiplierClass::Full : MultiplierClass::Repeated;
    analysis::CertifyResult res =
        analysis::certify(alg->value, fc, rho, ell, cls, options_or_default(opts));
    if (res.status == lmi::SdpSolution::Status::Inconclusive)
      return fail(RS_INCONCLUSIVE, res.reason.empty() ? "solver inconclusive" : res.reason);
    if (!res.feasible()) return fail(RS_INFEASIBLE, res.reason);
    if (cert_out) *cert_out = new rs_certificate{*res.certificate};
    return RS_OK;
  });
}

rs_status rs_bisect_rate(const rs_algorithm* alg, double m, double L, int ell,
                         int full_class, const rs_options* opts, double* rho_out,
                         rs_certificate** cert_out) {
  if (!alg || !rho_out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.d = alg->value.d;
    const MultiplierClass cls = full_class ? MultiplierClass::Full : MultiplierClass::Repeated;
    analysis::BisectResult res =
        analysis::bisect_rate(alg->value, fc, ell, cls, options_or_default(opts));
    if (!res.ok) return fail(RS_INFEASIBLE, res.reason);
    *rho_out = res.rho_star;
    if (cert_out && res.certificate) *cert_out = new rs_certificate{*res.certificate};
    return RS_OK;
  });
}

rs_status rs_design_rate(double m, double L, int ell, int full_class,
                         const rs_options* opts, double* rho_out) {
  if (!rho_out) return fail(RS_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.validate();
    const MultiplierClass cls = full_class ? MultiplierClass::Full : MultiplierClass::Repeated;
    synthesis::RateSearchResult res =
        synthesis::bisect_design_rate(fc, ell, cls, options_or_default(opts));
    if (!res.ok) return fail(RS_INFEASIBLE, res.reason);
    *rho_out = res.rho_star;
    return RS_OK;
  });
}

rs_status rs_synthesize(double m, double L, double rho, int ell, int full_class, int d,
                        const rs_options* opts, rs_algorithm** alg_out,
                        rs_certificate** cert_out) {
  if (!alg_out) return fail(RS_ERR_INVALID_ARGUMENT, "null output");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.d = d;
    const MultiplierClass cls = full_class ? MultiplierClass::Full : MultiplierClass::Repeated;
    const Config cfg = options_or_default(opts);
    synthesis::FeasibilityResult feas = synthesis::synthesis_feasible(fc, rho, ell, cls, cfg);
    if (feas.status == lmi::SdpSolution::Status::Inconclusive)
      return fail(RS_INCONCLUSIVE, feas.reason.empty() ? "solver inconclusive" : feas.reason);
    if (!feas.feasible()) return fail(RS_INFEASIBLE, "design LMI infeasible at this rate");
    synthesis::SynthesisOutput out = synthesis::synthesize(fc, rho, ell, cls, cfg);
    *alg_out = new rs_algorithm{out.algorithm};
    if (cert_out) *cert_out = new rs_certificate{out.certificate};
    return RS_OK;
  });
}

rs_status rs_simulate(const rs_algorithm* alg, double m, double L, int seeds, int horizon,
                      unsigned base_seed, const rs_options* opts, char** json_out) {
  if (!alg || !json_out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.d = alg->value.d;
    sim::MonteCarloResult res = sim::monte_carlo_rate(alg->value, fc, seeds, horizon,
                                                      options_or_default(opts), base_seed);
    nlohmann::json j;
    j["rho_hat_max"] = res.rho_max;
    j["rho_hat_med"] = res.rho_median;
    j["divergences"] = res.divergences;
    *json_out = dup_string(j.dump());
    return RS_OK;
  });
}

rs_status rs_extremum(const char* plant_spec, double m, double L, double rho, int ell,
                      const rs_options* opts, char** json_out) {
  if (!plant_spec || !json_out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const Config cfg = options_or_default(opts);
    std::string spec(plant_spec);
    if (spec.rfind("named:", 0) == 0) spec = spec.substr(6);
    FunctionClass fc;
    fc.m = m;
    fc.L = L;

    auto named = [&](const std::string& name, double param) {
      if (rho > 0.0) {
        extremum::ExtremumSynthesisResult r;
        if (name == "mimo_sex3") {
          FunctionClass fc2 = fc;
          fc2.d = 2;
          r = extremum::extremum_synthesis_plant(
              extremum::weighted_plant(
                  extremum::build_output_opt_plant(extremum::example_mimo_sex3()), fc2, rho),
              fc2, rho, ell, cfg);
        } else {
          extremum::ExtremumPlant ep = name == "delay"
                                           ? extremum::example_delay(static_cast<int>(param))
                                           : extremum::example_pole_family(param);
          r = extremum::extremum_synthesis(ep, fc, rho, ell, cfg);
        }
        extremum::SweepRow row;
        row.example = name;
        row.param = param;
        row.kappa = fc.kappa();
        row.ell = ell;
        row.rho_star = rho;
        row.margin = r.margin;
        row.status = r.feasible() ? "feasible"
                     : r.status == lmi::SdpSolution::Status::Infeasible ? "infeasible"
                                                                        : "inconclusive";
        if (!r.reason.empty()) row.status += " (" + r.reason + ")";
        *json_out = dup_string(row_to_json(row).dump());
        return RS_OK;
      }
      extremum::SweepRow row = extremum::bisect_extremum_rate(name, param, fc, ell, cfg);
      *json_out = dup_string(row_to_json(row).dump());
      return RS_OK;
    };

    if (spec.rfind("delay:", 0) == 0) return named("delay", std::stod(spec.substr(6)));
    if (spec.rfind("pole_family:", 0) == 0)
      return named("pole_family", std::stod(spec.substr(12)));
    if (spec == "mimo_sex3") return named("mimo_sex3", 0.0);

    // JSON plant {"g1": ..., "g2": optional}
    nlohmann::json j = nlohmann::json::parse(spec);
    StateSpace g1 = io::statespace_from_json(j.at("g1").dump());
    std::optional<StateSpace> g2;
    if (j.contains("g2")) g2 = io::statespace_from_json(j.at("g2").dump());
    extremum::ExtremumPlant ep = extremum::ExtremumPlant::from_systems(g1, g2);

    extremum::SweepRow row;
    row.example = "custom";
    row.kappa = fc.kappa();
    row.ell = ell;
    if (rho > 0.0) {
      extremum::ExtremumSynthesisResult r = extremum::extremum_synthesis(ep, fc, rho, ell, cfg);
      row.rho_star = rho;
      row.margin = r.margin;
      row.status = r.feasible() ? "feasible"
                 : r.status == lmi::SdpSolution::Status::Infeasible ? "infeasible"
                                                                    : "inconclusive";
      if (!r.reason.empty()) row.status += " (" + r.reason + ")";
    } else {
      auto feasible_at = [&](double r) {
        return r >= 1.0 || extremum::extremum_synthesis(ep, fc, r, ell, cfg).feasible();
      };
      double lo = 1e-3, hi = 1.1;
      if (feasible_at(lo)) {
        row.rho_star = lo;
      } else {
        const double tol = std::max(cfg.tol_bisect, 1e-3);
        while (hi - lo > tol) {
          const double mid = 0.5 * (hi + lo);
          if (feasible_at(mid))
            hi = mid;
          else
            lo = mid;
        }
        row.rho_star = hi;
      }
      row.status = row.rho_star >= 1.0 ? "no_certificate_leq_1" : "ok";
    }
    *json_out = dup_string(row_to_json(row).dump());
    return RS_OK;
  });
}

rs_status rs_sweep_csv(const char* example, const char* params, const char* kappas,
                       const char* ells, const rs_options* opts, char** csv_out) {
  if (!example || !params || !kappas || !ells || !csv_out)
    return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<double> ps = parse_list(params);
    std::vector<double> ks = parse_list(kappas);
    std::vector<int> ls;
    for (double v : parse_list(ells)) ls.push_back(static_cast<int>(v));
    auto rows = extremum::example_harness(example, ps, ks, ls, options_or_default(opts));
    std::ostringstream csv;
    csv << "example,param,kappa,ell,rho_star,status,margin\n";
    for (const auto& row : rows) {
      std::string status = row.status;
      std::replace(status.begin(), status.end(), ',', ';');
      csv << row.example << ',' << row.param << ',' << row.kappa << ',' << row.ell << ','
          << row.rho_star << ',' << status << ',' << row.margin << '\n';
    }
    *csv_out = dup_string(csv.str());
    return RS_OK;
  });
}

rs_status rs_dump_lmi(const rs_algorithm* alg, double m, double L, double rho, int ell,
                      int full_class, const rs_options* opts, char** json_out) {
  if (!alg || !json_out) return fail(RS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    FunctionClass fc;
    fc.m = m;
    fc.L = L;
    fc.d = alg->value.d;
    const MultiplierClass cls = full_class ? MultiplierClass::Full : MultiplierClass::Repeated;
    const Config cfg = options_or_default(opts);
    lmi::LmiProblem problem =
        analysis::assemble_certify_problem(alg->value, fc, rho, ell, cls, cfg);
    *json_out = dup_string(io::lmi_problem_to_json(problem, cfg));
    return RS_OK;
  });
}

}  // extern "C"
