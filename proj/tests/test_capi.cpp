// Exercises the shared-library surface the way an external consumer would:
// opaque handles, status codes, and JSON payloads only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "ratesyn.h"

namespace {

struct StringOut {
  char* ptr = nullptr;
  ~StringOut() { rs_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

}  // namespace

TEST_CASE("version and option plumbing") {
  CHECK(rs_version() != nullptr);
  rs_options* opts = rs_options_new();
  CHECK(rs_options_set(opts, "tol_bisect", 1e-3) == RS_OK);
  CHECK(rs_options_set(opts, "bogus_key", 1.0) == RS_ERR_INVALID_ARGUMENT);
  CHECK(std::string(rs_last_error()).find("bogus_key") != std::string::npos);
  rs_options_free(opts);
}

TEST_CASE("closed-form rates") {
  double rho = 0.0;
  REQUIRE(rs_optimal_rate(1.0, 100.0, 1, &rho) == RS_OK);
  CHECK(rho == doctest::Approx(0.9));
  REQUIRE(rs_optimal_rate(1.0, 100.0, 0, &rho) == RS_OK);
  CHECK(rho == doctest::Approx(99.0 / 101.0));
  CHECK(rs_optimal_rate(1.0, 0.5, 1, &rho) == RS_ERR_INVALID_ARGUMENT);
}

TEST_CASE("catalog, certification, and bisection through handles") {
  rs_algorithm* gd = nullptr;
  REQUIRE(rs_catalog("gradient_descent", 1.0, 4.0, 2.0 / 5.0, 0.0, 1, &gd) == RS_OK);
  int states = 0, d = 0;
  REQUIRE(rs_algorithm_dims(gd, &states, &d) == RS_OK);
  CHECK(states == 1);
  CHECK(d == 1);

  rs_certificate* cert = nullptr;
  CHECK(rs_certify(gd, 1.0, 4.0, 0.6 + 1e-3, 0, 0, nullptr, &cert) == RS_OK);
  CHECK(rs_certificate_rho(cert) == doctest::Approx(0.6 + 1e-3));
  StringOut cert_json;
  CHECK(rs_certificate_to_json(cert, &cert_json.ptr) == RS_OK);
  CHECK(cert_json.str().find("\"rho\"") != std::string::npos);
  rs_certificate_free(cert);

  CHECK(rs_certify(gd, 1.0, 4.0, 0.6 - 1e-3, 0, 0, nullptr, nullptr) == RS_INFEASIBLE);

  double rho_star = 0.0;
  rs_certificate* best = nullptr;
  REQUIRE(rs_bisect_rate(gd, 1.0, 4.0, 0, 0, nullptr, &rho_star, &best) == RS_OK);
  CHECK(rho_star == doctest::Approx(0.6).epsilon(4e-4));
  rs_certificate_free(best);
  rs_algorithm_free(gd);
}

TEST_CASE("structure check rejects loops without the integrator") {
  rs_system* sys = nullptr;
  REQUIRE(rs_system_from_json(
              "{\"a\": [[0.5]], \"b\": [[1.0]], \"c\": [[1.0]], \"d\": [[0.0]]}",
              &sys) == RS_OK);
  rs_algorithm* alg = nullptr;
  CHECK(rs_structure_check(sys, &alg) == RS_INFEASIBLE);
  rs_system_free(sys);
}

TEST_CASE("synthesis, simulation, and dumps") {
  const double kappa = 10.0;
  const double rho = 1.0 - 1.0 / std::sqrt(kappa) + 0.01;
  rs_algorithm* alg = nullptr;
  rs_certificate* cert = nullptr;
  REQUIRE(rs_synthesize(1.0, kappa, rho, 1, 0, 1, nullptr, &alg, &cert) == RS_OK);
  CHECK(rs_certificate_rho(cert) == doctest::Approx(rho));

  StringOut alg_json;
  REQUIRE(rs_algorithm_to_json(alg, &alg_json.ptr) == RS_OK);
  rs_algorithm* parsed = nullptr;
  REQUIRE(rs_algorithm_from_json(alg_json.ptr, &parsed) == RS_OK);

  StringOut sim_json;
  REQUIRE(rs_simulate(parsed, 1.0, kappa, 30, 400, 7, nullptr, &sim_json.ptr) == RS_OK);
  CHECK(sim_json.str().find("rho_hat_max") != std::string::npos);

  StringOut dump;
  REQUIRE(rs_dump_lmi(alg, 1.0, kappa, rho, 1, 0, nullptr, &dump.ptr) == RS_OK);
  CHECK(dump.str().find("psd_blocks") != std::string::npos);

  rs_algorithm_free(parsed);
  rs_algorithm_free(alg);
  rs_certificate_free(cert);

  // Below the optimal rate the request reports infeasible.
  rs_algorithm* none = nullptr;
  CHECK(rs_synthesize(1.0, kappa, 1.0 - 1.0 / std::sqrt(kappa) - 0.05, 1, 0, 1, nullptr,
                      &none, nullptr) == RS_INFEASIBLE);
}

TEST_CASE("extremum cell and sweep CSV") {
  rs_options* opts = rs_options_new();
  rs_options_set(opts, "tol_bisect", 2e-3);

  StringOut row;
  REQUIRE(rs_extremum("delay:0", 1.0, 10.0, 0.75, 1, opts, &row.ptr) == RS_OK);
  CHECK(row.str().find("\"status\"") != std::string::npos);
  CHECK(row.str().find("feasible") != std::string::npos);

  StringOut csv;
  REQUIRE(rs_sweep_csv("delay", "0", "10", "1", opts, &csv.ptr) == RS_OK);
  const std::string text = csv.str();
  CHECK(text.rfind("example,param,kappa,ell,rho_star,status,margin\n", 0) == 0);
  CHECK(text.find("delay,0,10,1,") != std::string::npos);
  rs_options_free(opts);
}

TEST_CASE("JSON errors surface as status codes") {
  rs_system* sys = nullptr;
  CHECK(rs_system_from_json("not json", &sys) == RS_ERR_JSON);
  CHECK(std::strlen(rs_last_error()) > 0);
}
