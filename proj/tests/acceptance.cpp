// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "ratesyn/analysis.hpp"
#include "ratesyn/extremum.hpp"
#include "ratesyn/linalg.hpp"
#include "ratesyn/simulate.hpp"
#include "ratesyn/synthesis.hpp"

using namespace ratesyn;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, title,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FunctionClass fc_of(double kappa, int d = 1) {
  FunctionClass fc;
  fc.m = 1.0;
  fc.L = kappa;
  fc.d = d;
  return fc;
}

// 1. Optimal design rate for ell = 1 over the kappa grid, within 1e-3 and
//    under one second per grid point.
void criterion1() {
  const std::vector<double> kappas = {4.0, 10.0, 100.0, 1000.0};
  bool pass = true;
  std::string detail;
  for (double kappa : kappas) {
    auto t0 = std::chrono::steady_clock::now();
    synthesis::RateSearchResult res =
        synthesis::bisect_design_rate(fc_of(kappa), 1, MultiplierClass::Repeated);
    const double elapsed = seconds_since(t0);
    const double expected = 1.0 - 1.0 / std::sqrt(kappa);
    const bool ok = res.ok && std::abs(res.rho_star - expected) <= 1e-3 && elapsed < 1.0;
    if (!ok) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "kappa=%g rho*=%.5f exp=%.5f %.2fs; ", kappa,
                  res.rho_star, expected, elapsed);
    detail += buf;
  }
  report(1, "ell=1 design rate equals 1 - 1/sqrt(kappa)", pass, detail);
}

// 2. Static-multiplier boundary (kappa-1)/(kappa+1) on the same grid.
void criterion2() {
  const std::vector<double> kappas = {4.0, 10.0, 100.0, 1000.0};
  bool pass = true;
  std::string detail;
  for (double kappa : kappas) {
    synthesis::RateSearchResult res =
        synthesis::bisect_design_rate(fc_of(kappa), 0, MultiplierClass::Repeated);
    const double expected = (kappa - 1.0) / (kappa + 1.0);
    const bool ok = res.ok && std::abs(res.rho_star - expected) <= 1e-3;
    if (!ok) pass = false;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "kappa=%g rho*=%.5f exp=%.5f; ", kappa, res.rho_star,
                  expected);
    detail += buf;
  }
  report(2, "ell=0 design rate equals (kappa-1)/(kappa+1)", pass, detail);
}

// 3. Elimination equivalence on 50 random admissible coefficient tuples.
void criterion3() {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int accepted = 0, agreements = 0;
  while (accepted < 50) {
    const double kappa = unif(rng) < 0.5 ? 5.0 : 50.0;
    const int ell = static_cast<int>(unif(rng) * 3.999);
    const double rho = 0.3 + 0.65 * unif(rng);
    FunctionClass fc = fc_of(kappa);

    std::vector<double> lam(ell + 1, 0.0);
    lam[0] = 1.0;
    for (int k = 1; k <= ell; ++k) lam[k] = -rho * unif(rng) / std::max(1, ell);
    ZamesFalbParams params = ZamesFalbParams::repeated(lam, rho, 1);
    if (!is_member(params).member) continue;

    Eigen::SelfAdjointEigenSolver<Matrix> es(synthesis::pick_matrix(fc, rho, lam));
    const double lmin = es.eigenvalues().minCoeff();
    if (std::abs(lmin) < 1e-6) continue;

    synthesis::SynthesisPlant plant = synthesis::build_synthesis_plant(fc, rho, ell);
    GeneralizedPlant gp = plant.at_multiplier(params);

    lmi::LmiProblem problem;
    AffineExpr x = problem.add_symmetric("X", plant.a.rows());
    const int cols = static_cast<int>(plant.j.cols()) + 1;
    Matrix top(gp.a.rows(), cols), mid(plant.j.rows(), cols), cd(1, cols);
    top << gp.a * plant.j, gp.b1;
    mid << plant.j, Matrix::Zero(plant.j.rows(), 1);
    cd << gp.c1 * plant.j, gp.d1;
    Matrix zi = Matrix::Zero(1, cols);
    zi(0, cols - 1) = 1.0;
    problem.add_constraint(x, lmi::Sense::PositiveDefinite, "X > 0");
    problem.add_constraint(x.congruence(top) - x.congruence(mid) +
                               AffineExpr(cd.transpose() * zi + zi.transpose() * cd),
                           lmi::Sense::NegativeDefinite, "design KYP");
    lmi::SdpSolution sol = lmi::solve(problem);
    const bool lmi_feasible = sol.status == lmi::SdpSolution::Status::Feasible;
    if (lmi_feasible == (lmin > 0.0)) ++agreements;
    ++accepted;
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%d/%d agreements", agreements, accepted);
  report(3, "X-elimination agrees with the 2x2 test on 50 samples", agreements == accepted,
         buf);
}

// 4. End-to-end synthesis at kappa = 10 with Monte-Carlo validation.
void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  const double kappa = 10.0;
  const double rho = 1.0 - 1.0 / std::sqrt(kappa) + 0.01;
  bool pass = true;
  std::string detail;
  try {
    synthesis::SynthesisOutput out =
        synthesis::synthesize(fc_of(kappa), rho, 1, MultiplierClass::Repeated);

    analysis::StructureReport rep = analysis::structure_check(out.algorithm.loop());
    if (!rep.ok) {
      pass = false;
      detail += "structure check failed; ";
    }

    analysis::CertifyResult cert =
        analysis::certify(out.algorithm, fc_of(kappa), rho, 1, MultiplierClass::Repeated);
    if (!cert.feasible()) {
      pass = false;
      detail += "post-certification failed; ";
    }

    // 100 random quadratics across dimensions up to ten.
    double worst = 0.0;
    int divergences = 0;
    for (int seed = 0; seed < 100; ++seed) {
      const int d = 1 + seed % 10;
      Matrix id = Matrix::Identity(d, d);
      AlgorithmRealization alg = AlgorithmRealization::from_factor(
          kron(out.algorithm.ac, id), kron(out.algorithm.bc, id),
          kron(out.algorithm.cc, id), kron(out.algorithm.dc, id), d);
      std::mt19937 rng(5000 + seed);
      sim::Objective obj =
          sim::Objective::random_quadratic(fc_of(kappa, d), rng, seed % 2 == 0);
      std::normal_distribution<double> gauss(0.0, 1.0);
      Vector x0(alg.states());
      for (int i = 0; i < x0.size(); ++i) x0(i) = gauss(rng);
      sim::Trajectory traj = sim::run(alg, obj, x0, 500);
      if (traj.divergent) {
        ++divergences;
        continue;
      }
      try {
        worst = std::max(worst, sim::estimate_rate(traj));
      } catch (const std::invalid_argument&) {
      }
    }
    if (divergences > 0 || worst > rho + 1e-2) pass = false;
    const double elapsed = seconds_since(t0);
    if (elapsed >= 30.0) pass = false;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "rho=%.4f empirical max=%.4f divergences=%d states=%d %.1fs", rho, worst,
                  divergences, out.algorithm.states(), elapsed);
    detail += buf;
  } catch (const std::exception& e) {
    pass = false;
    detail += std::string("exception: ") + e.what();
  }
  report(4, "end-to-end synthesis at kappa=10", pass, detail);
}

// 5. Catalog certifications at their known boundaries.
void criterion5() {
  bool pass = true;
  std::string detail;

  const double kappa_gd = 4.0;
  AlgorithmRealization gd =
      analysis::gradient_descent(2.0 / (kappa_gd + 1.0), kappa_gd, 1);
  analysis::CertifyResult above =
      analysis::certify(gd, fc_of(kappa_gd), 0.6 + 1e-3, 0, MultiplierClass::Repeated);
  analysis::CertifyResult below =
      analysis::certify(gd, fc_of(kappa_gd), 0.6 - 1e-3, 0, MultiplierClass::Repeated);
  if (!above.feasible() || below.feasible()) {
    pass = false;
    detail += "gradient descent boundary failed; ";
  }

  AlgorithmRealization tm = analysis::triple_momentum(1.0, 100.0, 1);
  analysis::CertifyResult tm_cert =
      analysis::certify(tm, fc_of(100.0), 0.9 + 1e-3, 1, MultiplierClass::Repeated);
  if (!tm_cert.feasible()) {
    pass = false;
    detail += "triple momentum at 0.901 failed; ";
  }
  report(5, "catalog certifications (gradient descent, triple momentum)", pass, detail);
}

// 6. Extremum reduction and delay ordering.
void criterion6() {
  bool pass = true;
  std::string detail;
  Config cfg;
  cfg.tol_bisect = 1e-3;

  for (double kappa : {10.0, 100.0}) {
    const double expected = 1.0 - 1.0 / std::sqrt(kappa);

    // Identity plant pipeline against the closed form.
    extremum::ExtremumPlant ident =
        extremum::ExtremumPlant::from_systems(StateSpace::scaled_identity(1, 1.0));
    FunctionClass fc = fc_of(kappa);
    double lo = 1e-3, hi = 1.0 - 1e-4;
    while (hi - lo > cfg.tol_bisect) {
      const double mid = 0.5 * (hi + lo);
      if (extremum::extremum_synthesis(ident, fc, mid, 1, cfg).feasible())
        hi = mid;
      else
        lo = mid;
    }
    if (std::abs(hi - expected) > 5e-3) {
      pass = false;
      char buf[100];
      std::snprintf(buf, sizeof(buf), "identity kappa=%g got %.4f exp %.4f; ", kappa, hi,
                    expected);
      detail += buf;
    }

    // Delay family ordering with nu = 0 matching the closed form.
    std::vector<double> rates;
    for (int nu : {0, 1, 2}) {
      extremum::SweepRow row = extremum::bisect_extremum_rate("delay", nu, fc, 1, cfg);
      if (row.status != "ok") {
        pass = false;
        detail += "delay cell failed: " + row.status + "; ";
        rates.push_back(1.1);
        continue;
      }
      rates.push_back(row.rho_star);
    }
    if (std::abs(rates[0] - expected) > 5e-3) {
      pass = false;
      char buf[100];
      std::snprintf(buf, sizeof(buf), "delay nu=0 kappa=%g got %.4f exp %.4f; ", kappa,
                    rates[0], expected);
      detail += buf;
    }
    if (!(rates[0] <= rates[1] + 1e-9 && rates[1] <= rates[2] + 1e-9)) {
      pass = false;
      detail += "delay ordering violated; ";
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "kappa=%g: %.4f <= %.4f <= %.4f; ", kappa, rates[0],
                  rates[1], rates[2]);
    detail += buf;
  }
  report(6, "extremum pipeline reduction and delay ordering", pass, detail);
}

// 7. Pole-family orderings (figure values are not reproducible; the stable
//    pole invariance and the orderings substitute).
void criterion7() {
  bool pass = true;
  std::string detail;
  Config cfg;
  cfg.tol_bisect = 1e-3;
  const double kappa = 10.0;
  const std::vector<double> stable = {0.2, 0.8, 0.9};
  const std::vector<double> unstable = {1.1, 1.2, 2.0};

  std::vector<double> stable_l2, stable_l0, unstable_l2, unstable_l0;
  for (double p : stable) {
    stable_l2.push_back(
        extremum::bisect_extremum_rate("pole_family", p, fc_of(kappa), 2, cfg).rho_star);
    stable_l0.push_back(
        extremum::bisect_extremum_rate("pole_family", p, fc_of(kappa), 0, cfg).rho_star);
  }
  for (double p : unstable) {
    unstable_l2.push_back(
        extremum::bisect_extremum_rate("pole_family", p, fc_of(kappa), 2, cfg).rho_star);
    unstable_l0.push_back(
        extremum::bisect_extremum_rate("pole_family", p, fc_of(kappa), 0, cfg).rho_star);
  }

  const double spread = *std::max_element(stable_l2.begin(), stable_l2.end()) -
                        *std::min_element(stable_l2.begin(), stable_l2.end());
  if (spread > 1e-3 + 2 * cfg.tol_bisect) {
    pass = false;
    detail += "stable-pole rates disagree; ";
  }
  for (double r : unstable_l2)
    if (r <= stable_l2[0] + 1e-3) {
      pass = false;
      detail += "unstable pole did not degrade the rate; ";
    }
  for (size_t i = 0; i < stable.size(); ++i)
    if (stable_l2[i] > stable_l0[i] + 2 * cfg.tol_bisect) {
      pass = false;
      detail += "ell=2 worse than ell=0 (stable); ";
    }
  for (size_t i = 0; i < unstable.size(); ++i)
    if (unstable_l2[i] > unstable_l0[i] + 2 * cfg.tol_bisect) {
      pass = false;
      detail += "ell=2 worse than ell=0 (unstable); ";
    }

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "stable(l2)=%.4f/%.4f/%.4f unstable(l2)=%.4f/%.4f/%.4f l0(stable)=%.4f",
                stable_l2[0], stable_l2[1], stable_l2[2], unstable_l2[0], unstable_l2[1],
                unstable_l2[2], stable_l0[0]);
  detail += buf;
  report(7, "pole-family invariance and orderings", pass, detail);
}

// 8. Solver soundness battery: 200 randomized Stein instances.
void criterion8() {
  std::mt19937 rng(811);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.3, 1.7);
  int classified = 0, errors = 0, witness_failures = 0;
  while (classified < 200) {
    const int n = 1 + classified % 4;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = gauss(rng) / std::sqrt(double(n));
    a *= scale(rng);
    const double radius = is_schur(a).spectral_radius;
    if (std::abs(radius - 1.0) < 0.03) continue;

    lmi::LmiProblem problem;
    AffineExpr x = problem.add_symmetric("X", n);
    problem.add_constraint(x, lmi::Sense::PositiveDefinite, "X > 0");
    problem.add_constraint(x.congruence(a) - x, lmi::Sense::NegativeDefinite, "Stein");
    lmi::SdpSolution sol = lmi::solve(problem);

    const bool feasible = sol.status == lmi::SdpSolution::Status::Feasible;
    if (feasible != (radius < 1.0)) ++errors;
    if (feasible) {
      Matrix xv = sol.matrix_value("X", problem);
      Eigen::SelfAdjointEigenSolver<Matrix> e1(xv);
      Eigen::SelfAdjointEigenSolver<Matrix> e2(-(a.transpose() * xv * a - xv));
      if (e1.eigenvalues().minCoeff() < sol.margin - 1e-8 ||
          e2.eigenvalues().minCoeff() < sol.margin - 1e-8)
        ++witness_failures;
    }
    ++classified;
  }
  char buf[120];
  std::snprintf(buf, sizeof(buf), "%d classified, %d errors, %d witness failures",
                classified, errors, witness_failures);
  report(8, "Stein feasibility battery", errors == 0 && witness_failures == 0, buf);
}

// 9. Finite-horizon multiplier positivity over 200 sampled triples.
void criterion9() {
  std::mt19937 rng(909);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double global_min = 1e30;
  int checked = 0;
  while (checked < 200) {
    const double rho = 0.4 + 0.55 * unif(rng);
    const int ell = static_cast<int>(unif(rng) * 2.999);
    std::vector<double> lam(ell + 1, 0.0);
    lam[0] = 0.3 + unif(rng);
    for (int k = 1; k <= ell; ++k) lam[k] = -lam[0] * rho * unif(rng) / std::max(1, ell);
    ZamesFalbParams params = ZamesFalbParams::repeated(lam, rho, 1);
    if (!is_member(params).member) continue;

    FunctionClass fc = fc_of(2.0 + 18.0 * unif(rng));
    auto samples = sim::sample_shifted_gradients(fc, 1, rng);
    const double ip = sim::iqc_check(params, fc, rho, samples, 200, rng, 1);
    global_min = std::min(global_min, ip);
    ++checked;
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "min inner product = %.3e over 200 triples", global_min);
  report(9, "finite-horizon multiplier positivity", global_min >= -1e-6, buf);
}

// 10. Structured specialization and repeated-vs-full status agreement (the
//     published curves depend on an external example and are not reproduced).
void criterion10() {
  bool pass = true;
  std::string detail;
  const double m = 1.0, L = 10.0;

  for (double rho : {0.72, 0.80, 0.95}) {
    FunctionClass scalar = fc_of(L, 2);
    FunctionClass structured = scalar;
    structured.structured = {m * Matrix::Identity(2, 2), L * Matrix::Identity(2, 2)};
    synthesis::FeasibilityResult a =
        synthesis::synthesis_feasible(scalar, rho, 1, MultiplierClass::Repeated);
    synthesis::FeasibilityResult b =
        synthesis::synthesis_feasible(structured, rho, 1, MultiplierClass::Repeated);
    if (a.status != b.status || std::abs(a.margin - b.margin) > 1e-6) {
      pass = false;
      char buf[120];
      std::snprintf(buf, sizeof(buf), "rho=%.2f margins %.3e vs %.3e; ", rho, a.margin,
                    b.margin);
      detail += buf;
    }
  }

  FunctionClass diag = fc_of(L, 2);
  Matrix mf(2, 2), lf(2, 2);
  mf << 1.0, 0.0, 0.0, 2.0;
  lf << 10.0, 0.0, 0.0, 8.0;
  diag.structured = {mf, lf};
  for (double rho : {0.55, 0.75, 0.9}) {
    synthesis::FeasibilityResult rep =
        synthesis::synthesis_feasible(diag, rho, 1, MultiplierClass::Repeated);
    synthesis::FeasibilityResult full =
        synthesis::synthesis_feasible(diag, rho, 1, MultiplierClass::Full);
    if (rep.status != full.status) {
      pass = false;
      char buf[100];
      std::snprintf(buf, sizeof(buf), "status split at rho=%.2f; ", rho);
      detail += buf;
    }
  }
  report(10, "structured specialization and class agreement", pass, detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", failures);
  return failures;
}
