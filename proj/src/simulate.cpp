#include "ratesyn/simulate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ratesyn {
namespace sim {

Vector Objective::gradient(const Vector& z) const {
  switch (kind) {
    case Kind::Quadratic:
      return hessian * z - offset;
    case Kind::LogisticRidge: {
      Vector g = ridge * z;
      const int n = static_cast<int>(data_x.rows());
      for (int i = 0; i < n; ++i) {
        const double margin = data_y(i) * data_x.row(i).dot(z);
        const double sig = 1.0 / (1.0 + std::exp(margin));
        g -= (data_y(i) * sig / n) * data_x.row(i).transpose();
      }
      return g;
    }
    case Kind::Custom:
      return custom_grad(z);
  }
  throw std::logic_error("Objective: unknown kind");
}

Objective Objective::quadratic(const Matrix& h, const Vector& b, double m, double L) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()));
  if (es.eigenvalues().minCoeff() < m - 1e-9 || es.eigenvalues().maxCoeff() > L + 1e-9)
    throw std::invalid_argument("Objective: Hessian eigenvalues outside [m, L]");
  Objective o;
  o.kind = Kind::Quadratic;
  o.d = static_cast<int>(h.rows());
  o.m = m;
  o.L = L;
  o.hessian = h;
  o.offset = b;
  o.minimizer = h.ldlt().solve(b);
  return o;
}

Objective Objective::random_quadratic(const FunctionClass& fc, std::mt19937& rng,
                                      bool pin_extremes) {
  const int d = fc.d;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix raw(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) raw(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ();
  Vector eigs(d);
  for (int i = 0; i < d; ++i)
    eigs(i) = pin_extremes ? (i % 2 == 0 ? fc.m : fc.L)
                           : fc.m + (fc.L - fc.m) * unif(rng);
  if (pin_extremes && d >= 1) eigs(0) = fc.m;
  if (pin_extremes && d >= 2) eigs(1) = fc.L;
  Matrix h = q * eigs.asDiagonal() * q.transpose();
  h = 0.5 * (h + h.transpose()).eval();
  Vector b(d);
  for (int i = 0; i < d; ++i) b(i) = gauss(rng);
  return quadratic(h, b, fc.m, fc.L);
}

Objective Objective::logistic_ridge(const Matrix& x, const Vector& y, double ridge,
                                    const Config& cfg) {
  Objective o;
  o.kind = Kind::LogisticRidge;
  o.d = static_cast<int>(x.cols());
  o.data_x = x;
  o.data_y = y;
  o.ridge = ridge;
  const int n = static_cast<int>(x.rows());
  Eigen::JacobiSVD<Matrix> svd(x);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  o.m = ridge;
  o.L = ridge + 0.25 * smax * smax / n;
  // Reference minimizer by a long conservative descent run.
  Vector z = Vector::Zero(o.d);
  const double step = 1.0 / o.L;
  for (long it = 0; it < 1000000; ++it) {
    Vector g = o.gradient(z);
    if (g.norm() <= 1e-12) break;
    z -= step * g;
  }
  o.minimizer = z;
  (void)cfg;
  return o;
}

Trajectory run(const AlgorithmRealization& alg, const Objective& obj, const Vector& x0,
               int steps, const Config& cfg) {
  if (obj.d != alg.d) throw std::invalid_argument("run: dimension mismatch");
  if (x0.size() != alg.states()) throw std::invalid_argument("run: bad initial state");
  if (steps < 1) throw std::invalid_argument("run: need at least one step");

  Trajectory traj;
  traj.states.reserve(steps + 1);
  Vector x = x0;
  for (int k = 0; k < steps; ++k) {
    if (!x.allFinite() || x.norm() > cfg.divergence_limit) {
      traj.divergent = true;
      break;
    }
    Vector z = alg.c * x;
    Vector w = obj.gradient(z);
    traj.states.push_back(x);
    traj.outputs.push_back(z);
    traj.gradients.push_back(w);
    traj.distance.push_back((z - obj.minimizer).norm());
    x = alg.a * x + alg.b * w;
  }
  return traj;
}

double estimate_rate(const Trajectory& traj) {
  std::vector<std::pair<double, double>> usable;  // (k, log dist)
  for (size_t k = 0; k < traj.distance.size(); ++k)
    if (traj.distance[k] > 1e-12)
      usable.emplace_back(static_cast<double>(k), std::log(traj.distance[k]));
  if (usable.size() < 20)
    throw std::invalid_argument("estimate_rate: usable tail too short");
  const size_t start = usable.size() / 2;
  double sk = 0, sy = 0, skk = 0, sky = 0;
  const double n = static_cast<double>(usable.size() - start);
  for (size_t i = start; i < usable.size(); ++i) {
    sk += usable[i].first;
    sy += usable[i].second;
    skk += usable[i].first * usable[i].first;
    sky += usable[i].first * usable[i].second;
  }
  const double slope = (n * sky - sk * sy) / (n * skk - sk * sk);
  return std::exp(slope);
}

MonteCarloResult monte_carlo_rate(const AlgorithmRealization& alg, const FunctionClass& fc,
                                  int seeds, int horizon, const Config& cfg,
                                  unsigned base_seed) {
  MonteCarloResult res;
  std::vector<double> rates;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937 rng(base_seed + s);
    Objective obj = Objective::random_quadratic(fc, rng, /*pin_extremes=*/s % 2 == 0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector x0(alg.states());
    for (int i = 0; i < x0.size(); ++i) x0(i) = gauss(rng);
    Trajectory traj = run(alg, obj, x0, horizon, cfg);
    if (traj.divergent) {
      ++res.divergences;
      continue;
    }
    try {
      rates.push_back(estimate_rate(traj));
    } catch (const std::invalid_argument&) {
      // converged below the floor too fast; skip
    }
  }
  if (!rates.empty()) {
    std::sort(rates.begin(), rates.end());
    res.rho_max = rates.back();
    res.rho_median = rates[rates.size() / 2];
  }
  return res;
}

std::vector<GradientSample> sample_shifted_gradients(const FunctionClass& fc, int count,
                                                     std::mt19937& rng) {
  const int d = fc.d;
  const double span = fc.L - fc.m;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<GradientSample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    if (d == 1 && i % 3 == 2) {
      // Scalar Huber-type member: slope delta up to a knee, constant beyond.
      const double delta = span * (0.1 + 0.9 * unif(rng));
      const double knee = 0.2 + 2.0 * unif(rng);
      out.push_back({[delta, knee](const Vector& z) {
                       Vector g(1);
                       g(0) = delta * std::clamp(z(0), -knee, knee);
                       return g;
                     },
                     "huber"});
      continue;
    }
    Matrix raw(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) raw(r, c) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(raw);
    Matrix q = qr.householderQ();
    Vector eigs(d);
    for (int r = 0; r < d; ++r) eigs(r) = span * unif(rng);
    Matrix h = q * eigs.asDiagonal() * q.transpose();
    h = 0.5 * (h + h.transpose()).eval();
    out.push_back({[h](const Vector& z) { return (h * z).eval(); }, "quadratic"});
  }
  return out;
}

double iqc_check(const ZamesFalbParams& params, const FunctionClass& fc, double rho,
                 const std::vector<GradientSample>& samples, int horizon,
                 std::mt19937& rng, int signals_per_sample) {
  const int d = fc.d;
  if (params.block_dim != d) throw std::invalid_argument("iqc_check: dimension mismatch");
  MultiplierFilter filt = build_fir(params);
  const double span = fc.L - fc.m;
  std::uniform_real_distribution<double> decay_dist(0.5, 0.95);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double min_ip = std::numeric_limits<double>::infinity();
  for (const auto& sample : samples) {
    for (int rep = 0; rep < signals_per_sample; ++rep) {
      const double decay = decay_dist(rng);
      double ip = 0.0;
      Vector xf = Vector::Zero(filt.a_f.rows());
      double rk = 1.0;     // rho^k
      double dk = 1.0;     // decay^k
      for (int k = 0; k < horizon; ++k) {
        Vector zc(d);
        for (int i = 0; i < d; ++i) zc(i) = gauss(rng);
        zc *= dk;
        // w_check = rho^-k grad g(rho^k z_check); then the loop shift.
        Vector wc = sample.grad((rk * zc).eval()) / rk;
        Vector zt = span * zc - wc;
        Vector wt = wc;
        Vector filtered = filt.c_f * xf + filt.d_f * zt;
        ip += filtered.dot(wt);
        xf = filt.a_f * xf + filt.b_f * zt;
        rk *= rho;
        dk *= decay;
      }
      min_ip = std::min(min_ip, ip);
    }
  }
  return min_ip;
}

}  // namespace sim
}  // namespace ratesyn
