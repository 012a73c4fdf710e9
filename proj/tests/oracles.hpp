#pragma once
// Independent reference computations used by the tests.  None of these go
// through the Pruefer integrator or the p-trig inversion.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// 2 int_0^1 (1 - s^p)^{-1/p} ds by tanh-sinh; the complement argument keeps
/// 1 - s^p accurate near s = 1.
inline double pi_p_quadrature(double p) {
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [p](double s, double sc) {
    const double one_minus = s > 0.5 ? -std::expm1(p * std::log1p(-sc)) : 1.0 - std::pow(s, p);
    return std::pow(one_minus, -1.0 / p);
  };
  return 2.0 * ts.integrate(f, 0.0, 1.0);
}

/// int_0^y (1 - s^p)^{-1/p} ds for 0 <= y < 1.
inline double sine_integral(double p, double y) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([p](double s) { return std::pow(1.0 - std::pow(s, p), -1.0 / p); }, 0.0, y);
}

/// Classical RK4 with fixed step on y' = f(t, y), returning y at each step.
template <std::size_t K>
std::vector<std::array<double, K>> rk4(const std::function<std::array<double, K>(double, const std::array<double, K>&)>& f,
                                       double t0, std::array<double, K> y, double t1, double h,
                                       std::vector<double>* times = nullptr) {
  const int n = static_cast<int>(std::ceil(std::abs(t1 - t0) / h));
  const double dt = (t1 - t0) / n;
  std::vector<std::array<double, K>> out{y};
  if (times) times->assign(1, t0);
  auto axpy = [](const std::array<double, K>& a, double s, const std::array<double, K>& b) {
    std::array<double, K> r;
    for (std::size_t i = 0; i < K; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  double t = t0;
  for (int i = 0; i < n; ++i) {
    const auto k1 = f(t, y);
    const auto k2 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k1));
    const auto k3 = f(t + 0.5 * dt, axpy(y, 0.5 * dt, k2));
    const auto k4 = f(t + dt, axpy(y, dt, k3));
    for (std::size_t j = 0; j < K; ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    t = t0 + (i + 1) * dt;
    out.push_back(y);
    if (times) times->push_back(t);
  }
  return out;
}

/// p = 2 Pruefer system with circular sin / cos.
inline std::array<double, 2> prufer_p2(double kappa, double lambda, double t, const std::array<double, 2>& y) {
  const double alpha = std::sqrt(lambda);
  const double s = std::sin(y[0]), c = std::cos(y[0]);
  return {alpha - kappa * t * c * s, kappa * t * c * c};
}

struct LinearIvp {
  double b;  ///< first t > a with w' = 0
  double m;  ///< w(b)
};

/// w'' - kappa t w' + lambda w = 0, w(a) = -1, w'(a) = 0; first critical point by RK4 + cubic Hermite root.
inline LinearIvp linear_ivp(double kappa, double lambda, double a, double h = 1e-5) {
  auto f = [&](double t, const std::array<double, 2>& y) -> std::array<double, 2> {
    return {y[1], kappa * t * y[1] - lambda * y[0]};
  };
  std::array<double, 2> y{-1.0, 0.0};
  double t = a;
  // step once so w' > 0, then march to the sign change of w'
  for (int i = 0; i < 100000000; ++i) {
    std::array<double, 2> k1 = f(t, y), k2, k3, k4, z;
    for (int j = 0; j < 2; ++j) z[j] = y[j] + 0.5 * h * k1[j];
    k2 = f(t + 0.5 * h, z);
    for (int j = 0; j < 2; ++j) z[j] = y[j] + 0.5 * h * k2[j];
    k3 = f(t + 0.5 * h, z);
    for (int j = 0; j < 2; ++j) z[j] = y[j] + h * k3[j];
    k4 = f(t + h, z);
    std::array<double, 2> yn;
    for (int j = 0; j < 2; ++j) yn[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    if (i > 0 && yn[1] <= 0.0) {
      // w' is smooth: linear interpolation of w' plus quadratic correction of w
      const double s = y[1] / (y[1] - yn[1]);
      const double tb = t + s * h;
      const double w = y[0] + y[1] * s * h + 0.5 * f(t, y)[1] * s * s * h * h;
      return {tb, w};
    }
    y = yn;
    t += h;
  }
  return {NAN, NAN};
}

/**
 * First nonzero eigenvalue of -(rho u')' = mu rho u, rho = e^{-kappa t^2/2},
 * Neumann on [-D/2, D/2], by the symmetric tridiagonal finite-difference
 * scheme with n nodes (cell weights at midpoints, trapezoid masses).
 */
inline double sturm_liouville_p2(double kappa, double diameter, int n) {
  const double h = diameter / (n - 1);
  auto rho = [&](double t) { return std::exp(-0.5 * kappa * t * t); };
  std::vector<double> cell(n - 1), mass(n, 0.0);
  for (int j = 0; j < n - 1; ++j) {
    const double tm = -0.5 * diameter + (j + 0.5) * h;
    cell[j] = rho(tm) / h;
    mass[j] += 0.5 * h * rho(-0.5 * diameter + j * h);
    mass[j + 1] += 0.5 * h * rho(-0.5 * diameter + (j + 1) * h);
  }
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d[i] = ((i > 0 ? cell[i - 1] : 0.0) + (i < n - 1 ? cell[i] : 0.0)) / mass[i];
  for (int i = 0; i < n - 1; ++i) e[i] = -cell[i] / std::sqrt(mass[i] * mass[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[1];
}

/// Same scheme with weights at nodes averaged on cells, matching the discrete Rayleigh quotient at p = 2.
inline double sturm_liouville_p2_nodal(const std::vector<double>& f, double length) {
  const int n = static_cast<int>(f.size());
  const double h = length / (n - 1);
  std::vector<double> w(n), cell(n - 1), mass(n, 0.0);
  double fmin = f[0];
  for (double v : f) fmin = std::min(fmin, v);
  for (int i = 0; i < n; ++i) w[i] = std::exp(-(f[i] - fmin));
  for (int j = 0; j < n - 1; ++j) {
    cell[j] = 0.5 * (w[j] + w[j + 1]) / h;
    mass[j] += 0.5 * h * w[j];
    mass[j + 1] += 0.5 * h * w[j + 1];
  }
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d[i] = ((i > 0 ? cell[i - 1] : 0.0) + (i < n - 1 ? cell[i] : 0.0)) / mass[i];
  for (int i = 0; i < n - 1; ++i) e[i] = -cell[i] / std::sqrt(mass[i] * mass[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[1];
}

}  // namespace oracle
