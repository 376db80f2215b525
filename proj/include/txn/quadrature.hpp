#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace txn {

/// Nodes and weights of a quadrature rule.
template <typename Scalar = double>
struct QuadratureRule {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Array<Scalar, Eigen::Dynamic, 1> weights;

  template <class F>
  Scalar integrate(F &&f) const {
    Scalar sum(0);
    for (Eigen::Index i = 0; i < nodes.size(); ++i)
      sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1]; Newton iteration on the Legendre
/// recurrence, symmetric nodes filled pairwise.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n) {
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    Scalar x = std::cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) /
                        (Scalar(n) + Scalar(0.5)));
    Scalar dp(0);
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0(1), p1(x);
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
        p0 = p1;
        p1 = p2;
      }
      dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
      const Scalar dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < Scalar(1e-16))
        break;
    }
    // recompute derivative at the converged node
    Scalar p0(1), p1(x);
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((Scalar(2 * k - 1)) * x * p1 - Scalar(k - 1) * p0) / Scalar(k);
      p0 = p1;
      p1 = p2;
    }
    dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.nodes[half - 1] = Scalar(0);
  return rule;
}

/// Gauss-Legendre rule mapped to [a, b].
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n, Scalar a, Scalar b) {
  auto rule = gauss_legendre<Scalar>(n);
  const Scalar half = (b - a) / Scalar(2), mid = (a + b) / Scalar(2);
  rule.nodes = mid + half * rule.nodes;
  rule.weights *= half;
  return rule;
}

/// Composite rule: `panels` equal panels on [a, b], each with an `order`-point
/// Gauss-Legendre rule.
template <typename Scalar = double>
QuadratureRule<Scalar> composite_gauss_legendre(Scalar a, Scalar b, int panels, int order) {
  if (panels < 1)
    throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  const auto base = gauss_legendre<Scalar>(order);
  QuadratureRule<Scalar> rule;
  rule.nodes.resize(Eigen::Index(panels) * order);
  rule.weights.resize(Eigen::Index(panels) * order);
  const Scalar width = (b - a) / Scalar(panels);
  for (int p = 0; p < panels; ++p) {
    const Scalar lo = a + width * Scalar(p);
    const Scalar mid = lo + width / Scalar(2);
    rule.nodes.segment(Eigen::Index(p) * order, order) = mid + (width / Scalar(2)) * base.nodes;
    rule.weights.segment(Eigen::Index(p) * order, order) = (width / Scalar(2)) * base.weights;
  }
  return rule;
}

} // namespace txn
