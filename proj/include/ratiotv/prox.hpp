#pragma once

#include <cmath>
#include <random>
#include <stdexcept>

#include "ratiotv/types.hpp"

namespace ratiotv {

inline double soft_shrink(double x, double mu) {
  const double a = std::abs(x) - mu;
  return a > 0.0 ? (x > 0.0 ? a : -a) : 0.0;
}

template <typename Derived>
Image<typename Derived::Scalar> soft_shrink(const Eigen::MatrixBase<Derived>& x, double mu) {
  return x.unaryExpr([mu](typename Derived::Scalar v) {
    return typename Derived::Scalar(soft_shrink(double(v), mu));
  });
}

// Exact minimizer of (1/2)(y-x)^2 + mu*sqrt(|y|). Zero iff |x| <= (3/2)mu^(2/3)
// (ties go to zero); otherwise the largest root of t^3 - |x| t + mu/2 = 0 in
// t = sqrt(y), by the trigonometric cubic formula.
inline double half_threshold(double x, double mu) {
  if (mu == 0.0) return x;
  const double ax = std::abs(x);
  const double thresh = 1.5 * std::cbrt(mu * mu);
  if (ax <= thresh) return 0.0;
  const double theta = std::acos(-0.25 * mu * std::pow(ax / 3.0, -1.5));
  const double t = 2.0 * std::sqrt(ax / 3.0) * std::cos(theta / 3.0);
  const double y = t * t;
  return x > 0.0 ? y : -y;
}

template <typename Derived>
Image<typename Derived::Scalar> half_threshold(const Eigen::MatrixBase<Derived>& x, double mu) {
  return x.unaryExpr([mu](typename Derived::Scalar v) {
    return typename Derived::Scalar(half_threshold(double(v), mu));
  });
}

template <typename Derived>
Image<typename Derived::Scalar> box_project(const Eigen::MatrixBase<Derived>& u, double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("box_project: empty box");
  using S = typename Derived::Scalar;
  return u.cwiseMax(S(lo)).cwiseMin(S(hi));
}

// Global minimizer of (1/2)||y-v||^2 + mu*(||y||_1 - alpha*||y||_2), treating v
// as one vector. Three regimes: shrink-and-rescale, a single surviving entry,
// or zero. alpha = 0 falls back to plain soft shrinkage.
inline ImageXd prox_l1_minus_l2(const ImageXd& v, double alpha, double mu) {
  if (mu <= 0.0) throw std::invalid_argument("prox_l1_minus_l2: mu must be positive");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("prox_l1_minus_l2: alpha outside [0,1]");
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax > mu) {
    ImageXd z = soft_shrink(v, mu);
    const double zn = z.norm();
    return z * ((zn + alpha * mu) / zn);
  }
  ImageXd y = ImageXd::Zero(v.rows(), v.cols());
  if (vmax > (1.0 - alpha) * mu) {
    // first max-magnitude entry in column-major order survives
    for (Index j = 0; j < v.cols(); ++j)
      for (Index i = 0; i < v.rows(); ++i)
        if (std::abs(v(i, j)) == vmax) {
          y(i, j) = (v(i, j) > 0 ? 1.0 : -1.0) * (vmax + (alpha - 1.0) * mu);
          return y;
        }
  }
  return y;
}

// Root tau >= 1 of tau^2(tau - 1) = eta, via the closed-form resolvent cubic.
// Monotone nondecreasing in eta, tau(0) = 1.
inline double scale_cubic_root(double eta) {
  if (eta <= 0.0) return 1.0;
  const double c = 27.0 * eta;
  const double disc = std::sqrt(c * (c + 4.0));  // sqrt((c+2)^2 - 4) without cancellation
  const double xi = std::cbrt(0.5 * (c + 2.0 + disc));
  return (1.0 + xi + 1.0 / xi) / 3.0;
}

// Minimizer of numerator/||h||_2 + (rho/2)||h - target||^2. For nonzero target
// the answer is a pure rescaling by scale_cubic_root; a zero target leaves the
// direction free, so a seeded random unit direction is scaled to the optimal
// radius cbrt(numerator/rho).
inline FieldXd prox_reciprocal_norm(const FieldXd& target, double numerator, double rho,
                                    std::mt19937_64& rng, bool* random_branch = nullptr) {
  if (random_branch) *random_branch = false;
  const double tn = target.norm();
  if (tn > 0.0) {
    const double eta = numerator / (rho * tn * tn * tn);
    return scale_cubic_root(eta) * target;
  }
  if (random_branch) *random_branch = true;
  FieldXd h(target.rows(), target.cols());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index j = 0; j < h.cols(); ++j)
    for (Index i = 0; i < h.rows(); ++i) h(i, j) = gauss(rng);
  double hn = h.norm();
  if (hn == 0.0) {
    h(0, 0) = 1.0;
    hn = 1.0;
  }
  return h * (std::cbrt(numerator / rho) / hn);
}

}  // namespace ratiotv
