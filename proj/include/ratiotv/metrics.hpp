#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ratiotv/types.hpp"

namespace ratiotv {

// Indices of nonzero entries of a periodic signal, kept with the period so
// wrap-around distances stay well defined.
struct SupportSet {
  std::vector<Index> indices;
  Index period = 0;
};

// Linear indices are column-major, the convention shared by every operator here.
template <typename Derived>
SupportSet nonzero_support(const Eigen::MatrixBase<Derived>& v, double tol = 0.0) {
  SupportSet t;
  t.period = v.size();
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(double(v(i % v.rows(), i / v.rows()))) > tol) t.indices.push_back(i);
  return t;
}

inline double minimum_separation(const SupportSet& t) {
  if (t.indices.size() < 2) throw std::invalid_argument("minimum_separation: need at least 2 indices");
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < t.indices.size(); ++i)
    for (size_t j = i + 1; j < t.indices.size(); ++j) {
      const double d = std::abs(double(t.indices[i] - t.indices[j]));
      best = std::min(best, std::min(d, double(t.period) - d));
    }
  return best;
}

template <typename DerivedA, typename DerivedB>
double relative_error(const Eigen::MatrixBase<DerivedA>& u_star, const Eigen::MatrixBase<DerivedB>& u_true) {
  if (u_star.rows() != u_true.rows() || u_star.cols() != u_true.cols())
    throw std::invalid_argument("relative_error: shape mismatch");
  const double denom = u_true.norm();
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero ground truth");
  return (u_star - u_true).norm() / denom;
}

// Peak signal-to-noise ratio in dB with peak taken from the reference image.
// Identical inputs return +inf so exact recoveries still tabulate.
template <typename DerivedA, typename DerivedB>
double psnr(const Eigen::MatrixBase<DerivedA>& u_star, const Eigen::MatrixBase<DerivedB>& u_true) {
  if (u_star.rows() != u_true.rows() || u_star.cols() != u_true.cols())
    throw std::invalid_argument("psnr: shape mismatch");
  const double err2 = (u_star - u_true).squaredNorm();
  if (err2 == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = u_true.maxCoeff();
  return 10.0 * std::log10(double(u_true.size()) * peak * peak / err2);
}

}  // namespace ratiotv
