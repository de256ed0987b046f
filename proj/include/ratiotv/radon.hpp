#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "ratiotv/measurement.hpp"

namespace ratiotv {

// Parallel-beam sinogram: one column per projection angle, one row per detector.
struct Sinogram {
  std::vector<double> angles;  // radians, strictly increasing in [0, pi)
  ImageXd values;              // n_detectors x n_angles

  Index n_angles() const { return values.cols(); }
  Index n_detectors() const { return values.rows(); }
};

// Discrete Radon transform for a centered square pixel grid with unit pixels
// and unit detector spacing. Rays are traced with intersection-length weights
// and the whole map is assembled once as a sparse matrix, so the adjoint is an
// exact transpose. Data entries are ordered angle-major: ray (a, d) sits at
// row a*n_detectors + d, matching the column-major layout of Sinogram::values.
class RadonOperator : public MeasurementOperator {
 public:
  RadonOperator(Index m, Index n, std::vector<double> angles, Index n_detectors);

  ComplexVector apply(const ImageXd& u) const override;
  ImageXd adjoint(const ComplexVector& c) const override;
  ImageXd normal_apply(const ImageXd& u) const override;

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return a_; }
  const std::vector<double>& angles() const { return angles_; }
  Index n_detectors() const { return n_detectors_; }

  Sinogram to_sinogram(const ComplexVector& data) const;

 private:
  std::vector<double> angles_;
  Index n_detectors_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
};

std::shared_ptr<const RadonOperator> radon_operator(Index m, Index n, const std::vector<double>& angles,
                                                    Index n_detectors);

}  // namespace ratiotv
