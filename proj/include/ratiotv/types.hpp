#pragma once

#include <Eigen/Core>
#include <complex>

namespace ratiotv {

using Index = Eigen::Index;

// Images are dense column-major matrices. A 1D signal of length N is stored
// as a 1-by-N row so that its only nonzero difference direction is dx.
template <typename Scalar>
using Image = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// A gradient field stacks the forward differences of an m-by-n image as a
// (2m)-by-n matrix: rows [0, m) hold dx (along columns), rows [m, 2m) hold dy.
template <typename Scalar>
using Field = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ImageXd = Image<double>;
using FieldXd = Field<double>;
using ComplexImage = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace ratiotv
