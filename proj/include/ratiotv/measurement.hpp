#pragma once

#include <memory>
#include <optional>

#include "ratiotv/types.hpp"

namespace ratiotv {

// Linear map from an m-by-n real image to a complex measurement vector.
// Implementations are immutable after construction; apply/adjoint are safe to
// call concurrently on shared instances.
class MeasurementOperator {
 public:
  virtual ~MeasurementOperator() = default;

  Index rows() const { return m_; }
  Index cols() const { return n_; }
  Index image_size() const { return m_ * n_; }
  Index data_size() const { return data_size_; }

  virtual ComplexVector apply(const ImageXd& u) const = 0;
  // Real part of the conjugate-transpose action, so <Au, c> == <u, adjoint(c)>
  // with the real inner product on images and Re<.,.> on data.
  virtual ImageXd adjoint(const ComplexVector& c) const = 0;
  virtual ImageXd normal_apply(const ImageXd& u) const { return adjoint(apply(u)); }
  // Eigenvalues of the normal operator on the DFT basis, when it is
  // Fourier-diagonal; null otherwise (iterative solves take over).
  virtual const ImageXd* gram_spectrum() const { return nullptr; }

 protected:
  MeasurementOperator(Index m, Index n, Index data_size) : m_(m), n_(n), data_size_(data_size) {}
  Index m_, n_, data_size_;
};

// One reconstruction instance: the operator, its data, and (for synthetic
// studies) the image the data was generated from.
struct Problem {
  std::shared_ptr<const MeasurementOperator> op;
  ComplexVector data;
  std::optional<ImageXd> ground_truth;
};

}  // namespace ratiotv
