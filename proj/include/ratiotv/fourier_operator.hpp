#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "ratiotv/fft_utils.hpp"
#include "ratiotv/frequency_mask.hpp"
#include "ratiotv/measurement.hpp"

namespace ratiotv {

// Unitary 2D DFT followed by selection of the mask's kept bins, in the mask's
// column-major bin order. The adjoint zero-fills and inverts; with a Hermitian
// mask the normal operator is the real convolution diagonalized by the mask
// indicator, which is exactly what gram_spectrum reports.
class FourierSamplingOperator : public MeasurementOperator {
 public:
  explicit FourierSamplingOperator(FrequencyMask mask)
      : MeasurementOperator(mask.rows(), mask.cols(), mask.kept_count()),
        mask_(std::move(mask)),
        kept_(mask_.kept_indices()),
        spectrum_(mask_.indicator()),
        scale_(1.0 / std::sqrt(double(mask_.rows() * mask_.cols()))) {}

  ComplexVector apply(const ImageXd& u) const override {
    const ComplexImage f = fft2(u);
    ComplexVector b(data_size_);
    for (Index i = 0; i < data_size_; ++i) b(i) = scale_ * f(kept_[size_t(i)] % m_, kept_[size_t(i)] / m_);
    return b;
  }

  ImageXd adjoint(const ComplexVector& c) const override {
    ComplexImage f = ComplexImage::Zero(m_, n_);
    for (Index i = 0; i < data_size_; ++i) f(kept_[size_t(i)] % m_, kept_[size_t(i)] / m_) = c(i) / scale_;
    return ifft2(std::move(f)).real();
  }

  const ImageXd* gram_spectrum() const override { return &spectrum_; }
  const FrequencyMask& mask() const { return mask_; }

 private:
  FrequencyMask mask_;
  std::vector<Index> kept_;
  ImageXd spectrum_;
  double scale_;
};

inline std::shared_ptr<const FourierSamplingOperator> fourier_sampling_operator(FrequencyMask mask) {
  return std::make_shared<const FourierSamplingOperator>(std::move(mask));
}

}  // namespace ratiotv
