#pragma once

#include <unsupported/Eigen/FFT>

#include "ratiotv/types.hpp"

namespace ratiotv {

namespace detail {
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;  // plans are cached per length, per thread
  return fft;
}

inline void fft_cols(ComplexImage& x, bool inverse) {
  if (x.rows() <= 1) return;  // length-1 transform is the identity (kissfft rejects it)
  auto& fft = fft_engine();
  Eigen::VectorXcd in(x.rows()), out(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    in = x.col(j);
    if (inverse)
      fft.inv(out, in);
    else
      fft.fwd(out, in);
    x.col(j) = out;
  }
}
}  // namespace detail

// Unnormalized 2D DFT; ifft2(fft2(x)) == x (the inverse carries the 1/(mn)).
inline ComplexImage fft2(ComplexImage x) {
  detail::fft_cols(x, false);
  ComplexImage t = x.transpose();
  detail::fft_cols(t, false);
  return t.transpose();
}

inline ComplexImage fft2(const ImageXd& x) { return fft2(ComplexImage(x.cast<std::complex<double>>())); }

inline ComplexImage ifft2(ComplexImage x) {
  detail::fft_cols(x, true);
  ComplexImage t = x.transpose();
  detail::fft_cols(t, true);
  return t.transpose();
}

}  // namespace ratiotv
