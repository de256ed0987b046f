#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ratiotv/types.hpp"

namespace ratiotv {

// Selection of DFT bins, stored on the unshifted frequency grid (bin (0,0) is DC).
// Kept Hermitian-symmetric so the associated normal operator is real.
struct FrequencyMask {
  BoolMask keep;

  Index rows() const { return keep.rows(); }
  Index cols() const { return keep.cols(); }
  Index kept_count() const { return keep.count(); }
  double kept_fraction() const { return double(kept_count()) / double(keep.size()); }

  // Column-major linear indices of kept bins; fixes the measurement ordering.
  std::vector<Index> kept_indices() const {
    std::vector<Index> idx;
    idx.reserve(size_t(kept_count()));
    for (Index j = 0; j < keep.cols(); ++j)
      for (Index i = 0; i < keep.rows(); ++i)
        if (keep(i, j)) idx.push_back(j * keep.rows() + i);
    return idx;
  }

  bool hermitian_symmetric() const {
    const Index m = keep.rows(), n = keep.cols();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i)
        if (keep(i, j) != keep((m - i) % m, (n - j) % n)) return false;
    return true;
  }

  ImageXd indicator() const { return keep.cast<double>().matrix(); }
};

// Keeps the 2f_c+1 lowest 1D frequencies |k| <= f_c on a length-N row grid.
inline FrequencyMask make_lowpass_mask_1d(Index n, Index fc) {
  if (fc < 0 || 2 * fc + 1 >= n) throw std::invalid_argument("make_lowpass_mask_1d: need 2*fc+1 < N");
  FrequencyMask mask;
  mask.keep = BoolMask::Constant(1, n, false);
  for (Index k = -fc; k <= fc; ++k) mask.keep(0, ((k % n) + n) % n) = true;
  return mask;
}

// Largest centered (2r+1)x(2r+1) square of bins whose count stays within
// ratio*m*n; always keeps DC.
inline FrequencyMask make_lowfreq_square_mask(Index m, Index n, double ratio) {
  if (!(ratio > 0.0) || double(m) * double(n) * ratio < 1.0)
    throw std::invalid_argument("make_lowfreq_square_mask: ratio keeps less than one bin");
  Index r = Index((std::sqrt(ratio * double(m) * double(n)) - 1.0) / 2.0);
  r = std::min(r, std::min((m - 1) / 2, (n - 1) / 2));
  FrequencyMask mask;
  mask.keep = BoolMask::Constant(m, n, false);
  for (Index l = -r; l <= r; ++l)
    for (Index k = -r; k <= r; ++k) mask.keep(((k % m) + m) % m, ((l % n) + n) % n) = true;
  return mask;
}

// n_lines lines through DC at angles j*pi/n_lines, each rasterized as the full
// set of unit cells the continuous line crosses (supercover walk), then
// symmetrized. Cells are unit squares centered on integer frequency pairs.
inline FrequencyMask make_radial_mask(Index m, Index n, Index n_lines) {
  if (n_lines < 1) throw std::invalid_argument("make_radial_mask: need at least one line");
  FrequencyMask mask;
  mask.keep = BoolMask::Constant(m, n, false);
  const double pi = 3.14159265358979323846;
  const double inf = std::numeric_limits<double>::infinity();
  const Index xmin = -(n / 2), xmax = (n - 1) / 2;
  const Index ymin = -(m / 2), ymax = (m - 1) / 2;
  auto mark = [&](Index y, Index x) {
    if (x < xmin || x > xmax || y < ymin || y > ymax) return;
    mask.keep(((y % m) + m) % m, ((x % n) + n) % n) = true;
  };
  for (Index j = 0; j < n_lines; ++j) {
    const double c = std::cos(pi * double(j) / double(n_lines));
    const double s = std::sin(pi * double(j) / double(n_lines));
    // Clip r*(c,s) to the window of cell extents.
    double r0 = -inf, r1 = inf;
    auto clip = [&](double d, double lo, double hi) {
      if (std::abs(d) < 1e-15) return;  // parallel to this axis, center is inside
      double a = lo / d, b = hi / d;
      if (a > b) std::swap(a, b);
      r0 = std::max(r0, a);
      r1 = std::min(r1, b);
    };
    clip(c, double(xmin) - 0.5, double(xmax) + 0.5);
    clip(s, double(ymin) - 0.5, double(ymax) + 0.5);
    Index cx = std::clamp(Index(std::floor(r0 * c + 0.5)), xmin, xmax);
    Index cy = std::clamp(Index(std::floor(r0 * s + 0.5)), ymin, ymax);
    const Index step_x = c > 0 ? 1 : -1, step_y = s > 0 ? 1 : -1;
    const double dx = std::abs(c) < 1e-15 ? inf : 1.0 / std::abs(c);
    const double dy = std::abs(s) < 1e-15 ? inf : 1.0 / std::abs(s);
    double tmax_x = std::abs(c) < 1e-15 ? inf : (double(cx) + 0.5 * double(step_x)) / c;
    double tmax_y = std::abs(s) < 1e-15 ? inf : (double(cy) + 0.5 * double(step_y)) / s;
    for (;;) {
      mark(cy, cx);
      if (std::min(tmax_x, tmax_y) >= r1 - 1e-12) break;
      if (tmax_x <= tmax_y) {
        cx += step_x;
        tmax_x += dx;
      } else {
        cy += step_y;
        tmax_y += dy;
      }
    }
  }
  mask.keep(0, 0) = true;
  BoolMask sym = mask.keep;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i)
      if (mask.keep(i, j)) sym((m - i) % m, (n - j) % n) = true;
  mask.keep = sym;
  return mask;
}

}  // namespace ratiotv
