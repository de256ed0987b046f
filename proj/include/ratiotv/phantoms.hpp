#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ratiotv/types.hpp"

namespace ratiotv {

// Step signal: zeros on the first and last s entries, ones in between.
// Stored as a 1-by-N row.
template <typename Scalar = double>
Image<Scalar> make_one_bar(Index n, Index s) {
  if (s < 1 || 2 * s > n) throw std::invalid_argument("make_one_bar: need 1 <= s <= N/2");
  Image<Scalar> u = Image<Scalar>::Zero(1, n);
  u.block(0, s, 1, n - 2 * s).setOnes();
  return u;
}

// Two-level step signal on a background of height t:
//   entries [s, 2s) are 2, the last 2s entries are 1, everything else is t.
template <typename Scalar = double>
Image<Scalar> make_two_bar(Index n, Index s, Scalar t) {
  if (s < 1 || 4 * s > n) throw std::invalid_argument("make_two_bar: need 1 <= s <= N/4");
  Image<Scalar> u = Image<Scalar>::Constant(1, n, t);
  u.block(0, s, 1, s).setConstant(Scalar(2));
  u.block(0, n - 2 * s, 1, 2 * s).setOnes();
  return u;
}

namespace detail {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan ellipse set; intensities chosen so summed values stay in [0,1].
inline const std::vector<Ellipse>& shepp_logan_ellipses() {
  static const std::vector<Ellipse> e = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  };
  return e;
}

}  // namespace detail

// Shepp-Logan head phantom on an m-by-n grid, pixel centers on [-1,1]^2,
// row 0 at y=+1. Each pixel sums the intensities of the ellipses covering it.
template <typename Scalar = double>
Image<Scalar> shepp_logan(Index m, Index n) {
  if (m < 16 || n < 16) throw std::invalid_argument("shepp_logan: grid must be at least 16x16");
  Image<Scalar> img = Image<Scalar>::Zero(m, n);
  const double pi = 3.14159265358979323846;
  for (const auto& e : detail::shepp_logan_ellipses()) {
    const double c = std::cos(e.phi_deg * pi / 180.0);
    const double s = std::sin(e.phi_deg * pi / 180.0);
    const double inv_a2 = 1.0 / (e.a * e.a), inv_b2 = 1.0 / (e.b * e.b);
    for (Index j = 0; j < n; ++j) {
      const double x = (2.0 * double(j) - double(n - 1)) / double(n - 1) - e.x0;
      for (Index i = 0; i < m; ++i) {
        const double y = (double(m - 1) - 2.0 * double(i)) / double(m - 1) - e.y0;
        const double xr = x * c + y * s;
        const double yr = -x * s + y * c;
        if (xr * xr * inv_a2 + yr * yr * inv_b2 <= 1.0) img(i, j) += Scalar(e.intensity);
      }
    }
  }
  // summed intensities are nonnegative by construction; clear the roundoff
  // dust (1.0 - 0.8 - 0.2 lands at -5.6e-17) so the phantom sits in the box
  return img.cwiseMax(Scalar(0)).eval();
}

}  // namespace ratiotv
