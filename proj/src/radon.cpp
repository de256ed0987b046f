#include "ratiotv/radon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ratiotv {

namespace {

struct Hit {
  Index pixel;
  double weight;
};

// Amanatides-Woo grid walk along the line p(t) = origin + t*dir, collecting
// intersection lengths per pixel. Pixel (i, j) spans x in [j-n/2, j+1-n/2],
// y in [m/2-i-1, m/2-i]; column-major pixel index is j*m + i.
void trace_ray(double ox, double oy, double dx, double dy, Index m, Index n, std::vector<Hit>& hits) {
  hits.clear();
  const double xmin = -0.5 * double(n), xmax = 0.5 * double(n);
  const double ymin = -0.5 * double(m), ymax = 0.5 * double(m);
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  // slab clipping against the image box
  if (std::abs(dx) < 1e-14) {
    if (ox <= xmin || ox >= xmax) return;
  } else {
    double a = (xmin - ox) / dx, b = (xmax - ox) / dx;
    t0 = std::max(t0, std::min(a, b));
    t1 = std::min(t1, std::max(a, b));
  }
  if (std::abs(dy) < 1e-14) {
    if (oy <= ymin || oy >= ymax) return;
  } else {
    double a = (ymin - oy) / dy, b = (ymax - oy) / dy;
    t0 = std::max(t0, std::min(a, b));
    t1 = std::min(t1, std::max(a, b));
  }
  if (!(t0 < t1)) return;

  const double eps = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
  double t = t0;
  double px = ox + t0 * dx, py = oy + t0 * dy;
  Index j = Index(std::floor(px - xmin));
  Index i = Index(std::floor(ymax - py));
  // entry point may sit exactly on the far boundary after rounding
  j = std::clamp(j, Index(0), n - 1);
  i = std::clamp(i, Index(0), m - 1);

  const Index step_j = dx > 0 ? 1 : -1;
  const Index step_i = dy > 0 ? -1 : 1;  // row index decreases as y grows
  const double tdx = std::abs(dx) < 1e-14 ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(dx);
  const double tdy = std::abs(dy) < 1e-14 ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(dy);

  auto next_x = [&](Index jj) {
    if (std::abs(dx) < 1e-14) return std::numeric_limits<double>::infinity();
    const double boundary = xmin + double(dx > 0 ? jj + 1 : jj);
    return (boundary - ox) / dx;
  };
  auto next_y = [&](Index ii) {
    if (std::abs(dy) < 1e-14) return std::numeric_limits<double>::infinity();
    const double boundary = ymax - double(dy > 0 ? ii : ii + 1);
    return (boundary - oy) / dy;
  };

  double tx = next_x(j), ty = next_y(i);
  while (t < t1 - eps) {
    const double tn = std::min({tx, ty, t1});
    const double w = tn - t;
    if (w > eps) hits.push_back({j * m + i, w});
    if (tx <= ty && tx <= t1) {
      j += step_j;
      if (j < 0 || j >= n) break;
      tx = next_x(j);
    } else if (ty < tx && ty <= t1) {
      i += step_i;
      if (i < 0 || i >= m) break;
      ty = next_y(i);
    } else {
      break;
    }
    t = tn;
  }
}

}  // namespace

RadonOperator::RadonOperator(Index m, Index n, std::vector<double> angles, Index n_detectors)
    : MeasurementOperator(m, n, Index(angles.size()) * n_detectors),
      angles_(std::move(angles)),
      n_detectors_(n_detectors) {
  if (angles_.empty()) throw std::invalid_argument("radon_operator: empty angle list");
  if (m != n) throw std::invalid_argument("radon_operator: square grids only");
  if (double(n_detectors_) < std::hypot(double(m), double(n)) - 1.0)
    throw std::invalid_argument("radon_operator: detector row shorter than the image diagonal");

  a_.resize(data_size_, m * n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(size_t(data_size_) * size_t(m) * 3 / 2);
  std::vector<Hit> hits;
  for (size_t a = 0; a < angles_.size(); ++a) {
    const double c = std::cos(angles_[a]), s = std::sin(angles_[a]);
    for (Index d = 0; d < n_detectors_; ++d) {
      const double t = double(d) - 0.5 * double(n_detectors_ - 1);
      // ray through (t*c, t*s) along the direction (-s, c)
      trace_ray(t * c, t * s, -s, c, m, n, hits);
      const Index row = Index(a) * n_detectors_ + d;
      for (const Hit& h : hits) trips.emplace_back(int(row), int(h.pixel), h.weight);
    }
  }
  a_.setFromTriplets(trips.begin(), trips.end());
  a_.makeCompressed();
}

ComplexVector RadonOperator::apply(const ImageXd& u) const {
  Eigen::VectorXd b = a_ * Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
  return b.cast<std::complex<double>>();
}

ImageXd RadonOperator::adjoint(const ComplexVector& c) const {
  Eigen::VectorXd r = a_.transpose() * c.real();
  return Eigen::Map<const ImageXd>(r.data(), m_, n_);
}

ImageXd RadonOperator::normal_apply(const ImageXd& u) const {
  Eigen::VectorXd b = a_ * Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
  Eigen::VectorXd r = a_.transpose() * b;
  return Eigen::Map<const ImageXd>(r.data(), m_, n_);
}

Sinogram RadonOperator::to_sinogram(const ComplexVector& data) const {
  Sinogram s;
  s.angles = angles_;
  s.values = Eigen::Map<const ImageXd>(data.real().eval().data(), n_detectors_, Index(angles_.size()));
  return s;
}

std::shared_ptr<const RadonOperator> radon_operator(Index m, Index n, const std::vector<double>& angles,
                                                    Index n_detectors) {
  return std::make_shared<const RadonOperator>(m, n, angles, n_detectors);
}

}  // namespace ratiotv
