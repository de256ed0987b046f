#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ratiotv/prox.hpp"

using namespace ratiotv;

namespace {

std::mt19937_64& rng() {
  static std::mt19937_64 gen(0xabcd);
  return gen;
}

// bisection on tau^2(tau-1) = eta over tau >= 1; the residual is strictly
// increasing there, so this is an independent oracle for the closed form
double cubic_root_bisect(double eta) {
  double lo = 1.0, hi = std::max(2.0, 2.0 * std::cbrt(eta) + 2.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * (mid - 1.0) < eta ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// three rounds of grid refinement for the scalar objective g
template <typename G>
double grid_minimize(const G& g, double lo, double hi) {
  double best_y = lo, best = g(lo);
  for (int round = 0; round < 4; ++round) {
    const double step = (hi - lo) / 4000.0;
    for (int k = 0; k <= 4000; ++k) {
      const double y = lo + k * step;
      const double v = g(y);
      if (v < best) {
        best = v;
        best_y = y;
      }
    }
    lo = best_y - 2 * step;
    hi = best_y + 2 * step;
  }
  return best;
}

}  // namespace

TEST_CASE("soft shrink scalar and elementwise") {
  CHECK(soft_shrink(3.0, 1.0) == 2.0);
  CHECK(soft_shrink(-3.0, 1.0) == -2.0);
  CHECK(soft_shrink(0.5, 1.0) == 0.0);
  CHECK(soft_shrink(-0.5, 1.0) == 0.0);
  CHECK(soft_shrink(2.0, 0.0) == 2.0);

  ImageXd v(2, 3);
  v << 3.0, -0.2, 1.5, -4.0, 0.0, 0.9;
  const ImageXd s = soft_shrink(v, 1.0);
  for (Index i = 0; i < v.size(); ++i) CHECK(s.data()[i] == soft_shrink(v.data()[i], 1.0));
}

TEST_CASE("half threshold matches a grid oracle") {
  std::normal_distribution<double> gauss(0.0, 3.0);
  std::uniform_real_distribution<double> logmu(std::log(1e-4), std::log(10.0));
  for (int trial = 0; trial < 200; ++trial) {
    const double x = gauss(rng());
    const double mu = std::exp(logmu(rng()));
    const auto g = [&](double y) { return 0.5 * (y - x) * (y - x) + mu * std::sqrt(std::abs(y)); };
    const double y = half_threshold(x, mu);
    const double best = grid_minimize(g, -2.0 * std::abs(x) - 1.0, 2.0 * std::abs(x) + 1.0);
    CHECK(g(y) <= best + 1e-9 * std::max(1.0, std::abs(best)));
  }
}

TEST_CASE("half threshold cutoff and ties") {
  const double mu = 0.37;
  const double at = 1.5 * std::cbrt(mu * mu);
  CHECK(half_threshold(at, mu) == 0.0);  // exact tie goes to zero
  CHECK(half_threshold(-at, mu) == 0.0);
  CHECK(half_threshold(0.999 * at, mu) == 0.0);
  // just past the cutoff the minimizer jumps to about mu^(2/3)
  const double y = half_threshold(1.0001 * at, mu);
  CHECK(y == doctest::Approx(std::cbrt(mu * mu)).epsilon(0.01));
  CHECK(half_threshold(5.0, 0.0) == 5.0);
  CHECK(half_threshold(-1.0001 * at, mu) == -y);
}

TEST_CASE("box projection") {
  ImageXd v(1, 4);
  v << -2.0, 0.3, 1.0, 7.0;
  const ImageXd p = box_project(v, 0.0, 1.0);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(0, 1) == 0.3);
  CHECK(p(0, 2) == 1.0);
  CHECK(p(0, 3) == 1.0);
  CHECK_THROWS_AS(box_project(v, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("scale cubic root against bisection") {
  CHECK(scale_cubic_root(0.0) == 1.0);
  CHECK(scale_cubic_root(-3.0) == 1.0);
  std::uniform_real_distribution<double> logeta(std::log(1e-8), std::log(1e8));
  double prev_eta = 0.0, prev_tau = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double eta = std::exp(logeta(rng()));
    const double tau = scale_cubic_root(eta);
    const double ref = cubic_root_bisect(eta);
    CHECK(std::abs(tau - ref) <= 1e-10 * std::max(1.0, ref));
    // the defining cubic holds at the returned root
    CHECK(tau * tau * (tau - 1.0) == doctest::Approx(eta).epsilon(1e-9));
    if (eta > prev_eta) CHECK(tau >= prev_tau * (1.0 - 1e-12));
    if (eta < prev_eta) CHECK(tau <= prev_tau * (1.0 + 1e-12));
    prev_eta = eta;
    prev_tau = tau;
  }
  // small-eta asymptote tau - 1 ~ eta, no cancellation blowup
  for (double eta : {1e-6, 1e-9, 1e-12}) {
    CHECK(scale_cubic_root(eta) - 1.0 == doctest::Approx(eta).epsilon(1e-4));
  }
}

TEST_CASE("l1 minus l2 prox is a global minimizer") {
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ImageXd v(4, 3);
    for (Index i = 0; i < v.size(); ++i) v.data()[i] = 2.0 * gauss(rng());
    const double alpha = unif(rng());
    const double mu = 0.05 + 2.0 * unif(rng());
    const ImageXd y = prox_l1_minus_l2(v, alpha, mu);

    const auto f = [&](const ImageXd& w) {
      return 0.5 * (w - v).squaredNorm() + mu * (w.cwiseAbs().sum() - alpha * w.norm());
    };
    const double fy = f(y);
    const double tol = 1e-10 * std::max(1.0, std::abs(fy));
    CHECK(fy <= f(ImageXd::Zero(4, 3)) + tol);
    CHECK(fy <= f(v) + tol);
    // single-spike candidates at every coordinate
    for (Index i = 0; i < v.size(); ++i) {
      ImageXd spike = ImageXd::Zero(4, 3);
      spike.data()[i] = soft_shrink(v.data()[i], (1.0 - alpha) * mu);
      CHECK(fy <= f(spike) + tol);
    }
    // random perturbations around the returned point
    for (int p = 0; p < 30; ++p) {
      ImageXd w = y;
      const double sigma = std::pow(10.0, -3.0 * unif(rng()));
      for (Index i = 0; i < w.size(); ++i) w.data()[i] += sigma * gauss(rng());
      CHECK(fy <= f(w) + tol);
    }
    // scaled soft-shrink directions
    ImageXd z = soft_shrink(v, mu);
    if (z.norm() > 0) {
      for (double s : {0.5, 0.9, 1.0, 1.1, 1.5, 2.0}) CHECK(fy <= f(ImageXd(s * z)) + tol);
    }
  }
}

TEST_CASE("l1 minus l2 prox regimes") {
  // alpha = 0 collapses to plain soft shrinkage
  ImageXd v(2, 2);
  v << 1.7, -0.3, 0.0, -2.4;
  CHECK((prox_l1_minus_l2(v, 0.0, 0.8) - soft_shrink(v, 0.8)).cwiseAbs().maxCoeff() == 0.0);

  // middle regime keeps exactly one entry, the first max in column-major order
  ImageXd w(2, 2);
  w << 0.9, -0.9, 0.2, 0.1;  // vmax = 0.9 twice: (0,0) comes first column-major
  const double alpha = 0.5, mu = 1.0;  // (1-alpha)*mu = 0.5 < 0.9 <= mu
  const ImageXd y = prox_l1_minus_l2(w, alpha, mu);
  CHECK(y(0, 0) == doctest::Approx(0.9 - 0.5).epsilon(1e-12));
  CHECK(y(0, 1) == 0.0);
  CHECK(y(1, 0) == 0.0);
  CHECK(y(1, 1) == 0.0);

  // below (1-alpha)*mu everything zeroes out
  CHECK(prox_l1_minus_l2(ImageXd::Constant(3, 1, 0.4), alpha, mu).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(prox_l1_minus_l2(v, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_l1_minus_l2(v, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(prox_l1_minus_l2(v, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("reciprocal norm prox rescales toward the stationary radius") {
  std::normal_distribution<double> gauss;
  std::mt19937_64 local(7);
  for (int trial = 0; trial < 100; ++trial) {
    FieldXd t(6, 5);
    for (Index i = 0; i < t.size(); ++i) t.data()[i] = gauss(rng());
    const double a = 0.1 + 5.0 * std::abs(gauss(rng()));
    const double rho = 0.1 + 2.0 * std::abs(gauss(rng()));
    bool used_random = true;
    const FieldXd h = prox_reciprocal_norm(t, a, rho, local, &used_random);
    CHECK_FALSE(used_random);

    // stationarity of a/||h|| + (rho/2)||h - t||^2
    const double hn = h.norm();
    const FieldXd grad = -a / (hn * hn * hn) * h + rho * (h - t);
    CHECK(grad.norm() <= 1e-9 * std::max(1.0, rho * t.norm()));

    // beats every other rescaling of the target direction
    const double tn = t.norm();
    const auto g = [&](double r) { return a / std::abs(r) + 0.5 * rho * (r - tn) * (r - tn); };
    const double best = grid_minimize(g, 1e-3 * tn, tn + 3.0 * std::cbrt(a / rho) + 1.0);
    CHECK(g(hn) <= best + 1e-7 * std::max(1.0, best));
  }
}

TEST_CASE("reciprocal norm prox picks a random direction at a zero target") {
  const FieldXd zero = FieldXd::Zero(4, 4);
  std::mt19937_64 g1(123), g2(123), g3(77);
  bool used_random = false;
  const FieldXd h1 = prox_reciprocal_norm(zero, 2.0, 0.5, g1, &used_random);
  CHECK(used_random);
  CHECK(h1.norm() == doctest::Approx(std::cbrt(2.0 / 0.5)).epsilon(1e-12));
  // same seed, same draw; different seed, different direction
  const FieldXd h2 = prox_reciprocal_norm(zero, 2.0, 0.5, g2, nullptr);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
  const FieldXd h3 = prox_reciprocal_norm(zero, 2.0, 0.5, g3, nullptr);
  CHECK((h1 - h3).cwiseAbs().maxCoeff() > 1e-8);
}
