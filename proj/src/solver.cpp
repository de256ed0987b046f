#include "ratiotv/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ratiotv/fft_utils.hpp"
#include "ratiotv/fourier_operator.hpp"
#include "ratiotv/gradient.hpp"
#include "ratiotv/metrics.hpp"
#include "ratiotv/prox.hpp"
#include "ratiotv/radon.hpp"

namespace ratiotv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const SolverParams& p, bool needs_rho) {
  if (needs_rho && !(p.rho > 0)) throw std::invalid_argument("solver: rho must be positive");
  if (!(p.gamma > 0) || !(p.beta > 0) || !(p.lambda > 0))
    throw std::invalid_argument("solver: gamma, beta, lambda must be positive");
  if (p.box_lo > p.box_hi) throw std::invalid_argument("solver: empty box");
  if (p.max_outer < 1 || p.max_inner < 1) throw std::invalid_argument("solver: iteration caps must be >= 1");
  if (!(p.eps_rel > 0)) throw std::invalid_argument("solver: eps_rel must be positive");
}

double h_floor(const SolverParams& p, Index pixels) {
  return p.h_norm_floor > 0 ? p.h_norm_floor : 1e-12 * std::sqrt(double(pixels));
}

double data_residual(const Problem& pb, const ImageXd& u) {
  const double bn = pb.data.norm();
  return (pb.op->apply(u) - pb.data).norm() / (bn > 0 ? bn : 1.0);
}

ImageXd initial_u(const Problem& pb, const SolverParams& p, std::mt19937_64& rng) {
  const Index m = pb.op->rows(), n = pb.op->cols();
  if (p.init_image) {
    if (p.init_image->rows() != m || p.init_image->cols() != n)
      throw std::invalid_argument("solver: init_image shape does not match the operator");
    return *p.init_image;
  }
  if (!p.random_init) return ImageXd::Zero(m, n);
  const double lo = std::isfinite(p.box_lo) ? p.box_lo : 0.0;
  const double hi = std::isfinite(p.box_hi) ? p.box_hi : 1.0;
  std::uniform_real_distribution<double> unif(lo, hi);
  ImageXd u(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) u(i, j) = unif(rng);
  return u;
}

InnerState initial_inner(const Problem& pb, const SolverParams& p, std::mt19937_64& rng) {
  const Index m = pb.op->rows(), n = pb.op->cols();
  InnerState s;
  s.u = initial_u(pb, p, rng);
  // seed the splits from u so the start point actually enters the first
  // u-update (its right-hand side only sees the splits and duals)
  s.grad_split = gradient(s.u);
  s.box_split = box_project(s.u, p.box_lo, p.box_hi);
  s.box_dual = ImageXd::Zero(m, n);
  s.grad_dual = FieldXd::Zero(2 * m, n);
  s.data_dual = ComplexVector::Zero(pb.op->data_size());
  return s;
}

ImageXd cg_normal_solve(const ImageXd& rhs, const MeasurementOperator& op, const SolverParams& p,
                        const ImageXd* warm, Diagnostics* diag) {
  const double dtd = p.rho + p.gamma;
  auto matvec = [&](const ImageXd& x) -> ImageXd {
    return p.lambda * op.normal_apply(x) + dtd * gradient_adjoint(gradient(x)) + p.beta * x;
  };
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return ImageXd::Zero(rhs.rows(), rhs.cols());
  ImageXd x = warm ? *warm : ImageXd::Zero(rhs.rows(), rhs.cols());
  ImageXd r = rhs - matvec(x);
  ImageXd dir = r;
  double rs = r.squaredNorm();
  const double tol2 = p.cg_tol * p.cg_tol * rhs_norm * rhs_norm;
  int it = 0;
  while (it < p.cg_max_iter && rs > tol2) {
    const ImageXd ad = matvec(dir);
    const double alpha = rs / dir.cwiseProduct(ad).sum();
    x += alpha * dir;
    r -= alpha * ad;
    const double rs_new = r.squaredNorm();
    dir = r + (rs_new / rs) * dir;
    rs = rs_new;
    ++it;
  }
  if (diag) {
    diag->cg_total_iterations += it;
    if (rs > tol2) ++diag->cg_failures;
  }
  return x;
}

}  // namespace

double relative_change(const ImageXd& current, const ImageXd& previous) {
  const double n = current.norm();
  const double d = (current - previous).norm();
  return n > 0 ? d / n : d;
}

ImageXd solve_u_linear(const ImageXd& rhs, const MeasurementOperator& op, const SolverParams& params,
                       const ImageXd* warm_start, Diagnostics* diag) {
  const ImageXd* spec = op.gram_spectrum();
  if (!spec) return cg_normal_solve(rhs, op, params, warm_start, diag);

  thread_local ImageXd cached_spec;
  if (cached_spec.rows() != rhs.rows() || cached_spec.cols() != rhs.cols())
    cached_spec = gradient_gram_spectrum(rhs.rows(), rhs.cols());
  ImageXd denom = params.lambda * (*spec) + (params.rho + params.gamma) * cached_spec;
  denom.array() += params.beta;
  ComplexImage f = fft2(rhs);
  f.array() /= denom.array().cast<std::complex<double>>();
  return ifft2(std::move(f)).real();
}

void split_step(InnerState& s, const Problem& problem, const SolverParams& params, const DKernel& d_kernel,
                const FieldXd* ratio_drive, Diagnostics* diag) {
  const MeasurementOperator& op = *problem.op;
  FieldXd field_rhs = params.gamma * (s.grad_split - s.grad_dual);
  if (ratio_drive) field_rhs += *ratio_drive;
  const ImageXd rhs = params.lambda * op.adjoint(problem.data - s.data_dual) + gradient_adjoint(field_rhs) +
                      params.beta * (s.box_split - s.box_dual);
  s.u = solve_u_linear(rhs, op, params, &s.u, diag);
  const FieldXd du = gradient(s.u);
  s.grad_split = d_kernel(du + s.grad_dual);
  s.box_split = box_project(s.u + s.box_dual, params.box_lo, params.box_hi);
  s.box_dual += s.u - s.box_split;
  s.grad_dual += du - s.grad_split;
  s.data_dual += op.apply(s.u) - problem.data;
  ++s.iteration;
}

int inner_admm(InnerState& s, const Problem& problem, const SolverParams& params, const DKernel& d_kernel,
               const FieldXd* ratio_drive, Diagnostics* diag, std::vector<double>* data_residuals) {
  int j = 0;
  double change = kInf;
  while (j < params.max_inner && (j == 0 || change > params.eps_rel)) {
    const ImageXd prev = s.u;
    split_step(s, problem, params, d_kernel, ratio_drive, diag);
    change = relative_change(s.u, prev);
    if (data_residuals) data_residuals->push_back(data_residual(problem, s.u));
    ++j;
  }
  if (diag) diag->total_inner_iterations += j;
  return j;
}

double lagrangian_smooth(const ImageXd& u, const FieldXd& denom, const FieldXd& denom_dual, double rho) {
  const FieldXd du = gradient(u);
  const double l1 = du.cwiseAbs().sum();
  const double hn = denom.norm();
  double ratio;
  if (hn > 0)
    ratio = l1 / hn;
  else
    ratio = l1 > 0 ? kInf : 0.0;
  const FieldXd gap = du - denom;
  return ratio + rho * denom_dual.cwiseProduct(gap).sum() + 0.5 * rho * gap.squaredNorm();
}

double lagrangian_value(const OuterState& state, const Problem& problem, const SolverParams& params) {
  if (state.denom.norm() == 0.0) return kInf;
  const double bn = problem.data.norm();
  if ((problem.op->apply(state.u) - problem.data).norm() > 1e-6 * std::max(1.0, bn)) return kInf;
  if ((state.u.array() < params.box_lo - 1e-9).any() || (state.u.array() > params.box_hi + 1e-9).any())
    return kInf;
  return lagrangian_smooth(state.u, state.denom, state.denom_dual, params.rho);
}

namespace {

// Shared scaffold of the single-loop solvers: one split step per iteration,
// penalty fixed by the d-kernel, objective recorded through `objective`.
SolveResult solve_single_loop(const Problem& problem, const SolverParams& params, const DKernel& d_kernel,
                              const std::function<double(const FieldXd&)>& objective) {
  validate(params, false);
  SolverParams prm = params;
  prm.rho = 0.0;  // no ratio coupling in the u-system
  std::mt19937_64 rng(params.rng_seed);
  InnerState s = initial_inner(problem, prm, rng);
  Diagnostics diag;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < prm.max_outer; ++k) {
    const ImageXd prev = s.u;
    split_step(s, problem, prm, d_kernel, nullptr, &diag);
    ++diag.total_inner_iterations;
    const double change = relative_change(s.u, prev);
    diag.objective_trace.push_back(objective(gradient(s.u)));
    if (problem.ground_truth) diag.re_trace.push_back(relative_error(s.u, *problem.ground_truth));
    diag.feasibility_trace.push_back(data_residual(problem, s.u));
    diag.u_change_trace.push_back((s.u - prev).norm());
    diag.wall_time_trace.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    diag.outer_iterations = k + 1;
    if (change <= prm.eps_rel) break;
  }
  diag.box_violation = std::max(0.0, std::max((params.box_lo - s.u.minCoeff()), (s.u.maxCoeff() - params.box_hi)));
  return {box_project(s.u, params.box_lo, params.box_hi), std::move(diag)};
}

}  // namespace

SolveResult solve_l1_over_l2(const Problem& problem, const SolverParams& params) {
  validate(params, true);
  std::mt19937_64 rng(params.rng_seed);
  InnerState s = initial_inner(problem, params, rng);
  const Index m = problem.op->rows(), n = problem.op->cols();
  OuterState outer;
  // start on the splitting manifold h = Du so a nonzero start drives the first
  // pass; a zero start keeps h = 0 and the first shrink threshold at +inf
  outer.denom = s.grad_split;
  outer.denom_dual = FieldXd::Zero(2 * m, n);
  Diagnostics diag;
  const double floor = h_floor(params, m * n);
  const auto t0 = std::chrono::steady_clock::now();
  double denom_norm = outer.denom.norm();
  for (int k = 0; k < params.max_outer; ++k) {
    const ImageXd prev = s.u;
    const FieldXd ratio_drive = params.rho * (outer.denom - outer.denom_dual);
    const double thresh = 1.0 / (params.gamma * denom_norm);  // +inf on the first pass
    const DKernel dk = [thresh](const FieldXd& x) { return soft_shrink(x, thresh); };
    inner_admm(s, problem, params, dk, &ratio_drive, &diag);
    const FieldXd du = gradient(s.u);
    bool random_branch = false;
    outer.denom = prox_reciprocal_norm(du + outer.denom_dual, du.cwiseAbs().sum(), params.rho, rng, &random_branch);
    if (random_branch) ++diag.random_direction_count;
    denom_norm = outer.denom.norm();
    if (denom_norm < floor) diag.diverged = true;
    outer.denom_dual += du - outer.denom;
    outer.u = s.u;
    outer.iteration = k + 1;

    const double change = relative_change(s.u, prev);
    diag.lagrangian_trace.push_back(lagrangian_smooth(s.u, outer.denom, outer.denom_dual, params.rho));
    const double du_l2 = du.norm();
    diag.objective_trace.push_back(du_l2 > 0 ? du.cwiseAbs().sum() / du_l2 : kInf);
    if (problem.ground_truth) diag.re_trace.push_back(relative_error(s.u, *problem.ground_truth));
    diag.feasibility_trace.push_back(data_residual(problem, s.u));
    diag.u_change_trace.push_back((s.u - prev).norm());
    diag.wall_time_trace.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    diag.outer_iterations = k + 1;
    if (change <= params.eps_rel) break;
  }
  diag.box_violation = std::max(0.0, std::max((params.box_lo - s.u.minCoeff()), (s.u.maxCoeff() - params.box_hi)));
  return {box_project(s.u, params.box_lo, params.box_hi), std::move(diag)};
}

SolveResult solve_tv(const Problem& problem, const SolverParams& params) {
  const double thresh = 1.0 / params.gamma;
  return solve_single_loop(
      problem, params, [thresh](const FieldXd& x) { return soft_shrink(x, thresh); },
      [](const FieldXd& du) { return du.cwiseAbs().sum(); });
}

SolveResult solve_lp_half(const Problem& problem, const SolverParams& params) {
  const double thresh = 1.0 / params.gamma;
  return solve_single_loop(
      problem, params, [thresh](const FieldXd& x) { return half_threshold(x, thresh); },
      [](const FieldXd& du) { return du.cwiseAbs().cwiseSqrt().sum(); });
}

SolveResult solve_l1_minus_l2(const Problem& problem, const SolverParams& params, double alpha) {
  const double thresh = 1.0 / params.gamma;
  return solve_single_loop(
      problem, params, [thresh, alpha](const FieldXd& x) { return prox_l1_minus_l2(x, alpha, thresh); },
      [alpha](const FieldXd& du) { return du.cwiseAbs().sum() - alpha * du.norm(); });
}

ImageXd zero_fill(const Problem& problem) {
  const auto* fop = dynamic_cast<const FourierSamplingOperator*>(problem.op.get());
  if (!fop) throw std::invalid_argument("zero_fill: requires a Fourier sampling operator");
  return fop->adjoint(problem.data);
}

SolveResult sart_sweeps(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b,
                        Index m, Index n, int sweeps, const ImageXd* ground_truth) {
  const auto safe_inv = [](double x) { return x > 1e-12 ? 1.0 / x : 0.0; };
  const Eigen::VectorXd row_inv =
      (a * Eigen::VectorXd::Ones(a.cols())).unaryExpr(safe_inv);
  const Eigen::VectorXd col_inv =
      (a.transpose() * Eigen::VectorXd::Ones(a.rows())).unaryExpr(safe_inv);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(a.cols());
  Diagnostics diag;
  const double bn = b.norm();
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < sweeps; ++k) {
    const Eigen::VectorXd r = b - a * u;
    u += col_inv.cwiseProduct(a.transpose() * row_inv.cwiseProduct(r).eval());
    u = u.cwiseMax(0.0);
    diag.feasibility_trace.push_back((b - a * u).norm() / (bn > 0 ? bn : 1.0));
    if (ground_truth)
      diag.re_trace.push_back(relative_error(Eigen::Map<const ImageXd>(u.data(), m, n), *ground_truth));
    diag.wall_time_trace.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    diag.outer_iterations = k + 1;
  }
  return {Eigen::Map<const ImageXd>(u.data(), m, n), std::move(diag)};
}

SolveResult sart_solve(const Problem& problem, int sweeps) {
  const auto* rop = dynamic_cast<const RadonOperator*>(problem.op.get());
  if (!rop) throw std::invalid_argument("sart_solve: requires an explicit-matrix operator");
  const ImageXd* gt = problem.ground_truth ? &*problem.ground_truth : nullptr;
  return sart_sweeps(rop->matrix(), problem.data.real(), rop->rows(), rop->cols(), sweeps, gt);
}

}  // namespace ratiotv
