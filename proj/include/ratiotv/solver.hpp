#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "ratiotv/measurement.hpp"
#include "ratiotv/types.hpp"

namespace ratiotv {

struct SolverParams {
  double rho = 1.0;     // weight of the ratio-denominator coupling
  double gamma = 1.0;   // weight of the gradient splitting (kept equal to rho by the presets)
  double beta = 1.0;    // weight of the box splitting
  double lambda = 1e3;  // weight of the data constraint inside the splitting
  double box_lo = 0.0;
  double box_hi = 1.0;
  int max_outer = 300;   // outer iteration cap
  int max_inner = 5;     // split steps per outer pass
  double eps_rel = 1e-5;       // relative-change stopping tolerance, both loops
  double h_norm_floor = 0.0;   // divergence guard; 0 means 1e-12*sqrt(pixel count)
  double cg_tol = 1e-10;       // relative residual for the iterative back-end
  int cg_max_iter = 500;
  std::uint64_t rng_seed = 0;
  bool random_init = false;    // start u uniform in the box instead of at zero
  const ImageXd* init_image = nullptr;  // explicit warm start; overrides both
};

// State advanced once per outer iteration: the iterate, the gradient surrogate
// whose L2 norm carries the ratio denominator, and its scaled dual.
struct OuterState {
  ImageXd u;
  FieldXd denom;
  FieldXd denom_dual;
  int iteration = 0;
};

// State advanced by each split step. Splits and scaled duals persist across
// outer iterations; only the iteration counter resets.
struct InnerState {
  ImageXd u;
  FieldXd grad_split;   // carries Du
  ImageXd box_split;    // carries u for the box projection
  ImageXd box_dual;
  FieldXd grad_dual;
  ComplexVector data_dual;
  int iteration = 0;
};

struct Diagnostics {
  std::vector<double> lagrangian_trace;   // smooth part, one entry per outer iteration
  std::vector<double> objective_trace;    // |Du|_1 / |Du|_2 (or the solver's own objective)
  std::vector<double> re_trace;           // vs ground truth, when supplied
  std::vector<double> feasibility_trace;  // |Au-b| / |b|
  std::vector<double> u_change_trace;     // L2 norm of the iterate difference per outer iteration
  std::vector<double> wall_time_trace;    // seconds since solve start, per outer iteration
  int outer_iterations = 0;
  long total_inner_iterations = 0;
  long random_direction_count = 0;  // zero-target branch firings in the denominator update
  bool diverged = false;            // denominator norm fell under h_norm_floor
  double box_violation = 0.0;       // worst violation of the returned iterate before clamping
  int cg_failures = 0;
  long cg_total_iterations = 0;
};

struct SolveResult {
  ImageXd u;
  Diagnostics diagnostics;
};

// Solves the per-step minimizer of the d-subproblem given x = Du + dual.
using DKernel = std::function<FieldXd(const FieldXd&)>;

// Solves (lambda A^T A + (rho+gamma) D^T D + beta I) u = rhs. Operators with a
// Fourier-diagonal normal map get an exact spectral divide; everything else
// runs warm-started conjugate gradients to params.cg_tol.
ImageXd solve_u_linear(const ImageXd& rhs, const MeasurementOperator& op, const SolverParams& params,
                       const ImageXd* warm_start = nullptr, Diagnostics* diag = nullptr);

// One pass of the split updates: u, then the gradient and box splits, then all
// scaled duals. ratio_drive, when present, adds rho*D^T(denom - denom_dual) to
// the u-system right-hand side.
void split_step(InnerState& s, const Problem& problem, const SolverParams& params, const DKernel& d_kernel,
                const FieldXd* ratio_drive, Diagnostics* diag = nullptr);

// Runs split steps until max_inner or the relative change of u drops under
// eps_rel (at least one step). Returns the number of steps taken; optionally
// records the data residual after each step.
int inner_admm(InnerState& s, const Problem& problem, const SolverParams& params, const DKernel& d_kernel,
               const FieldXd* ratio_drive = nullptr, Diagnostics* diag = nullptr,
               std::vector<double>* data_residuals = nullptr);

// Gradient-ratio solver: minimizes |Du|_1 / |Du|_2 subject to the data
// constraint and the box, by alternating the inner split pass with the
// closed-form denominator update and its dual ascent.
SolveResult solve_l1_over_l2(const Problem& problem, const SolverParams& params);

// Same scaffold, single loop, penalty swapped through the d-kernel.
SolveResult solve_tv(const Problem& problem, const SolverParams& params);
SolveResult solve_lp_half(const Problem& problem, const SolverParams& params);
SolveResult solve_l1_minus_l2(const Problem& problem, const SolverParams& params, double alpha = 0.5);

// Adjoint reconstruction for Fourier sampling (unmeasured bins left at zero).
ImageXd zero_fill(const Problem& problem);

// Simultaneous algebraic reconstruction with inverse row/column-sum weighting
// and a nonnegativity clamp per sweep. Requires an explicit-matrix operator.
SolveResult sart_solve(const Problem& problem, int sweeps);

// Generic SART core over any explicit sparse system (m-by-n image unknowns).
SolveResult sart_sweeps(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& b,
                        Index m, Index n, int sweeps, const ImageXd* ground_truth = nullptr);

// Augmented objective at a given outer state: ratio term plus the scaled-dual
// coupling and penalty. Returns +inf when the data constraint or the box is
// violated beyond a small tolerance, or when the denominator field vanishes.
double lagrangian_value(const OuterState& state, const Problem& problem, const SolverParams& params);

// The same value without the feasibility indicators; what the traces record.
double lagrangian_smooth(const ImageXd& u, const FieldXd& denom, const FieldXd& denom_dual, double rho);

// Relative change guard used by both loops.
double relative_change(const ImageXd& current, const ImageXd& previous);

}  // namespace ratiotv
