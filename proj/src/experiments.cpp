#include "ratiotv/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ratiotv/fourier_operator.hpp"
#include "ratiotv/io.hpp"
#include "ratiotv/metrics.hpp"
#include "ratiotv/phantoms.hpp"
#include "ratiotv/prox.hpp"
#include "ratiotv/radon.hpp"

namespace ratiotv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_num(double v, const char* fmt = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

double parse_num(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': not a number: '" + v + "'");
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return ExperimentConfig(std::move(kv));
}

std::string ExperimentConfig::fetch(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  const std::string v = it == kv_.end() ? fallback : it->second;
  resolved_[key] = v;
  return v;
}

double ExperimentConfig::get_num(const std::string& key, double fallback) const {
  return parse_num(key, fetch(key, fmt_num(fallback)));
}

Index ExperimentConfig::get_int(const std::string& key, Index fallback) const {
  const double v = get_num(key, double(fallback));
  const Index i = Index(std::llround(v));
  if (double(i) != v) throw std::runtime_error("config key '" + key + "': expected an integer");
  return i;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const std::string v = fetch(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::runtime_error("config key '" + key + "': not a boolean: '" + v + "'");
}

std::string ExperimentConfig::get_str(const std::string& key, const std::string& fallback) const {
  return fetch(key, fallback);
}

std::vector<double> ExperimentConfig::get_num_list(const std::string& key, const std::string& fallback) const {
  std::vector<double> out;
  for (const auto& tok : split_commas(fetch(key, fallback))) out.push_back(parse_num(key, tok));
  return out;
}

std::vector<std::string> ExperimentConfig::get_str_list(const std::string& key,
                                                        const std::string& fallback) const {
  return split_commas(fetch(key, fallback));
}

std::vector<std::string> ExperimentConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : kv_)
    if (!resolved_.count(k)) out.push_back(k);
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("RATIOTV_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}

void parallel_for_cells(Index count, int workers, const std::function<void(Index)>& f) {
  if (count <= 0) return;
  workers = int(std::min<Index>(std::max(workers, 1), count));
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<Index> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto body = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(size_t(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

std::uint64_t cell_seed(std::uint64_t base, std::uint64_t cell, std::uint64_t restart) {
  std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (cell + 1) + 0xBF58476D1CE4E5B9ull * (restart + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

ResultRow make_result_row(std::string method, std::vector<std::pair<std::string, std::string>> instance,
                          const ImageXd& u, const ImageXd& truth, const Diagnostics& diag) {
  ResultRow row;
  row.method = std::move(method);
  row.instance = std::move(instance);
  row.re = relative_error(u, truth);
  row.psnr = psnr(u, truth);
  row.exact_recovery = row.re < 1e-6;
  row.iters = diag.outer_iterations;
  row.inner_iters = diag.total_inner_iterations;
  row.diverged = diag.diverged;
  return row;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string csv = "method";
  if (!rows.empty())
    for (const auto& [key, value] : rows.front().instance) csv += "," + key;
  csv += ",re,psnr,exact_recovery,iters,seconds\n";
  for (const auto& row : rows) {
    csv += row.method;
    for (const auto& [key, value] : row.instance) csv += "," + value;
    csv += "," + fmt_num(row.re, "%.12g");
    csv += "," + fmt_num(row.psnr, "%.12g");
    csv += row.exact_recovery ? ",1" : ",0";
    csv += "," + std::to_string(row.iters);
    csv += "," + fmt_num(row.seconds, "%.3f");
    csv += "\n";
  }
  return csv;
}

namespace {

constexpr const char* kVersion = "0.1.0";

using Instance = std::vector<std::pair<std::string, std::string>>;

nlohmann::json trace_json(const std::string& experiment, const ResultRow& row, const Diagnostics& diag) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["method"] = row.method;
  nlohmann::json inst = nlohmann::json::object();
  for (const auto& [key, value] : row.instance) inst[key] = value;
  j["instance"] = inst;
  j["re_final"] = row.re;
  j["objective"] = diag.objective_trace;
  j["lagrangian"] = diag.lagrangian_trace;
  j["re"] = diag.re_trace;
  j["feasibility"] = diag.feasibility_trace;
  j["u_change"] = diag.u_change_trace;
  j["wall_time"] = diag.wall_time_trace;
  j["outer_iterations"] = diag.outer_iterations;
  j["inner_iterations"] = diag.total_inner_iterations;
  j["diverged"] = diag.diverged;
  j["random_direction_count"] = diag.random_direction_count;
  j["cg_failures"] = diag.cg_failures;
  return j;
}

SolverParams method_params(const ExperimentConfig& cfg, const std::string& method, SolverParams defaults) {
  auto num = [&](const char* key, double dflt) {
    return cfg.get_num(method + "_" + key, cfg.get_num(key, dflt));
  };
  auto integer = [&](const char* key, Index dflt) {
    return int(cfg.get_int(method + "_" + key, cfg.get_int(key, dflt)));
  };
  SolverParams p = defaults;
  p.rho = num("rho", defaults.rho);
  // a supplied rho drags gamma along unless gamma is supplied too; otherwise
  // both fall back to their own defaults
  const bool rho_supplied = cfg.has(method + "_rho") || cfg.has("rho");
  p.gamma = num("gamma", rho_supplied ? p.rho : defaults.gamma);
  p.beta = num("beta", defaults.beta);
  p.lambda = num("lambda", defaults.lambda);
  p.box_lo = num("box_lo", defaults.box_lo);
  p.box_hi = num("box_hi", defaults.box_hi);
  p.max_outer = integer("kmax", defaults.max_outer);
  p.max_inner = integer("jmax", defaults.max_inner);
  p.eps_rel = num("eps", defaults.eps_rel);
  p.cg_tol = num("cg_tol", defaults.cg_tol);
  p.cg_max_iter = integer("cg_max_iter", defaults.cg_max_iter);
  return p;
}

SolveResult dispatch_method(const std::string& method, const Problem& pb, const SolverParams& prm,
                            int sart_sweep_count) {
  if (method == "l1l2") return solve_l1_over_l2(pb, prm);
  if (method == "tv") return solve_tv(pb, prm);
  if (method == "lp") return solve_lp_half(pb, prm);
  if (method == "l1ml2") return solve_l1_minus_l2(pb, prm, 0.5);
  if (method == "zf") {
    SolveResult r;
    r.u = zero_fill(pb);
    return r;
  }
  if (method == "sart") return sart_solve(pb, sart_sweep_count);
  throw std::invalid_argument("unknown method: " + method);
}

// One solver invocation on one problem instance, timed, with optional trace.
struct SolveCell {
  std::string method;
  Instance instance;
  std::shared_ptr<const MeasurementOperator> op;
  std::shared_ptr<const ImageXd> truth;
  SolverParams params;
  int restarts = 1;        // > 1 keeps the best-RE run over seeded random inits
  std::uint64_t seed = 0;  // base for per-restart seeds
  int sart_sweep_count = 100;
};

ResultRow run_cell(const std::string& experiment, const SolveCell& cell, nlohmann::json* trace) {
  Problem pb{cell.op, cell.op->apply(*cell.truth), *cell.truth};
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult best;
  double best_re = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cell.restarts; ++r) {
    SolverParams prm = cell.params;
    prm.rng_seed = cell.restarts > 1 ? cell_seed(cell.seed, 0, std::uint64_t(r)) : cell.seed;
    // restart 0 keeps the deterministic zero start so extra restarts can only help
    prm.random_init = cell.restarts > 1 && r > 0;
    SolveResult res = dispatch_method(cell.method, pb, prm, cell.sart_sweep_count);
    const double re = relative_error(res.u, *cell.truth);
    if (re < best_re) {
      best_re = re;
      best = std::move(res);
    }
  }
  ResultRow row = make_result_row(cell.method, cell.instance, best.u, *cell.truth, best.diagnostics);
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (trace) *trace = trace_json(experiment, row, best.diagnostics);
  return row;
}

RunOutput run_cells(const std::string& experiment, const std::vector<SolveCell>& cells, bool with_traces) {
  RunOutput out;
  out.rows.resize(cells.size());
  std::vector<nlohmann::json> traces(with_traces ? cells.size() : 0);
  parallel_for_cells(Index(cells.size()), worker_count(), [&](Index i) {
    out.rows[size_t(i)] = run_cell(experiment, cells[size_t(i)], with_traces ? &traces[size_t(i)] : nullptr);
  });
  if (with_traces)
    for (size_t i = 0; i < cells.size(); ++i) {
      std::string id = experiment;
      for (const auto& [key, value] : cells[i].instance) id += "_" + key + value;
      id += "_" + cells[i].method;
      out.traces.emplace_back(std::move(id), std::move(traces[i]));
    }
  return out;
}

}  // namespace

RunOutput run_onebar_sweep(const ExperimentConfig& cfg) {
  const Index n = cfg.get_int("n", 100);
  const Index fc = cfg.get_int("fc", 2);
  const Index s_min = cfg.get_int("s_min", 1);
  const Index s_max = cfg.get_int("s_max", 49);
  const auto methods = cfg.get_str_list("methods", "tv,l1l2");
  const int restarts = int(cfg.get_int("restarts", 10));
  const auto seed = std::uint64_t(cfg.get_int("seed", 0));

  // the 1D studies run unboxed: a 0/1-valued signal with a [0,1] box makes the
  // clamp do the recovery and every method looks perfect
  SolverParams base;
  base.box_lo = cfg.get_num("box_lo", -kInf);
  base.box_hi = cfg.get_num("box_hi", kInf);

  SolverParams tv_defaults = base;
  tv_defaults.gamma = 10.0;
  tv_defaults.beta = 1.0;
  tv_defaults.lambda = 1e4;
  tv_defaults.max_outer = 100000;
  tv_defaults.eps_rel = 1e-12;

  SolverParams ratio_defaults = base;
  ratio_defaults.rho = 64.0;
  ratio_defaults.gamma = 64.0;
  ratio_defaults.beta = 1.0;
  ratio_defaults.lambda = 1e4;
  ratio_defaults.max_outer = 2000;
  ratio_defaults.max_inner = 10;
  ratio_defaults.eps_rel = 1e-12;

  std::map<std::string, SolverParams> per_method;
  for (const auto& method : methods)
    per_method[method] = method_params(cfg, method, method == "l1l2" ? ratio_defaults : tv_defaults);

  auto op = fourier_sampling_operator(make_lowpass_mask_1d(n, fc));
  std::vector<SolveCell> cells;
  for (const auto& method : methods)
    for (Index s = s_min; s <= s_max; ++s) {
      SolveCell cell;
      cell.method = method;
      cell.instance = {{"s", std::to_string(s)}};
      cell.op = op;
      cell.truth = std::make_shared<ImageXd>(make_one_bar(n, s));
      cell.params = per_method.at(method);
      cell.restarts = method == "l1l2" ? restarts : 1;
      cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
      cells.push_back(std::move(cell));
    }
  return run_cells("onebar", cells, false);
}

RunOutput run_twobar_sweep(const ExperimentConfig& cfg) {
  const Index n = cfg.get_int("n", 100);
  const Index fc = cfg.get_int("fc", 4);
  const Index s = cfg.get_int("s", 12);
  const double t_min = cfg.get_num("t_min", 1.05);
  const double t_max = cfg.get_num("t_max", 1.95);
  const double t_step = cfg.get_num("t_step", 0.05);
  const auto methods = cfg.get_str_list("methods", "tv,l1l2");
  const int restarts = int(cfg.get_int("restarts", 10));
  const auto seed = std::uint64_t(cfg.get_int("seed", 0));

  // unboxed like the one-bar study; the plateau value t is not known to the
  // solver, so any finite box would leak the answer
  SolverParams base;
  base.box_lo = cfg.get_num("box_lo", -kInf);
  base.box_hi = cfg.get_num("box_hi", kInf);

  SolverParams tv_defaults = base;
  tv_defaults.gamma = 10.0;
  tv_defaults.beta = 1.0;
  tv_defaults.lambda = 1e4;
  tv_defaults.max_outer = 100000;
  tv_defaults.eps_rel = 1e-12;

  SolverParams ratio_defaults = base;
  ratio_defaults.rho = 64.0;
  ratio_defaults.gamma = 64.0;
  ratio_defaults.beta = 1.0;
  ratio_defaults.lambda = 1e4;
  ratio_defaults.max_outer = 2000;
  ratio_defaults.max_inner = 10;
  ratio_defaults.eps_rel = 1e-12;

  std::map<std::string, SolverParams> per_method;
  for (const auto& method : methods)
    per_method[method] = method_params(cfg, method, method == "l1l2" ? ratio_defaults : tv_defaults);

  const Index t_count = Index(std::llround((t_max - t_min) / t_step)) + 1;
  auto op = fourier_sampling_operator(make_lowpass_mask_1d(n, fc));
  std::vector<SolveCell> cells;
  for (const auto& method : methods)
    for (Index i = 0; i < t_count; ++i) {
      const double t = t_min + double(i) * t_step;
      SolveCell cell;
      cell.method = method;
      cell.instance = {{"t", fmt_num(t, "%.2f")}};
      cell.op = op;
      cell.truth = std::make_shared<ImageXd>(make_two_bar(n, s, t));
      cell.params = per_method.at(method);
      cell.restarts = method == "l1l2" ? restarts : 1;
      cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
      cells.push_back(std::move(cell));
    }
  return run_cells("twobar", cells, false);
}

namespace {

// Shared table driver for the 2D studies: one operator per instance value,
// all methods on each instance, traces on.
RunOutput run_2d_table(const std::string& experiment, const ExperimentConfig& cfg,
                       const std::vector<std::pair<std::string, std::string>>& instances,
                       const std::vector<std::shared_ptr<const MeasurementOperator>>& ops,
                       const std::shared_ptr<const ImageXd>& truth) {
  const auto methods = cfg.get_str_list("methods", "zf,sart,tv,lp,l1ml2,l1l2");
  const auto seed = std::uint64_t(cfg.get_int("seed", 0));
  const int sart_count = int(cfg.get_int("sart_sweeps", 100));

  SolverParams base;
  base.box_lo = cfg.get_num("box_lo", 0.0);
  base.box_hi = cfg.get_num("box_hi", 1.0);
  const bool ct_like = experiment == "ct";

  // The Fourier studies compare methods at a matched split-step budget (150
  // steps): the ratio solver runs 30 outer passes of 5 splits, the single-loop
  // penalties run 150 plain steps. The tomography studies are slower per step
  // and run 300 single-split passes each. eps is small enough that the budget,
  // not the tolerance, ends every run.
  SolverParams ratio_defaults = base;
  ratio_defaults.rho = ct_like ? 0.25 : 0.5;
  ratio_defaults.gamma = ratio_defaults.rho;
  ratio_defaults.beta = ratio_defaults.rho;
  ratio_defaults.lambda = ct_like ? 0.05 : 1000.0;
  ratio_defaults.max_outer = ct_like ? 300 : 30;
  ratio_defaults.max_inner = ct_like ? 1 : 5;
  ratio_defaults.eps_rel = 1e-9;
  ratio_defaults.cg_tol = 1e-8;
  ratio_defaults.cg_max_iter = 400;

  SolverParams single_defaults = ratio_defaults;
  single_defaults.max_outer = ct_like ? 300 : 150;
  single_defaults.max_inner = 1;

  // the half-power shrink zeroes everything unless its cutoff ~(1/gamma)^(2/3)
  // sits well under the unit jumps of the phantom
  SolverParams lp_defaults = single_defaults;
  lp_defaults.gamma = ct_like ? 10.0 : 200.0;

  std::map<std::string, SolverParams> per_method;
  for (const auto& method : methods) {
    const SolverParams& fallback =
        method == "l1l2" ? ratio_defaults : (method == "lp" ? lp_defaults : single_defaults);
    per_method[method] = method_params(cfg, method, fallback);
  }

  std::vector<SolveCell> cells;
  for (size_t k = 0; k < instances.size(); ++k)
    for (const auto& method : methods) {
      SolveCell cell;
      cell.method = method;
      cell.instance = {instances[k]};
      cell.op = ops[k];
      cell.truth = truth;
      cell.params = per_method.at(method);
      cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
      cell.sart_sweep_count = sart_count;
      cells.push_back(std::move(cell));
    }
  return run_cells(experiment, cells, true);
}

}  // namespace

RunOutput run_mri_radial(const ExperimentConfig& cfg) {
  const Index size = cfg.get_int("size", 256);
  const auto lines = cfg.get_num_list("lines", "20,25,30");
  cfg.get_str_list("methods", "zf,tv,lp,l1ml2,l1l2");  // establish the mri default
  auto truth = std::make_shared<ImageXd>(shepp_logan(size, size));
  std::vector<std::pair<std::string, std::string>> instances;
  std::vector<std::shared_ptr<const MeasurementOperator>> ops;
  for (const double l : lines) {
    instances.emplace_back("lines", std::to_string(Index(l)));
    ops.push_back(fourier_sampling_operator(make_radial_mask(size, size, Index(l))));
  }
  return run_2d_table("mri", cfg, instances, ops, truth);
}

RunOutput run_superres(const ExperimentConfig& cfg) {
  const std::string image_path = cfg.get_str("image", "");
  const double ratio = cfg.get_num("ratio", 0.01);
  cfg.get_str_list("methods", "zf,tv,lp,l1ml2,l1l2");
  std::shared_ptr<const ImageXd> truth;
  if (image_path.empty()) {
    const Index size = cfg.get_int("size", 256);
    truth = std::make_shared<ImageXd>(shepp_logan(size, size));
  } else {
    truth = std::make_shared<ImageXd>(read_image(image_path));
  }
  std::vector<std::pair<std::string, std::string>> instances{{"ratio", fmt_num(ratio, "%g")}};
  std::vector<std::shared_ptr<const MeasurementOperator>> ops{
      fourier_sampling_operator(make_lowfreq_square_mask(truth->rows(), truth->cols(), ratio))};
  return run_2d_table("superres", cfg, instances, ops, truth);
}

RunOutput run_ct_limited(const ExperimentConfig& cfg) {
  const Index size = cfg.get_int("size", 256);
  const auto theta_max = cfg.get_num_list("theta_max", "30,45,60");
  const Index n_angles = cfg.get_int("n_angles", 31);
  const Index n_detectors = cfg.get_int("n_detectors", 362);
  cfg.get_str_list("methods", "sart,tv,lp,l1ml2,l1l2");
  auto truth = std::make_shared<ImageXd>(shepp_logan(size, size));
  const double pi = 3.14159265358979323846;
  std::vector<std::pair<std::string, std::string>> instances;
  std::vector<std::shared_ptr<const MeasurementOperator>> ops;
  for (const double tmax : theta_max) {
    instances.emplace_back("theta_max_deg", fmt_num(tmax, "%g"));
    std::vector<double> angles(static_cast<size_t>(n_angles));
    for (Index i = 0; i < n_angles; ++i)
      angles[size_t(i)] = (tmax * pi / 180.0) * double(i) / double(n_angles - 1);
    ops.push_back(radon_operator(size, size, angles, n_detectors));
  }
  return run_2d_table("ct", cfg, instances, ops, truth);
}

RunOutput run_sensitivity_grid(const ExperimentConfig& cfg) {
  const std::string app = cfg.get_str("app", "mri");
  const bool ct_like = app == "ct";
  if (!ct_like && app != "mri") throw std::runtime_error("sensitivity: app must be mri or ct");
  const Index size = cfg.get_int("size", 64);
  const auto i_list = cfg.get_num_list("i_list", "-4,-2,0,2,4");
  const auto j_list = cfg.get_num_list("j_list", "-4,-2,0,2,4");
  const auto lambdas = cfg.get_num_list("lambda_list", ct_like ? "0.005,0.05,0.5" : "100,1000,10000");
  const auto kmaxes = cfg.get_num_list("kmax_list", ct_like ? "100,300" : "300,500");
  const auto seed = std::uint64_t(cfg.get_int("seed", 0));

  std::shared_ptr<const MeasurementOperator> op;
  if (ct_like) {
    const double pi = 3.14159265358979323846;
    const double tmax = cfg.get_num("theta_max", 45.0);
    const Index n_angles = cfg.get_int("n_angles", 31);
    const Index n_detectors = cfg.get_int("n_detectors", Index(std::ceil(std::hypot(double(size), double(size)))) + 2);
    std::vector<double> angles(static_cast<size_t>(n_angles));
    for (Index i = 0; i < n_angles; ++i)
      angles[size_t(i)] = (tmax * pi / 180.0) * double(i) / double(n_angles - 1);
    op = radon_operator(size, size, angles, n_detectors);
  } else {
    const Index lines = cfg.get_int("lines", 10);
    op = fourier_sampling_operator(make_radial_mask(size, size, lines));
  }
  auto truth = std::make_shared<ImageXd>(shepp_logan(size, size));

  SolverParams defaults;
  defaults.box_lo = cfg.get_num("box_lo", 0.0);
  defaults.box_hi = cfg.get_num("box_hi", 1.0);
  defaults.max_inner = int(cfg.get_int("jmax", ct_like ? 1 : 5));
  defaults.eps_rel = cfg.get_num("eps", 1e-5);

  std::vector<SolveCell> cells;
  for (const double lambda : lambdas)
    for (const double kmax : kmaxes)
      for (const double i : i_list)
        for (const double j : j_list) {
          SolverParams p = defaults;
          p.lambda = lambda;
          p.max_outer = int(kmax);
          p.rho = std::pow(2.0, i);
          p.gamma = p.rho;
          p.beta = std::pow(2.0, j);
          SolveCell cell;
          cell.method = "l1l2";
          cell.instance = {{"lambda", fmt_num(lambda, "%g")},
                           {"kmax", fmt_num(kmax, "%g")},
                           {"rho", fmt_num(p.rho, "%g")},
                           {"beta", fmt_num(p.beta, "%g")}};
          cell.op = op;
          cell.truth = truth;
          cell.params = p;
          cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
          cells.push_back(std::move(cell));
        }
  return run_cells("sensitivity", cells, false);
}

RunOutput run_ablations(const ExperimentConfig& cfg) {
  const std::string app = cfg.get_str("app", "mri");
  const bool ct_like = app == "ct";
  if (!ct_like && app != "mri") throw std::runtime_error("ablation: app must be mri or ct");
  const std::string study = cfg.get_str("study", "all");
  // 64 px with 6 radial lines is the sweet spot where both studies separate:
  // unboxed iterates overshoot and degrade, and deeper inner loops pay off
  const Index size = cfg.get_int("size", 64);
  const auto seed = std::uint64_t(cfg.get_int("seed", 0));
  const auto jmax_list = cfg.get_num_list("jmax_list", "1,3,5,10");

  std::shared_ptr<const MeasurementOperator> op;
  if (ct_like) {
    const double pi = 3.14159265358979323846;
    const double tmax = cfg.get_num("theta_max", 45.0);
    const Index n_angles = cfg.get_int("n_angles", 31);
    const Index n_detectors = cfg.get_int("n_detectors", 362);
    std::vector<double> angles(static_cast<size_t>(n_angles));
    for (Index i = 0; i < n_angles; ++i)
      angles[size_t(i)] = (tmax * pi / 180.0) * double(i) / double(n_angles - 1);
    op = radon_operator(size, size, angles, n_detectors);
  } else {
    const Index lines = cfg.get_int("lines", 6);
    op = fourier_sampling_operator(make_radial_mask(size, size, lines));
  }
  auto truth = std::make_shared<ImageXd>(shepp_logan(size, size));

  SolverParams defaults;
  defaults.box_lo = 0.0;
  defaults.box_hi = 1.0;
  defaults.rho = ct_like ? 0.25 : 0.5;
  defaults.gamma = defaults.rho;
  defaults.beta = ct_like ? 0.25 : 0.5;
  defaults.lambda = ct_like ? 0.05 : 1000.0;
  defaults.max_outer = 300;
  defaults.max_inner = ct_like ? 1 : 5;
  defaults.eps_rel = 1e-300;  // ablations run the full budget so traces are comparable
  const SolverParams tuned = method_params(cfg, "l1l2", defaults);

  std::vector<SolveCell> cells;
  if (study == "box" || study == "all") {
    for (const bool boxed : {true, false}) {
      SolveCell cell;
      cell.method = "l1l2";
      cell.instance = {{"study", "box"}, {"variant", boxed ? "box_on" : "box_off"}};
      cell.op = op;
      cell.truth = truth;
      cell.params = tuned;
      if (!boxed) {
        cell.params.box_lo = -1e9;
        cell.params.box_hi = 1e9;
      }
      cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
      cells.push_back(std::move(cell));
    }
  }
  if (study == "jmax" || study == "all") {
    for (const double jmax : jmax_list) {
      SolveCell cell;
      cell.method = "l1l2";
      cell.instance = {{"study", "jmax"}, {"variant", "jmax_" + fmt_num(jmax, "%g")}};
      cell.op = op;
      cell.truth = truth;
      cell.params = tuned;
      cell.params.max_inner = int(jmax);
      cell.seed = cell_seed(seed, std::uint64_t(cells.size()));
      cells.push_back(std::move(cell));
    }
  }
  if (cells.empty()) throw std::runtime_error("ablation: study must be box, jmax, or all");
  return run_cells("ablation", cells, true);
}

}  // namespace ratiotv
