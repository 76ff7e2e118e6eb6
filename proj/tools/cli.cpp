#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "distsdp/async_engine.hpp"
#include "distsdp/error.hpp"
#include "distsdp/imgseg.hpp"
#include "distsdp/oracles.hpp"
#include "distsdp/partition.hpp"
#include "distsdp/problem_io.hpp"
#include "distsdp/schedule.hpp"
#include "distsdp/sync_engine.hpp"

namespace distsdp {

namespace {

using Clock = std::chrono::steady_clock;

enum SeedStream : std::uint64_t { kInit = 1, kSchedule = 2, kRound = 3 };

struct CommonArgs {
  std::string problem;
  std::uint64_t seed = 0;
  std::string trace;
  std::string init = "random";
  int rank = 0;
  bool timing = false;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--problem", a.problem, "problem file (JSON)")->required();
  app->add_option("--seed", a.seed, "random seed");
  app->add_option("--trace", a.trace, "write the per-iteration trace CSV here");
  app->add_option("--init", a.init, "initial columns: random or common")
      ->check(CLI::IsMember({"random", "common"}));
  app->add_option("--rank", a.rank, "factor rank p, 0 picks ceil(sqrt(2n))+1");
  app->add_flag("--timing", a.timing, "record wall-clock time in the trace (breaks byte-reproducibility)");
}

Matrix initial_factor(const CommonArgs& a, int n) {
  const int p = a.rank > 0 ? a.rank : choose_rank(n);
  const std::uint64_t s = derive_seed(a.seed, {kInit});
  return a.init == "common" ? common_init(p, n, s) : random_init(p, n, s);
}

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// One line with every option's effective value, defaults included.
void echo_config(const CLI::App* sub, std::ostream& out) {
  out << "config subcommand=" << sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      for (std::size_t k = 0; k < res.size(); ++k) value += (k ? "," : "") + res[k];
      if (opt->get_type_size() == 0 && value.empty()) value = "true";
    } else {
      value = opt->get_default_str();
      if (value.empty()) value = opt->get_type_size() == 0 ? "false" : "-";
    }
    out << ' ' << name << '=' << value;
  }
  out << '\n';
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const Problem prob = load_problem(path);
  const AgentPartition part = build_partition(prob);
  out << describe_partition(part);
  const std::vector<int> perm = reorder_indices(part);
  out << "order=";
  for (std::size_t k = 0; k < perm.size(); ++k) out << (k ? "," : "") << perm[k] + 1;
  out << '\n' << "valid=true sn=" << part.shared_count() << '\n';
  return 0;
}

struct SyncArgs {
  CommonArgs common;
  double grad_tol = 1e-6;
  long max_iters = -1;
  double sigma = 0.1;
};

int cmd_solve_sync(const SyncArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const Problem prob = load_problem(a.common.problem);
  const AgentPartition part = build_partition(prob);
  print_warnings(part.warnings, err);
  const StepSizes steps = sync_step_sizes(part, prob.M, a.sigma);
  const Matrix V0 = initial_factor(a.common, prob.M.n());
  SyncOptions opts;
  opts.grad_tol = a.grad_tol;
  opts.max_iters = a.max_iters;
  const SyncResult res = run_sync(prob, part, steps, V0, opts);
  if (!a.common.trace.empty()) res.trace.write_csv(a.common.trace, a.common.timing);
  out << "converged=" << (res.converged ? "true" : "false") << " f=" << format_double(res.f)
      << " grad_norm=" << format_double(res.grad_norm) << " iters=" << res.iters
      << " consensus_gap=" << format_double(res.max_consensus_gap)
      << " wall_ms=" << format_double(std::round(elapsed_ms(t0) * 1000.0) / 1000.0) << '\n';
  return res.converged ? 0 : 2;
}

struct AsyncArgs {
  CommonArgs common;
  int B = 5;
  std::string schedule = "uniform";
  double tol = 1e-7;
  long max_iters = 100000;
  double sigma = 0.5;
};

int cmd_solve_async(const AsyncArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const Problem prob = load_problem(a.common.problem);
  const AgentPartition part = build_partition(prob);
  print_warnings(part.warnings, err);
  const StepSizes steps = async_step_sizes(part, prob.M, a.B, a.sigma);
  DelaySchedule sched(part, a.B, derive_seed(a.common.seed, {kSchedule}),
                      parse_schedule_mode(a.schedule));
  const Matrix V0 = initial_factor(a.common, prob.M.n());
  AsyncOptions opts;
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  const AsyncResult res = run_async(prob, part, steps, sched, V0, opts);
  if (!a.common.trace.empty()) res.trace.write_csv(a.common.trace, a.common.timing);
  out << "converged=" << (res.converged ? "true" : "false") << " f=" << format_double(res.f)
      << " grad_norm=" << format_double(res.grad_norm) << " iters=" << res.iters
      << " consensus_gap=" << format_double(res.consensus_gap)
      << " wall_ms=" << format_double(std::round(elapsed_ms(t0) * 1000.0) / 1000.0) << '\n';
  return res.converged ? 0 : 2;
}

struct MaxcutArgs {
  CommonArgs common;
  int trials = 200;
  double grad_tol = 1e-9;
  long max_iters = 10000;
  double sigma = 0.1;
};

int cmd_maxcut(const MaxcutArgs& a, std::ostream& out, std::ostream& err) {
  const auto t0 = Clock::now();
  const Problem prob = load_problem(a.common.problem);
  const AgentPartition part = build_partition(prob);
  print_warnings(part.warnings, err);
  const StepSizes steps = sync_step_sizes(part, prob.M, a.sigma);
  const Matrix V0 = initial_factor(a.common, prob.M.n());
  SyncOptions opts;
  opts.grad_tol = a.grad_tol;
  opts.max_iters = a.max_iters;
  const SyncResult res = run_sync(prob, part, steps, V0, opts);
  if (!a.common.trace.empty()) res.trace.write_csv(a.common.trace, a.common.timing);
  const double bound = sdp_cut_bound(prob.M, res.f);
  const CutResult rounded =
      hyperplane_round(res.V, prob.M, a.trials, derive_seed(a.common.seed, {kRound}));
  out << "f_star=" << format_double(res.f) << '\n';
  out << "sdp_bound=" << format_double(bound) << '\n';
  if (prob.M.n() <= 24)
    out << "brute=" << format_double(brute_force_maxcut(prob.M).value) << '\n';
  else
    out << "brute=skipped\n";
  out << "rounded=" << format_double(rounded.value) << '\n';
  out << "ratio=" << format_double(bound > 0.0 ? rounded.value / bound : 1.0) << '\n';
  out << "converged=" << (res.converged ? "true" : "false") << " f=" << format_double(res.f)
      << " grad_norm=" << format_double(res.grad_norm) << " iters=" << res.iters
      << " wall_ms=" << format_double(std::round(elapsed_ms(t0) * 1000.0) / 1000.0) << '\n';
  return res.converged ? 0 : 2;
}

struct ImgArgs {
  std::string image;
  std::string mask;
  std::string trace;
  std::string schedule = "uniform";
  SegmentOptions seg;
  bool no_align = false;
  bool timing = false;
};

int cmd_imgseg(const ImgArgs& a, std::ostream& out) {
  const auto t0 = Clock::now();
  const Image img = load_image(a.image);
  SegmentOptions opts = a.seg;
  opts.mode = parse_schedule_mode(a.schedule);
  opts.align = !a.no_align;
  const Segmentation seg = segment(img, opts);
  if (!a.mask.empty()) write_file(a.mask, encode_pgm(img.width, img.height, seg.mask));
  if (!a.trace.empty()) seg.solve.trace.write_csv(a.trace, a.timing);
  out << "converged=" << (seg.solve.converged ? "true" : "false")
      << " f=" << format_double(seg.solve.f) << " grad_norm=" << format_double(seg.solve.grad_norm)
      << " iters=" << seg.solve.iters << " cut=" << format_double(seg.cut)
      << " wall_ms=" << format_double(std::round(elapsed_ms(t0) * 1000.0) / 1000.0) << '\n';
  return seg.solve.converged ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed Burer-Monteiro solvers for diagonally constrained SDPs"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a problem file and print its agent tree");
  validate->add_option("--problem", validate_path, "problem file (JSON)")->required();

  SyncArgs sync_args;
  auto* sync = app.add_subcommand("solve-sync", "run the synchronous algorithm");
  add_common(sync, sync_args.common);
  sync->add_option("--grad-tol", sync_args.grad_tol, "stop when the Riemannian gradient norm is below this");
  sync->add_option("--max-iters", sync_args.max_iters, "sweep cap, -1 means 10 n");
  sync->add_option("--sigma", sync_args.sigma, "step-size margin in (0, 1)");

  AsyncArgs async_args;
  auto* async = app.add_subcommand("solve-async", "run the asynchronous algorithm on a simulated clock");
  add_common(async, async_args.common);
  async->add_option("--B", async_args.B, "staleness bound (ticks)")->check(CLI::PositiveNumber);
  async->add_option("--schedule", async_args.schedule, "uniform, roundrobin or adversarial")
      ->check(CLI::IsMember({"uniform", "roundrobin", "adversarial", "uniform-random", "round-robin",
                             "adversarial-max-delay"}));
  async->add_option("--tol", async_args.tol, "stop when max ||s|| over the last B ticks is below this");
  async->add_option("--max-iters", async_args.max_iters, "tick cap");
  async->add_option("--sigma", async_args.sigma, "step-size margin in (0, 1)");

  MaxcutArgs cut_args;
  auto* maxcut = app.add_subcommand("maxcut", "solve the relaxation, round it and compare with the bound");
  add_common(maxcut, cut_args.common);
  maxcut->add_option("--trials", cut_args.trials, "random hyperplanes")->check(CLI::PositiveNumber);
  maxcut->add_option("--grad-tol", cut_args.grad_tol, "solver gradient tolerance");
  maxcut->add_option("--max-iters", cut_args.max_iters, "solver sweep cap");
  maxcut->add_option("--sigma", cut_args.sigma, "step-size margin in (0, 1)");

  ImgArgs img_args;
  auto* imgseg = app.add_subcommand("imgseg", "segment a PPM image with the asynchronous solver");
  imgseg->add_option("--image", img_args.image, "input image (P3 or P6)")->required();
  imgseg->add_option("--threshold", img_args.seg.threshold, "RGB distance threshold");
  imgseg->add_option("--agents", img_args.seg.agents, "number of horizontal strips")->check(CLI::PositiveNumber);
  imgseg->add_option("--B", img_args.seg.B, "staleness bound (ticks)")->check(CLI::PositiveNumber);
  imgseg->add_option("--schedule", img_args.schedule, "uniform, roundrobin or adversarial")
      ->check(CLI::IsMember({"uniform", "roundrobin", "adversarial", "uniform-random", "round-robin",
                             "adversarial-max-delay"}));
  imgseg->add_option("--seed", img_args.seg.seed, "random seed");
  imgseg->add_option("--mask", img_args.mask, "write the PGM mask here");
  imgseg->add_option("--trace", img_args.trace, "write the per-tick trace CSV here");
  imgseg->add_option("--tol", img_args.seg.tol, "solver stopping tolerance on ||s||");
  imgseg->add_option("--max-iters", img_args.seg.max_iters, "tick cap");
  imgseg->add_option("--sigma", img_args.seg.sigma, "step-size margin in (0, 1)");
  imgseg->add_option("--trials", img_args.seg.trials, "random hyperplanes")->check(CLI::PositiveNumber);
  imgseg->add_flag("--no-align", img_args.no_align, "keep raw rounded labels");
  imgseg->add_flag("--timing", img_args.timing, "record wall-clock time in the trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error=USAGE " << e.what() << '\n';
    return 1;
  }

  for (const CLI::App* sub : app.get_subcommands()) echo_config(sub, out);
  try {
    if (*validate) return cmd_validate(validate_path, out);
    if (*sync) return cmd_solve_sync(sync_args, out, err);
    if (*async) return cmd_solve_async(async_args, out, err);
    if (*maxcut) return cmd_maxcut(cut_args, out, err);
    if (*imgseg) return cmd_imgseg(img_args, out);
  } catch (const Error& e) {
    err << "error=" << error_code_name(e.code()) << ' ' << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace distsdp
