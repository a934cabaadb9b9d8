// landr: command-line front end for the solvers and experiment harness.
//
//   landr solve --matrix example3 --m 120 --k 40 --policy k-periodic:40 --rhs 2
//   landr eig   --matrix example1 --nev 30
//   landr bench spec.json
//   landr repro example1

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "landr/harness.hpp"

namespace fs = std::filesystem;
using namespace landr;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;

struct Options {
  // matrix
  std::string matrix = "example1";
  std::size_t n = 0;
  std::uint64_t matrix_seed = 22;
  double largest = 5400;
  // solver
  std::string method = "landr";
  std::size_t m = 100;
  std::size_t k = 40;
  int cycles = 100;
  std::string policy = "k-so";
  double rtol = 1e-8;
  double eig_tol = 1e-8;
  std::size_t nev = 0;
  std::string target = "smallest-magnitude";
  std::size_t extra_largest = 0;
  bool all_cycles = false;
  int max_iterations = 10000;
  // right-hand sides
  std::size_t rhs = 1;
  std::string rhs_mode = "random";
  std::uint64_t rhs_seed = 1;
  double perturbation = 1e-3;
  bool project_solutions = false;
  // output
  std::string name;
  std::string out;
  bool no_plot = false;
  bool quiet = false;
  unsigned threads = 1;
};

std::string default_out() {
  const char* env = std::getenv("LANDR_OUTPUT_DIR");
  return env && *env ? env : "landr-out";
}

std::string help_footer() {
  std::string s = "\nMatrix recipes (--matrix NAME, or a path to a Matrix Market file):\n";
  for (const auto& r : recipes())
    if (r.name != "file") s += "  " + r.name + std::string(12 - r.name.size(), ' ') + r.description + "\n";
  s += "\nReorthogonalization policies (--policy): " + reorth_policy_help() + "\n";
  s += "  F is a frequency in iterations; E is the PRO threshold exponent (eta = eps^E).\n";
  s += "\nBuilt-in experiments (repro NAME):\n";
  for (const auto& r : repro_experiments())
    s += "  " + r.name + std::string(12 - std::min<std::size_t>(r.name.size(), 11), ' ') +
         r.description + "\n";
  s += "\nOutput goes to --out, else $LANDR_OUTPUT_DIR, else ./landr-out.\n"
       "Exit status: 0 converged, 2 not converged, 1 usage or I/O error.\n";
  return s;
}

MatrixRecipe recipe_from(const Options& o) {
  MatrixRecipe r;
  const bool builtin = std::any_of(recipes().begin(), recipes().end(), [&](const RecipeInfo& i) {
    return i.name == o.matrix && i.name != "file";
  });
  if (builtin) {
    r.name = o.matrix;
  } else {
    if (!fs::exists(o.matrix))
      throw std::invalid_argument("--matrix '" + o.matrix +
                                  "' is neither a recipe nor an existing file (see --help)");
    r.name = "file";
    r.path = o.matrix;
  }
  r.n = o.n;
  r.seed = o.matrix_seed;
  r.largest = o.largest;
  return r;
}

ExperimentSpec solve_spec(const Options& o, bool eig_only) {
  ExperimentSpec spec;
  spec.matrix = recipe_from(o);
  spec.name = o.name.empty() ? (eig_only ? "eig_" : "solve_") + o.matrix : o.name;
  if (spec.matrix.name == "file" && o.name.empty())
    spec.name = (eig_only ? "eig_" : "solve_") + fs::path(o.matrix).stem().string();
  spec.rhs.count = eig_only ? 1 : o.rhs;
  spec.rhs.mode = o.rhs_mode;
  spec.rhs.seed = o.rhs_seed;
  spec.rhs.perturbation = o.perturbation;
  if (spec.rhs.count == 0) throw std::invalid_argument("--rhs must be at least 1");

  SolverStep first;
  first.solver = o.method;
  first.rtol = o.rtol;
  SolverConfig& c = first.cfg;
  c.m = o.m;
  c.k = o.k;
  c.max_cycles = o.cycles;
  c.policy = ReorthPolicy::parse(o.policy);
  c.lin_rtol = o.rtol;
  c.eig_tol = o.eig_tol;
  c.n_eig_wanted = o.nev;
  c.target = parse_target(o.target);
  c.n_extra_largest = o.extra_largest;
  c.run_all_cycles = o.all_cycles;
  c.solve_linear = !eig_only;
  if (eig_only && c.n_eig_wanted == 0) c.n_eig_wanted = std::min<std::size_t>(10, c.k);
  // Validate before anything of size n is allocated.
  c.validate(spec.matrix.size());
  spec.chain.push_back(first);

  if (spec.rhs.count > 1) {
    SolverStep rest;
    rest.solver = o.method == "landr" ? "dcg" : "dminres";
    rest.rtol = o.rtol;
    rest.max_iterations = o.max_iterations;
    rest.project_solutions = o.project_solutions;
    rest.rhs.clear();
    for (std::size_t i = 1; i < spec.rhs.count; ++i) rest.rhs.push_back(i);
    spec.chain.push_back(rest);
  }
  return spec;
}

void report(const ResultBundle& b, const std::vector<fs::path>& files, bool quiet,
            std::size_t nev) {
  if (!quiet && nev > 0 && !b.solves.empty()) {
    const SolveRecord& r = b.solves.front();
    std::printf("%4s %22s %11s\n", "i", "value", "residual");
    for (std::size_t i = 0; i < std::min(nev, r.values.size()); ++i)
      std::printf("%4zu %22.15e %11.3e\n", i + 1, r.values[i], r.residuals[i]);
  }
  if (!quiet) {
    std::printf("%-28s %4s %-14s %6s %6s %8s %10s %11s\n", "solve", "rhs", "status", "cycles",
                "iters", "matvecs", "vecops", "final_resid");
    for (const SolveRecord& r : b.solves)
      std::printf("%-28s %4zu %-14s %6d %6d %8llu %10llu %11.3e\n", r.label.c_str(), r.rhs_index,
                  to_string(r.status).c_str(), r.cycles, r.iterations,
                  static_cast<unsigned long long>(r.matvecs),
                  static_cast<unsigned long long>(r.vecops), r.final_resid);
    std::printf("total matvecs %llu, vecops %llu\n",
                static_cast<unsigned long long>(b.total_matvecs),
                static_cast<unsigned long long>(b.total_vecops));
    if (!files.empty()) std::printf("wrote %zu files to %s\n", files.size(),
                                    files.front().parent_path().string().c_str());
  }
  for (const auto& w : b.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int execute(const ExperimentSpec& spec, const Options& o) {
  const ResultBundle bundle = run(spec);
  const auto files = emit(bundle, o.out.empty() ? default_out() : o.out, !o.no_plot);
  const bool eig_only = !spec.chain.empty() && !spec.chain.front().cfg.solve_linear;
  report(bundle, files, o.quiet, eig_only ? spec.chain.front().cfg.n_eig_wanted : 0);
  return bundle.converged() ? kExitConverged : kExitNotConverged;
}

void add_matrix_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--matrix", o.matrix, "Recipe name or Matrix Market path")
      ->capture_default_str();
  cmd->add_option("--n", o.n, "Dimension override (0: recipe default)")->capture_default_str();
  cmd->add_option("--matrix-seed", o.matrix_seed, "Seed for the example10 diagonal")
      ->capture_default_str();
  cmd->add_option("--largest", o.largest, "Largest eigenvalue for example5")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, Options& o, bool eig) {
  cmd->add_option("--method", o.method, "landr or minresdr")
      ->check(CLI::IsMember({"landr", "minresdr"}))
      ->capture_default_str();
  cmd->add_option("--m", o.m, "Basis size per cycle")->capture_default_str();
  cmd->add_option("--k", o.k, "Ritz vectors kept at restart")->capture_default_str();
  cmd->add_option("--cycles", o.cycles, "Maximum number of cycles")->capture_default_str();
  cmd->add_option("--policy", o.policy, "Reorthogonalization policy")->capture_default_str();
  cmd->add_option("--eig-tol", o.eig_tol, "Eigenresidual tolerance ||Ay - theta y||")
      ->capture_default_str();
  cmd->add_option("--nev", o.nev,
                  eig ? "Eigenpairs wanted (0: min(10, k))" : "Eigenpairs that must converge too")
      ->capture_default_str();
  cmd->add_option("--target", o.target,
                  "smallest-magnitude | smallest-algebraic | largest-algebraic")
      ->capture_default_str();
  cmd->add_option("--extra-largest", o.extra_largest, "Also keep this many largest Ritz pairs")
      ->capture_default_str();
  cmd->add_flag("--all-cycles", o.all_cycles, "Run every cycle even after convergence");
  if (!eig) {
    cmd->add_option("--rtol", o.rtol, "Relative residual tolerance")->capture_default_str();
    cmd->add_option("--max-iterations", o.max_iterations, "Iteration cap for deflated solves")
        ->capture_default_str();
    cmd->add_option("--rhs", o.rhs, "Number of right-hand sides (extra ones use D-CG / D-Minres)")
        ->capture_default_str();
    cmd->add_option("--rhs-mode", o.rhs_mode, "random or related (b_i = b_1 + p * ran_i)")
        ->check(CLI::IsMember({"random", "related"}))
        ->capture_default_str();
    cmd->add_option("--perturbation", o.perturbation, "p for --rhs-mode related")
        ->capture_default_str();
    cmd->add_flag("--project-solutions", o.project_solutions,
                  "Project each D-CG start over earlier solutions");
  }
  cmd->add_option("--rhs-seed", o.rhs_seed, "Seed for the right-hand sides")
      ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output directory (default $LANDR_OUTPUT_DIR or ./landr-out)");
  cmd->add_option("--name", o.name, "File name prefix");
  cmd->add_flag("--no-plot", o.no_plot, "Skip the gnuplot script");
  cmd->add_flag("-q,--quiet", o.quiet, "Print warnings only");
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Deflated restarted Lanczos solvers for symmetric and Hermitian systems", "landr"};
  app.footer(help_footer());
  app.require_subcommand(1);
  app.add_option("--threads", o.threads, "Threads for operator application")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* solve = app.add_subcommand("solve", "Solve A x = b (plus extra rhs with deflation)");
  add_matrix_flags(solve, o);
  add_solver_flags(solve, o, false);
  add_output_flags(solve, o);

  auto* eig = app.add_subcommand("eig", "Eigenvalues only: no linear updates");
  add_matrix_flags(eig, o);
  add_solver_flags(eig, o, true);
  add_output_flags(eig, o);

  std::string spec_path;
  auto* bench = app.add_subcommand("bench", "Run an experiment spec (JSON)");
  bench->add_option("spec", spec_path, "Spec file")->required();
  add_output_flags(bench, o);

  std::string repro_name;
  auto* repro = app.add_subcommand("repro", "Run a built-in experiment");
  repro->add_option("experiment", repro_name, "Experiment name (see list below)")->required();
  repro->add_flag("--dump-spec", "Print the experiment spec as JSON and exit");
  add_output_flags(repro, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitConverged : kExitUsage;
  }

  try {
    set_apply_threads(o.threads);
    if (*solve) return execute(solve_spec(o, false), o);
    if (*eig) return execute(solve_spec(o, true), o);
    if (*bench) return execute(load_spec(spec_path), o);
    const ExperimentSpec spec = repro_spec(repro_name);
    if (repro->count("--dump-spec") > 0) {
      std::cout << json(spec).dump(2) << '\n';
      return kExitConverged;
    }
    return execute(spec, o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "landr: %s\n", e.what());
    return kExitUsage;
  }
}
