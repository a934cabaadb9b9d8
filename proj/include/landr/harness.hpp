#pragma once

// Test matrices, right-hand sides, and experiment chains with CSV/JSON
// output. An ExperimentSpec is plain JSON so runs can be saved and replayed.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "landr/blockcg.hpp"
#include "landr/minresdr.hpp"

namespace landr {

using json = nlohmann::json;

struct MatrixRecipe {
  std::string name = "example1";  // example1 | example3 | example5 | example7 | example10 | file
  std::size_t n = 0;              // 0: the recipe's default size
  std::uint64_t seed = 22;        // example10 only
  double largest = 5400;          // example5 only: replaces the last entry
  std::string path;               // file only

  std::size_t size() const;  // resolved n; reads the header for files
  bool is_complex() const;   // only files can be complex
};

struct RecipeInfo {
  std::string name;
  std::string description;
};
const std::vector<RecipeInfo>& recipes();

/// The diagonal of a built-in recipe. Throws for `file` and unknown names.
std::vector<double> recipe_diagonal(const MatrixRecipe& r);

template <Scalar S>
std::unique_ptr<LinearOperator<S>> generate(const MatrixRecipe& r);

void to_json(json& j, const MatrixRecipe& r);
void from_json(const json& j, MatrixRecipe& r);

/// Right-hand sides: independent random normal vectors, or related ones
/// b_i = b_1 + perturbation * ran_i.
struct RhsSpec {
  std::size_t count = 1;
  std::string mode = "random";  // random | related
  std::uint64_t seed = 1;
  double perturbation = 1e-3;
};
void to_json(json& j, const RhsSpec& r);
void from_json(const json& j, RhsSpec& r);

template <Scalar S>
std::vector<Vector<S>> make_rhs(const RhsSpec& spec, std::size_t n);

/// One solver invocation in a chain. Deflated solvers (dcg, dminres) use
/// the most recent space produced by landr / minresdr earlier in the chain.
struct SolverStep {
  std::string solver = "landr";  // landr | minresdr | cg | dcg | minres | dminres | blockcg
  std::string label;
  std::vector<std::size_t> rhs{0};
  SolverConfig cfg;              // landr / minresdr
  double rtol = 1e-8;            // iterative solvers
  int max_iterations = 10000;
  bool project_solutions = false;  // dcg: project over earlier solutions first
  bool required = true;            // counts toward the exit status
};
void to_json(json& j, const SolverStep& s);
/// `rhs` accepts an index, a list, "all", or a range "a..b".
void from_json(const json& j, SolverStep& s);

struct ExperimentSpec {
  std::string name = "experiment";
  std::string description;
  MatrixRecipe matrix;
  RhsSpec rhs;
  std::vector<SolverStep> chain;
  std::uint64_t seed = 0;  // informational; RNG seeds live in matrix/rhs
};
void to_json(json& j, const ExperimentSpec& s);
void from_json(const json& j, ExperimentSpec& s);
ExperimentSpec load_spec(const std::filesystem::path& path);

struct SolveRecord {
  std::string solver;
  std::string label;
  std::size_t rhs_index = 0;
  SolveStatus status = SolveStatus::MaxIterations;
  bool required = true;
  int iterations = 0;
  int cycles = 0;
  std::uint64_t matvecs = 0;
  std::uint64_t vecops = 0;
  double final_resid = 0;   // explicit ||b - A x|| / ||b||
  double orthodefect = kNotMeasured;
  std::size_t reorth_vectors = 0;  // after the first cycle
  std::size_t excluded_directions = 0;
  std::vector<double> values;     // (harmonic) Ritz values at the end
  std::vector<double> residuals;
  ConvergenceHistory history;
};

struct ResultBundle {
  std::string name;
  std::size_t n = 0;
  std::vector<SolveRecord> solves;
  std::uint64_t total_matvecs = 0;
  std::uint64_t total_vecops = 0;
  std::vector<std::string> warnings;

  bool converged() const;  // every required solve converged
};

/// Resets the global counters, then runs the chain in order.
ResultBundle run(const ExperimentSpec& spec);

/// CSV with header solver,rhs_index,cycle,iteration,matvecs,vecops,resid_rel,orthodefect.
void write_history_csv(const SolveRecord& rec, std::ostream& out);
/// cycle,matvecs,resid_rel,orthodefect,index,value,residual (restarted solvers).
void write_cycle_csv(const SolveRecord& rec, std::ostream& out);
json summary_json(const ResultBundle& b);

/// Writes <name>_summary.json, one history CSV per solve, per-cycle tables
/// for restarted solvers, and <name>.gp (gnuplot). Returns the files written.
std::vector<std::filesystem::path> emit(const ResultBundle& b, const std::filesystem::path& dir,
                                        bool plot_script = true);

/// Built-in desk-scale experiments.
struct ReproInfo {
  std::string name;
  std::string description;
};
const std::vector<ReproInfo>& repro_experiments();
ExperimentSpec repro_spec(const std::string& name);
/// Policies whose deflation space still helps a second solve in the
/// Example 3 comparison (frequent enough reorthogonalization).
bool table42_reliable(const std::string& policy);

}  // namespace landr
