#include "landr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "landr/rng.hpp"

namespace landr {

// ---------------------------------------------------------------------------
// Matrices

namespace {

std::size_t default_size(const std::string& name) {
  if (name == "example1" || name == "example3" || name == "example5") return 5000;
  if (name == "example7") return 10000;
  if (name == "example10") return 1000;
  throw std::invalid_argument("unknown matrix recipe '" + name + "'");
}

// First line and size line of a Matrix Market file.
std::pair<std::string, std::size_t> mm_header(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  std::string banner, line;
  std::getline(in, banner);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    std::size_t rows = 0;
    ss >> rows;
    return {banner, rows};
  }
  throw std::runtime_error("matrix file '" + path + "' has no size line");
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

std::size_t MatrixRecipe::size() const {
  if (name == "file") return mm_header(path).second;
  return n != 0 ? n : default_size(name);
}

bool MatrixRecipe::is_complex() const {
  if (name != "file") return false;
  return lower(mm_header(path).first).find("complex") != std::string::npos;
}

const std::vector<RecipeInfo>& recipes() {
  static const std::vector<RecipeInfo> list = {
      {"example1", "diag(0.1, 0.2, ..., 10, 11, 12, ...), n = 5000 (ends at 4910)"},
      {"example3", "diag(1, ..., 10, 100, 101, ...), n = 5000 (ends at 5089)"},
      {"example5", "example3 with the last entry replaced (--largest, default 5400)"},
      {"example7", "example3 pattern at n = 10000 (ends at 10089)"},
      {"example10", "diag(Normal(0,1) + 2), n = 1000, seeded (--matrix-seed, default 22)"},
      {"file", "Matrix Market file (real/complex, general/symmetric/hermitian)"},
  };
  return list;
}

std::vector<double> recipe_diagonal(const MatrixRecipe& r) {
  const std::size_t n = r.size();
  if (n == 0) throw std::invalid_argument("matrix dimension must be positive");
  std::vector<double> d;
  d.reserve(n);
  if (r.name == "example1") {
    for (int i = 1; i <= 100 && d.size() < n; ++i) d.push_back(i / 10.0);
    for (int v = 11; d.size() < n; ++v) d.push_back(v);
  } else if (r.name == "example3" || r.name == "example5" || r.name == "example7") {
    for (int i = 1; i <= 10 && d.size() < n; ++i) d.push_back(i);
    for (int v = 100; d.size() < n; ++v) d.push_back(v);
    if (r.name == "example5") d.back() = r.largest;
  } else if (r.name == "example10") {
    Rng rng(r.seed);
    for (std::size_t i = 0; i < n; ++i) d.push_back(rng.normal() + 2.0);
  } else {
    throw std::invalid_argument("recipe '" + r.name + "' has no built-in diagonal");
  }
  return d;
}

template <Scalar S>
std::unique_ptr<LinearOperator<S>> generate(const MatrixRecipe& r) {
  if (r.name == "file") {
    if (r.path.empty()) throw std::invalid_argument("file recipe needs a path");
    return std::make_unique<CsrOperator<S>>(read_matrix_market<S>(std::filesystem::path(r.path)));
  }
  return std::make_unique<DiagonalOperator<S>>(recipe_diagonal(r));
}

void to_json(json& j, const MatrixRecipe& r) {
  j = json{{"recipe", r.name}, {"n", r.n}};
  if (r.name == "example10") j["seed"] = r.seed;
  if (r.name == "example5") j["largest"] = r.largest;
  if (r.name == "file") j["path"] = r.path;
}

void from_json(const json& j, MatrixRecipe& r) {
  r = MatrixRecipe{};
  r.name = j.value("recipe", r.name);
  r.n = j.value("n", r.n);
  r.seed = j.value("seed", r.seed);
  r.largest = j.value("largest", r.largest);
  r.path = j.value("path", r.path);
  if (r.name != "file") (void)default_size(r.name);
}

// ---------------------------------------------------------------------------
// Right-hand sides

void to_json(json& j, const RhsSpec& r) {
  j = json{{"count", r.count}, {"mode", r.mode}, {"seed", r.seed}};
  if (r.mode == "related") j["perturbation"] = r.perturbation;
}

void from_json(const json& j, RhsSpec& r) {
  r = RhsSpec{};
  r.count = j.value("count", r.count);
  r.mode = j.value("mode", r.mode);
  r.seed = j.value("seed", r.seed);
  r.perturbation = j.value("perturbation", r.perturbation);
  if (r.mode != "random" && r.mode != "related")
    throw std::invalid_argument("rhs mode must be 'random' or 'related'");
  if (r.count == 0) throw std::invalid_argument("rhs count must be at least 1");
}

template <Scalar S>
std::vector<Vector<S>> make_rhs(const RhsSpec& spec, std::size_t n) {
  Rng rng(spec.seed);
  std::vector<Vector<S>> out;
  out.push_back(rng.normal_vector<S>(n));
  for (std::size_t i = 1; i < spec.count; ++i) {
    Vector<S> v = rng.normal_vector<S>(n);
    if (spec.mode == "related")
      for (std::size_t j = 0; j < n; ++j) v[j] = out[0][j] + S{spec.perturbation} * v[j];
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Specs

void to_json(json& j, const SolverStep& s) {
  j = json{{"solver", s.solver}, {"rhs", s.rhs}, {"rtol", s.rtol}};
  if (!s.label.empty()) j["label"] = s.label;
  if (!s.required) j["required"] = false;
  if (s.solver == "landr" || s.solver == "minresdr") {
    j["m"] = s.cfg.m;
    j["k"] = s.cfg.k;
    j["cycles"] = s.cfg.max_cycles;
    j["policy"] = s.cfg.policy.to_string();
    j["eig_tol"] = s.cfg.eig_tol;
    j["nev"] = s.cfg.n_eig_wanted;
    j["target"] = to_string(s.cfg.target);
    j["run_all_cycles"] = s.cfg.run_all_cycles;
    j["extra_largest"] = s.cfg.n_extra_largest;
    j["full_first_cycle"] = s.cfg.full_first_cycle;
    j["solve_linear"] = s.cfg.solve_linear;
  } else {
    j["max_iterations"] = s.max_iterations;
  }
  if (s.solver == "dcg") j["project_solutions"] = s.project_solutions;
}

namespace {

std::vector<std::size_t> parse_rhs_selection(const json& v) {
  std::vector<std::size_t> out;
  if (v.is_number_unsigned() || v.is_number_integer()) {
    out.push_back(v.get<std::size_t>());
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<std::size_t>());
  } else if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "all") return {};  // resolved against the rhs count later
    const auto dots = s.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("bad rhs selection '" + s + "'");
    const std::size_t a = std::stoul(s.substr(0, dots)), b = std::stoul(s.substr(dots + 2));
    if (b < a) throw std::invalid_argument("empty rhs range '" + s + "'");
    for (std::size_t i = a; i <= b; ++i) out.push_back(i);
  } else {
    throw std::invalid_argument("bad rhs selection");
  }
  return out;
}

const char* kSolvers[] = {"landr", "minresdr", "cg", "dcg", "minres", "dminres", "blockcg"};

}  // namespace

void from_json(const json& j, SolverStep& s) {
  s = SolverStep{};
  s.solver = j.at("solver").get<std::string>();
  if (std::find(std::begin(kSolvers), std::end(kSolvers), s.solver) == std::end(kSolvers))
    throw std::invalid_argument("unknown solver '" + s.solver + "'");
  s.label = j.value("label", std::string{});
  s.rhs = j.contains("rhs") ? parse_rhs_selection(j.at("rhs")) : std::vector<std::size_t>{0};
  s.rtol = j.value("rtol", s.rtol);
  s.max_iterations = j.value("max_iterations", s.max_iterations);
  s.project_solutions = j.value("project_solutions", false);
  s.required = j.value("required", true);
  SolverConfig& c = s.cfg;
  c.m = j.value("m", c.m);
  c.k = j.value("k", c.k);
  c.max_cycles = j.value("cycles", c.max_cycles);
  if (j.contains("policy")) c.policy = ReorthPolicy::parse(j.at("policy").get<std::string>());
  c.lin_rtol = s.rtol;
  c.eig_tol = j.value("eig_tol", c.eig_tol);
  c.n_eig_wanted = j.value("nev", c.n_eig_wanted);
  if (j.contains("target")) c.target = parse_target(j.at("target").get<std::string>());
  c.run_all_cycles = j.value("run_all_cycles", c.run_all_cycles);
  c.n_extra_largest = j.value("extra_largest", c.n_extra_largest);
  c.full_first_cycle = j.value("full_first_cycle", c.full_first_cycle);
  c.solve_linear = j.value("solve_linear", c.solve_linear);
}

void to_json(json& j, const ExperimentSpec& s) {
  j = json{{"name", s.name}, {"matrix", s.matrix}, {"rhs", s.rhs}, {"chain", s.chain}};
  if (!s.description.empty()) j["description"] = s.description;
}

void from_json(const json& j, ExperimentSpec& s) {
  s = ExperimentSpec{};
  s.name = j.value("name", s.name);
  s.description = j.value("description", std::string{});
  if (j.contains("matrix")) s.matrix = j.at("matrix").get<MatrixRecipe>();
  if (j.contains("rhs")) s.rhs = j.at("rhs").get<RhsSpec>();
  if (j.contains("chain")) s.chain = j.at("chain").get<std::vector<SolverStep>>();
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("spec '" + path.string() + "': " + e.what());
  }
  return j.get<ExperimentSpec>();
}

// ---------------------------------------------------------------------------
// Running

bool ResultBundle::converged() const {
  return std::all_of(solves.begin(), solves.end(), [](const SolveRecord& r) {
    return !r.required || r.status == SolveStatus::Converged;
  });
}

namespace {

template <Scalar S>
double rel(const Vector<S>& r, const Vector<S>& b) {
  const double bn = norm2<S>(b);
  return bn == 0.0 ? 0.0 : norm2<S>(r) / bn;
}

template <Scalar S>
void remember(SolutionSpace<S>& sols, const Vector<S>& b, const Vector<S>& x, const Vector<S>& r) {
  Vector<S> ax(b);
  axpy<S>(S{-1}, r, ax);  // A x = b - r, no matvec needed
  sols.add(x, ax);
}

template <Scalar S>
ResultBundle run_typed(const ExperimentSpec& spec) {
  counters::reset();
  ResultBundle out;
  out.name = spec.name;
  auto op = generate<S>(spec.matrix);
  const std::size_t n = op->size();
  out.n = n;
  const auto rhs = make_rhs<S>(spec.rhs, n);

  DeflationSpace<S> ds;
  bool have_ds = false;
  SolutionSpace<S> sols(n);

  for (const SolverStep& step : spec.chain) {
    std::vector<std::size_t> idx = step.rhs;
    if (idx.empty())
      for (std::size_t i = 0; i < rhs.size(); ++i) idx.push_back(i);
    for (std::size_t i : idx)
      if (i >= rhs.size())
        throw std::invalid_argument("step '" + step.solver + "' uses rhs " + std::to_string(i) +
                                    " but only " + std::to_string(rhs.size()) + " exist");
    auto base = [&](std::size_t i) {
      SolveRecord rec;
      rec.solver = step.solver;
      rec.label = step.label.empty() ? step.solver : step.label;
      rec.rhs_index = i;
      rec.required = step.required;
      return rec;
    };
    const bool needs_ds = step.solver == "dcg" || step.solver == "dminres";
    if (needs_ds && !have_ds)
      out.warnings.push_back(step.solver + ": no deflation space yet; running undeflated");

    if (step.solver == "blockcg") {
      DenseBlock<S> B(n, idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) B.set_col(c, rhs[idx[c]]);
      BlockCgOptions o;
      o.rtol = step.rtol;
      o.max_iterations = step.max_iterations;
      BlockCgResult<S> res = block_cg<S>(*op, B, o);
      if (res.status == SolveStatus::Unstable)
        out.warnings.push_back("blockcg: direction block lost rank (rcond " +
                               std::to_string(res.last_rcond) + ")");
      for (std::size_t c = 0; c < idx.size(); ++c) {
        SolveRecord rec = base(idx[c]);
        rec.status = res.status;
        rec.iterations = res.iterations;
        rec.matvecs = res.matvecs;  // shared by the whole block
        rec.vecops = res.vecops;
        rec.history = std::move(res.histories[c]);
        rec.final_resid = rec.history.final_resid();
        out.solves.push_back(std::move(rec));
      }
      continue;
    }

    for (std::size_t i : idx) {
      const Vector<S>& b = rhs[i];
      SolveRecord rec = base(i);
      if (step.solver == "landr" || step.solver == "minresdr") {
        SolverConfig cfg = step.cfg;
        cfg.lin_rtol = step.rtol;
        if (step.solver == "landr") {
          LanDrResult<S> res = lan_dr<S>(*op, b, {}, cfg);
          rec.status = res.status;
          rec.cycles = res.cycles;
          rec.values = res.ritz.values;
          rec.residuals = res.ritz.residuals;
          rec.final_resid = rel(res.r, b);
          rec.history = std::move(res.history);
          if (res.status == SolveStatus::Stagnated)
            out.warnings.push_back("landr: Galerkin projection singular; iterate frozen");
          ds = std::move(res.deflation);
          remember(sols, b, res.x, res.r);
        } else {
          MinresDrResult<S> res = minres_dr<S>(*op, b, {}, cfg);
          rec.status = res.status;
          rec.cycles = res.cycles;
          rec.values = res.ritz.values;
          rec.residuals = res.ritz.residuals;
          rec.final_resid = rel(res.r, b);
          rec.history = std::move(res.history);
          if (res.ritz.shift != 0.0)
            out.warnings.push_back("minresdr: singular projection, harmonic target shifted");
          ds = std::move(res.deflation);
          remember(sols, b, res.x, res.r);
        }
        have_ds = true;
        rec.iterations = rec.history.iterations();
        if (!rec.history.cycles.empty()) rec.orthodefect = rec.history.cycles.back().orthodefect;
        rec.reorth_vectors = rec.history.reorth.count_after(1);
      } else {
        SolveResult<S> res;
        const DeflationSpace<S> none;
        const DeflationSpace<S>& use = have_ds ? ds : none;
        if (step.solver == "cg" || step.solver == "dcg") {
          CgOptions o;
          o.rtol = step.rtol;
          o.max_iterations = step.max_iterations;
          if (step.solver == "cg") {
            res = cg<S>(*op, b, {}, o);
          } else {
            if (!use.empty()) rec.excluded_directions = deflation_project<S>(use, b, b).excluded;
            res = d_cg<S>(*op, b, {}, use, o, step.project_solutions ? &sols : nullptr);
          }
        } else {
          MinresOptions o;
          o.rtol = step.rtol;
          o.max_iterations = step.max_iterations;
          res = step.solver == "minres" ? minres<S>(*op, b, {}, o)
                                        : d_minres<S>(*op, b, {}, use, o);
        }
        if (res.status == SolveStatus::Indefinite)
          out.warnings.push_back(step.solver + " on rhs " + std::to_string(i) +
                                 ": operator is not positive definite");
        rec.status = res.status;
        rec.iterations = res.iterations;
        rec.final_resid = rel(res.r, b);
        rec.history = std::move(res.history);
        if (step.solver == "dcg" || step.solver == "cg") remember(sols, b, res.x, res.r);
      }
      rec.matvecs = rec.history.matvecs;
      rec.vecops = rec.history.vecops;
      if (rec.excluded_directions > 0)
        out.warnings.push_back("dcg: " + std::to_string(rec.excluded_directions) +
                               " zero Ritz value(s) excluded from the projection");
      out.solves.push_back(std::move(rec));
    }
  }
  const CounterSnapshot total = CounterSnapshot::now();
  out.total_matvecs = total.matvecs;
  out.total_vecops = total.vecops;
  return out;
}

}  // namespace

ResultBundle run(const ExperimentSpec& spec) {
  const std::size_t n = spec.matrix.size();
  for (const SolverStep& step : spec.chain) {
    if (step.solver == "landr" || step.solver == "minresdr") {
      SolverConfig cfg = step.cfg;
      cfg.lin_rtol = step.rtol;
      cfg.validate(n);
    } else if (!(step.rtol > 0 && step.rtol < 1)) {
      throw std::invalid_argument(step.solver + ": rtol must lie in (0, 1)");
    }
  }
  if (spec.matrix.is_complex()) return run_typed<Complex>(spec);
  return run_typed<double>(spec);
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string file_stem(const ResultBundle& b, std::size_t i) {
  const SolveRecord& r = b.solves[i];
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", i);
  return b.name + "_" + buf + "_" + r.solver + "_rhs" + std::to_string(r.rhs_index);
}

}  // namespace

void write_history_csv(const SolveRecord& rec, std::ostream& out) {
  out << "solver,rhs_index,cycle,iteration,matvecs,vecops,resid_rel,orthodefect\n";
  for (const HistoryPoint& p : rec.history.points) {
    out << rec.solver << ',' << rec.rhs_index << ',' << p.cycle << ',' << p.iteration << ','
        << p.matvecs << ',' << p.vecops << ',' << num(p.resid_rel) << ',' << num(p.orthodefect)
        << '\n';
  }
}

void write_cycle_csv(const SolveRecord& rec, std::ostream& out) {
  out << "cycle,matvecs,resid_rel,orthodefect,index,value,residual\n";
  for (const CycleRecord& c : rec.history.cycles)
    for (std::size_t i = 0; i < c.values.size(); ++i)
      out << c.cycle << ',' << c.matvecs << ',' << num(c.resid_rel) << ',' << num(c.orthodefect)
          << ',' << i + 1 << ',' << num(c.values[i]) << ',' << num(c.residuals[i]) << '\n';
}

json summary_json(const ResultBundle& b) {
  json solves = json::array();
  for (const SolveRecord& r : b.solves) {
    json s{{"solver", r.solver},
           {"label", r.label},
           {"rhs_index", r.rhs_index},
           {"status", to_string(r.status)},
           {"required", r.required},
           {"iterations", r.iterations},
           {"matvecs", r.matvecs},
           {"vecops", r.vecops},
           {"final_resid", r.final_resid}};
    if (r.cycles > 0) {
      s["cycles"] = r.cycles;
      s["reorth_vectors"] = r.reorth_vectors;
      if (!std::isnan(r.orthodefect)) s["orthodefect"] = r.orthodefect;
      s["values"] = r.values;
      s["residuals"] = r.residuals;
    }
    if (r.excluded_directions > 0) s["excluded_directions"] = r.excluded_directions;
    solves.push_back(std::move(s));
  }
  return json{{"name", b.name},
              {"n", b.n},
              {"converged", b.converged()},
              {"total_matvecs", b.total_matvecs},
              {"total_vecops", b.total_vecops},
              {"warnings", b.warnings},
              {"solves", std::move(solves)}};
}

std::vector<std::filesystem::path> emit(const ResultBundle& b, const std::filesystem::path& dir,
                                        bool plot_script) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto open = [&](const fs::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    written.push_back(p);
    return f;
  };

  std::vector<std::string> csvs;
  for (std::size_t i = 0; i < b.solves.size(); ++i) {
    const std::string stem = file_stem(b, i);
    {
      auto f = open(dir / (stem + ".csv"));
      write_history_csv(b.solves[i], f);
    }
    csvs.push_back(stem + ".csv");
    if (!b.solves[i].history.cycles.empty()) {
      auto f = open(dir / (stem + "_cycles.csv"));
      write_cycle_csv(b.solves[i], f);
    }
  }
  json summary = summary_json(b);
  for (std::size_t i = 0; i < csvs.size(); ++i) summary["solves"][i]["history_csv"] = csvs[i];
  {
    auto f = open(dir / (b.name + "_summary.json"));
    f << summary.dump(2) << '\n';
  }

  if (plot_script && !b.solves.empty()) {
    auto f = open(dir / (b.name + ".gp"));
    f << "# gnuplot " << b.name << ".gp\n"
      << "set datafile separator ','\n"
      << "set logscale y\n"
      << "set format y '10^{%L}'\n"
      << "set xlabel 'matrix-vector products (cumulative)'\n"
      << "set ylabel 'relative residual norm'\n"
      << "set key outside right\n"
      << "plot \\\n";
    std::uint64_t offset = 0;
    std::uint64_t block_counted = 0;
    for (std::size_t i = 0; i < b.solves.size(); ++i) {
      const SolveRecord& r = b.solves[i];
      const std::uint64_t shift = r.solver == "blockcg" ? 0 : offset;
      f << "  '" << csvs[i] << "' skip 1 using ($5+" << shift << "):7 with lines title '"
        << r.label << " rhs " << r.rhs_index << "'" << (i + 1 < b.solves.size() ? ", \\" : "")
        << '\n';
      if (r.solver == "blockcg") {
        block_counted = r.matvecs;
      } else if (r.solver == "landr" || r.solver == "minresdr" || r.solver.front() == 'd') {
        offset += r.matvecs;  // pipelines accumulate; baselines restart at zero
      }
    }
    (void)block_counted;
  }
  return written;
}

// ---------------------------------------------------------------------------
// Built-in experiments

namespace {

SolverStep lanczos_step(const std::string& solver, std::size_t m, std::size_t k, int cycles,
                        const std::string& policy, bool all_cycles, std::string label = {}) {
  SolverStep s;
  s.solver = solver;
  s.label = std::move(label);
  s.cfg.m = m;
  s.cfg.k = k;
  s.cfg.max_cycles = cycles;
  s.cfg.policy = ReorthPolicy::parse(policy);
  s.cfg.run_all_cycles = all_cycles;
  return s;
}

SolverStep simple_step(const std::string& solver, std::vector<std::size_t> rhs, double rtol,
                       std::string label = {}) {
  SolverStep s;
  s.solver = solver;
  s.rhs = std::move(rhs);
  s.rtol = rtol;
  s.label = std::move(label);
  return s;
}

}  // namespace

bool table42_reliable(const std::string& policy) {
  return policy == "full" || policy == "k-so" || policy == "k-periodic:40" ||
         policy == "k-periodic:60" || policy == "periodic:40" ||
         policy.starts_with("pro:") || policy.starts_with("k-pro:");
}

namespace {

std::vector<std::size_t> range(std::size_t a, std::size_t b) {
  std::vector<std::size_t> v;
  for (std::size_t i = a; i <= b; ++i) v.push_back(i);
  return v;
}

}  // namespace

const std::vector<ReproInfo>& repro_experiments() {
  static const std::vector<ReproInfo> list = {
      {"example1", "Lan-DR(100,40) eigenvalues and linear solve; Lan-DR(100,10), (30,10), CG"},
      {"table41", "Example 1, 57 cycles: restart-only vs full reorthogonalization"},
      {"table42", "Example 3, 12 cycles of Lan-DR(120,40) per policy, then D-CG on a 2nd rhs"},
      {"table43", "Example 3, k-SO with k = 40 and m = 120..200 at about 1000 matvecs"},
      {"example5", "top eigenvalue 5400: k-SO, k-SO keeping the large pair, full"},
      {"example6", "D-CG on a 2nd rhs after 20, 40, 60 cycles of Lan-DR(100,40); CG"},
      {"fig53", "D-CG after 50 cycles of Lan-DR(k+60,k), k = 10, 40, 80, 120"},
      {"fig54", "10 rhs: 44 cycles of Lan-DR(180,120) then 9 D-CG; CG for comparison"},
      {"example7", "n = 10000, 20 rhs: Lan-DR(100,15) x 4 cycles + 19 D-CG vs block-CG"},
      {"example8", "as example7 with related rhs b_i = b_1 + 1e-3 ran_i, tolerance 1e-6"},
      {"example10", "indefinite: Minres-DR/D-Minres vs Lan-DR/D-Minres, Minres, CG"},
  };
  return list;
}

ExperimentSpec repro_spec(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  for (const auto& r : repro_experiments())
    if (r.name == name) s.description = r.description;
  if (s.description.empty()) throw std::invalid_argument("unknown experiment '" + name + "'");

  if (name == "example1") {
    s.matrix.name = "example1";
    SolverStep a = lanczos_step("landr", 100, 40, 100, "k-so", false, "landr(100,40)");
    a.cfg.n_eig_wanted = 30;
    s.chain.push_back(a);
    s.chain.push_back(lanczos_step("landr", 100, 10, 200, "k-so", false, "landr(100,10)"));
    s.chain.push_back(lanczos_step("landr", 30, 10, 400, "k-so", false, "landr(30,10)"));
    s.chain.push_back(simple_step("cg", {0}, 1e-8));
  } else if (name == "table41") {
    s.matrix.name = "example1";
    for (const char* p : {"restart-only", "full"}) {
      SolverStep a = lanczos_step("landr", 100, 40, 57, p, true, std::string("landr ") + p);
      a.cfg.n_eig_wanted = 30;
      a.required = false;  // fixed cycle count: a table, not a solve
      s.chain.push_back(a);
    }
  } else if (name == "table42") {
    s.matrix.name = "example3";
    s.rhs.count = 2;
    for (const std::string p : {"full", "k-so", "k-periodic:40", "k-periodic:60", "k-periodic:70",
                                "k-periodic:75", "periodic:40", "periodic:70", "periodic:75",
                                "periodic:80", "k-pro:0.5", "k-pro:0.75", "pro:0.5", "pro:0.75"}) {
      SolverStep a = lanczos_step("landr", 120, 40, 12, p, true, "landr " + p);
      a.required = false;
      s.chain.push_back(a);
      SolverStep d = simple_step("dcg", {1}, 1e-8, "dcg " + p);
      d.max_iterations = 3000;
      // Infrequent reorthogonalization is expected to spoil the deflation.
      d.required = table42_reliable(p);
      s.chain.push_back(d);
    }
  } else if (name == "table43") {
    s.matrix.name = "example3";
    for (std::size_t m : {120, 140, 160, 180, 200}) {
      const int cycles = 1 + static_cast<int>((1000 - m + (m - 40) - 1) / (m - 40));
      SolverStep a = lanczos_step("landr", m, 40, cycles, "k-so", true,
                                  "landr(" + std::to_string(m) + ",40)");
      a.required = false;
      s.chain.push_back(a);
    }
  } else if (name == "example5") {
    s.matrix.name = "example5";
    SolverStep a = lanczos_step("landr", 120, 40, 12, "k-so", true, "landr k-so");
    SolverStep b = lanczos_step("landr", 120, 40, 12, "k-so", true, "landr k-so + largest");
    b.cfg.n_extra_largest = 1;
    SolverStep c = lanczos_step("landr", 120, 40, 12, "full", true, "landr full");
    for (SolverStep* st : {&a, &b, &c}) {
      st->required = false;
      s.chain.push_back(*st);
    }
  } else if (name == "example6") {
    s.matrix.name = "example1";
    s.rhs.count = 2;
    for (int cycles : {20, 40, 60}) {
      SolverStep a = lanczos_step("landr", 100, 40, cycles, "k-so", true,
                                  "landr " + std::to_string(cycles) + " cycles");
      a.required = false;
      s.chain.push_back(a);
      s.chain.push_back(simple_step("dcg", {1}, 1e-8, "dcg after " + std::to_string(cycles)));
    }
    s.chain.push_back(simple_step("cg", {1}, 1e-8));
  } else if (name == "fig53") {
    s.matrix.name = "example1";
    s.rhs.count = 2;
    for (std::size_t k : {10, 40, 80, 120}) {
      SolverStep a = lanczos_step("landr", k + 60, k, 50, "k-so", true,
                                  "landr(" + std::to_string(k + 60) + "," + std::to_string(k) + ")");
      a.required = false;
      s.chain.push_back(a);
      s.chain.push_back(simple_step("dcg", {1}, 1e-8, "dcg k=" + std::to_string(k)));
    }
    s.chain.push_back(simple_step("cg", {1}, 1e-8));
  } else if (name == "fig54") {
    s.matrix.name = "example1";
    s.rhs.count = 10;
    SolverStep a = lanczos_step("landr", 180, 120, 44, "k-so", true, "landr(180,120)");
    a.required = false;
    s.chain.push_back(a);
    s.chain.push_back(simple_step("dcg", range(1, 9), 1e-8));
    s.chain.push_back(simple_step("cg", {0}, 1e-8));
  } else if (name == "example7" || name == "example8") {
    const bool related = name == "example8";
    const double tol = related ? 1e-6 : 1e-8;
    s.matrix.name = "example7";
    s.rhs.count = 20;
    s.rhs.seed = 7;
    if (related) s.rhs.mode = "related";
    SolverStep a = lanczos_step("landr", 100, 15, 4, "k-periodic:40", true, "landr(100,15)");
    a.rtol = tol;
    s.chain.push_back(a);
    SolverStep d = simple_step("dcg", range(1, 19), tol);
    d.project_solutions = related;
    s.chain.push_back(d);
    s.chain.push_back(simple_step("blockcg", {}, tol));
  } else if (name == "example10") {
    s.matrix.name = "example10";
    s.rhs.count = 3;
    s.rhs.seed = 23;
    s.chain.push_back(lanczos_step("minresdr", 100, 20, 40, "full", false, "minres-dr(100,20)"));
    s.chain.push_back(simple_step("dminres", {1, 2}, 1e-8, "d-minres after minres-dr"));
    s.chain.push_back(lanczos_step("landr", 100, 20, 40, "full", false, "lan-dr(100,20)"));
    s.chain.push_back(simple_step("dminres", {1, 2}, 1e-8, "d-minres after lan-dr"));
    s.chain.push_back(simple_step("minres", {0, 1, 2}, 1e-8));
    SolverStep c = simple_step("cg", {0}, 1e-8);
    c.required = false;  // expected to report indefiniteness
    s.chain.push_back(c);
  }
  return s;
}

template std::unique_ptr<LinearOperator<double>> generate<double>(const MatrixRecipe&);
template std::unique_ptr<LinearOperator<Complex>> generate<Complex>(const MatrixRecipe&);
template std::vector<Vector<double>> make_rhs<double>(const RhsSpec&, std::size_t);
template std::vector<Vector<Complex>> make_rhs<Complex>(const RhsSpec&, std::size_t);

}  // namespace landr
