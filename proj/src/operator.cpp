#include "landr/operator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "landr/rng.hpp"

namespace landr {

namespace {

std::atomic<unsigned> g_threads{1};

// Splits [0, n) into contiguous chunks; small problems stay on the caller.
template <class F>
void parallel_rows(std::size_t n, F&& body) {
  const unsigned t = g_threads.load();
  if (t <= 1 || n < 20000) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (n + t - 1) / t;
  for (unsigned w = 0; w < t; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <Scalar S>
S from_complex(Complex z) {
  if constexpr (is_complex_v<S>) {
    return z;
  } else {
    return z.real();
  }
}

}  // namespace

void set_apply_threads(unsigned threads) { g_threads.store(std::max(1u, threads)); }
unsigned apply_threads() { return g_threads.load(); }

// ---------------------------------------------------------------------------

template <Scalar S>
DiagonalOperator<S>::DiagonalOperator(std::vector<double> diag) : diag_(std::move(diag)) {
  if (diag_.empty()) throw DimensionError("DiagonalOperator: empty diagonal");
}

template <Scalar S>
void DiagonalOperator<S>::do_apply(std::span<const S> in, std::span<S> out) const {
  parallel_rows(diag_.size(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) out[i] = diag_[i] * in[i];
  });
}

// ---------------------------------------------------------------------------

template <Scalar S>
CsrOperator<S>::CsrOperator(std::size_t n, std::vector<std::size_t> row_ptr,
                            std::vector<std::size_t> col_idx, std::vector<S> values)
    : n_(n),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (n_ == 0) throw DimensionError("CsrOperator: empty matrix");
  if (row_ptr_.size() != n_ + 1 || col_idx_.size() != values_.size() ||
      row_ptr_.back() != values_.size())
    throw DimensionError("CsrOperator: inconsistent CSR arrays");
  for (std::size_t c : col_idx_)
    if (c >= n_) throw DimensionError("CsrOperator: column index out of range");
}

template <Scalar S>
CsrOperator<S> CsrOperator<S>::from_triplets(std::size_t n, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<S> vals;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const Triplet& t = entries[e];
    if (t.row >= n || t.col >= n)
      throw DimensionError("CsrOperator: triplet index out of range");
    if (!vals.empty() && e > 0 && entries[e - 1].row == t.row && entries[e - 1].col == t.col) {
      vals.back() += from_complex<S>(t.value);
      continue;
    }
    cols.push_back(t.col);
    vals.push_back(from_complex<S>(t.value));
    ++row_ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrOperator(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

template <Scalar S>
CsrOperator<S> CsrOperator<S>::from_diagonal(const std::vector<double>& diag) {
  std::vector<Triplet> t;
  t.reserve(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, Complex(diag[i], 0.0)});
  return from_triplets(diag.size(), std::move(t));
}

template <Scalar S>
void CsrOperator<S>::do_apply(std::span<const S> in, std::span<S> out) const {
  parallel_rows(n_, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      S acc{0};
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        acc += values_[p] * in[col_idx_[p]];
      out[i] = acc;
    }
  });
}

// ---------------------------------------------------------------------------
// Matrix Market

template <Scalar S>
CsrOperator<S> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty input");
  std::istringstream banner(line);
  std::string tag, object, layout, field, symmetry;
  banner >> tag >> object >> layout >> field >> symmetry;
  if (tag != "%%MatrixMarket" || lower(object) != "matrix")
    throw std::runtime_error("matrix market: missing %%MatrixMarket matrix banner");
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (layout != "coordinate" && layout != "array")
    throw std::runtime_error("matrix market: unsupported layout '" + layout + "'");
  if (field != "real" && field != "double" && field != "integer" && field != "complex")
    throw std::runtime_error("matrix market: unsupported field '" + field + "'");
  const bool complex_field = field == "complex";
  if (complex_field && !is_complex_v<S>)
    throw std::runtime_error("matrix market: complex matrix requires the complex scalar path");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    throw std::runtime_error("matrix market: unsupported symmetry '" + symmetry + "'");
  const bool mirror = symmetry != "general";
  const bool hermitian = symmetry == "hermitian";

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream dims(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  dims >> rows >> cols;
  if (layout == "coordinate") dims >> nnz;
  if (!dims || rows == 0 || rows != cols)
    throw std::runtime_error("matrix market: bad size line (matrix must be square)");

  auto read_value = [&](std::istream& s) {
    double re = 0, im = 0;
    s >> re;
    if (complex_field) s >> im;
    if (!s) throw std::runtime_error("matrix market: malformed entry");
    return Complex(re, im);
  };

  std::vector<Triplet> entries;
  auto push = [&](std::size_t i, std::size_t j, Complex v) {
    entries.push_back({i, j, v});
    if (mirror && i != j) entries.push_back({j, i, hermitian ? std::conj(v) : v});
  };

  if (layout == "coordinate") {
    entries.reserve(mirror ? 2 * nnz : nnz);
    for (std::size_t e = 0; e < nnz; ++e) {
      std::size_t i = 0, j = 0;
      if (!(in >> i >> j)) throw std::runtime_error("matrix market: truncated entry list");
      if (i == 0 || j == 0 || i > rows || j > cols)
        throw std::runtime_error("matrix market: entry index out of range");
      push(i - 1, j - 1, read_value(in));
    }
  } else {
    // Column-major; symmetric/hermitian files store the lower triangle only.
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t i = mirror ? j : 0; i < rows; ++i) {
        Complex v = read_value(in);
        if (v != Complex(0, 0)) push(i, j, v);
      }
  }
  return CsrOperator<S>::from_triplets(rows, std::move(entries));
}

template <Scalar S>
CsrOperator<S> read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("matrix market: cannot open " + path.string());
  return read_matrix_market<S>(in);
}

// ---------------------------------------------------------------------------

template <Scalar S>
double symmetry_defect(const LinearOperator<S>& op, Rng& rng, int probes,
                       double norm_estimate) {
  double worst = 0;
  for (int p = 0; p < probes; ++p) {
    Vector<S> u = rng.normal_vector<S>(op.size());
    Vector<S> v = rng.normal_vector<S>(op.size());
    Vector<S> Au = op.apply(u);
    Vector<S> Av = op.apply(v);
    const double gap = std::abs(dot(Au, v) - dot(u, Av));
    worst = std::max(worst, gap / (norm2(u) * norm2(v)));
  }
  return worst / norm_estimate;
}

template class DiagonalOperator<double>;
template class DiagonalOperator<Complex>;
template class CsrOperator<double>;
template class CsrOperator<Complex>;
template CsrOperator<double> read_matrix_market<double>(std::istream&);
template CsrOperator<Complex> read_matrix_market<Complex>(std::istream&);
template CsrOperator<double> read_matrix_market<double>(const std::filesystem::path&);
template CsrOperator<Complex> read_matrix_market<Complex>(const std::filesystem::path&);
template double symmetry_defect<double>(const LinearOperator<double>&, Rng&, int, double);
template double symmetry_defect<Complex>(const LinearOperator<Complex>&, Rng&, int, double);

}  // namespace landr
