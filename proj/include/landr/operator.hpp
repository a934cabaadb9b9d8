#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <vector>

#include "landr/core.hpp"

namespace landr {

enum class OperatorKind { Diagonal, SparseCsr, External };

/// Number of threads a concrete operator may use inside apply().
void set_apply_threads(unsigned threads);
unsigned apply_threads();

/// The matrix A, seen only through its action. Always Hermitian here.
template <Scalar S>
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t size() const = 0;
  virtual OperatorKind kind() const = 0;
  bool hermitian() const { return true; }

  /// out = A * in. Counts one matvec.
  void apply(std::span<const S> in, std::span<S> out) const {
    require_same_size(in.size(), size(), "apply");
    require_same_size(out.size(), size(), "apply(out)");
    counters::add_matvecs(1);
    do_apply(in, out);
  }

  Vector<S> apply(std::span<const S> in) const {
    Vector<S> out(size());
    apply(in, std::span<S>(out));
    return out;
  }
  Vector<S> apply(const Vector<S>& in) const {
    return apply(std::span<const S>(in));
  }

 protected:
  virtual void do_apply(std::span<const S> in, std::span<S> out) const = 0;
};

/// diag(d) with real entries.
template <Scalar S>
class DiagonalOperator final : public LinearOperator<S> {
 public:
  explicit DiagonalOperator(std::vector<double> diag);

  std::size_t size() const override { return diag_.size(); }
  OperatorKind kind() const override { return OperatorKind::Diagonal; }
  const std::vector<double>& diagonal() const { return diag_; }

 protected:
  void do_apply(std::span<const S> in, std::span<S> out) const override;

 private:
  std::vector<double> diag_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

template <Scalar S>
class CsrOperator final : public LinearOperator<S> {
 public:
  CsrOperator(std::size_t n, std::vector<std::size_t> row_ptr,
              std::vector<std::size_t> col_idx, std::vector<S> values);

  /// Duplicate entries are summed.
  static CsrOperator from_triplets(std::size_t n, std::vector<Triplet> entries);
  static CsrOperator from_diagonal(const std::vector<double>& diag);

  std::size_t size() const override { return n_; }
  OperatorKind kind() const override { return OperatorKind::SparseCsr; }
  std::size_t nonzeros() const { return values_.size(); }

 protected:
  void do_apply(std::span<const S> in, std::span<S> out) const override;

 private:
  std::size_t n_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<S> values_;
};

/// Matrix Market reader for real symmetric / complex Hermitian matrices
/// (also "general" files, taken as-is). Coordinate and array layouts.
/// The stored triangle of symmetric/hermitian files is mirrored.
template <Scalar S>
CsrOperator<S> read_matrix_market(std::istream& in);

template <Scalar S>
CsrOperator<S> read_matrix_market(const std::filesystem::path& path);

class Rng;

/// Largest |<Au,v> - <u,Av>| / (||u|| ||v||) over random probes, divided by
/// the given norm estimate of A.
template <Scalar S>
double symmetry_defect(const LinearOperator<S>& op, Rng& rng, int probes,
                       double norm_estimate);

}  // namespace landr
