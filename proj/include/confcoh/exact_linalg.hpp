#pragma once

#include "confcoh/rational.hpp"

#include <span>
#include <string>
#include <vector>

namespace confcoh {

struct MatrixEntry {
  int row = 0;
  int col = 0;
  Rational value;
};

// Immutable sparse matrix over Q. Entries are kept sorted by (row, col),
// duplicate-free and nonzero.
class SparseRationalMatrix {
 public:
  SparseRationalMatrix() = default;
  SparseRationalMatrix(int n_rows, int n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

  // Merges duplicate coordinates, drops zero sums, range-checks indices.
  static SparseRationalMatrix from_entries(int n_rows, int n_cols,
                                           std::vector<MatrixEntry> entries);

  int rows() const { return n_rows_; }
  int cols() const { return n_cols_; }
  const std::vector<MatrixEntry>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  Rational at(int row, int col) const;

 private:
  int n_rows_ = 0;
  int n_cols_ = 0;
  std::vector<MatrixEntry> entries_;
};

enum class RankMethod { exact, modular_certified };

struct RankResult {
  int rank = 0;
  int kernel_dim = 0;  // n_cols - rank
  RankMethod method = RankMethod::exact;
};

struct RankOptions {
  // Modular pre-pass: two independent primes plus exact confirmation of the
  // identified pivot minor; any disagreement falls back to fully exact
  // elimination. Off by default.
  bool use_modular = false;
};

RankResult rank(const SparseRationalMatrix& m, const RankOptions& options = {});

// Elementwise ranks, order preserving.
std::vector<RankResult> rank_profile(std::span<const SparseRationalMatrix> ms,
                                     const RankOptions& options = {});

struct MembershipResult {
  bool member = false;
  std::vector<Rational> witness;  // M * witness == b when member
};

// Exact column-space membership (the coboundary test).
MembershipResult in_column_space(const SparseRationalMatrix& m,
                                 std::span<const Rational> b);

SparseRationalMatrix transpose(const SparseRationalMatrix& m);
SparseRationalMatrix multiply(const SparseRationalMatrix& a, const SparseRationalMatrix& b);

// "rows cols nnz" header then one "row col p/q" line per entry, sorted
// (row, col). Stable across runs; suitable for golden files.
std::string debug_dump(const SparseRationalMatrix& m);

}  // namespace confcoh
