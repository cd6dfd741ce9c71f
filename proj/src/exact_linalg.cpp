#include "confcoh/exact_linalg.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

namespace confcoh {

namespace {

// Matrices at least this wide or tall go through the sparse elimination
// path; everything smaller is done dense.
constexpr int kDenseLimit = 256;

size_t bit_length(const Integer& z) {
  return mpz_sizeinbase(z.get_mpz_t(), 2);
}

// Clears denominators rowwise. Row scaling by a nonzero rational does not
// change the rank, so each row is multiplied by the lcm of its denominators.
std::vector<std::vector<std::pair<int, Integer>>> integer_rows(
    const SparseRationalMatrix& m) {
  std::vector<std::vector<std::pair<int, Integer>>> rows(m.rows());
  const auto& entries = m.entries();  // sorted by (row, col)
  size_t at = 0;
  Integer lcm;
  while (at < entries.size()) {
    size_t end = at;
    const int current_row = entries[at].row;
    while (end < entries.size() && entries[end].row == current_row) ++end;
    lcm = 1;
    for (size_t p = at; p < end; ++p)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
              mpq_denref(entries[p].value.get_mpq_t()));
    auto& row = rows[current_row];
    row.reserve(end - at);
    for (size_t p = at; p < end; ++p) {
      Rational scaled = entries[p].value * Rational(lcm);
      row.emplace_back(entries[p].col, scaled.get_num());
    }
    at = end;
  }
  return rows;
}

int dense_rank_bareiss(const SparseRationalMatrix& m) {
  const int n_rows = m.rows();
  const int n_cols = m.cols();
  std::vector<std::vector<Integer>> a(n_rows, std::vector<Integer>(n_cols, Integer(0)));
  {
    auto rows = integer_rows(m);
    for (int r = 0; r < n_rows; ++r)
      for (auto& [c, z] : rows[r]) a[r][c] = std::move(z);
  }
  Integer prev(1);
  int rank = 0;
  int r = 0;
  for (int c = 0; c < n_cols && r < n_rows; ++c) {
    // partial pivoting by minimal bit length
    int best = -1;
    size_t best_bits = SIZE_MAX;
    for (int i = r; i < n_rows; ++i) {
      if (a[i][c] != 0) {
        size_t bits = bit_length(a[i][c]);
        if (bits < best_bits) {
          best_bits = bits;
          best = i;
        }
      }
    }
    if (best < 0) continue;
    std::swap(a[r], a[best]);
    const Integer pivot = a[r][c];
    Integer t;
    for (int i = r + 1; i < n_rows; ++i) {
      for (int j = c + 1; j < n_cols; ++j) {
        // Bareiss step: (a_ij * pivot - a_ic * a_rj) / prev, division exact.
        t = a[i][j] * pivot - a[i][c] * a[r][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = pivot;
    ++rank;
    ++r;
  }
  return rank;
}

struct SparseRow {
  // sorted by column
  std::vector<std::pair<int, Integer>> items;
  const Integer* find(int col) const {
    auto it = std::lower_bound(items.begin(), items.end(), col,
                               [](const auto& a, int c) { return a.first < c; });
    if (it != items.end() && it->first == col) return &it->second;
    return nullptr;
  }
};

// Fraction-free elimination on sparse rows. Every active row is updated at
// every step (rows with a zero pivot-column entry are rescaled by
// pivot/prev), which keeps all stored values equal to minors of the input;
// the division by the previous pivot is then exact.
int sparse_rank_bareiss(const SparseRationalMatrix& m) {
  auto int_rows = integer_rows(m);
  std::vector<SparseRow> rows;
  rows.reserve(int_rows.size());
  for (auto& ir : int_rows) {
    if (!ir.empty()) rows.push_back(SparseRow{std::move(ir)});
  }
  Integer prev(1);
  int rank = 0;
  Integer t;
  while (!rows.empty()) {
    // pivot entry: minimal bit length, then minimal Markowitz fill
    std::map<int, int> col_count;
    for (const auto& row : rows)
      for (const auto& [c, z] : row.items) ++col_count[c];
    size_t best_bits = SIZE_MAX;
    long best_fill = -1;
    int best_row = -1, best_col = -1;
    for (int ri = 0; ri < (int)rows.size(); ++ri) {
      for (const auto& [c, z] : rows[ri].items) {
        size_t bits = bit_length(z);
        long fill = (long)(rows[ri].items.size() - 1) * (col_count[c] - 1);
        if (bits < best_bits || (bits == best_bits && fill < best_fill)) {
          best_bits = bits;
          best_fill = fill;
          best_row = ri;
          best_col = c;
        }
      }
    }
    SparseRow pivot_row = std::move(rows[best_row]);
    rows.erase(rows.begin() + best_row);
    const Integer pivot = *pivot_row.find(best_col);
    ++rank;

    std::vector<SparseRow> next;
    next.reserve(rows.size());
    for (auto& row : rows) {
      const Integer* a = row.find(best_col);
      SparseRow out;
      if (a == nullptr) {
        // scale-only update: value * pivot / prev stays a minor, hence exact
        out.items = std::move(row.items);
        for (auto& [c, z] : out.items) {
          t = z * pivot;
          mpz_divexact(z.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        }
      } else {
        const Integer factor = *a;
        out.items.reserve(row.items.size() + pivot_row.items.size());
        auto it1 = row.items.begin();
        auto it2 = pivot_row.items.begin();
        while (it1 != row.items.end() || it2 != pivot_row.items.end()) {
          int c1 = it1 != row.items.end() ? it1->first : INT32_MAX;
          int c2 = it2 != pivot_row.items.end() ? it2->first : INT32_MAX;
          int c = std::min(c1, c2);
          if (c == best_col) {
            if (c1 == c) ++it1;
            if (c2 == c) ++it2;
            continue;
          }
          t = 0;
          if (c1 == c) t += it1++->second * pivot;
          if (c2 == c) t -= it2++->second * factor;
          if (t != 0) {
            Integer z;
            mpz_divexact(z.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            out.items.emplace_back(c, std::move(z));
          }
        }
      }
      if (!out.items.empty()) next.push_back(std::move(out));
    }
    rows = std::move(next);
    prev = pivot;
  }
  return rank;
}

int exact_rank(const SparseRationalMatrix& m) {
  if (m.is_zero()) return 0;
  if (m.rows() < kDenseLimit && m.cols() < kDenseLimit) return dense_rank_bareiss(m);
  return sparse_rank_bareiss(m);
}

// --- modular pre-pass -------------------------------------------------------

constexpr uint64_t kPrimes[2] = {2147483629ull, 2147483587ull};

uint64_t mod_inverse(uint64_t a, uint64_t p) {
  // Fermat: p prime
  uint64_t result = 1, base = a % p, e = p - 2;
  while (e) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

// Gaussian elimination mod p; returns the pivot (row, col) profile.
std::vector<std::pair<int, int>> modular_pivots(const SparseRationalMatrix& m, uint64_t p) {
  const int n_rows = m.rows();
  const int n_cols = m.cols();
  std::vector<std::vector<uint64_t>> a(n_rows, std::vector<uint64_t>(n_cols, 0));
  std::vector<int> row_of(n_rows);
  for (int i = 0; i < n_rows; ++i) row_of[i] = i;
  for (const MatrixEntry& e : m.entries()) {
    uint64_t num = mpz_fdiv_ui(mpq_numref(e.value.get_mpq_t()), p);
    uint64_t den = mpz_fdiv_ui(mpq_denref(e.value.get_mpq_t()), p);
    if (den == 0) return {};  // denominator collides with p; caller falls back
    a[e.row][e.col] = num * mod_inverse(den, p) % p;
  }
  std::vector<std::pair<int, int>> pivots;
  int r = 0;
  for (int c = 0; c < n_cols && r < n_rows; ++c) {
    int sel = -1;
    for (int i = r; i < n_rows; ++i)
      if (a[i][c] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[r], a[sel]);
    std::swap(row_of[r], row_of[sel]);
    uint64_t inv = mod_inverse(a[r][c], p);
    for (int i = r + 1; i < n_rows; ++i) {
      if (a[i][c] == 0) continue;
      uint64_t f = a[i][c] * inv % p;
      for (int j = c; j < n_cols; ++j) {
        uint64_t sub = f * a[r][j] % p;
        a[i][j] = (a[i][j] + p - sub) % p;
      }
    }
    pivots.emplace_back(row_of[r], c);
    ++r;
  }
  return pivots;
}

// Exact determinant of the square submatrix picked out by the pivot profile.
bool pivot_minor_nonzero(const SparseRationalMatrix& m,
                         const std::vector<std::pair<int, int>>& pivots) {
  std::vector<int> rows, cols;
  for (auto& [r, c] : pivots) {
    rows.push_back(r);
    cols.push_back(c);
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  std::vector<MatrixEntry> sub;
  std::map<int, int> row_pos, col_pos;
  for (size_t i = 0; i < rows.size(); ++i) row_pos[rows[i]] = (int)i;
  for (size_t i = 0; i < cols.size(); ++i) col_pos[cols[i]] = (int)i;
  for (const MatrixEntry& e : m.entries()) {
    auto ri = row_pos.find(e.row);
    auto ci = col_pos.find(e.col);
    if (ri != row_pos.end() && ci != col_pos.end())
      sub.push_back({ri->second, ci->second, e.value});
  }
  auto minor =
      SparseRationalMatrix::from_entries((int)rows.size(), (int)cols.size(), std::move(sub));
  return exact_rank(minor) == (int)rows.size();
}

}  // namespace

SparseRationalMatrix SparseRationalMatrix::from_entries(int n_rows, int n_cols,
                                                        std::vector<MatrixEntry> entries) {
  SparseRationalMatrix m(n_rows, n_cols);
  for (const MatrixEntry& e : entries) {
    if (e.row < 0 || e.row >= n_rows || e.col < 0 || e.col >= n_cols)
      throw std::out_of_range("matrix entry index out of range");
  }
  std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  for (MatrixEntry& e : entries) {
    if (!m.entries_.empty() && m.entries_.back().row == e.row &&
        m.entries_.back().col == e.col) {
      m.entries_.back().value += e.value;
    } else {
      m.entries_.push_back(std::move(e));
    }
  }
  std::erase_if(m.entries_, [](const MatrixEntry& e) { return e.value == 0; });
  return m;
}

Rational SparseRationalMatrix::at(int row, int col) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair(row, col),
                             [](const MatrixEntry& e, const std::pair<int, int>& rc) {
                               return std::tie(e.row, e.col) < rc;
                             });
  if (it != entries_.end() && it->row == row && it->col == col) return it->value;
  return Rational(0);
}

RankResult rank(const SparseRationalMatrix& m, const RankOptions& options) {
  RankResult result;
  if (options.use_modular && !m.is_zero()) {
    auto p1 = modular_pivots(m, kPrimes[0]);
    auto p2 = modular_pivots(m, kPrimes[1]);
    bool usable = !(p1.empty() && !m.is_zero() && p2.empty());
    if (usable && p1.size() == p2.size() && !p1.empty() && pivot_minor_nonzero(m, p1)) {
      result.rank = (int)p1.size();
      result.kernel_dim = m.cols() - result.rank;
      result.method = RankMethod::modular_certified;
      return result;
    }
    // primes disagreed or certification failed: fall through to exact
  }
  result.rank = exact_rank(m);
  result.kernel_dim = m.cols() - result.rank;
  result.method = RankMethod::exact;
  return result;
}

std::vector<RankResult> rank_profile(std::span<const SparseRationalMatrix> ms,
                                     const RankOptions& options) {
  std::vector<RankResult> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(rank(m, options));
  return out;
}

MembershipResult in_column_space(const SparseRationalMatrix& m,
                                 std::span<const Rational> b) {
  if ((int)b.size() != m.rows())
    throw std::invalid_argument("in_column_space: vector length != row count");
  const int n_rows = m.rows();
  const int n_cols = m.cols();
  // dense rational elimination on [M | b]
  std::vector<std::vector<Rational>> a(n_rows, std::vector<Rational>(n_cols + 1, Rational(0)));
  for (const MatrixEntry& e : m.entries()) a[e.row][e.col] = e.value;
  for (int i = 0; i < n_rows; ++i) a[i][n_cols] = b[i];

  std::vector<int> pivot_col_of_row;
  int r = 0;
  for (int c = 0; c < n_cols && r < n_rows; ++c) {
    int sel = -1;
    for (int i = r; i < n_rows; ++i)
      if (a[i][c] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[r], a[sel]);
    for (int i = r + 1; i < n_rows; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[r][c];
      for (int j = c; j <= n_cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivot_col_of_row.push_back(c);
    ++r;
  }
  // inconsistent iff some residual row is (0 ... 0 | nonzero)
  for (int i = r; i < n_rows; ++i)
    if (a[i][n_cols] != 0) return {false, {}};

  MembershipResult result;
  result.member = true;
  result.witness.assign(n_cols, Rational(0));
  for (int i = r - 1; i >= 0; --i) {
    int c = pivot_col_of_row[i];
    Rational acc = a[i][n_cols];
    for (int j = c + 1; j < n_cols; ++j)
      if (a[i][j] != 0) acc -= a[i][j] * result.witness[j];
    result.witness[c] = acc / a[i][c];
  }
  return result;
}

SparseRationalMatrix transpose(const SparseRationalMatrix& m) {
  std::vector<MatrixEntry> entries;
  entries.reserve(m.entries().size());
  for (const MatrixEntry& e : m.entries()) entries.push_back({e.col, e.row, e.value});
  return SparseRationalMatrix::from_entries(m.cols(), m.rows(), std::move(entries));
}

SparseRationalMatrix multiply(const SparseRationalMatrix& a, const SparseRationalMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: shape mismatch");
  // group b by row
  std::vector<std::vector<const MatrixEntry*>> b_rows(b.rows());
  for (const MatrixEntry& e : b.entries()) b_rows[e.row].push_back(&e);
  std::map<std::pair<int, int>, Rational> acc;
  for (const MatrixEntry& ea : a.entries())
    for (const MatrixEntry* eb : b_rows[ea.col]) acc[{ea.row, eb->col}] += ea.value * eb->value;
  std::vector<MatrixEntry> entries;
  for (auto& [rc, v] : acc)
    if (v != 0) entries.push_back({rc.first, rc.second, v});
  return SparseRationalMatrix::from_entries(a.rows(), b.cols(), std::move(entries));
}

std::string debug_dump(const SparseRationalMatrix& m) {
  std::ostringstream os;
  os << m.rows() << ' ' << m.cols() << ' ' << m.entries().size() << '\n';
  for (const MatrixEntry& e : m.entries())
    os << e.row << ' ' << e.col << ' ' << rational_to_string(e.value) << '\n';
  return os.str();
}

}  // namespace confcoh
