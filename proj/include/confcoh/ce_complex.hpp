#pragma once

#include "confcoh/exact_linalg.hpp"
#include "confcoh/ring_data.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confcoh {

// One quadratic term of a W-differential: coeff * v_a v_b with a <= b.
// Unordered pairs are normalized, so symmetric cross terms carry the merged
// coefficient (2 when a != b came from two ordered pairs, 1 on the diagonal).
struct QuadTerm {
  int a = 0;
  int b = 0;
  Rational coeff;
};

struct VGenerator {
  int degree = 0;       // 2m - (homology degree of the dual class)
  int basis_index = 0;  // into RingSpec::basis
};

struct WGenerator {
  int degree = 0;  // 4m - 1 - (homology degree)
  int basis_index = 0;
  std::vector<QuadTerm> rule;  // image under the differential
};

// The two suspended generator families and the W-differential rules.
// v[t] and w[t] are dual to the same homology class for every t.
struct GeneratorSet {
  int dimension = 0;  // 2m
  std::vector<VGenerator> v;  // ascending degree
  std::vector<WGenerator> w;  // ascending degree
  int unit_v = -1;  // the degree-2m generator (dual to the unit class)
  int unit_w = -1;  // the degree-(4m-1) generator

  int m() const { return dimension / 2; }
};

GeneratorSet build_generators(const RingSpec& ring);

// Basis element of the weight-graded algebra: a polynomial part on the even
// V-generators and a square-free part on the odd W-generators.
struct Monomial {
  std::vector<int32_t> v_exp;  // indexed like GeneratorSet::v
  uint64_t w_mask = 0;         // bit t = generator w[t]
  int degree = 0;              // cached
  int weight = 0;              // |w_mask|
  int length = 0;              // sum v_exp + 2 * weight
};

Monomial make_monomial(const GeneratorSet& gens, std::vector<int32_t> v_exp,
                       uint64_t w_mask);

// Canonical order: lexicographic on v_exp (ascending generator degree), then
// on the w index set read in ascending order.
int compare_monomials(const Monomial& a, const Monomial& b);

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    return compare_monomials(a, b) < 0;
  }
};

inline bool operator==(const Monomial& a, const Monomial& b) {
  return a.w_mask == b.w_mask && a.v_exp == b.v_exp;
}

// Sorted like-term-merged sum of monomials with rational coefficients.
class LinearCombination {
 public:
  void add(const Monomial& mono, const Rational& coeff);
  bool empty() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }
  Rational coeff(const Monomial& mono) const;

 private:
  std::map<Monomial, Rational, MonomialLess> terms_;
};

// All monomials of one (k, degree, weight) cell in canonical order.
struct Cell {
  int k = 0;
  int degree = 0;
  int weight = 0;
  bool reduced = false;
  std::vector<Monomial> basis;

  int dim() const { return (int)basis.size(); }
  std::optional<int> index_of(const Monomial& mono) const;
};

// Degree-targeted enumeration; never materializes a whole symmetric power.
// In reduced mode the exponent of the top V-generator is capped at 1 and the
// top W-generator is excluded.
Cell enumerate_basis(const GeneratorSet& gens, int k, int degree, int weight,
                     bool reduced);

// Leibniz expansion: the t-th W-factor (ascending order) is replaced by its
// quadratic rule with sign (-1)^(t-1); the even V-part is central. Reduced
// mode drops images that leave the quotient.
LinearCombination apply_differential(const Monomial& mono, const GeneratorSet& gens,
                                     bool reduced);
LinearCombination apply_differential(const LinearCombination& lc,
                                     const GeneratorSet& gens, bool reduced);

// Matrix of the differential from cell (k, degree, weight) to cell
// (k, degree + 1, weight - 1); columns follow the source basis, rows the
// target basis. Weight 0 yields the zero map (a 0-row matrix).
SparseRationalMatrix differential_matrix(const GeneratorSet& gens, int k, int degree,
                                         int weight, bool reduced);
SparseRationalMatrix differential_matrix(const GeneratorSet& gens, const Cell& source,
                                         const Cell& target);

struct DegreeBounds {
  int min_degree = 0;
  int max_degree = 0;
};

// Closed-form support of the reduced complex of CP^m at (k, weight); empty
// above the weight bound min(floor(k/2), m).
//
// The even-k boundary case (k even, weight = k/2 <= m) uses
// 4wm - (w^2 + 2w); exhaustive enumeration confirms this value and the
// verifier records the check in its anomaly log, since a variant formula
// 4wm - (w^2 + w) is sometimes quoted for this case.
std::optional<DegreeBounds> support_bounds(int k, int weight, int m);

// Feasibility bounds for an arbitrary generator set (both modes); endpoints
// are attained by explicit monomials, so cells outside are empty.
std::optional<DegreeBounds> degree_bounds(const GeneratorSet& gens, int k, int weight,
                                          bool reduced);

struct DSquaredVerdict {
  bool ok = true;
  int cells_checked = 0;
  std::optional<std::pair<int, int>> first_failure;  // (degree, weight)
};

// Composes consecutive differential matrices over every (degree, weight)
// cell with degree in [degree_lo, degree_hi] and checks the product is zero.
DSquaredVerdict verify_d_squared_zero(const GeneratorSet& gens, int k, int degree_lo,
                                      int degree_hi, bool reduced);

// Display syntax: "v2^3 v6 w9" (ascending degree, exponents > 1 shown).
std::string format_monomial(const Monomial& mono, const GeneratorSet& gens);
std::string format_combination(const LinearCombination& lc, const GeneratorSet& gens);

}  // namespace confcoh
