#pragma once

#include "confcoh/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace confcoh {

// A ring document failed parsing or violated a structural invariant.
// `invariant` is a short stable name ("parse", "multiple units", ...).
class RingError : public std::runtime_error {
 public:
  RingError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), invariant_(std::move(invariant)) {}
  const std::string& invariant() const { return invariant_; }

 private:
  std::string invariant_;
};

struct BasisElement {
  std::string label;
  int degree = 0;
};

// H^*(M; Q) of a closed oriented even-dimensional manifold, as a finite
// graded basis with cup-product structure constants. All identity is by
// basis index; labels are display-only.
struct RingSpec {
  std::string name;
  int dimension = 0;  // 2m
  std::vector<BasisElement> basis;
  // x_i x_j = sum_l coeff * x_l; keys are ordered pairs, table is symmetric.
  std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> products;
  int unit_index = -1;
  int top_index = -1;
  std::vector<std::string> warnings;  // validation warnings (associativity)

  int m() const { return dimension / 2; }
  Rational product_coeff(int i, int j, int l) const;
};

struct DiagonalEntry {
  int i = 0;
  int j = 0;
  Rational coeff;
};

// Delta(x_l^*) = sum coeff * x_i^* (x) x_j^*, one row per dual index l.
struct DiagonalTable {
  std::vector<std::vector<DiagonalEntry>> rows;
};

// Parses the JSON ring document (see README for the schema), validates
// every invariant and returns the canonical RingSpec. Throws RingError.
RingSpec load_ring_spec(const std::string& text);

// Canonical document; load_ring_spec(serialize_ring_spec(r)) == r.
std::string serialize_ring_spec(const RingSpec& ring);

// Q[z]/(z^{m+1}), deg z = 2.
RingSpec builtin_cpm(int m);

// Even sphere S^d: basis (1, t) with t^2 = 0.
RingSpec builtin_sphere(int dimension);

// Checks every structural invariant, filling ring.warnings for the soft
// ones. Throws RingError naming the violated invariant.
void validate_ring(RingSpec& ring);

DiagonalTable diagonal_comultiplication(const RingSpec& ring);

// Structural detection of Q[z]/(z^{m+1}); label- and name-insensitive.
std::optional<int> cpm_complex_dimension(const RingSpec& ring);

bool same_ring_structure(const RingSpec& a, const RingSpec& b);

// FNV-1a of the canonical serialization; keys the rank cache.
uint64_t ring_content_hash(const RingSpec& ring);

}  // namespace confcoh
