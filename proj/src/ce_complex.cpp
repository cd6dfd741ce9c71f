#include "confcoh/ce_complex.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace confcoh {

GeneratorSet build_generators(const RingSpec& ring) {
  GeneratorSet gens;
  gens.dimension = ring.dimension;
  const int n = (int)ring.basis.size();

  // Both families sort by descending homology degree of the dual class,
  // which is ascending generator degree; index t then names the same class
  // in v and w.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ring.basis[a].degree > ring.basis[b].degree;
  });

  std::vector<int> gen_of_basis(n, -1);
  for (int t = 0; t < n; ++t) {
    int b = order[t];
    gen_of_basis[b] = t;
    gens.v.push_back({ring.dimension - ring.basis[b].degree, b});
    gens.w.push_back({2 * ring.dimension - 1 - ring.basis[b].degree, b, {}});
    if (b == ring.unit_index) {
      gens.unit_v = t;
      gens.unit_w = t;
    }
  }

  DiagonalTable diag = diagonal_comultiplication(ring);
  for (int t = 0; t < n; ++t) {
    const int l = gens.w[t].basis_index;
    std::map<std::pair<int, int>, Rational> merged;
    for (const DiagonalEntry& e : diag.rows[l]) {
      int a = gen_of_basis[e.i];
      int b = gen_of_basis[e.j];
      if (a > b) std::swap(a, b);
      merged[{a, b}] += e.coeff;
    }
    for (const auto& [ab, coeff] : merged)
      if (coeff != 0) gens.w[t].rule.push_back({ab.first, ab.second, coeff});
  }
  return gens;
}

Monomial make_monomial(const GeneratorSet& gens, std::vector<int32_t> v_exp,
                       uint64_t w_mask) {
  if (v_exp.size() != gens.v.size())
    throw std::invalid_argument("make_monomial: exponent vector size mismatch");
  Monomial mono;
  mono.v_exp = std::move(v_exp);
  mono.w_mask = w_mask;
  int degree = 0, length = 0;
  for (size_t t = 0; t < mono.v_exp.size(); ++t) {
    if (mono.v_exp[t] < 0) throw std::invalid_argument("make_monomial: negative exponent");
    degree += mono.v_exp[t] * gens.v[t].degree;
    length += mono.v_exp[t];
  }
  for (uint64_t mask = w_mask; mask; mask &= mask - 1) {
    int t = std::countr_zero(mask);
    if (t >= (int)gens.w.size())
      throw std::invalid_argument("make_monomial: w index out of range");
    degree += gens.w[t].degree;
  }
  mono.weight = std::popcount(w_mask);
  mono.degree = degree;
  mono.length = length + 2 * mono.weight;
  return mono;
}

int compare_monomials(const Monomial& a, const Monomial& b) {
  if (a.v_exp != b.v_exp) return a.v_exp < b.v_exp ? -1 : 1;
  if (a.w_mask == b.w_mask) return 0;
  // lexicographic on the sorted index lists = compare lowest differing bit
  uint64_t diff = a.w_mask ^ b.w_mask;
  uint64_t low = diff & (~diff + 1);
  return (a.w_mask & low) ? -1 : 1;
}

void LinearCombination::add(const Monomial& mono, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(mono, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational LinearCombination::coeff(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? Rational(0) : it->second;
}

std::optional<int> Cell::index_of(const Monomial& mono) const {
  auto it = std::lower_bound(basis.begin(), basis.end(), mono, MonomialLess{});
  if (it != basis.end() && *it == mono) return (int)(it - basis.begin());
  return std::nullopt;
}

namespace {

// Largest total degree reachable with `len` V-factors drawn from generators
// 0..upto (ascending degree), honoring the reduced cap on the top generator.
int max_v_degree(const GeneratorSet& gens, int len, int upto, bool reduced) {
  int remaining = len, total = 0;
  for (int t = upto; t >= 0 && remaining > 0; --t) {
    int take = remaining;
    if (reduced && t == gens.unit_v) take = std::min(take, 1);
    total += take * gens.v[t].degree;
    remaining -= take;
  }
  return remaining == 0 ? total : -1;
}

void enumerate_v_rec(const GeneratorSet& gens, int t, int len, int degree, bool reduced,
                     std::vector<int32_t>& exp, std::vector<Monomial>& out,
                     uint64_t w_mask) {
  if (degree < 0) return;
  if (t < 0) return;  // degree > 0 with no generators left was pruned below
  if (t == 0) {
    // generator 0 always has degree 0 (dual of the orientation class)
    if (degree != 0) return;
    exp[0] = len;
    out.push_back(make_monomial(gens, exp, w_mask));
    exp[0] = 0;
    return;
  }
  int cap = len;
  if (reduced && t == gens.unit_v) cap = std::min(cap, 1);
  cap = gens.v[t].degree > 0 ? std::min(cap, degree / gens.v[t].degree) : cap;
  for (int e = 0; e <= cap; ++e) {
    int rest_len = len - e;
    int rest_deg = degree - e * gens.v[t].degree;
    // remaining generators can reach at most max_v_degree and at least 0
    if (rest_deg > 0 && rest_deg > max_v_degree(gens, rest_len, t - 1, reduced)) continue;
    exp[t] = e;
    enumerate_v_rec(gens, t - 1, rest_len, rest_deg, reduced, exp, out, w_mask);
  }
  exp[t] = 0;
}

void enumerate_w_rec(const GeneratorSet& gens, int t, int remaining, int degree_left,
                     int v_len, bool reduced, uint64_t mask,
                     std::vector<std::pair<uint64_t, int>>& out) {
  if (remaining == 0) {
    out.emplace_back(mask, degree_left);
    return;
  }
  if (t < 0) return;
  // prune: the `remaining` smallest available degrees are w[0..remaining-1]
  int min_rest = 0, max_rest = 0;
  for (int s = 0; s < remaining; ++s) min_rest += gens.w[s].degree;
  int avail = 0;
  for (int s = t; s >= 0 && avail < remaining; --s) {
    if (reduced && s == gens.unit_w) continue;
    max_rest += gens.w[s].degree;
    ++avail;
  }
  if (avail < remaining) return;
  if (degree_left < min_rest) return;
  (void)v_len;
  for (int s = t; s >= 0; --s) {
    if (reduced && s == gens.unit_w) continue;
    if (gens.w[s].degree <= degree_left)
      enumerate_w_rec(gens, s - 1, remaining - 1, degree_left - gens.w[s].degree, v_len,
                      reduced, mask | (uint64_t(1) << s), out);
  }
}

}  // namespace

Cell enumerate_basis(const GeneratorSet& gens, int k, int degree, int weight,
                     bool reduced) {
  if (k < 0) throw std::invalid_argument("enumerate_basis: k must be >= 0");
  if (weight < 0 || 2 * weight > k)
    throw std::invalid_argument("enumerate_basis: weight outside [0, floor(k/2)]");
  Cell cell;
  cell.k = k;
  cell.degree = degree;
  cell.weight = weight;
  cell.reduced = reduced;

  const int v_len = k - 2 * weight;
  // choose the W-part first, then fill the V-part against the residual degree
  std::vector<std::pair<uint64_t, int>> w_choices;
  enumerate_w_rec(gens, (int)gens.w.size() - 1, weight, degree, v_len, reduced, 0,
                  w_choices);
  std::vector<int32_t> exp(gens.v.size(), 0);
  for (const auto& [mask, v_degree] : w_choices) {
    if (v_degree < 0) continue;
    if (v_degree > max_v_degree(gens, v_len, (int)gens.v.size() - 1, reduced)) continue;
    enumerate_v_rec(gens, (int)gens.v.size() - 1, v_len, v_degree, reduced, exp,
                    cell.basis, mask);
  }
  std::sort(cell.basis.begin(), cell.basis.end(), MonomialLess{});
  return cell;
}

LinearCombination apply_differential(const Monomial& mono, const GeneratorSet& gens,
                                     bool reduced) {
  LinearCombination image;
  int t_pos = 0;
  for (uint64_t mask = mono.w_mask; mask; mask &= mask - 1, ++t_pos) {
    const int t = std::countr_zero(mask);
    const int sign = (t_pos % 2 == 0) ? 1 : -1;
    const uint64_t rest = mono.w_mask & ~(uint64_t(1) << t);
    for (const QuadTerm& term : gens.w[t].rule) {
      std::vector<int32_t> exp = mono.v_exp;
      ++exp[term.a];
      ++exp[term.b];
      if (reduced && gens.unit_v >= 0 && exp[gens.unit_v] > 1) continue;
      if (reduced && gens.unit_w >= 0 && (rest >> gens.unit_w) & 1) continue;
      image.add(make_monomial(gens, std::move(exp), rest), sign * term.coeff);
    }
  }
  return image;
}

LinearCombination apply_differential(const LinearCombination& lc,
                                     const GeneratorSet& gens, bool reduced) {
  LinearCombination image;
  for (const auto& [mono, coeff] : lc) {
    for (const auto& [target, c] : apply_differential(mono, gens, reduced))
      image.add(target, coeff * c);
  }
  return image;
}

SparseRationalMatrix differential_matrix(const GeneratorSet& gens, const Cell& source,
                                         const Cell& target) {
  std::vector<MatrixEntry> entries;
  for (int col = 0; col < source.dim(); ++col) {
    LinearCombination image = apply_differential(source.basis[col], gens, source.reduced);
    for (const auto& [mono, coeff] : image) {
      auto row = target.index_of(mono);
      if (!row)
        throw std::logic_error("differential image leaves the target cell: " +
                               format_monomial(mono, gens));
      entries.push_back({*row, col, coeff});
    }
  }
  return SparseRationalMatrix::from_entries(target.dim(), source.dim(), std::move(entries));
}

SparseRationalMatrix differential_matrix(const GeneratorSet& gens, int k, int degree,
                                         int weight, bool reduced) {
  Cell source = enumerate_basis(gens, k, degree, weight, reduced);
  if (weight == 0) return SparseRationalMatrix(0, source.dim());
  Cell target = enumerate_basis(gens, k, degree + 1, weight - 1, reduced);
  return differential_matrix(gens, source, target);
}

std::optional<DegreeBounds> support_bounds(int k, int weight, int m) {
  if (k < 1 || m < 1 || weight < 0)
    throw std::invalid_argument("support_bounds: need k >= 1, m >= 1, weight >= 0");
  if (weight > std::min(k / 2, m)) return std::nullopt;
  DegreeBounds bounds;
  bounds.min_degree = 2 * weight * m + weight * (weight - 2);
  if (weight >= 1 && k % 2 == 0 && weight == k / 2) {
    // pure-W cell: the k/2 largest admissible odd degrees
    bounds.max_degree = 4 * weight * m - (weight * weight + 2 * weight);
  } else {
    bounds.max_degree = (2 * m - 2) * k - (weight * weight - 2 * weight - 2);
  }
  return bounds;
}

std::optional<DegreeBounds> degree_bounds(const GeneratorSet& gens, int k, int weight,
                                          bool reduced) {
  if (weight < 0 || 2 * weight > k) return std::nullopt;
  const int v_len = k - 2 * weight;
  int available_w = (int)gens.w.size() - (reduced ? 1 : 0);
  if (weight > available_w) return std::nullopt;

  DegreeBounds bounds{0, 0};
  // V-part: generator 0 has degree 0, so the minimum is 0; the maximum is
  // greedy from the top with the reduced cap.
  bounds.max_degree = max_v_degree(gens, v_len, (int)gens.v.size() - 1, reduced);
  // W-part: sum of the `weight` smallest / largest admissible degrees.
  int taken = 0;
  for (int t = 0; t < (int)gens.w.size() && taken < weight; ++t) {
    if (reduced && t == gens.unit_w) continue;
    bounds.min_degree += gens.w[t].degree;
    ++taken;
  }
  taken = 0;
  for (int t = (int)gens.w.size() - 1; t >= 0 && taken < weight; --t) {
    if (reduced && t == gens.unit_w) continue;
    bounds.max_degree += gens.w[t].degree;
    ++taken;
  }
  return bounds;
}

DSquaredVerdict verify_d_squared_zero(const GeneratorSet& gens, int k, int degree_lo,
                                      int degree_hi, bool reduced) {
  DSquaredVerdict verdict;
  std::map<std::pair<int, int>, SparseRationalMatrix> matrices;
  auto matrix_at = [&](int degree, int weight) -> const SparseRationalMatrix& {
    auto key = std::pair(degree, weight);
    auto it = matrices.find(key);
    if (it == matrices.end())
      it = matrices.emplace(key, differential_matrix(gens, k, degree, weight, reduced))
               .first;
    return it->second;
  };
  for (int degree = degree_lo; degree <= degree_hi; ++degree) {
    for (int weight = 2; weight <= k / 2; ++weight) {
      auto bounds = degree_bounds(gens, k, weight, reduced);
      if (!bounds || degree < bounds->min_degree || degree > bounds->max_degree) continue;
      const auto& first = matrix_at(degree, weight);
      if (first.cols() == 0) continue;
      const auto& second = matrix_at(degree + 1, weight - 1);
      ++verdict.cells_checked;
      if (!multiply(second, first).is_zero()) {
        verdict.ok = false;
        if (!verdict.first_failure) verdict.first_failure = {degree, weight};
      }
    }
  }
  return verdict;
}

std::string format_monomial(const Monomial& mono, const GeneratorSet& gens) {
  // degrees can repeat in general rings; disambiguate with #index
  auto degree_multiplicity = [&](int degree, const auto& family) {
    int count = 0;
    for (const auto& g : family)
      if (g.degree == degree) ++count;
    return count;
  };
  std::ostringstream os;
  bool first = true;
  for (size_t t = 0; t < mono.v_exp.size(); ++t) {
    if (mono.v_exp[t] == 0) continue;
    if (!first) os << ' ';
    first = false;
    os << 'v' << gens.v[t].degree;
    if (degree_multiplicity(gens.v[t].degree, gens.v) > 1) os << '#' << t;
    if (mono.v_exp[t] > 1) os << '^' << mono.v_exp[t];
  }
  for (uint64_t mask = mono.w_mask; mask; mask &= mask - 1) {
    int t = std::countr_zero(mask);
    if (!first) os << ' ';
    first = false;
    os << 'w' << gens.w[t].degree;
    if (degree_multiplicity(gens.w[t].degree, gens.w) > 1) os << '#' << t;
  }
  if (first) os << '1';
  return os.str();
}

std::string format_combination(const LinearCombination& lc, const GeneratorSet& gens) {
  if (lc.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : lc) {
    if (first) {
      if (coeff < 0) os << '-';
    } else {
      os << (coeff < 0 ? " - " : " + ");
    }
    first = false;
    Rational mag = abs(coeff);
    if (mag != 1) os << rational_to_string(mag) << ' ';
    os << format_monomial(mono, gens);
  }
  return os.str();
}

}  // namespace confcoh
