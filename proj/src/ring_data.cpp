#include "confcoh/ring_data.hpp"

#include "confcoh/exact_linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace confcoh {

using nlohmann::ordered_json;

Rational RingSpec::product_coeff(int i, int j, int l) const {
  auto it = products.find({i, j});
  if (it == products.end()) return Rational(0);
  for (const auto& [idx, coeff] : it->second)
    if (idx == l) return coeff;
  return Rational(0);
}

namespace {

void set_product(RingSpec& ring, int i, int j, std::vector<std::pair<int, Rational>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, Rational>> merged;
  for (auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(std::move(t));
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0; });
  if (merged.empty())
    ring.products.erase({i, j});
  else
    ring.products[{i, j}] = std::move(merged);
}

Rational parse_coeff_field(const ordered_json& value) {
  if (value.is_number_integer()) return Rational(value.get<long long>());
  if (value.is_string()) {
    auto parsed = parse_rational(value.get<std::string>());
    if (parsed) return *parsed;
  }
  throw RingError("parse", "coefficient must be an integer or a \"p/q\" string, got " +
                               value.dump());
}

}  // namespace

RingSpec builtin_cpm(int m) {
  if (m < 1) throw RingError("parameter", "cpm requires m >= 1 (a point is not supported)");
  RingSpec ring;
  ring.name = "CP" + std::to_string(m);
  ring.dimension = 2 * m;
  for (int a = 0; a <= m; ++a) {
    std::string label = a == 0 ? "1" : (a == 1 ? "z" : "z^" + std::to_string(a));
    ring.basis.push_back({label, 2 * a});
  }
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b)
      if (a + b <= m) set_product(ring, a, b, {{a + b, Rational(1)}});
  validate_ring(ring);
  return ring;
}

RingSpec builtin_sphere(int dimension) {
  if (dimension < 2 || dimension % 2 != 0)
    throw RingError("parameter", "sphere dimension must be even and >= 2");
  RingSpec ring;
  ring.name = "S" + std::to_string(dimension);
  ring.dimension = dimension;
  ring.basis.push_back({"1", 0});
  ring.basis.push_back({"t", dimension});
  set_product(ring, 0, 0, {{0, Rational(1)}});
  set_product(ring, 0, 1, {{1, Rational(1)}});
  set_product(ring, 1, 0, {{1, Rational(1)}});
  validate_ring(ring);
  return ring;
}

void validate_ring(RingSpec& ring) {
  const int n = (int)ring.basis.size();
  if (ring.dimension <= 0 || ring.dimension % 2 != 0)
    throw RingError("dimension", "manifold dimension must be a positive even integer");
  if (n == 0) throw RingError("basis", "empty basis");

  std::set<std::string> labels;
  for (const auto& b : ring.basis) {
    if (!labels.insert(b.label).second)
      throw RingError("duplicate label", "basis label '" + b.label + "' appears twice");
    if (b.degree < 0 || b.degree > ring.dimension)
      throw RingError("degree range",
                      "degree of '" + b.label + "' outside [0, " +
                          std::to_string(ring.dimension) + "]");
    if (b.degree % 2 != 0)
      throw RingError("odd degree", "basis element '" + b.label +
                                        "' has odd degree; only even rational "
                                        "cohomology is supported");
  }

  int units = 0, tops = 0;
  for (int i = 0; i < n; ++i) {
    if (ring.basis[i].degree == 0) {
      ring.unit_index = i;
      ++units;
    }
    if (ring.basis[i].degree == ring.dimension) {
      ring.top_index = i;
      ++tops;
    }
  }
  if (units == 0) throw RingError("missing unit", "no degree-0 basis element");
  if (units > 1) throw RingError("multiple units", "more than one degree-0 basis element");
  if (tops == 0)
    throw RingError("missing orientation class",
                    "no basis element of top degree " + std::to_string(ring.dimension));
  if (tops > 1)
    throw RingError("multiple orientation classes",
                    "more than one basis element of top degree");

  for (const auto& [key, terms] : ring.products) {
    auto [i, j] = key;
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw RingError("index range", "product index out of range");
    for (const auto& [l, coeff] : terms) {
      if (l < 0 || l >= n) throw RingError("index range", "product target out of range");
      if (coeff != 0 && ring.basis[l].degree != ring.basis[i].degree + ring.basis[j].degree)
        throw RingError("grading", "product " + ring.basis[i].label + " * " +
                                       ring.basis[j].label + " hits " + ring.basis[l].label +
                                       " of wrong degree");
    }
  }

  // commutativity (all degrees even, no signs)
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int l = 0; l < n; ++l)
        if (ring.product_coeff(i, j, l) != ring.product_coeff(j, i, l))
          throw RingError("commutativity", "product table is not symmetric at (" +
                                               ring.basis[i].label + ", " +
                                               ring.basis[j].label + ")");

  // unit law: 1 * x_j = x_j
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      Rational expected(l == j ? 1 : 0);
      if (ring.product_coeff(ring.unit_index, j, l) != expected)
        throw RingError("unit law", "1 * " + ring.basis[j].label + " != " +
                                        ring.basis[j].label);
    }

  // Poincare pairing: P_ij = coefficient of the top class in x_i x_j must be
  // nondegenerate.
  {
    std::vector<MatrixEntry> entries;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rational c = ring.product_coeff(i, j, ring.top_index);
        if (c != 0) entries.push_back({i, j, c});
      }
    auto pairing = SparseRationalMatrix::from_entries(n, n, std::move(entries));
    if (rank(pairing).rank != n)
      throw RingError("poincare pairing", "the intersection pairing is degenerate");
  }

  // associativity is a warning: the model only consumes the pairing + grading
  ring.warnings.clear();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p) {
        bool ok = true;
        for (int q = 0; q < n && ok; ++q) {
          Rational left(0), right(0);
          for (int l = 0; l < n; ++l) {
            left += ring.product_coeff(i, j, l) * ring.product_coeff(l, p, q);
            right += ring.product_coeff(j, p, l) * ring.product_coeff(i, l, q);
          }
          ok = left == right;
        }
        if (!ok) {
          std::ostringstream os;
          os << "associativity fails on (" << ring.basis[i].label << ", "
             << ring.basis[j].label << ", " << ring.basis[p].label << ")";
          ring.warnings.push_back(os.str());
        }
      }
}

RingSpec load_ring_spec(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw RingError("parse", e.what());
  }
  if (!doc.is_object()) throw RingError("parse", "top level must be an object");

  RingSpec ring;
  ring.name = doc.value("name", std::string("unnamed"));
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer())
    throw RingError("parse", "missing integer field 'dimension'");
  ring.dimension = doc["dimension"].get<int>();
  if (!doc.contains("generators") || !doc["generators"].is_array())
    throw RingError("parse", "missing array field 'generators'");

  std::map<std::string, int> index_of;
  for (const auto& g : doc["generators"]) {
    if (!g.is_object() || !g.contains("label") || !g.contains("degree"))
      throw RingError("parse", "each generator needs 'label' and 'degree'");
    BasisElement b{g["label"].get<std::string>(), g["degree"].get<int>()};
    if (index_of.count(b.label))
      throw RingError("duplicate label", "basis label '" + b.label + "' appears twice");
    index_of[b.label] = (int)ring.basis.size();
    ring.basis.push_back(std::move(b));
  }

  auto label_index = [&](const std::string& label) {
    auto it = index_of.find(label);
    if (it == index_of.end())
      throw RingError("parse", "unknown basis label '" + label + "'");
    return it->second;
  };

  std::map<std::pair<int, int>, std::vector<std::pair<int, Rational>>> declared;
  if (doc.contains("products")) {
    if (!doc["products"].is_array()) throw RingError("parse", "'products' must be an array");
    for (const auto& p : doc["products"]) {
      if (!p.is_object() || !p.contains("left") || !p.contains("right"))
        throw RingError("parse", "each product needs 'left' and 'right'");
      int i = label_index(p["left"].get<std::string>());
      int j = label_index(p["right"].get<std::string>());
      std::vector<std::pair<int, Rational>> terms;
      if (p.contains("terms")) {
        for (const auto& t : p["terms"]) {
          if (!t.is_object() || !t.contains("basis") || !t.contains("coeff"))
            throw RingError("parse", "each term needs 'basis' and 'coeff'");
          terms.emplace_back(label_index(t["basis"].get<std::string>()),
                             parse_coeff_field(t["coeff"]));
        }
      }
      if (declared.count({i, j}))
        throw RingError("parse", "product (" + p["left"].get<std::string>() + ", " +
                                     p["right"].get<std::string>() + ") declared twice");
      declared[{i, j}] = std::move(terms);
    }
  }

  // A document may list one order of each unordered pair; the mirror is
  // implied. Conflicting explicit pairs are an error.
  for (const auto& [key, terms] : declared) {
    auto [i, j] = key;
    auto mirror = declared.find({j, i});
    if (mirror != declared.end() && i < j) {
      auto a = terms, b = mirror->second;
      auto norm = [](std::vector<std::pair<int, Rational>> v) {
        std::sort(v.begin(), v.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        std::erase_if(v, [](const auto& t) { return t.second == 0; });
        return v;
      };
      if (norm(a) != norm(b))
        throw RingError("commutativity", "products (" + ring.basis[i].label + ", " +
                                             ring.basis[j].label +
                                             ") and its mirror disagree");
    }
    set_product(ring, i, j, terms);
    if (mirror == declared.end()) set_product(ring, j, i, terms);
  }

  // unit products are implied when omitted
  int unit = -1;
  for (int i = 0; i < (int)ring.basis.size(); ++i)
    if (ring.basis[i].degree == 0) unit = i;
  if (unit >= 0)
    for (int j = 0; j < (int)ring.basis.size(); ++j) {
      if (!ring.products.count({unit, j})) set_product(ring, unit, j, {{j, Rational(1)}});
      if (!ring.products.count({j, unit})) set_product(ring, j, unit, {{j, Rational(1)}});
    }

  validate_ring(ring);
  return ring;
}

std::string serialize_ring_spec(const RingSpec& ring) {
  ordered_json doc;
  doc["name"] = ring.name;
  doc["dimension"] = ring.dimension;
  doc["generators"] = ordered_json::array();
  for (const auto& b : ring.basis)
    doc["generators"].push_back({{"label", b.label}, {"degree", b.degree}});
  doc["products"] = ordered_json::array();
  for (const auto& [key, terms] : ring.products) {
    auto [i, j] = key;
    if (i > j) continue;  // one order per pair; mirror is implied
    if (i == ring.unit_index || j == ring.unit_index) continue;
    ordered_json p;
    p["left"] = ring.basis[i].label;
    p["right"] = ring.basis[j].label;
    p["terms"] = ordered_json::array();
    for (const auto& [l, coeff] : terms)
      p["terms"].push_back(
          {{"basis", ring.basis[l].label}, {"coeff", rational_to_string(coeff)}});
    doc["products"].push_back(std::move(p));
  }
  return doc.dump(2) + "\n";
}

DiagonalTable diagonal_comultiplication(const RingSpec& ring) {
  const int n = (int)ring.basis.size();
  DiagonalTable table;
  table.rows.resize(n);
  for (const auto& [key, terms] : ring.products) {
    auto [i, j] = key;
    for (const auto& [l, coeff] : terms)
      if (coeff != 0) table.rows[l].push_back({i, j, coeff});
  }
  for (auto& row : table.rows)
    std::sort(row.begin(), row.end(), [](const DiagonalEntry& a, const DiagonalEntry& b) {
      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
  return table;
}

std::optional<int> cpm_complex_dimension(const RingSpec& ring) {
  const int m = ring.m();
  if ((int)ring.basis.size() != m + 1) return std::nullopt;
  // basis must be 1, z, ..., z^m in degree order after sorting by degree
  std::vector<int> by_degree(m + 1, -1);
  for (int i = 0; i <= m; ++i) {
    int d = ring.basis[i].degree;
    if (d % 2 != 0 || d / 2 > m || by_degree[d / 2] != -1) return std::nullopt;
    by_degree[d / 2] = i;
  }
  for (int a = 0; a <= m; ++a)
    for (int b = 0; b <= m; ++b)
      for (int l = 0; l <= m; ++l) {
        Rational expected(a + b <= m && a + b == l ? 1 : 0);
        if (ring.product_coeff(by_degree[a], by_degree[b], by_degree[l]) != expected)
          return std::nullopt;
      }
  return m;
}

bool same_ring_structure(const RingSpec& a, const RingSpec& b) {
  if (a.dimension != b.dimension) return false;
  if (a.basis.size() != b.basis.size()) return false;
  for (size_t i = 0; i < a.basis.size(); ++i)
    if (a.basis[i].degree != b.basis[i].degree) return false;
  const int n = (int)a.basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        if (a.product_coeff(i, j, l) != b.product_coeff(i, j, l)) return false;
  return true;
}

uint64_t ring_content_hash(const RingSpec& ring) {
  // canonical structure dump (labels and name excluded)
  std::ostringstream os;
  os << ring.dimension << ';';
  for (const auto& b : ring.basis) os << b.degree << ',';
  os << ';';
  const int n = (int)ring.basis.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        Rational c = ring.product_coeff(i, j, l);
        if (c != 0) os << i << ',' << j << ',' << l << ',' << rational_to_string(c) << ';';
      }
  const std::string s = os.str();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace confcoh
