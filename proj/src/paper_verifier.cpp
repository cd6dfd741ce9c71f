#include "confcoh/paper_verifier.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace confcoh {

using nlohmann::ordered_json;

std::optional<Stabilization> detect_stabilization(
    std::span<const std::pair<int, int>> series) {
  if (series.empty()) return std::nullopt;
  size_t n = series.size();
  size_t start = n - 1;
  while (start > 0 && series[start - 1].second == series[n - 1].second) --start;
  // onset entry plus at least three confirmations
  if (n - start < 4) return std::nullopt;
  return Stabilization{series[start].first, series[start].second};
}

namespace {

int require_cpm(const CohomologyEngine& engine, int min_m, const char* what) {
  auto m = engine.cpm_m();
  if (!m)
    throw HypothesisError(std::string(what) + ": requires the CP^m ring");
  if (*m < min_m)
    throw HypothesisError(std::string(what) + ": outside hypotheses, needs m >= " +
                          std::to_string(min_m) + " (got m = " + std::to_string(*m) + ")");
  return *m;
}

std::string csv_escape(const std::string& s) { return s; }

}  // namespace

std::string ScanTable::to_csv() const {
  std::ostringstream os;
  os << "family,m,mode,k," << (family == "conjecture" ? "slope" : "offset")
     << ",degree,dim\n";
  for (const ScanRow& r : rows)
    os << csv_escape(family) << ',' << m << ',' << mode_name(mode) << ',' << r.k << ','
       << r.parameter << ',' << r.degree << ',' << r.dim << '\n';
  if (!families.empty()) {
    os << "\nparameter,stabilized,onset_k,stable_value\n";
    for (const ScanFamily& f : families) {
      if (f.stabilization)
        os << f.parameter << ",yes," << f.stabilization->onset_k << ','
           << f.stabilization->value << '\n';
      else
        os << f.parameter << ",no,,\n";
    }
  }
  if (largest_nonzero_offset)
    os << "\nlargest_nonzero_offset," << *largest_nonzero_offset << '\n';
  else if (all_scanned_zero)
    os << "\nlargest_nonzero_offset,none\n";
  return os.str();
}

std::string ScanTable::to_json() const {
  ordered_json doc;
  doc["family"] = family;
  doc["m"] = m;
  doc["mode"] = mode_name(mode);
  doc["degree_formula"] = degree_formula;
  doc["rows"] = ordered_json::array();
  for (const ScanRow& r : rows)
    doc["rows"].push_back(
        {{"k", r.k}, {"parameter", r.parameter}, {"degree", r.degree}, {"dim", r.dim}});
  doc["stabilization"] = ordered_json::array();
  for (const ScanFamily& f : families) {
    ordered_json s{{"parameter", f.parameter}};
    if (f.stabilization) {
      s["stabilized"] = true;
      s["onset_k"] = f.stabilization->onset_k;
      s["value"] = f.stabilization->value;
    } else {
      s["stabilized"] = false;
    }
    doc["stabilization"].push_back(std::move(s));
  }
  if (largest_nonzero_offset)
    doc["largest_nonzero_offset"] = *largest_nonzero_offset;
  else if (all_scanned_zero)
    doc["largest_nonzero_offset"] = nullptr;
  return doc.dump(2) + "\n";
}

ScanTable extremal_scan(CohomologyEngine& engine, const std::vector<int>& offsets,
                        int k_lo, int k_hi, Mode mode) {
  const int m = require_cpm(engine, 1, "extremal_scan");
  ScanTable table;
  table.family = "extremal";
  table.m = m;
  table.mode = mode;
  table.degree_formula = "(2m-2)k + i";
  for (int i : offsets) {
    ScanFamily fam;
    fam.parameter = i;
    for (int k = k_lo; k <= k_hi; ++k) {
      long degree = (long)(2 * m - 2) * k + i;
      int dim = degree < 0 ? 0 : engine.cohomology_dim(k, (int)degree, mode);
      table.rows.push_back({k, i, degree, dim});
      fam.series.emplace_back(k, dim);
    }
    fam.stabilization = detect_stabilization(fam.series);
    table.families.push_back(std::move(fam));
  }
  return table;
}

EntireVanishingVerdict entire_vanishing_check(CohomologyEngine& engine, int k) {
  const int m = require_cpm(engine, 1, "entire_vanishing_check");
  EntireVanishingVerdict verdict;
  verdict.k = k;
  verdict.cutoff_degree = (2 * m - 2) * k + 3;
  int max_supported = INT32_MIN;
  for (int weight = 0; 2 * weight <= k; ++weight) {
    auto bounds = support_bounds(k, weight, m);
    if (!bounds) continue;
    max_supported = std::max(max_supported, bounds->max_degree);
  }
  verdict.max_supported_degree = max_supported;
  verdict.pass = max_supported <= verdict.cutoff_degree;
  // enumeration witness just above the cutoff
  for (int degree = verdict.cutoff_degree + 1;
       verdict.pass && degree <= verdict.cutoff_degree + 4; ++degree)
    for (int weight = 0; 2 * weight <= k && verdict.pass; ++weight)
      if (engine.cell(k, degree, weight, Mode::reduced)->dim() != 0) verdict.pass = false;
  return verdict;
}

namespace {

ExactnessVerdict diagonal_exactness(CohomologyEngine& engine, int k, int diagonal,
                                    int top_weight, const std::vector<int>& expected_dims,
                                    const std::vector<int>& expected_ranks,
                                    const std::string& name) {
  ExactnessVerdict verdict;
  verdict.name = name;
  bool ok = true;
  for (int p = 0; p < (int)expected_dims.size(); ++p) {
    int weight = top_weight - p;
    int degree = diagonal - weight;
    auto cell = engine.cell(k, degree, weight, Mode::reduced);
    verdict.cell_dims.push_back(cell->dim());
    if (cell->dim() != expected_dims[p]) ok = false;
  }
  for (int p = 0; p + 1 < (int)expected_dims.size(); ++p) {
    int weight = top_weight - p;
    int degree = diagonal - weight;
    int r = engine.rank_out(k, degree, weight, Mode::reduced);
    verdict.ranks.push_back(r);
    if (r != expected_ranks[p]) ok = false;
  }
  for (int p = 0; p < (int)expected_dims.size(); ++p) {
    int weight = top_weight - p;
    int degree = diagonal - weight;
    int out = engine.rank_out(k, degree, weight, Mode::reduced);
    int in = engine.rank_out(k, degree - 1, weight + 1, Mode::reduced);
    int h = verdict.cell_dims[p] - out - in;
    verdict.cohomology.push_back(h);
    if (h != 0) ok = false;
  }
  verdict.pass = ok;
  return verdict;
}

void require_lemma_hypotheses(CohomologyEngine& engine, int k, const char* name) {
  require_cpm(engine, 4, name);
  if (k <= 8)
    throw HypothesisError(std::string(name) +
                          ": outside lemma hypotheses, needs k > 8 (got k = " +
                          std::to_string(k) + ")");
}

}  // namespace

ExactnessVerdict lemma_4_1_check(CohomologyEngine& engine, int k) {
  require_lemma_hypotheses(engine, k, "lemma_4_1_check");
  const int m = *engine.cpm_m();
  return diagonal_exactness(engine, k, (2 * m - 2) * k, 3, {2, 6, 6, 2}, {2, 4, 2},
                            "lemma_4_1");
}

ExactnessVerdict lemma_4_2_check(CohomologyEngine& engine, int k) {
  require_lemma_hypotheses(engine, k, "lemma_4_2_check");
  const int m = *engine.cpm_m();
  return diagonal_exactness(engine, k, (2 * m - 2) * k + 2, 3, {1, 3, 3, 1}, {1, 2, 1},
                            "lemma_4_2");
}

ExactnessVerdict lemma_4_3_check(CohomologyEngine& engine, int k) {
  require_lemma_hypotheses(engine, k, "lemma_4_3_check");
  const int m = *engine.cpm_m();
  ExactnessVerdict verdict;
  verdict.name = "lemma_4_3";
  int source_degree = (2 * m - 2) * k - 3;
  int target_degree = (2 * m - 2) * k - 2;
  auto source = engine.cell(k, source_degree, 1, Mode::reduced);
  auto target = engine.cell(k, target_degree, 0, Mode::reduced);
  verdict.cell_dims = {source->dim(), target->dim()};
  int r = engine.rank_out(k, source_degree, 1, Mode::reduced);
  verdict.ranks = {r};
  // surjectivity kills the cohomology at the weight-0 position
  int h = target->dim() - engine.rank_out(k, target_degree, 0, Mode::reduced) - r;
  verdict.cohomology = {h};
  verdict.pass = source->dim() == 8 && target->dim() == 3 && r == 3 && h == 0;
  return verdict;
}

namespace {

int v_index_of_degree(const GeneratorSet& gens, int degree) {
  for (int t = 0; t < (int)gens.v.size(); ++t)
    if (gens.v[t].degree == degree) return t;
  throw std::logic_error("no V generator of degree " + std::to_string(degree));
}

int w_index_of_degree(const GeneratorSet& gens, int degree) {
  for (int t = 0; t < (int)gens.w.size(); ++t)
    if (gens.w[t].degree == degree) return t;
  throw std::logic_error("no W generator of degree " + std::to_string(degree));
}

CocycleCertificate certify(CohomologyEngine& engine, std::string name, int k,
                           LinearCombination cls) {
  CocycleCertificate cert;
  cert.name = std::move(name);
  cert.k = k;
  cert.cls = std::move(cls);
  if (cert.cls.empty()) throw std::logic_error("certify: empty class");
  cert.degree = cert.cls.begin()->first.degree;
  cert.weight = cert.cls.begin()->first.weight;
  cert.rendered = format_combination(cert.cls, engine.generators());
  cert.is_cocycle =
      apply_differential(cert.cls, engine.generators(), /*reduced=*/true).empty();

  auto cell = engine.cell(k, cert.degree, cert.weight, Mode::reduced);
  std::vector<Rational> coords(cell->dim(), Rational(0));
  for (const auto& [mono, coeff] : cert.cls) {
    auto idx = cell->index_of(mono);
    if (!idx) throw std::logic_error("certify: class leaves its cell");
    coords[*idx] = coeff;
  }
  SparseRationalMatrix incoming;
  if (2 * (cert.weight + 1) <= k) {
    auto source = engine.cell(k, cert.degree - 1, cert.weight + 1, Mode::reduced);
    incoming = differential_matrix(engine.generators(), *source, *cell);
  } else {
    incoming = SparseRationalMatrix(cell->dim(), 0);
  }
  cert.is_coboundary = in_column_space(incoming, coords).member;
  return cert;
}

LinearCombination alpha_combination(CohomologyEngine& engine, int bump_j1) {
  const GeneratorSet& gens = engine.generators();
  const int m = *engine.cpm_m();
  LinearCombination alpha;
  for (int j = 1; j <= m; ++j) {
    Rational coeff(2 * m - 3 * j + (j == 1 ? bump_j1 : 0));
    if (coeff == 0) continue;
    std::vector<int32_t> exp(gens.v.size(), 0);
    exp[v_index_of_degree(gens, 2 * j)] = 1;
    uint64_t mask = uint64_t(1) << w_index_of_degree(gens, 4 * m - 2 * j - 1);
    alpha.add(make_monomial(gens, std::move(exp), mask), coeff);
  }
  return alpha;
}

}  // namespace

CocycleCertificate build_alpha(CohomologyEngine& engine) {
  require_cpm(engine, 4, "build_alpha");
  return certify(engine, "alpha", 3, alpha_combination(engine, 0));
}

CocycleCertificate build_alpha_perturbed(CohomologyEngine& engine) {
  require_cpm(engine, 4, "build_alpha_perturbed");
  return certify(engine, "alpha_perturbed", 3, alpha_combination(engine, 1));
}

std::vector<int> nonvanishing_slopes(int m) {
  std::vector<int> slopes;
  for (int a = 2; a <= 2 * ((m + 1) / 2) - 2; a += 2) slopes.push_back(a);
  return slopes;
}

std::vector<int> conjecture_slopes(int m) {
  std::vector<int> slopes;
  for (int a = 2 * ((m + 1) / 2); a <= 2 * m - 4; a += 2) slopes.push_back(a);
  return slopes;
}

CocycleCertificate beta_class_nonzero(CohomologyEngine& engine, int slope_a, int k) {
  const int m = require_cpm(engine, 4, "beta_class_nonzero");
  auto slopes = nonvanishing_slopes(m);
  if (std::find(slopes.begin(), slopes.end(), slope_a) == slopes.end()) {
    std::ostringstream os;
    os << "beta_class_nonzero: slope " << slope_a << " outside the valid set {";
    for (size_t p = 0; p < slopes.size(); ++p) os << (p ? "," : "") << slopes[p];
    os << "} for m = " << m;
    throw HypothesisError(os.str());
  }
  if (k < 3)
    throw HypothesisError("beta_class_nonzero: needs k >= 3 (k = 3 gives alpha itself)");

  const GeneratorSet& gens = engine.generators();
  const int va = v_index_of_degree(gens, slope_a);
  LinearCombination beta;
  for (const auto& [mono, coeff] : alpha_combination(engine, 0)) {
    std::vector<int32_t> exp = mono.v_exp;
    exp[va] += k - 3;
    beta.add(make_monomial(gens, std::move(exp), mono.w_mask), coeff);
  }
  std::ostringstream name;
  name << "beta_" << slope_a << "_" << k;
  return certify(engine, name.str(), k, std::move(beta));
}

ScanTable conjecture_scan(CohomologyEngine& engine, int k_lo, int k_hi) {
  const int m = require_cpm(engine, 4, "conjecture_scan");
  ScanTable table;
  table.family = "conjecture";
  table.m = m;
  table.mode = Mode::reduced;
  table.degree_formula = "a(k-3) + 4m - 1";
  for (int a : conjecture_slopes(m)) {
    ScanFamily fam;
    fam.parameter = a;
    for (int k = k_lo; k <= k_hi; ++k) {
      long degree = (long)a * (k - 3) + 4 * m - 1;
      int dim = degree < 0 ? 0 : engine.cohomology_dim(k, (int)degree, Mode::reduced);
      table.rows.push_back({k, a, degree, dim});
      fam.series.emplace_back(k, dim);
    }
    fam.stabilization = detect_stabilization(fam.series);
    table.families.push_back(std::move(fam));
  }
  return table;
}

ScanTable smallest_nonvanishing_offset_scan(CohomologyEngine& engine, int k, int i_lo,
                                            int i_hi) {
  const int m = require_cpm(engine, 1, "smallest_nonvanishing_offset_scan");
  ScanTable table;
  table.family = "offset";
  table.m = m;
  table.mode = Mode::reduced;
  table.degree_formula = "(2m-2)k + i";
  table.all_scanned_zero = true;
  for (int i = i_hi; i >= i_lo; --i) {
    long degree = (long)(2 * m - 2) * k + i;
    int dim = degree < 0 ? 0 : engine.cohomology_dim(k, (int)degree, Mode::reduced);
    table.rows.push_back({k, i, degree, dim});
    if (dim != 0) {
      table.all_scanned_zero = false;
      if (!table.largest_nonzero_offset) table.largest_nonzero_offset = i;
    }
  }
  return table;
}

std::vector<Anomaly> recheck_textual_anomalies(CohomologyEngine& engine, int k) {
  const int m = require_cpm(engine, 1, "recheck_textual_anomalies");
  std::vector<Anomaly> anomalies;

  // 1. Even-k boundary case of the maximum supported degree: is it
  //    4wm - (w^2 + 2w) (the value support_bounds uses) or the variant
  //    4wm - (w^2 + w)? Decide by enumeration.
  {
    Anomaly a;
    a.id = "max-degree-boundary-formula";
    bool all_match = true;
    std::ostringstream os;
    for (int keven = 2; keven <= std::min(k, 2 * m); keven += 2) {
      int weight = keven / 2;
      if (weight > m) continue;
      int expected = 4 * weight * m - (weight * weight + 2 * weight);
      int variant = 4 * weight * m - (weight * weight + weight);
      int observed = INT32_MIN;
      for (int degree = std::max(expected, variant) + 2; degree >= expected - 2; --degree) {
        if (enumerate_basis(engine.generators(), keven, degree, weight, true).dim() > 0) {
          observed = degree;
          break;
        }
      }
      if (observed != expected) all_match = false;
      os << "k=" << keven << ",w=" << weight << ": max=" << observed << " (formula "
         << expected << ", variant " << variant << "); ";
    }
    a.observation = os.str();
    a.resolved_as_expected = all_match;
    anomalies.push_back(std::move(a));
  }

  // 2. Right-edge differential: the top cell of each weight is a single
  //    monomial; its differential vanishes exactly for weight 1 (k >= 3),
  //    not for weight 3.
  if (k >= 3) {
    Anomaly a;
    a.id = "right-edge-zero-cases";
    std::ostringstream os;
    bool expected_pattern = true;
    for (int weight = 1; weight <= std::min(k / 2, m); ++weight) {
      auto bounds = support_bounds(k, weight, m);
      if (!bounds) continue;
      auto cell = engine.cell(k, bounds->max_degree, weight, Mode::reduced);
      int r = engine.rank_out(k, bounds->max_degree, weight, Mode::reduced);
      os << "w=" << weight << ": dim=" << cell->dim() << ",rank=" << r << "; ";
      bool boundary = k % 2 == 0 && weight == k / 2;
      if (weight == 1 && !boundary && r != 0) expected_pattern = false;
      if (weight == 3 && !boundary && r != 1) expected_pattern = false;
    }
    a.observation = os.str();
    a.resolved_as_expected = expected_pattern;
    anomalies.push_back(std::move(a));
  }
  return anomalies;
}

void RunReport::add_check(const std::string& name, const std::string& params, bool pass,
                          const std::string& data_json, double ms) {
  entries_.push_back({name, params, pass ? "pass" : "fail", data_json, ms});
  if (!pass) ++failures_;
}

void RunReport::add_data(const std::string& name, const std::string& params,
                         const std::string& data_json, double ms) {
  entries_.push_back({name, params, "data", data_json, ms});
}

std::string RunReport::to_jsonl(bool include_timing) const {
  std::ostringstream os;
  for (const Entry& e : entries_) {
    ordered_json line;
    line["check"] = e.name;
    line["params"] = e.params.empty() ? ordered_json(nullptr) : ordered_json::parse(e.params);
    line["verdict"] = e.verdict;
    line["data"] = e.data.empty() ? ordered_json(nullptr) : ordered_json::parse(e.data);
    if (include_timing) line["ms"] = e.ms;
    os << line.dump() << '\n';
  }
  return os.str();
}

std::string RunReport::summary() const {
  std::ostringstream os;
  for (const Entry& e : entries_) {
    std::string tag = e.verdict == "data" ? "DATA" : (e.verdict == "pass" ? "PASS" : "FAIL");
    os << tag << ' ' << e.name;
    if (!e.params.empty()) os << ' ' << e.params;
    os << " [" << e.ms << " ms]\n";
  }
  os << (failures_ == 0 ? "all checks passed" : std::to_string(failures_) + " check(s) failed")
     << '\n';
  return os.str();
}

}  // namespace confcoh
