#pragma once

#include "confcoh/cohomology_engine.hpp"

#include <span>

namespace confcoh {

// A scan parameter (offset or slope) is outside the range a theorem-level
// check is stated for.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScanRow {
  int k = 0;
  int parameter = 0;  // offset i or slope a, depending on the family
  long degree = 0;
  int dim = 0;
};

struct Stabilization {
  int onset_k = 0;
  int value = 0;
};

struct ScanFamily {
  int parameter = 0;
  std::vector<std::pair<int, int>> series;  // (k, dim), ascending k
  std::optional<Stabilization> stabilization;
};

// Tabulated Hilbert-function values with per-parameter stabilization
// verdicts. `degree_formula` records how the target degree is derived.
struct ScanTable {
  std::string family;  // "extremal" | "conjecture" | "offset"
  int m = 0;
  Mode mode = Mode::reduced;
  std::string degree_formula;
  std::vector<ScanRow> rows;
  std::vector<ScanFamily> families;

  // offset scans only
  std::optional<int> largest_nonzero_offset;
  bool all_scanned_zero = false;

  std::string to_csv() const;
  std::string to_json() const;
};

// Least k0 whose tail is constant, with at least three confirmations after
// the onset entry; nullopt when the tail is shorter or not constant.
std::optional<Stabilization> detect_stabilization(
    std::span<const std::pair<int, int>> series);

// dim H^{(2m-2)k + i} for each offset and k; stabilization per offset.
ScanTable extremal_scan(CohomologyEngine& engine, const std::vector<int>& offsets,
                        int k_lo, int k_hi, Mode mode);

struct EntireVanishingVerdict {
  bool pass = false;
  int k = 0;
  int cutoff_degree = 0;         // (2m-2)k + 3
  int max_supported_degree = 0;  // over all weights
};

// Every reduced cell above the absolute cutoff is empty: closed-form sweep
// over all weights plus an enumeration witness just above the cutoff.
EntireVanishingVerdict entire_vanishing_check(CohomologyEngine& engine, int k);

struct ExactnessVerdict {
  std::string name;
  std::vector<int> cell_dims;   // along the diagonal, descending weight
  std::vector<int> ranks;       // consecutive differentials
  std::vector<int> cohomology;  // one value per position
  bool pass = false;
};

// Diagonal degree+weight = (2m-2)k: dims (2,6,6,2), ranks (2,4,2), exact.
ExactnessVerdict lemma_4_1_check(CohomologyEngine& engine, int k);
// Diagonal (2m-2)k + 2: dims (1,3,3,1), ranks (1,2,1), exact.
ExactnessVerdict lemma_4_2_check(CohomologyEngine& engine, int k);
// Weight-1 cell of degree (2m-2)k - 3 surjects onto the weight-0 cell of
// degree (2m-2)k - 2 (dims 8 and 3, rank 3).
ExactnessVerdict lemma_4_3_check(CohomologyEngine& engine, int k);

struct CocycleCertificate {
  std::string name;
  int k = 0;
  int degree = 0;
  int weight = 0;
  LinearCombination cls;
  std::string rendered;
  bool is_cocycle = false;
  bool is_coboundary = false;

  bool establishes_nonvanishing() const { return is_cocycle && !is_coboundary; }
};

// The weight-1 cocycle sum_j (2m-3j) v_{2j} w_{4m-2j-1} in the k = 3
// reduced complex.
CocycleCertificate build_alpha(CohomologyEngine& engine);
// Negative control: the j = 1 coefficient bumped by one breaks closedness.
CocycleCertificate build_alpha_perturbed(CohomologyEngine& engine);

// v_a^{k-3} alpha: closed, and certified not a coboundary by exact
// column-space membership against the adjacent weight-2 cell.
CocycleCertificate beta_class_nonzero(CohomologyEngine& engine, int slope_a, int k);

std::vector<int> nonvanishing_slopes(int m);  // {2, 4, ..., 2*ceil(m/2) - 2}
std::vector<int> conjecture_slopes(int m);    // {2*ceil(m/2), ..., 2m - 4}

// dim H^{a(k-3) + 4m - 1} over the conjectured slopes; data only.
ScanTable conjecture_scan(CohomologyEngine& engine, int k_lo, int k_hi);

// Fixed k, descending offsets: reports the largest offset with a nonzero
// dimension (when any).
ScanTable smallest_nonvanishing_offset_scan(CohomologyEngine& engine, int k, int i_lo,
                                            int i_hi);

struct Anomaly {
  std::string id;
  std::string observation;
  bool resolved_as_expected = false;
};

// Re-derives, by enumeration, the two closed-form statements whose printed
// variants disagree: the even-k boundary maximum degree and the zero
// right-edge differential cases.
std::vector<Anomaly> recheck_textual_anomalies(CohomologyEngine& engine, int k);

// JSON-lines run report plus a human-readable summary. Check entries carry
// parameters, verdicts, payload data and wall-clock; data-only entries
// carry "data" verdicts that never fail the run.
class RunReport {
 public:
  void add_check(const std::string& name, const std::string& params, bool pass,
                 const std::string& data_json, double ms);
  void add_data(const std::string& name, const std::string& params,
                const std::string& data_json, double ms);
  bool all_passed() const { return failures_ == 0; }
  int failures() const { return failures_; }
  // `include_timing` off gives byte-stable output for determinism checks.
  std::string to_jsonl(bool include_timing = true) const;
  std::string summary() const;

 private:
  struct Entry {
    std::string name;
    std::string params;
    std::string verdict;  // "pass" | "fail" | "data"
    std::string data;
    double ms = 0;
  };
  std::vector<Entry> entries_;
  int failures_ = 0;
};

}  // namespace confcoh
