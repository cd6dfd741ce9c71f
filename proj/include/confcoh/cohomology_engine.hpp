#pragma once

#include "confcoh/ce_complex.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace confcoh {

enum class Mode { full, reduced };
const char* mode_name(Mode mode);

// Per-(degree, weight) slice of a Betti computation.
struct CellStats {
  int degree = 0;
  int weight = 0;
  int cell_dim = 0;
  int rank_out = 0;  // rank of the differential leaving the cell
  int rank_in = 0;   // rank of the differential entering it
  int h_dim = 0;     // cell_dim - rank_out - rank_in
};

struct BettiReport {
  std::string ring_name;
  uint64_t ring_hash = 0;
  int k = 0;
  Mode mode = Mode::full;
  int degree_lo = 0;
  int degree_hi = 0;
  std::vector<CellStats> breakdown;  // populated cells only, sorted (degree, weight)
  std::vector<int> totals;           // totals[d - degree_lo] = dim H^d

  int dim(int degree) const;
  std::string to_csv() const;
  std::string to_json() const;
};

struct EngineOptions {
  int jobs = 0;  // 0 = hardware concurrency
  bool use_modular = false;
  bool disk_cache = true;
  std::string cache_dir;  // empty = CONFCOH_CACHE_DIR or the user cache dir
};

std::filesystem::path default_cache_dir();

struct CacheStats {
  size_t entries = 0;
  std::filesystem::path file;
};

// Persistent map (ring, k, degree, weight, mode) -> (cell dim, rank of the
// outgoing differential). Entries are verified against the freshly
// enumerated cell dimension before use; mismatches are recomputed.
class RankCache {
 public:
  RankCache(uint64_t ring_hash, bool persist, std::filesystem::path dir);

  std::optional<std::pair<int, int>> lookup(int k, int degree, int weight, bool reduced);
  void store(int k, int degree, int weight, bool reduced, int n_cols, int rank);
  CacheStats stats() const;
  void clear();

 private:
  void load_file();

  uint64_t ring_hash_;
  bool persist_;
  std::filesystem::path file_;
  std::map<std::tuple<int, int, int, bool>, std::pair<int, int>> entries_;
  mutable std::mutex mutex_;
};

class CohomologyEngine {
 public:
  explicit CohomologyEngine(RingSpec ring, EngineOptions options = {});

  const RingSpec& ring() const { return ring_; }
  const GeneratorSet& generators() const { return gens_; }
  uint64_t ring_hash() const { return ring_hash_; }
  int jobs() const { return jobs_; }
  std::optional<int> cpm_m() const { return cpm_m_; }

  std::shared_ptr<const Cell> cell(int k, int degree, int weight, Mode mode);

  // Rank of the differential leaving cell (k, degree, weight); cached.
  int rank_out(int k, int degree, int weight, Mode mode);

  // Sum over weights of (cell dim - rank out - rank in); each summand is
  // checked nonnegative.
  int cohomology_dim(int k, int degree, Mode mode);

  BettiReport betti_table(int k, int degree_lo, int degree_hi, Mode mode);
  BettiReport betti_table(int k, Mode mode);  // over the full support window

  // Union over weights of the feasible degree interval.
  std::pair<int, int> degree_window(int k, Mode mode) const;

  struct EqualityVerdict {
    bool equal = false;
    int degree_lo = 0;
    int degree_hi = 0;
    std::optional<int> first_mismatch;
  };
  // Corollary-level check: full and reduced tables agree (CP^m rings only).
  EqualityVerdict full_vs_reduced_equal(int k);

  struct EulerVerdict {
    bool holds = false;
    int diagonal = 0;
    long long cell_alternating_sum = 0;
    long long cohomology_alternating_sum = 0;
  };
  // Alternating sums along the diagonal degree + weight = constant.
  EulerVerdict euler_check(int k, int diagonal, Mode mode);

  CacheStats cache_stats() const;
  void clear_cache();

 private:
  void precompute_ranks(int k, Mode mode, const std::vector<std::pair<int, int>>& cells);

  RingSpec ring_;
  GeneratorSet gens_;
  uint64_t ring_hash_ = 0;
  std::optional<int> cpm_m_;
  int jobs_ = 1;
  RankOptions rank_options_;
  std::unique_ptr<RankCache> cache_;
  std::map<std::tuple<int, int, int, bool>, std::shared_ptr<const Cell>> cell_cache_;
  std::mutex cells_mutex_;
};

}  // namespace confcoh
