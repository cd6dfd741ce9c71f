#include "confcoh/cohomology_engine.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace confcoh {

using nlohmann::ordered_json;

const char* mode_name(Mode mode) { return mode == Mode::full ? "full" : "reduced"; }

int BettiReport::dim(int degree) const {
  if (degree < degree_lo || degree > degree_hi) return 0;
  return totals[degree - degree_lo];
}

std::string BettiReport::to_csv() const {
  std::ostringstream os;
  os << "degree,omega,cell_dim,rank_out,rank_in,h_dim\n";
  for (const CellStats& c : breakdown)
    os << c.degree << ',' << c.weight << ',' << c.cell_dim << ',' << c.rank_out << ','
       << c.rank_in << ',' << c.h_dim << '\n';
  os << "\ndegree,h_dim\n";
  for (int d = degree_lo; d <= degree_hi; ++d) os << d << ',' << dim(d) << '\n';
  return os.str();
}

std::string BettiReport::to_json() const {
  ordered_json doc;
  doc["ring"] = ring_name;
  doc["ring_hash"] = ring_hash;
  doc["k"] = k;
  doc["mode"] = mode_name(mode);
  doc["degree_lo"] = degree_lo;
  doc["degree_hi"] = degree_hi;
  doc["cells"] = ordered_json::array();
  for (const CellStats& c : breakdown)
    doc["cells"].push_back({{"degree", c.degree},
                            {"omega", c.weight},
                            {"cell_dim", c.cell_dim},
                            {"rank_out", c.rank_out},
                            {"rank_in", c.rank_in},
                            {"h_dim", c.h_dim}});
  doc["totals"] = ordered_json::array();
  for (int d = degree_lo; d <= degree_hi; ++d)
    doc["totals"].push_back({{"degree", d}, {"h_dim", dim(d)}});
  return doc.dump(2) + "\n";
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("CONFCOH_CACHE_DIR"); env && *env)
    return std::filesystem::path(env);
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "confcoh";
  return std::filesystem::path(".confcoh-cache");
}

namespace {

constexpr const char* kCacheHeader = "confcoh-rank-cache v1";

uint64_t key_hash(uint64_t ring_hash, int k, int degree, int weight, bool reduced) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix(ring_hash);
  mix((uint64_t)(int64_t)k);
  mix((uint64_t)(int64_t)degree);
  mix((uint64_t)(int64_t)weight);
  mix(reduced ? 1 : 0);
  return h;
}

}  // namespace

RankCache::RankCache(uint64_t ring_hash, bool persist, std::filesystem::path dir)
    : ring_hash_(ring_hash), persist_(persist) {
  if (!persist_) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    persist_ = false;
    return;
  }
  std::ostringstream name;
  name << "ring_" << std::hex << ring_hash_ << ".cache";
  file_ = dir / name.str();
  load_file();
}

void RankCache::load_file() {
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  if (!std::getline(in, line) || line != std::string("# ") + kCacheHeader) return;
  while (std::getline(in, line)) {
    // keyhash,k,i,omega,reduced,ncols,rank
    std::istringstream ls(line);
    std::string field;
    uint64_t kh = 0;
    long vals[6];
    bool ok = true;
    if (!std::getline(ls, field, ',')) continue;
    try {
      kh = std::stoull(field, nullptr, 16);
      for (int f = 0; f < 6 && ok; ++f) {
        if (!std::getline(ls, field, ',')) {
          ok = false;
          break;
        }
        vals[f] = std::stol(field);
      }
    } catch (...) {
      ok = false;
    }
    if (!ok) continue;  // corrupt line: ignored, recomputed on demand
    int k = (int)vals[0], degree = (int)vals[1], weight = (int)vals[2];
    bool reduced = vals[3] != 0;
    int n_cols = (int)vals[4], rank = (int)vals[5];
    if (kh != key_hash(ring_hash_, k, degree, weight, reduced)) continue;
    entries_[{k, degree, weight, reduced}] = {n_cols, rank};
  }
}

std::optional<std::pair<int, int>> RankCache::lookup(int k, int degree, int weight,
                                                     bool reduced) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = entries_.find({k, degree, weight, reduced});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void RankCache::store(int k, int degree, int weight, bool reduced, int n_cols, int rank) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::tuple(k, degree, weight, reduced);
  if (entries_.count(key)) return;
  entries_[key] = {n_cols, rank};
  if (!persist_) return;
  bool fresh = !std::filesystem::exists(file_);
  std::ofstream out(file_, std::ios::app);
  if (!out) return;
  if (fresh) out << "# " << kCacheHeader << '\n';
  out << std::hex << key_hash(ring_hash_, k, degree, weight, reduced) << std::dec << ','
      << k << ',' << degree << ',' << weight << ',' << (reduced ? 1 : 0) << ',' << n_cols
      << ',' << rank << '\n';
}

CacheStats RankCache::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return {entries_.size(), file_};
}

void RankCache::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  entries_.clear();
  if (persist_ && !file_.empty()) {
    std::error_code ec;
    std::filesystem::remove(file_, ec);
  }
}

CohomologyEngine::CohomologyEngine(RingSpec ring, EngineOptions options)
    : ring_(std::move(ring)) {
  gens_ = build_generators(ring_);
  ring_hash_ = ring_content_hash(ring_);
  cpm_m_ = cpm_complex_dimension(ring_);
  jobs_ = options.jobs > 0 ? options.jobs
                           : std::max(1u, std::thread::hardware_concurrency());
  rank_options_.use_modular = options.use_modular;
  std::filesystem::path dir =
      options.cache_dir.empty() ? default_cache_dir() : options.cache_dir;
  cache_ = std::make_unique<RankCache>(ring_hash_, options.disk_cache, dir);
}

std::shared_ptr<const Cell> CohomologyEngine::cell(int k, int degree, int weight,
                                                   Mode mode) {
  const bool reduced = mode == Mode::reduced;
  auto key = std::tuple(k, degree, weight, reduced);
  {
    std::lock_guard<std::mutex> lock(cells_mutex_);
    auto it = cell_cache_.find(key);
    if (it != cell_cache_.end()) return it->second;
  }
  auto built =
      std::make_shared<const Cell>(enumerate_basis(gens_, k, degree, weight, reduced));
  std::lock_guard<std::mutex> lock(cells_mutex_);
  auto [it, inserted] = cell_cache_.emplace(key, std::move(built));
  return it->second;
}

int CohomologyEngine::rank_out(int k, int degree, int weight, Mode mode) {
  const bool reduced = mode == Mode::reduced;
  if (weight < 0 || 2 * weight > k) return 0;
  auto bounds = degree_bounds(gens_, k, weight, reduced);
  if (!bounds || degree < bounds->min_degree || degree > bounds->max_degree) return 0;

  auto source = cell(k, degree, weight, mode);
  if (source->dim() == 0) return 0;
  if (weight == 0) return 0;

  if (auto cached = cache_->lookup(k, degree, weight, reduced);
      cached && cached->first == source->dim())
    return cached->second;

  auto target = cell(k, degree + 1, weight - 1, mode);
  auto matrix = differential_matrix(gens_, *source, *target);
  int r = rank(matrix, rank_options_).rank;
  cache_->store(k, degree, weight, reduced, source->dim(), r);
  return r;
}

void CohomologyEngine::precompute_ranks(int k, Mode mode,
                                        const std::vector<std::pair<int, int>>& cells) {
  if (cells.empty()) return;
  const int workers = std::min<int>(jobs_, (int)cells.size());
  if (workers <= 1) {
    for (auto& [degree, weight] : cells) rank_out(k, degree, weight, mode);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        size_t at = next.fetch_add(1);
        if (at >= cells.size()) return;
        rank_out(k, cells[at].first, cells[at].second, mode);
      }
    });
  }
  for (auto& th : pool) th.join();
}

int CohomologyEngine::cohomology_dim(int k, int degree, Mode mode) {
  if (k < 1) throw std::invalid_argument("cohomology_dim: k >= 1 required");
  const bool reduced = mode == Mode::reduced;
  int total = 0;
  for (int weight = 0; 2 * weight <= k; ++weight) {
    auto bounds = degree_bounds(gens_, k, weight, reduced);
    if (!bounds || degree < bounds->min_degree || degree > bounds->max_degree) continue;
    auto c = cell(k, degree, weight, mode);
    if (c->dim() == 0) continue;
    int out = rank_out(k, degree, weight, mode);
    int in = rank_out(k, degree - 1, weight + 1, mode);
    int h = c->dim() - out - in;
    if (h < 0)
      throw std::logic_error("negative cohomology summand at degree " +
                             std::to_string(degree));
    total += h;
  }
  return total;
}

std::pair<int, int> CohomologyEngine::degree_window(int k, Mode mode) const {
  const bool reduced = mode == Mode::reduced;
  int lo = INT32_MAX, hi = INT32_MIN;
  for (int weight = 0; 2 * weight <= k; ++weight) {
    auto bounds = degree_bounds(gens_, k, weight, reduced);
    if (!bounds) continue;
    lo = std::min(lo, bounds->min_degree);
    hi = std::max(hi, bounds->max_degree);
  }
  if (lo > hi) return {0, -1};
  return {lo, hi};
}

BettiReport CohomologyEngine::betti_table(int k, int degree_lo, int degree_hi, Mode mode) {
  if (k < 1) throw std::invalid_argument("betti_table: k >= 1 required");
  if (degree_hi < degree_lo) throw std::invalid_argument("betti_table: empty range");
  const bool reduced = mode == Mode::reduced;

  BettiReport report;
  report.ring_name = ring_.name;
  report.ring_hash = ring_hash_;
  report.k = k;
  report.mode = mode;
  report.degree_lo = degree_lo;
  report.degree_hi = degree_hi;
  report.totals.assign(degree_hi - degree_lo + 1, 0);

  // ranks needed: every populated cell in [lo-1, hi] x weights
  std::vector<std::pair<int, int>> jobs;
  for (int weight = 0; 2 * weight <= k; ++weight) {
    auto bounds = degree_bounds(gens_, k, weight, reduced);
    if (!bounds) continue;
    for (int d = std::max(degree_lo - 1, bounds->min_degree);
         d <= std::min(degree_hi, bounds->max_degree); ++d)
      jobs.emplace_back(d, weight);
  }
  precompute_ranks(k, mode, jobs);

  for (int d = degree_lo; d <= degree_hi; ++d) {
    for (int weight = 0; 2 * weight <= k; ++weight) {
      auto bounds = degree_bounds(gens_, k, weight, reduced);
      if (!bounds || d < bounds->min_degree || d > bounds->max_degree) continue;
      auto c = cell(k, d, weight, mode);
      if (c->dim() == 0) continue;
      CellStats stats;
      stats.degree = d;
      stats.weight = weight;
      stats.cell_dim = c->dim();
      stats.rank_out = rank_out(k, d, weight, mode);
      stats.rank_in = rank_out(k, d - 1, weight + 1, mode);
      stats.h_dim = stats.cell_dim - stats.rank_out - stats.rank_in;
      if (stats.h_dim < 0)
        throw std::logic_error("negative cohomology summand at degree " +
                               std::to_string(d));
      report.breakdown.push_back(stats);
      report.totals[d - degree_lo] += stats.h_dim;
    }
  }
  return report;
}

BettiReport CohomologyEngine::betti_table(int k, Mode mode) {
  auto [lo, hi] = degree_window(k, mode);
  if (hi < lo) {
    BettiReport report;
    report.ring_name = ring_.name;
    report.ring_hash = ring_hash_;
    report.k = k;
    report.mode = mode;
    report.degree_lo = 0;
    report.degree_hi = -1;
    return report;
  }
  return betti_table(k, std::min(lo, 0), hi, mode);
}

CohomologyEngine::EqualityVerdict CohomologyEngine::full_vs_reduced_equal(int k) {
  if (!cpm_m_)
    throw std::invalid_argument(
        "full_vs_reduced_equal: the reduced/full comparison is stated for CP^m rings");
  auto [flo, fhi] = degree_window(k, Mode::full);
  EqualityVerdict verdict;
  verdict.degree_lo = std::min(flo, 0);
  verdict.degree_hi = fhi;
  BettiReport full = betti_table(k, verdict.degree_lo, verdict.degree_hi, Mode::full);
  BettiReport reduced = betti_table(k, verdict.degree_lo, verdict.degree_hi, Mode::reduced);
  verdict.equal = true;
  for (int d = verdict.degree_lo; d <= verdict.degree_hi; ++d) {
    if (full.dim(d) != reduced.dim(d)) {
      verdict.equal = false;
      verdict.first_mismatch = d;
      break;
    }
  }
  return verdict;
}

CohomologyEngine::EulerVerdict CohomologyEngine::euler_check(int k, int diagonal,
                                                             Mode mode) {
  EulerVerdict verdict;
  verdict.diagonal = diagonal;
  for (int weight = 0; 2 * weight <= k; ++weight) {
    int degree = diagonal - weight;
    const bool reduced = mode == Mode::reduced;
    auto bounds = degree_bounds(gens_, k, weight, reduced);
    if (!bounds || degree < bounds->min_degree || degree > bounds->max_degree) continue;
    auto c = cell(k, degree, weight, mode);
    if (c->dim() == 0) continue;
    int sign = weight % 2 == 0 ? 1 : -1;
    verdict.cell_alternating_sum += sign * c->dim();
    int h = c->dim() - rank_out(k, degree, weight, mode) -
            rank_out(k, degree - 1, weight + 1, mode);
    verdict.cohomology_alternating_sum += sign * h;
  }
  verdict.holds = verdict.cell_alternating_sum == verdict.cohomology_alternating_sum;
  return verdict;
}

CacheStats CohomologyEngine::cache_stats() const { return cache_->stats(); }

void CohomologyEngine::clear_cache() { cache_->clear(); }

}  // namespace confcoh
