#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "codeprov/normalize.hpp"
#include "codeprov/snippet.hpp"
#include "codeprov/timeutil.hpp"

namespace codeprov {

struct CloneConfig {
  int min_lines = 10;
  double similarity_threshold = 0.70;
  NormLevel normalization_level = NormLevel::kType2;
  int shard_size_a = 2000;  // Q&A-side slice size
  int shard_size_b = 500;   // app-side slice size
  bool enable_pruning = true;

  /// Threshold in parts per million; comparisons are integer-exact.
  int64_t threshold_ppm() const;
  void validate() const;
};

/// An unordered cross-corpus clone relation. left/right are stored in
/// canonical (lexicographic) id order; the similarity is kept as the
/// exact pair (lcs_length, max_length).
struct ClonePair {
  std::string left;
  std::string right;
  int lcs_length = 0;
  int max_length = 0;

  double similarity() const { return static_cast<double>(lcs_length) / max_length; }
  auto operator<=>(const ClonePair&) const = default;
};

struct CloneClass {
  std::string class_id;
  std::vector<std::string> members;  // sorted, size >= 2
  std::string representative;       // earliest created_at among dated members
};

/// Longest common subsequence length over whole lines.
int lcs_length(std::span<const int32_t> a, std::span<const int32_t> b);

/// |LCS(a,b)| / max(|a|,|b|) over whole normalized lines. Symmetric,
/// 1.0 iff the sequences are equal. Throws std::invalid_argument when
/// either sequence is empty.
double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// A snippet admitted to detection: normalized, interned, at least
/// min_lines long.
struct PreparedSnippet {
  std::string id;
  std::optional<Timestamp> created_at;
  std::vector<int32_t> lines;
  std::vector<int32_t> sorted_lines;
};

struct PreparedCorpora {
  std::vector<PreparedSnippet> a;
  std::vector<PreparedSnippet> b;
};

/// Normalizes both corpora at the configured level, drops snippets whose
/// normalized form is shorter than min_lines, and interns lines into a
/// shared id space. Output is sorted by snippet id.
PreparedCorpora prepare_corpora(const std::vector<CodeSnippet>& corpus_a,
                                const std::vector<CodeSnippet>& corpus_b,
                                const CloneConfig& config);

/// All cross pairs (a in A, b in B) with similarity >= threshold
/// (inclusive), canonically sorted. Pruning, when enabled, is lossless:
/// it only skips pairs whose similarity provably cannot reach the
/// threshold (length ratio and bag-of-lines upper bounds).
std::vector<ClonePair> detect_cross(const PreparedCorpora& corpora, const CloneConfig& config);

struct WorkUnit {
  int index = 0;
  size_t a_begin = 0, a_end = 0;
  size_t b_begin = 0, b_end = 0;
};

/// Slices both corpora and crosses the slices; every cross pair is
/// covered by exactly one unit.
std::vector<WorkUnit> plan_shards(size_t a_size, size_t b_size, const CloneConfig& config);
std::vector<WorkUnit> plan_shards(const PreparedCorpora& corpora, const CloneConfig& config);

struct UnitStatus {
  int index = 0;
  int attempts = 0;
  bool done = false;
  bool resumed = false;  // loaded from an existing unit result file
};

struct ShardRunOptions {
  int workers = 1;
  int retry_limit = 2;  // re-queues allowed per unit
  std::optional<std::filesystem::path> unit_dir;  // per-unit result files, also used to resume
  std::function<void(int unit_index, int attempt)> unit_hook;  // test instrumentation
};

struct ShardRunResult {
  std::vector<ClonePair> pairs;  // merged, canonically sorted, unique
  std::vector<UnitStatus> units;
  std::vector<int> incomplete;  // units that exhausted their retries
  bool complete() const { return incomplete.empty(); }
};

/// Executes the plan on a worker pool. Failed units are re-queued up to
/// retry_limit; unit results are written to unit_dir when set and are
/// reused on a later run instead of being recomputed.
ShardRunResult run_sharded(const PreparedCorpora& corpora, const std::vector<WorkUnit>& plan,
                           const CloneConfig& config, const ShardRunOptions& options);

/// Connected components of the pair graph. The representative is the
/// member with the earliest created_at among dated members, ties and
/// fully undated classes resolved by canonical id order.
std::vector<CloneClass> group_classes(const std::vector<ClonePair>& pairs,
                                      const std::map<std::string, Timestamp>& dates);

/// One unit-result line: {"left":...,"right":...,"similarity":0.nnnnnn}
std::string format_pair_line(const ClonePair& pair);
std::vector<ClonePair> parse_pair_lines(std::string_view text);

}  // namespace codeprov
