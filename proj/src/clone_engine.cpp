#include "codeprov/clone_engine.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "codeprov/textutil.hpp"

namespace codeprov {

int64_t CloneConfig::threshold_ppm() const {
  return static_cast<int64_t>(std::llround(similarity_threshold * 1e6));
}

void CloneConfig::validate() const {
  if (min_lines < 1) throw std::invalid_argument("min_lines must be >= 1");
  if (!(similarity_threshold > 0.0) || similarity_threshold > 1.0) {
    throw std::invalid_argument("similarity_threshold must be in (0,1]");
  }
  if (shard_size_a < 1 || shard_size_b < 1) {
    throw std::invalid_argument("shard sizes must be >= 1");
  }
}

int lcs_length(std::span<const int32_t> a, std::span<const int32_t> b) {
  // strip common prefix and suffix; they are always part of an LCS
  size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  size_t suffix = 0;
  while (suffix + prefix < a.size() && suffix + prefix < b.size() &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
    ++suffix;
  }
  std::span<const int32_t> am = a.subspan(prefix, a.size() - prefix - suffix);
  std::span<const int32_t> bm = b.subspan(prefix, b.size() - prefix - suffix);
  if (am.empty() || bm.empty()) return static_cast<int>(prefix + suffix);
  if (bm.size() < am.size()) std::swap(am, bm);

  std::vector<uint32_t> row(am.size() + 1, 0);
  for (size_t i = 1; i <= bm.size(); ++i) {
    uint32_t diag = 0;  // row[j-1] from the previous iteration
    for (size_t j = 1; j <= am.size(); ++j) {
      uint32_t up = row[j];
      row[j] = bm[i - 1] == am[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return static_cast<int>(prefix + suffix + row[am.size()]);
}

double similarity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("similarity: sequences must be non-empty");
  }
  std::unordered_map<std::string_view, int32_t> interner;
  auto intern = [&](const std::vector<std::string>& lines) {
    std::vector<int32_t> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
      auto [it, _] = interner.try_emplace(line, static_cast<int32_t>(interner.size()));
      out.push_back(it->second);
    }
    return out;
  };
  std::vector<int32_t> ia = intern(a);
  std::vector<int32_t> ib = intern(b);
  int lcs = lcs_length(ia, ib);
  return static_cast<double>(lcs) / static_cast<double>(std::max(a.size(), b.size()));
}

PreparedCorpora prepare_corpora(const std::vector<CodeSnippet>& corpus_a,
                                const std::vector<CodeSnippet>& corpus_b,
                                const CloneConfig& config) {
  config.validate();
  std::unordered_map<std::string, int32_t> interner;
  auto prepare = [&](const std::vector<CodeSnippet>& corpus) {
    std::vector<PreparedSnippet> out;
    for (const CodeSnippet& snippet : corpus) {
      std::vector<std::string> lines = normalize(snippet.raw_text, config.normalization_level);
      if (static_cast<int>(lines.size()) < config.min_lines) continue;
      PreparedSnippet prepared;
      prepared.id = snippet.snippet_id;
      prepared.created_at = snippet.created_at;
      prepared.lines.reserve(lines.size());
      for (auto& line : lines) {
        auto [it, _] = interner.try_emplace(std::move(line), static_cast<int32_t>(interner.size()));
        prepared.lines.push_back(it->second);
      }
      prepared.sorted_lines = prepared.lines;
      std::sort(prepared.sorted_lines.begin(), prepared.sorted_lines.end());
      out.push_back(std::move(prepared));
    }
    std::sort(out.begin(), out.end(),
              [](const PreparedSnippet& x, const PreparedSnippet& y) { return x.id < y.id; });
    return out;
  };
  PreparedCorpora corpora;
  corpora.a = prepare(corpus_a);
  corpora.b = prepare(corpus_b);
  return corpora;
}

namespace {

// Multiset intersection size of two sorted id sequences.
int bag_intersection(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  size_t i = 0, j = 0;
  int count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) ++i;
    else if (b[j] < a[i]) ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

void detect_range(const PreparedCorpora& corpora, const CloneConfig& config, size_t a_begin,
                  size_t a_end, size_t b_begin, size_t b_end, std::vector<ClonePair>& out) {
  const int64_t ppm = config.threshold_ppm();
  for (size_t i = a_begin; i < a_end; ++i) {
    const PreparedSnippet& a = corpora.a[i];
    for (size_t j = b_begin; j < b_end; ++j) {
      const PreparedSnippet& b = corpora.b[j];
      const int64_t max_len = static_cast<int64_t>(std::max(a.lines.size(), b.lines.size()));
      const int64_t min_len = static_cast<int64_t>(std::min(a.lines.size(), b.lines.size()));
      if (config.enable_pruning) {
        // LCS <= min length: the ratio bound
        if (min_len * 1000000 < ppm * max_len) continue;
        // LCS <= multiset intersection: the bag bound
        const int64_t common = bag_intersection(a.sorted_lines, b.sorted_lines);
        if (common * 1000000 < ppm * max_len) continue;
      }
      const int lcs = lcs_length(a.lines, b.lines);
      if (static_cast<int64_t>(lcs) * 1000000 >= ppm * max_len) {
        ClonePair pair;
        if (a.id < b.id) {
          pair.left = a.id;
          pair.right = b.id;
        } else {
          pair.left = b.id;
          pair.right = a.id;
        }
        pair.lcs_length = lcs;
        pair.max_length = static_cast<int>(max_len);
        out.push_back(std::move(pair));
      }
    }
  }
}

void sort_unique(std::vector<ClonePair>& pairs) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
}

}  // namespace

std::vector<ClonePair> detect_cross(const PreparedCorpora& corpora, const CloneConfig& config) {
  config.validate();
  std::vector<ClonePair> pairs;
  detect_range(corpora, config, 0, corpora.a.size(), 0, corpora.b.size(), pairs);
  sort_unique(pairs);
  return pairs;
}

std::vector<WorkUnit> plan_shards(size_t a_size, size_t b_size, const CloneConfig& config) {
  config.validate();
  const size_t sa = static_cast<size_t>(config.shard_size_a);
  const size_t sb = static_cast<size_t>(config.shard_size_b);
  const size_t shards_a = a_size == 0 ? 0 : (a_size + sa - 1) / sa;
  const size_t shards_b = b_size == 0 ? 0 : (b_size + sb - 1) / sb;
  std::vector<WorkUnit> plan;
  plan.reserve(shards_a * shards_b);
  int index = 0;
  for (size_t ia = 0; ia < shards_a; ++ia) {
    for (size_t ib = 0; ib < shards_b; ++ib) {
      WorkUnit unit;
      unit.index = index++;
      unit.a_begin = ia * sa;
      unit.a_end = std::min(a_size, unit.a_begin + sa);
      unit.b_begin = ib * sb;
      unit.b_end = std::min(b_size, unit.b_begin + sb);
      plan.push_back(unit);
    }
  }
  return plan;
}

std::vector<WorkUnit> plan_shards(const PreparedCorpora& corpora, const CloneConfig& config) {
  return plan_shards(corpora.a.size(), corpora.b.size(), config);
}

std::string format_pair_line(const ClonePair& pair) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", pair.similarity());
  return "{\"left\":\"" + json_escape(pair.left) + "\",\"right\":\"" + json_escape(pair.right) +
         "\",\"similarity\":" + buf + ",\"lcs\":" + std::to_string(pair.lcs_length) +
         ",\"max\":" + std::to_string(pair.max_length) + "}";
}

std::vector<ClonePair> parse_pair_lines(std::string_view text) {
  std::vector<ClonePair> pairs;
  for (std::string_view line : split_lines(text)) {
    if (trim(line).empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line);
    ClonePair pair;
    pair.left = row.at("left").get<std::string>();
    pair.right = row.at("right").get<std::string>();
    pair.lcs_length = row.at("lcs").get<int>();
    pair.max_length = row.at("max").get<int>();
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

ShardRunResult run_sharded(const PreparedCorpora& corpora, const std::vector<WorkUnit>& plan,
                           const CloneConfig& config, const ShardRunOptions& options) {
  config.validate();
  ShardRunResult result;
  result.units.resize(plan.size());
  std::vector<std::vector<ClonePair>> unit_pairs(plan.size());

  if (options.unit_dir) std::filesystem::create_directories(*options.unit_dir);
  auto unit_file = [&](int index) {
    char name[32];
    std::snprintf(name, sizeof(name), "unit-%06d.jsonl", index);
    return *options.unit_dir / name;
  };

  std::mutex mu;
  std::condition_variable cv;
  std::deque<size_t> queue;
  size_t in_flight = 0;
  for (size_t i = 0; i < plan.size(); ++i) {
    result.units[i].index = plan[i].index;
    queue.push_back(i);
  }

  auto worker = [&] {
    std::unique_lock<std::mutex> lock(mu);
    for (;;) {
      if (queue.empty()) {
        if (in_flight == 0) return;
        cv.wait(lock, [&] { return !queue.empty() || in_flight == 0; });
        if (queue.empty() && in_flight == 0) return;
        continue;
      }
      size_t slot = queue.front();
      queue.pop_front();
      ++in_flight;
      int attempt = ++result.units[slot].attempts;
      lock.unlock();

      const WorkUnit& unit = plan[slot];
      bool ok = false;
      std::vector<ClonePair> pairs;
      bool resumed = false;
      try {
        if (options.unit_hook) options.unit_hook(unit.index, attempt);
        if (options.unit_dir && std::filesystem::exists(unit_file(unit.index))) {
          pairs = parse_pair_lines(read_file(unit_file(unit.index)));
          resumed = true;
        } else {
          detect_range(corpora, config, unit.a_begin, unit.a_end, unit.b_begin, unit.b_end, pairs);
          sort_unique(pairs);
          if (options.unit_dir) {
            std::string content;
            for (const ClonePair& p : pairs) {
              content += format_pair_line(p);
              content += '\n';
            }
            auto tmp = unit_file(unit.index);
            tmp += ".tmp";
            write_file(tmp, content);
            std::filesystem::rename(tmp, unit_file(unit.index));
          }
        }
        ok = true;
      } catch (const std::exception&) {
        ok = false;
      }

      lock.lock();
      --in_flight;
      if (ok) {
        unit_pairs[slot] = std::move(pairs);
        result.units[slot].done = true;
        result.units[slot].resumed = resumed;
      } else if (attempt <= options.retry_limit) {
        queue.push_back(slot);
      }
      cv.notify_all();
    }
  };

  int width = std::max(1, options.workers);
  std::vector<std::thread> pool;
  pool.reserve(width);
  for (int w = 0; w < width; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (size_t i = 0; i < plan.size(); ++i) {
    if (!result.units[i].done) result.incomplete.push_back(plan[i].index);
  }
  std::sort(result.incomplete.begin(), result.incomplete.end());

  // deterministic fold over canonically sorted unit outputs
  for (auto& pairs : unit_pairs) {
    result.pairs.insert(result.pairs.end(), std::make_move_iterator(pairs.begin()),
                        std::make_move_iterator(pairs.end()));
  }
  sort_unique(result.pairs);
  return result;
}

std::vector<CloneClass> group_classes(const std::vector<ClonePair>& pairs,
                                      const std::map<std::string, Timestamp>& dates) {
  std::unordered_map<std::string, size_t> id_of;
  std::vector<std::string> names;
  auto intern = [&](const std::string& name) {
    auto [it, fresh] = id_of.try_emplace(name, names.size());
    if (fresh) names.push_back(name);
    return it->second;
  };
  std::vector<size_t> parent;
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (const ClonePair& pair : pairs) {
    size_t l = intern(pair.left);
    size_t r = intern(pair.right);
    while (parent.size() < names.size()) parent.push_back(parent.size());
    size_t rl = find(l), rr = find(r);
    if (rl != rr) parent[rl] = rr;
  }
  while (parent.size() < names.size()) parent.push_back(parent.size());

  std::map<size_t, std::vector<std::string>> components;
  for (size_t i = 0; i < names.size(); ++i) components[find(i)].push_back(names[i]);

  std::vector<CloneClass> classes;
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end());
    CloneClass cls;
    cls.members = std::move(members);
    // earliest created_at among dated members; canonical id order breaks ties
    std::optional<Timestamp> best_date;
    std::string best_id;
    for (const std::string& member : cls.members) {
      auto it = dates.find(member);
      if (it == dates.end()) continue;
      if (!best_date || it->second < *best_date) {
        best_date = it->second;
        best_id = member;
      }
    }
    cls.representative = best_date ? best_id : cls.members.front();
    classes.push_back(std::move(cls));
  }
  std::sort(classes.begin(), classes.end(), [](const CloneClass& a, const CloneClass& b) {
    return a.members.front() < b.members.front();
  });
  for (size_t i = 0; i < classes.size(); ++i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "cls-%06zu", i + 1);
    classes[i].class_id = buf;
  }
  return classes;
}

}  // namespace codeprov
