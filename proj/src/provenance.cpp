#include "codeprov/provenance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "codeprov/license_id.hpp"
#include "codeprov/normalize.hpp"
#include "codeprov/textutil.hpp"

namespace codeprov {

std::string to_string(Resolution r) {
  return r == Resolution::kAuto ? "AUTO" : "UNRESOLVED";
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::kReuseFromQa: return "REUSE_FROM_QA";
    case Direction::kReuseToQa: return "REUSE_TO_QA";
    case Direction::kAmbiguous: return "AMBIGUOUS";
  }
  return "AMBIGUOUS";
}

ProvenanceRecord date_snippet(const CodeSnippet& snippet, const AddedLineIndex& index,
                              double match_fraction) {
  if (snippet.is_qa()) {
    throw std::invalid_argument("date_snippet: snippet must have an app-file origin");
  }
  ProvenanceRecord record;
  record.snippet_id = snippet.snippet_id;

  auto it = index.paths.find(snippet.app().path);
  if (it == index.paths.end()) {
    record.diagnostic = "path not present in history index: " + snippet.app().path;
    return record;
  }
  const PathHistory& history = it->second;
  record.rename_followed = history.rename_followed;

  std::set<std::string> wanted;
  for (std::string& line : normalize(snippet.raw_text, NormLevel::kType1)) {
    wanted.insert(std::move(line));
  }
  if (wanted.empty()) {
    record.diagnostic = "snippet normalizes to nothing";
    return record;
  }
  const int64_t need = static_cast<int64_t>(wanted.size());
  const int64_t ppm = static_cast<int64_t>(std::llround(match_fraction * 1e6));

  std::unordered_set<std::string> matched;
  for (const CommitAddedLines& commit : history.commits) {
    bool contributes = false;
    for (const std::string& line : commit.added_lines) {
      if (wanted.count(line)) {
        contributes = true;
        matched.insert(line);
      }
    }
    if (!contributes) continue;
    double fraction = static_cast<double>(matched.size()) / static_cast<double>(need);
    if (record.candidates.size() < 8) {
      record.candidates.push_back({commit.commit_id, commit.commit_date, commit.author, fraction});
    }
    if (static_cast<int64_t>(matched.size()) * 1000000 >= ppm * need) {
      record.matched_commit = commit.commit_id;
      record.created_at = commit.commit_date;
      record.resolution = Resolution::kAuto;
      record.matched_fraction = fraction;
      record.matched_author = commit.author;
      return record;
    }
  }
  record.diagnostic = "no commit reaches the match fraction";
  return record;
}

Direction classify_direction(Timestamp app_created_at, Timestamp post_created_at,
                             int ambiguity_window_days) {
  const int64_t window_ms = static_cast<int64_t>(ambiguity_window_days) * 86400000;
  const int64_t diff = app_created_at.millis - post_created_at.millis;
  if (diff > window_ms) return Direction::kReuseFromQa;
  if (-diff > window_ms) return Direction::kReuseToQa;
  return Direction::kAmbiguous;
}

std::optional<double> compute_overlap(LineRange clone_range,
                                      const std::vector<LineRange>& inconsistency_ranges) {
  auto check = [](LineRange r) {
    if (r.first < 1 || r.first > r.last) {
      throw std::invalid_argument("compute_overlap: invalid line range");
    }
  };
  check(clone_range);
  std::vector<LineRange> ranges = inconsistency_ranges;
  for (LineRange r : ranges) check(r);
  if (ranges.empty()) return std::nullopt;

  std::sort(ranges.begin(), ranges.end());
  std::vector<LineRange> merged;
  for (LineRange r : ranges) {
    if (!merged.empty() && r.first <= merged.back().last + 1) {
      merged.back().last = std::max(merged.back().last, r.last);
    } else {
      merged.push_back(r);
    }
  }
  int64_t total = 0;
  int64_t common = 0;
  for (LineRange r : merged) {
    total += r.last - r.first + 1;
    int lo = std::max(r.first, clone_range.first);
    int hi = std::min(r.last, clone_range.last);
    if (lo <= hi) common += hi - lo + 1;
  }
  return 100.0 * static_cast<double>(common) / static_cast<double>(total);
}

std::vector<MigrationChain> detect_migrations(
    const std::vector<CloneClass>& classes, const std::map<std::string, SnippetWhen>& snippets,
    const std::map<std::string, std::string>& licenses) {
  auto license_of = [&](const std::string& id) -> std::string {
    auto it = licenses.find(id);
    return it == licenses.end() ? kUnknownLicense : it->second;
  };

  std::vector<MigrationChain> chains;
  for (const CloneClass& cls : classes) {
    struct Dated {
      Timestamp date;
      std::string id;
    };
    std::map<std::string, std::vector<Dated>> app_members;  // app_id -> dated members
    std::vector<Dated> posts;
    for (const std::string& member : cls.members) {
      auto it = snippets.find(member);
      if (it == snippets.end() || !it->second.date) continue;
      if (it->second.is_post) {
        posts.push_back({*it->second.date, member});
      } else {
        app_members[it->second.app_id].push_back({*it->second.date, member});
      }
    }
    if (posts.empty() || app_members.size() < 2) continue;
    auto by_date = [](const Dated& a, const Dated& b) {
      return a.date != b.date ? a.date < b.date : a.id < b.id;
    };
    std::sort(posts.begin(), posts.end(), by_date);
    for (auto& [app, members] : app_members) std::sort(members.begin(), members.end(), by_date);

    for (const auto& [source_app, source_members] : app_members) {
      const Dated& source = source_members.front();  // earliest snippet of the source app
      // earliest post strictly after the source
      const Dated* via = nullptr;
      for (const Dated& p : posts) {
        if (source.date < p.date) {
          via = &p;
          break;
        }
      }
      if (!via) continue;
      for (const auto& [dest_app, dest_members] : app_members) {
        if (dest_app == source_app) continue;
        const Dated* dest = nullptr;
        for (const Dated& d : dest_members) {
          if (via->date < d.date) {
            dest = &d;
            break;
          }
        }
        if (!dest) continue;
        if (!(source.date < via->date && via->date < dest->date)) {
          throw std::logic_error("detect_migrations: emitted chain dates not strictly increasing");
        }
        MigrationChain chain;
        chain.class_id = cls.class_id;
        chain.source_snippet = source.id;
        chain.source_app = source_app;
        chain.source_date = source.date;
        chain.via_snippet = via->id;
        chain.via_date = via->date;
        chain.destination_snippet = dest->id;
        chain.destination_app = dest_app;
        chain.destination_date = dest->date;
        chain.duration_days = days_between(source.date, dest->date);
        chain.source_license = license_of(source.id);
        chain.destination_license = license_of(dest->id);
        chain.consistent = same_license(chain.source_license, chain.destination_license);
        chains.push_back(std::move(chain));
      }
    }
  }
  std::sort(chains.begin(), chains.end(), [](const MigrationChain& a, const MigrationChain& b) {
    if (a.class_id != b.class_id) return a.class_id < b.class_id;
    if (a.source_app != b.source_app) return a.source_app < b.source_app;
    return a.destination_app < b.destination_app;
  });
  return chains;
}

namespace {

int lcs_over_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
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
  return lcs_length(ia, ib);
}

}  // namespace

double containment_similarity(const std::vector<std::string>& snippet_lines,
                              const std::vector<std::string>& file_lines) {
  if (snippet_lines.empty() || file_lines.empty()) {
    throw std::invalid_argument("containment_similarity: sequences must be non-empty");
  }
  return static_cast<double>(lcs_over_lines(snippet_lines, file_lines)) /
         static_cast<double>(snippet_lines.size());
}

LifespanRecord track_lifespan(const std::string& class_id, const std::string& app_id,
                              const std::vector<std::string>& representative_lines,
                              const std::vector<ReleaseFiles>& releases,
                              const CloneConfig& config) {
  LifespanRecord record;
  record.class_id = class_id;
  record.app_id = app_id;
  if (representative_lines.empty()) {
    record.needs_review = true;
    return record;
  }
  const int64_t ppm = config.threshold_ppm();
  const int64_t need = static_cast<int64_t>(representative_lines.size());

  std::vector<bool> hits(releases.size(), false);
  for (size_t i = 0; i < releases.size(); ++i) {
    for (const auto& file : releases[i].files) {
      if (file.empty()) continue;
      int64_t lcs = lcs_over_lines(representative_lines, file);
      if (lcs * 1000000 >= ppm * need) {
        hits[i] = true;
        break;
      }
    }
  }

  int first = -1, last = -1, count = 0;
  for (size_t i = 0; i < hits.size(); ++i) {
    if (hits[i]) {
      if (first < 0) first = static_cast<int>(i);
      last = static_cast<int>(i);
      ++count;
    }
  }
  if (first < 0) {
    record.needs_review = true;
    return record;
  }
  record.first_release = releases[first].release_id;
  record.last_release = releases[last].release_id;
  record.release_count = count;
  record.days = days_between(releases[first].release_date, releases[last].release_date);
  record.still_present = hits.back();
  return record;
}

LifespanRecord track_lifespan(const CloneClass& clone_class, const CodeSnippet& representative,
                              const std::vector<AppRelease>& releases, const CloneConfig& config) {
  std::vector<ReleaseFiles> prepared;
  prepared.reserve(releases.size());
  for (const AppRelease& release : releases) {
    ReleaseFiles rf;
    rf.release_id = release.release_id;
    rf.release_date = release.release_date;
    for (const FileRecord& file : release.files) {
      rf.files.push_back(normalize(file.text, config.normalization_level));
    }
    prepared.push_back(std::move(rf));
  }
  std::string app_id = releases.empty() ? "" : releases.front().app_id;
  return track_lifespan(clone_class.class_id, app_id,
                        normalize(representative.raw_text, config.normalization_level), prepared,
                        config);
}

void sort_releases(std::vector<AppRelease>& releases) {
  std::sort(releases.begin(), releases.end(), [](const AppRelease& a, const AppRelease& b) {
    if (a.release_date != b.release_date) return a.release_date < b.release_date;
    return a.release_id < b.release_id;
  });
}

bool has_attribution_link(std::string_view file_text, std::string_view domain) {
  std::string needle = to_lower_ascii(domain);
  for (const CommentSpan& comment : collect_comments(file_text)) {
    if (to_lower_ascii(comment.text).find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace codeprov
