#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codeprov/clone_engine.hpp"
#include "codeprov/repo_ingest.hpp"
#include "codeprov/snippet.hpp"

namespace codeprov {

enum class Resolution { kAuto, kUnresolved };
enum class Direction { kReuseFromQa, kReuseToQa, kAmbiguous };

std::string to_string(Resolution r);
std::string to_string(Direction d);

struct ProvenanceRecord {
  std::string snippet_id;
  std::optional<std::string> matched_commit;
  std::optional<Timestamp> created_at;
  Resolution resolution = Resolution::kUnresolved;
  std::optional<Direction> direction;   // set once a paired post date is known
  std::optional<double> overlap_rate;   // percent in [0,100]; absent when no ranges apply
  double matched_fraction = 0.0;
  std::string matched_author;  // commit author, for name comparison by reviewers
  std::string diagnostic;
  bool rename_followed = false;

  struct Candidate {
    std::string commit_id;
    Timestamp date;
    std::string author;
    double cumulative_fraction = 0.0;
  };
  std::vector<Candidate> candidates;  // contributing commits, for manual review
};

/// Dates an app-side snippet from the added-line history of its file.
/// Commits are scanned in date order; the earliest commit at which at
/// least match_fraction of the snippet's distinct normalized lines have
/// appeared as added lines (and that itself added one of them) wins.
/// No such commit leaves the record UNRESOLVED for manual review.
ProvenanceRecord date_snippet(const CodeSnippet& snippet, const AddedLineIndex& index,
                              double match_fraction = 0.9);

/// Which way the code moved, judged from creation timestamps. Gaps
/// within the ambiguity window refuse classification.
Direction classify_direction(Timestamp app_created_at, Timestamp post_created_at,
                             int ambiguity_window_days = 2);

/// 100 * |clone ∩ union(ranges)| / |union(ranges)|, or nullopt when the
/// union is empty. Ranges are 1-based inclusive.
std::optional<double> compute_overlap(LineRange clone_range,
                                      const std::vector<LineRange>& inconsistency_ranges);

/// Snippet facts the migration scan needs.
struct SnippetWhen {
  std::optional<Timestamp> date;
  bool is_post = false;
  std::string app_id;  // empty for posts
};

struct MigrationChain {
  std::string class_id;
  std::string source_snippet;
  std::string source_app;
  Timestamp source_date;
  std::string via_snippet;
  Timestamp via_date;
  std::string destination_snippet;
  std::string destination_app;
  Timestamp destination_date;
  int64_t duration_days = 0;
  std::string source_license;
  std::string destination_license;
  bool consistent = false;
};

/// One chain per (source app, destination app) pair whose members allow
/// app -> post -> other app with strictly increasing dates, choosing the
/// earliest qualifying snippet on each leg.
std::vector<MigrationChain> detect_migrations(
    const std::vector<CloneClass>& classes, const std::map<std::string, SnippetWhen>& snippets,
    const std::map<std::string, std::string>& licenses);

struct LifespanRecord {
  std::string class_id;
  std::string app_id;
  std::optional<std::string> first_release;
  std::optional<std::string> last_release;
  int release_count = 0;  // releases between first and last with a hit
  int64_t days = 0;
  bool still_present = false;
  bool needs_review = false;  // no release contained the snippet
};

/// One release with its files already normalized for comparison.
struct ReleaseFiles {
  std::string release_id;
  Timestamp release_date;
  std::vector<std::vector<std::string>> files;
};

/// Containment similarity |LCS| / |snippet| of a snippet inside a file.
double containment_similarity(const std::vector<std::string>& snippet_lines,
                              const std::vector<std::string>& file_lines);

/// Scans every file of every release for the representative snippet, so
/// presence survives a move to a different file.
LifespanRecord track_lifespan(const std::string& class_id, const std::string& app_id,
                              const std::vector<std::string>& representative_lines,
                              const std::vector<ReleaseFiles>& releases,
                              const CloneConfig& config);

LifespanRecord track_lifespan(const CloneClass& clone_class, const CodeSnippet& representative,
                              const std::vector<AppRelease>& releases, const CloneConfig& config);

/// Total order on releases: by date, ties by release id.
void sort_releases(std::vector<AppRelease>& releases);

/// True when any comment in the file mentions the Q&A site's domain.
bool has_attribution_link(std::string_view file_text, std::string_view domain);

}  // namespace codeprov
