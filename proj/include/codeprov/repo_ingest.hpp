#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "codeprov/timeutil.hpp"

namespace codeprov {

/// 1-based inclusive line range.
struct LineRange {
  int first = 0;
  int last = 0;
  auto operator<=>(const LineRange&) const = default;
};

struct FileRecord {
  std::string app_id;
  std::string path;  // relative to the release root
  std::string text;
  LineRange header_region;
  int line_count = 0;
};

struct AppRelease {
  std::string app_id;
  std::string release_id;
  Timestamp release_date;
  std::vector<FileRecord> files;  // sorted by path
};

struct ScanStats {
  int files_included = 0;
  int files_skipped_extension = 0;
  int files_unreadable = 0;
  int decode_warnings = 0;
};

/// Reads the source files of one release tree. Files are selected by
/// extension, decoded as UTF-8 with lossy replacement, and sorted by path.
AppRelease scan_release(const std::filesystem::path& root, const std::string& app_id,
                        const std::string& release_id, Timestamp release_date,
                        const std::set<std::string>& extensions, int header_lines = 60,
                        ScanStats* stats = nullptr);

/// Lines added by one commit to one path, normalized the same way the
/// clone engine normalizes snippet text (Type-1).
struct CommitAddedLines {
  std::string commit_id;
  Timestamp commit_date;
  std::string author;  // surfaced so reviewers can match names by hand
  std::vector<std::string> added_lines;  // multiset, insertion order
};

struct PathHistory {
  std::vector<CommitAddedLines> commits;  // ascending commit_date
  bool rename_followed = false;
};

struct AddedLineIndex {
  std::string repo_head;  // commit hash the index was built from
  std::map<std::string, PathHistory> paths;
};

/// Walks the default branch first-parent history of a Git repository and
/// records, per path, the normalized lines each commit added (per the
/// repository's own diff). Renames recorded by the history are followed:
/// the old path's entries migrate to the new path and the history is
/// flagged. `paths` optionally restricts the walk; rename following only
/// sees what the filtered log contains.
AddedLineIndex index_history(const std::filesystem::path& repo,
                             const std::vector<std::string>& paths = {},
                             std::vector<std::string>* warnings = nullptr);

void save_index_cache(const std::filesystem::path& cache_dir, const std::string& app_id,
                      const AddedLineIndex& index);
std::optional<AddedLineIndex> load_index_cache(const std::filesystem::path& cache_dir,
                                               const std::string& app_id,
                                               const std::string& repo_head);

/// Head commit of a repository; FatalError if the repository is missing.
std::string repo_head_commit(const std::filesystem::path& repo);

struct InconsistencyRange {
  std::string app_id;
  std::string path;
  int line_start = 0;
  int line_end = 0;
};

struct InconsistencyLoadResult {
  std::vector<InconsistencyRange> ranges;
  std::vector<std::string> row_errors;      // malformed rows, with line numbers
  std::vector<std::string> dropped_unknown; // rows naming files we do not know
};

/// Loads the license-inconsistency table (CSV: app_id, path, line_start,
/// line_end). Ranges are validated against `file_line_counts`, keyed by
/// (app_id, path), holding the file length at the studied release.
InconsistencyLoadResult load_inconsistencies(
    const std::filesystem::path& csv_path,
    const std::map<std::pair<std::string, std::string>, int>& file_line_counts);

}  // namespace codeprov
