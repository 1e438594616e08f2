#include "codeprov/repo_ingest.hpp"

#include <algorithm>

#include <json.hpp>

#include "codeprov/normalize.hpp"
#include "codeprov/textutil.hpp"

namespace codeprov {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

AppRelease scan_release(const fs::path& root, const std::string& app_id,
                        const std::string& release_id, Timestamp release_date,
                        const std::set<std::string>& extensions, int header_lines,
                        ScanStats* stats) {
  if (!fs::is_directory(root)) throw FatalError("release tree not readable: " + root.string());
  AppRelease release;
  release.app_id = app_id;
  release.release_id = release_id;
  release.release_date = release_date;

  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(root, ec), end; it != end; it.increment(ec)) {
    if (ec) throw FatalError("cannot walk release tree: " + root.string() + ": " + ec.message());
    if (!it->is_regular_file(ec)) continue;
    files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  ScanStats local;
  for (const fs::path& file : files) {
    std::string ext = to_lower_ascii(file.extension().string());
    if (!extensions.count(ext)) {
      ++local.files_skipped_extension;
      continue;
    }
    FileRecord record;
    record.app_id = app_id;
    record.path = fs::relative(file, root).generic_string();
    bool had_invalid = false;
    try {
      record.text = read_file_lossy_utf8(file, had_invalid);
    } catch (const FatalError&) {
      ++local.files_unreadable;
      continue;
    }
    if (had_invalid) ++local.decode_warnings;
    record.line_count = static_cast<int>(split_lines(record.text).size());
    record.header_region = {1, std::min(header_lines, std::max(record.line_count, 1))};
    release.files.push_back(std::move(record));
    ++local.files_included;
  }
  std::sort(release.files.begin(), release.files.end(),
            [](const FileRecord& a, const FileRecord& b) { return a.path < b.path; });
  if (stats) *stats = local;
  return release;
}

namespace {

// Unquotes a git diff path ("a b\"c" style) when git chose to C-quote it.
std::string unquote_git_path(std::string_view raw) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') return std::string(raw);
  std::string out;
  for (size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\' && i + 2 < raw.size()) {
      ++i;
      switch (raw[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        default: out.push_back(raw[i]);
      }
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// Strips the "a/" or "b/" prefix of a diff path.
std::string strip_diff_prefix(std::string_view raw) {
  std::string path = unquote_git_path(trim(raw));
  if (path.size() > 2 && (path[0] == 'a' || path[0] == 'b') && path[1] == '/') {
    return path.substr(2);
  }
  return path;
}

}  // namespace

std::string repo_head_commit(const fs::path& repo) {
  std::string out;
  int status = run_command({"git", "-C", repo.string(), "rev-parse", "HEAD"}, out);
  if (status != 0) throw FatalError("not a usable git repository: " + repo.string());
  return std::string(trim(out));
}

AddedLineIndex index_history(const fs::path& repo, const std::vector<std::string>& paths,
                             std::vector<std::string>* warnings) {
  AddedLineIndex index;
  index.repo_head = repo_head_commit(repo);

  std::vector<std::string> cmd = {"git",         "-C",   repo.string(),
                                  "log",         "--first-parent", "--reverse",
                                  "--no-color",  "-M",   "-U0",
                                  "--pretty=format:%x01%H%x01%cI%x01%an", "-p"};
  if (!paths.empty()) {
    cmd.push_back("--");
    for (const auto& p : paths) cmd.push_back(p);
  }
  std::string out;
  int status = run_command(cmd, out);
  if (status != 0) throw FatalError("git log failed for repository: " + repo.string());

  struct PendingCommit {
    std::string hash;
    Timestamp date;
    std::string author;
    int sequence = 0;
    // touched path -> added normalized lines
    std::vector<std::pair<std::string, std::vector<std::string>>> touched;
    std::vector<std::pair<std::string, std::string>> renames;  // old -> new
  };

  std::vector<PendingCommit> commits;
  PendingCommit* current = nullptr;
  std::vector<std::string>* current_adds = nullptr;
  std::string rename_old;
  bool in_hunk = false;
  int sequence = 0;

  auto touch = [&](const std::string& path) -> std::vector<std::string>* {
    for (auto& [p, adds] : current->touched) {
      if (p == path) return &adds;
    }
    current->touched.emplace_back(path, std::vector<std::string>{});
    return &current->touched.back().second;
  };

  for (std::string_view line : split_lines(out)) {
    if (!line.empty() && line[0] == '\x01') {
      auto fields = split(line.substr(1), '\x01');
      if (fields.size() != 3) continue;
      auto date = parse_timestamp(fields[1]);
      commits.push_back({});
      current = &commits.back();
      current->hash = fields[0];
      current->author = fields[2];
      current->sequence = sequence++;
      if (date) {
        current->date = *date;
      } else if (warnings) {
        warnings->push_back("commit " + current->hash + ": unparseable date, epoch assumed");
      }
      current_adds = nullptr;
      in_hunk = false;
      continue;
    }
    if (!current) continue;
    if (line.rfind("diff --git ", 0) == 0) {
      in_hunk = false;
      // "diff --git a/<old> b/<new>"; split at the " b/" separator
      std::string_view rest = line.substr(11);
      size_t sep = rest.rfind(" b/");
      std::string new_path;
      if (sep != std::string_view::npos) {
        new_path = strip_diff_prefix(rest.substr(sep + 1));
      }
      if (!new_path.empty()) {
        current_adds = touch(new_path);
      } else {
        current_adds = nullptr;
      }
      rename_old.clear();
      continue;
    }
    if (line.rfind("rename from ", 0) == 0) {
      rename_old = unquote_git_path(line.substr(12));
      continue;
    }
    if (line.rfind("rename to ", 0) == 0) {
      if (!rename_old.empty()) {
        current->renames.emplace_back(rename_old, unquote_git_path(line.substr(10)));
        rename_old.clear();
      }
      continue;
    }
    if (line.rfind("+++ ", 0) == 0) {
      std::string target(trim(line.substr(4)));
      if (target != "/dev/null") {
        current_adds = touch(strip_diff_prefix(target));
      }
      continue;
    }
    if (line.rfind("@@", 0) == 0) {
      in_hunk = true;
      continue;
    }
    if (in_hunk && current_adds && !line.empty() && line[0] == '+') {
      for (std::string& normalized : normalize(line.substr(1), NormLevel::kType1)) {
        current_adds->push_back(std::move(normalized));
      }
    }
  }

  // Fold commits into per-path histories, applying renames as they occur.
  for (PendingCommit& commit : commits) {
    for (const auto& [old_path, new_path] : commit.renames) {
      auto it = index.paths.find(old_path);
      if (it == index.paths.end()) continue;
      PathHistory& target = index.paths[new_path];
      target.commits.insert(target.commits.begin(),
                            std::make_move_iterator(it->second.commits.begin()),
                            std::make_move_iterator(it->second.commits.end()));
      target.rename_followed = true;
      index.paths.erase(old_path);
    }
    for (auto& [path, adds] : commit.touched) {
      CommitAddedLines entry;
      entry.commit_id = commit.hash;
      entry.commit_date = commit.date;
      entry.author = commit.author;
      entry.added_lines = std::move(adds);
      index.paths[path].commits.push_back(std::move(entry));
    }
  }

  for (auto& [path, history] : index.paths) {
    std::stable_sort(history.commits.begin(), history.commits.end(),
                     [](const CommitAddedLines& a, const CommitAddedLines& b) {
                       return a.commit_date < b.commit_date;
                     });
  }
  return index;
}

void save_index_cache(const fs::path& cache_dir, const std::string& app_id,
                      const AddedLineIndex& index) {
  ordered_json doc;
  doc["repo_head"] = index.repo_head;
  ordered_json paths = ordered_json::object();
  for (const auto& [path, history] : index.paths) {
    ordered_json entry;
    entry["rename_followed"] = history.rename_followed;
    ordered_json commits = ordered_json::array();
    for (const auto& c : history.commits) {
      commits.push_back({{"commit", c.commit_id},
                         {"date", format_timestamp(c.commit_date)},
                         {"author", c.author},
                         {"added", c.added_lines}});
    }
    entry["commits"] = std::move(commits);
    paths[path] = std::move(entry);
  }
  doc["paths"] = std::move(paths);
  fs::create_directories(cache_dir);
  write_file(cache_dir / (app_id + "-" + index.repo_head.substr(0, 12) + ".json"), doc.dump(1));
}

std::optional<AddedLineIndex> load_index_cache(const fs::path& cache_dir,
                                               const std::string& app_id,
                                               const std::string& repo_head) {
  fs::path file = cache_dir / (app_id + "-" + repo_head.substr(0, 12) + ".json");
  if (!fs::exists(file)) return std::nullopt;
  ordered_json doc = ordered_json::parse(read_file(file));
  if (doc.value("repo_head", "") != repo_head) return std::nullopt;
  AddedLineIndex index;
  index.repo_head = repo_head;
  for (const auto& [path, entry] : doc.at("paths").items()) {
    PathHistory history;
    history.rename_followed = entry.value("rename_followed", false);
    for (const auto& c : entry.at("commits")) {
      CommitAddedLines commit;
      commit.commit_id = c.at("commit").get<std::string>();
      commit.commit_date = *parse_timestamp(c.at("date").get<std::string>());
      commit.author = c.value("author", "");
      for (const auto& l : c.at("added")) commit.added_lines.push_back(l.get<std::string>());
      history.commits.push_back(std::move(commit));
    }
    index.paths[path] = std::move(history);
  }
  return index;
}

InconsistencyLoadResult load_inconsistencies(
    const fs::path& csv_path,
    const std::map<std::pair<std::string, std::string>, int>& file_line_counts) {
  InconsistencyLoadResult result;
  std::string content = read_file(csv_path);
  auto rows = parse_csv(content);
  for (size_t i = 0; i < rows.size(); ++i) {
    const CsvRow& row = rows[i];
    if (i == 0 && !row.fields.empty() && row.fields[0] == "app_id") continue;  // header
    auto bad = [&](const std::string& why) {
      result.row_errors.push_back("line " + std::to_string(row.line_number) + ": " + why);
    };
    if (row.fields.size() != 4) {
      bad("expected 4 columns");
      continue;
    }
    InconsistencyRange range;
    range.app_id = row.fields[0];
    range.path = row.fields[1];
    try {
      range.line_start = std::stoi(row.fields[2]);
      range.line_end = std::stoi(row.fields[3]);
    } catch (const std::exception&) {
      bad("non-numeric line bounds");
      continue;
    }
    if (range.line_start < 1 || range.line_start > range.line_end) {
      bad("invalid range " + row.fields[2] + ".." + row.fields[3]);
      continue;
    }
    auto it = file_line_counts.find({range.app_id, range.path});
    if (it == file_line_counts.end()) {
      result.dropped_unknown.push_back("line " + std::to_string(row.line_number) + ": unknown file " +
                                       range.app_id + ":" + range.path);
      continue;
    }
    if (range.line_end > it->second) {
      bad("range exceeds file length " + std::to_string(it->second));
      continue;
    }
    result.ranges.push_back(std::move(range));
  }
  return result;
}

}  // namespace codeprov
